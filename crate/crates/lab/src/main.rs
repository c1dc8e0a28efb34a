use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use parabola_lab::{Golden, LabError, EXIT_BREACH, EXIT_CONFIG, EXIT_OK};

#[derive(Parser)]
#[command(name = "lab", version, about = "Run and verify parabola experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Compare report.json byte-for-byte with this file (written if absent).
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Re-check a report.json without rerunning it.
    Verify {
        #[arg(long)]
        report: PathBuf,
    },
}

fn fail(e: LabError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run { config, golden, threads } => {
            if let Some(n) = threads {
                if n == 0 {
                    return fail(LabError::Config("--threads must be at least 1".into()));
                }
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: {e}");
                }
            }
            let cfg = match parabola_lab::ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match parabola_lab::run(&cfg, golden.as_deref()) {
                Ok(outcome) => {
                    for c in &outcome.report.checks {
                        println!("{}", c.line());
                    }
                    match outcome.golden {
                        Golden::Unused => {}
                        Golden::Written => println!("golden written"),
                        Golden::Matched => println!("PASS golden match"),
                        Golden::Mismatched => println!("FAIL golden mismatch"),
                    }
                    println!("report: {}", outcome.report_path.display());
                    ExitCode::from(outcome.exit_code())
                }
                Err(e) => fail(e),
            }
        }
        Command::Verify { report } => match parabola_lab::verify_file(&report) {
            Ok(problems) if problems.is_empty() => {
                println!("ok");
                ExitCode::from(EXIT_OK)
            }
            Ok(problems) => {
                for p in &problems {
                    println!("{p}");
                }
                ExitCode::from(EXIT_BREACH)
            }
            Err(e) => fail(e),
        },
    }
}
