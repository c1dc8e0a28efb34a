use std::path::Path;
use std::process::Command;

fn lab(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lab")).args(args).output().expect("spawn lab");
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().expect("exit code"), text)
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn pipeline_config(dir: &Path, out: &str) -> String {
    let body = format!(
        r#"{{"experiment": "pipeline", "s": 0.5, "delta_list": [0.0009765625], "seed": 3, "output_dir": {:?}}}"#,
        dir.join(out)
    );
    write_config(dir, &format!("{out}.json"), &body)
}

#[test]
fn identities_pass_and_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for run in ["a", "b"] {
        let body = format!(r#"{{"experiment": "identities", "seed": 11, "output_dir": {:?}}}"#, dir.path().join(run));
        let cfg = write_config(dir.path(), &format!("{run}.json"), &body);
        let (code, text) = lab(&["run", "--config", &cfg, "--threads", "1"]);
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("PASS circle_identity_max_residual"));
        reports.push(std::fs::read(dir.path().join(run).join("report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let report = dir.path().join("a/report.json");
    assert_eq!(lab(&["verify", "--report", report.to_str().unwrap()]).0, 0);
}

#[test]
fn config_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = [
        r#"{"experiment": "kakeya", "seed": 1}"#,
        r#"{"experiment": "identities"}"#,
        r#"{"experiment": "pipeline", "seed": 1, "delta_list": [0.001]}"#,
        r#"{"experiment": "l4_slope", "seed": 1, "delta_list": [0.0625], "R_list": [2, 4, 6, 8]}"#,
        r#"{"experiment": "identities", "seed": 1, "colour": "red"}"#,
        "not json",
    ];
    for (k, body) in bad.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{k}.json"), body);
        let (code, text) = lab(&["run", "--config", &cfg]);
        assert_eq!(code, 3, "{body}: {text}");
    }
    let (code, text) = lab(&["run", "--config", &write_config(dir.path(), "u.json", bad[0])]);
    assert_eq!(code, 3);
    assert!(text.contains("unknown experiment"), "{text}");
    assert_eq!(lab(&["run"]).0, 3);
    assert_eq!(lab(&["frobnicate"]).0, 3);
    assert_eq!(lab(&["--help"]).0, 0);
}

#[test]
fn missing_config_file_is_io_error() {
    assert_eq!(lab(&["run", "--config", "/nonexistent/config.json"]).0, 1);
}

#[test]
fn golden_match_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let golden = dir.path().join("golden.json");
    let golden = golden.to_str().unwrap();

    let (code, text) = lab(&["run", "--config", &pipeline_config(dir.path(), "first"), "--golden", golden]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("golden written"));

    let (code, text) = lab(&["run", "--config", &pipeline_config(dir.path(), "second"), "--golden", golden]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("PASS golden match"));

    let mut bytes = std::fs::read(golden).unwrap();
    let at = bytes.iter().position(|&b| b == b'7').unwrap();
    bytes[at] = b'8';
    std::fs::write(golden, &bytes).unwrap();
    let (code, text) = lab(&["run", "--config", &pipeline_config(dir.path(), "third"), "--golden", golden]);
    assert_eq!(code, 2, "{text}");
    assert!(text.contains("FAIL golden mismatch"));
}

#[test]
fn verify_catches_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = lab(&["run", "--config", &pipeline_config(dir.path(), "out")]);
    assert_eq!(code, 0);
    let path = dir.path().join("out/report.json");
    assert_eq!(lab(&["verify", "--report", path.to_str().unwrap()]).0, 0);

    let mut report: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let slices = report["data"]["candidate"]["per_line"].as_array_mut().unwrap();
    slices[0]["width"] = serde_json::json!(0.0);
    report["checks"][0]["value"] = serde_json::json!(1e9);
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_vec(&report).unwrap()).unwrap();
    let (code, text) = lab(&["verify", "--report", tampered.to_str().unwrap()]);
    assert_eq!(code, 2, "{text}");
    assert!(text.contains("outside the recorded width"), "{text}");
}

#[test]
fn energy_bench_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(r#"{{"experiment": "energy_bench", "seed": 5, "output_dir": {:?}}}"#, dir.path().join("e"));
    let (code, text) = lab(&["run", "--config", &write_config(dir.path(), "e.json", &body)]);
    assert_eq!(code, 0, "{text}");
    let table = std::fs::read_to_string(dir.path().join("e/tables/energy_bench.csv")).unwrap();
    assert!(table.starts_with("n,delta_tol,count,method,ns,points\n"));
    assert!(!table.contains('\r'));
}

#[test]
fn threshold_breach_exits_2() {
    // At these coarse scales the product covering is far from its limiting slope.
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        r#"{{"experiment": "sharpness", "s": 0.2, "delta_list": [0.5, 0.25, 0.125, 0.0625], "seed": 1, "output_dir": {:?}}}"#,
        dir.path().join("s")
    );
    let (code, text) = lab(&["run", "--config", &write_config(dir.path(), "s.json", &body)]);
    assert_eq!(code, 2, "{text}");
    assert!(text.contains("FAIL sharpness_slope_deviation"));
    let plot = std::fs::read_to_string(dir.path().join("s/plotdata/product_covering_vs_delta.csv")).unwrap();
    assert!(plot.starts_with("x,y,fit,slope,slope_lo,slope_hi\n"));
    let report = dir.path().join("s/report.json");
    let (code, text) = lab(&["verify", "--report", report.to_str().unwrap()]);
    assert_eq!(code, 2, "{text}");
}
