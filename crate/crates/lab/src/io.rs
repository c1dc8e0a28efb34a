//! Output formats: JSON with 17-significant-digit floats, CSV tables, and
//! the binary grid dump.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use parabola_core::fourier::FourierGrid;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::LabError;

/// `x` with 17 significant digits, e.g. `2.2045855379188713e-4`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".to_string()
    }
}

/// Pretty JSON whose floats always carry 17 significant digits, so a
/// written report parses back to the same bits.
struct ExactFloats(PrettyFormatter<'static>);

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with exact floats and a final newline.
/// Non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, LabError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| LabError::Report(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), LabError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| LabError::io(path, e))
}

/// A CSV table; cells are preformatted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.to_string(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// LF line endings, `.` decimals.
    pub fn to_csv(&self) -> Result<Vec<u8>, LabError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let csv_err = |e: csv::Error| LabError::Report(e.to_string());
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| LabError::Report(e.to_string()))
    }
}

/// `ξ1, ξ2, Re, Im` for the samples inside the disc.
pub fn grid_table(name: &str, grid: &FourierGrid) -> Table {
    let mut t = Table::new(name, &["xi1", "xi2", "re", "im"]);
    for (i, j, v) in grid.disc_samples() {
        let xi = grid.xi(i, j);
        t.push(vec![fmt_f64(xi[0]), fmt_f64(xi[1]), fmt_f64(v.re), fmt_f64(v.im)]);
    }
    t
}

pub const FGRD_MAGIC: &[u8; 4] = b"FGRD";
pub const FGRD_VERSION: u16 = 1;

/// Binary dump: `"FGRD"`, version `u16`, reserved `u16`, `R` and `h` as
/// `f64`, side as `u64`, then `side²` row-major `(re, im)` pairs of `f64`.
/// All little-endian.
pub fn grid_dump(grid: &FourierGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + 16 * grid.values().len());
    out.extend_from_slice(FGRD_MAGIC);
    out.extend_from_slice(&FGRD_VERSION.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&grid.radius().to_le_bytes());
    out.extend_from_slice(&grid.spacing().to_le_bytes());
    out.extend_from_slice(&(grid.side() as u64).to_le_bytes());
    for v in grid.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

/// Header and samples of a dump written by [`grid_dump`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridDump {
    pub radius: f64,
    pub spacing: f64,
    pub side: usize,
    pub values: Vec<(f64, f64)>,
}

pub fn read_grid_dump(bytes: &[u8]) -> Result<GridDump, LabError> {
    let bad = |what: &str| LabError::Report(format!("grid dump: {what}"));
    if bytes.len() < 32 || &bytes[..4] != FGRD_MAGIC {
        return Err(bad("missing FGRD header"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FGRD_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let f = |at: usize| f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let side = u64::from_le_bytes(bytes[24..32].try_into().unwrap()) as usize;
    let body = &bytes[32..];
    if body.len() != side * side * 16 {
        return Err(bad(&format!("expected {} sample bytes, found {}", side * side * 16, body.len())));
    }
    let values = body
        .chunks_exact(16)
        .map(|c| (f64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap())))
        .collect();
    Ok(GridDump { radius: f(8), spacing: f(16), side, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use parabola_core::discretized::{Atom, FrostmanMeasure};
    use parabola_core::fourier::evaluate_mu_hat;

    #[test]
    fn floats_keep_all_bits() {
        let xs: [f64; 7] = [0.1, 1.0 / 3.0, 2.2045855379188713e-4, -1e300, 5e-324, 0.0, 1.0];
        let json = to_json(&xs.to_vec()).unwrap();
        let back: Vec<f64> = serde_json::from_slice(&json).unwrap();
        for (a, b) in xs.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(String::from_utf8(json).unwrap().contains("3.3333333333333331e-1"));
        assert_eq!(to_json(&f64::NAN).unwrap(), b"null\n");
    }

    #[test]
    fn csv_uses_lf() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec!["1".into(), fmt_f64(0.5)]);
        assert_eq!(t.to_csv().unwrap(), b"a,b\n1,5.0000000000000000e-1\n");
    }

    #[test]
    fn dump_reads_back() {
        let mu = FrostmanMeasure::new(vec![Atom { point: [0.5, 0.25], weight: 1.0 }], 0.01).unwrap();
        let grid = evaluate_mu_hat(&mu, 1.0, 0.125).unwrap();
        let bytes = grid_dump(&grid);
        assert_eq!(&bytes[..4], b"FGRD");
        let back = read_grid_dump(&bytes).unwrap();
        assert_eq!((back.radius, back.spacing, back.side), (1.0, 0.125, 17));
        assert_eq!(back.values.len(), grid.values().len());
        assert_eq!(back.values[40], (grid.values()[40].re, grid.values()[40].im));
        assert!(read_grid_dump(&bytes[..40]).is_err());
    }
}
