//! CSV ingestion: a header naming `x` and `y`, one pair per row, lines
//! starting with `#` skipped.

use std::io::Read;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub fn read_pairs_from_path(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Input(format!("cannot open {}: {}", path.display(), e)))?;
    read_pairs(file)
}

pub fn read_pairs<R: Read>(reader: R) -> CliResult<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("unreadable header: {}", e)))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| {
                CliError::Input(format!(
                    "header must contain columns `x` and `y` (missing `{}`)",
                    name
                ))
            })
    };
    let (ix, iy) = (find("x")?, find("y")?);

    let mut pairs = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CliError::Input(format!("line {}: {}", line, e))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        // row numbers count data rows, starting at 1
        let row = pairs.len() + 1;
        let cell = |i: usize, name: &str| -> CliResult<f64> {
            let raw = record.get(i).unwrap_or("");
            let value: f64 = raw.parse().map_err(|_| {
                CliError::Input(format!(
                    "row {} (line {}): `{}` is not a number in column {}",
                    row, line, raw, name
                ))
            })?;
            if !value.is_finite() {
                return Err(CliError::Input(format!(
                    "row {} (line {}): non-finite value `{}` in column {}",
                    row, line, raw, name
                )));
            }
            Ok(value)
        };
        pairs.push((cell(ix, "x")?, cell(iy, "y")?));
    }
    Ok(pairs)
}
