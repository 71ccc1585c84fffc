//! Plain CSV tables of floating-point columns.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

/// Render equal-length columns under `header`. Values use the shortest
/// round-trip representation, so output is bit-reproducible.
pub fn render(header: &[&str], columns: &[&[f64]]) -> Result<String> {
    if header.len() != columns.len() {
        return Err(Error::invalid("CSV header and column count differ"));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
        return Err(Error::GridMismatch {
            expected: rows,
            found: bad.len(),
        });
    }
    let mut out = header.join(",");
    out.push('\n');
    for r in 0..rows {
        for (k, col) in columns.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write!(out, "{}", col[r]).expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write(path: impl AsRef<Path>, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    std::fs::write(path, render(header, columns)?)?;
    Ok(())
}

/// Parse a numeric CSV with a header row. Returns the header and the columns.
pub fn parse(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::invalid("empty CSV"))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::invalid(format!(
                "CSV row {} has {} fields, expected {}",
                lineno + 2,
                fields.len(),
                header.len()
            )));
        }
        for (col, field) in cols.iter_mut().zip(fields) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("CSV row {}: cannot parse `{}`", lineno + 2, field.trim())))?;
            col.push(v);
        }
    }
    Ok((header, cols))
}

pub fn read(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    parse(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let a = [0.1, 1.0 / 3.0, -2.5e-300];
        let b = [1.0, 2.0, f64::MAX];
        let text = render(&["a", "b"], &[&a, &b]).unwrap();
        let (h, cols) = parse(&text).unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(cols[0], a);
        assert_eq!(cols[1], b);
    }

    #[test]
    fn ragged_columns_rejected() {
        assert!(render(&["a", "b"], &[&[1.0], &[1.0, 2.0]]).is_err());
    }
}
