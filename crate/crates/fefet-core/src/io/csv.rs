//! Deterministic CSV export: a header row, then data rows with floats
//! rendered at 9 significant digits so written files are byte-stable and
//! re-parse within 1e-9 relative.

use std::io::Write;

use crate::error::{Error, Result};

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum CsvValue {
    Float(f64),
    Int(i64),
    Str(String),
}

impl From<f64> for CsvValue {
    fn from(v: f64) -> Self {
        CsvValue::Float(v)
    }
}

impl From<i64> for CsvValue {
    fn from(v: i64) -> Self {
        CsvValue::Int(v)
    }
}

impl From<usize> for CsvValue {
    fn from(v: usize) -> Self {
        CsvValue::Int(v as i64)
    }
}

impl From<&str> for CsvValue {
    fn from(v: &str) -> Self {
        CsvValue::Str(v.to_string())
    }
}

/// Render a float with 9 digits of precision after the leading digit,
/// deterministically; re-parsing recovers the value within 1e-9 relative.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.is_finite() {
        format!("{v:.9e}")
    } else {
        format!("{v}")
    }
}

fn format_value(v: &CsvValue) -> String {
    match v {
        CsvValue::Float(f) => format_float(*f),
        CsvValue::Int(i) => i.to_string(),
        CsvValue::Str(s) => {
            debug_assert!(
                !s.contains(',') && !s.contains('"') && !s.contains('\n'),
                "CSV string cells must not need quoting"
            );
            s.clone()
        }
    }
}

/// Write a header row and data rows; every row must match the header arity.
pub fn write_csv<W: Write>(out: &mut W, columns: &[&str], rows: &[Vec<CsvValue>]) -> Result<()> {
    writeln!(out, "{}", columns.join(","))?;
    for row in rows {
        if row.len() != columns.len() {
            return Err(Error::Dimension {
                expected: format!("{} columns", columns.len()),
                got: format!("{} values", row.len()),
            });
        }
        let line: Vec<String> = row.iter().map(format_value).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Render a whole CSV document to a string.
pub fn csv_string(columns: &[&str], rows: &[Vec<CsvValue>]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, columns, rows)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_rows_give_header_only() {
        assert_eq!(csv_string(&["a", "b"], &[]).unwrap(), "a,b\n");
    }

    #[test]
    fn zero_row_renders_as_zeros() {
        let rows = vec![vec![0.0.into(), 0.0.into(), 0i64.into()]];
        assert_eq!(csv_string(&["x", "y", "n"], &rows).unwrap(), "x,y,n\n0,0,0\n");
    }

    #[test]
    fn arity_mismatch_rejected() {
        let rows = vec![vec![1.0.into()]];
        assert!(matches!(
            csv_string(&["a", "b"], &rows),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn reparse_recovers_values_within_1e9() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let values: Vec<f64> =
            (0..200).map(|_| rng.gen_range(-1.0..1.0) * 10f64.powi(rng.gen_range(-9..9))).collect();
        let rows: Vec<Vec<CsvValue>> = values.iter().map(|&v| vec![v.into()]).collect();
        let text = csv_string(&["v"], &rows).unwrap();
        for (line, &want) in text.lines().skip(1).zip(&values) {
            let got: f64 = line.parse().unwrap();
            assert!(
                (got - want).abs() <= 1e-9 * want.abs().max(1e-300),
                "{got} vs {want}"
            );
        }
    }

    #[test]
    fn output_is_deterministic() {
        let rows = vec![vec![1.25.into(), "mode".into()], vec![(-3.5e-7).into(), "x".into()]];
        let a = csv_string(&["v", "tag"], &rows).unwrap();
        let b = csv_string(&["v", "tag"], &rows).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, "v,tag\n1.250000000e0,mode\n-3.500000000e-7,x\n");
    }
}
