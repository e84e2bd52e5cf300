//! CSV emission shared by flows, scans and solver traces.
//!
//! Floats are written with 17 significant digits in scientific notation,
//! `.` as decimal separator, independent of locale.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Formats a float with 17 significant digits.
pub fn fmt_real<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64_lossy())
}

/// Builds a CSV document from a header and string rows.
pub fn to_csv<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_real(0.1f64), "1.0000000000000001e-1");
        assert_eq!(fmt_real(-2.0f64), "-2.0000000000000000e0");
    }

    #[test]
    fn csv_layout() {
        let s = to_csv(&["a", "b"], vec![vec!["1".to_string(), "2".to_string()]]).unwrap();
        assert_eq!(s, "a,b\n1,2\n");
    }
}
