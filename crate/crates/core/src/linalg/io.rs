//! JSON wire format for matrices:
//! `{"n": 2, "entries": [[[re, im], [re, im]], [[re, im], [re, im]]]}`, row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexSquareMatrix;
use crate::scalar::{cplx, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix<T: Real>(m: &ComplexSquareMatrix<T>) -> Self {
        Self {
            n: m.n(),
            entries: m
                .rows()
                .into_iter()
                .map(|r| r.into_iter().map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()]).collect())
                .collect(),
        }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<ComplexSquareMatrix<T>> {
        if self.entries.len() != self.n || self.entries.iter().any(|r| r.len() != self.n) {
            return Err(Error::NotSquare(format!(
                "declared n = {} but rows have lengths {:?}",
                self.n,
                self.entries.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        if self.entries.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        ComplexSquareMatrix::from_rows(
            self.entries
                .iter()
                .map(|r| r.iter().map(|&[re, im]| cplx(T::lit(re), T::lit(im))).collect())
                .collect(),
        )
    }
}

pub fn matrix_to_json<T: Real>(m: &ComplexSquareMatrix<T>) -> String {
    serde_json::to_string(&MatrixJson::from_matrix(m)).expect("matrix serializes")
}

pub fn matrix_from_json<T: Real>(s: &str) -> Result<ComplexSquareMatrix<T>> {
    let j: MatrixJson = serde_json::from_str(s)?;
    j.to_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_layout() {
        let m: ComplexSquareMatrix<f64> =
            matrix_from_json(r#"{"n":2,"entries":[[[1,0],[0,-1]],[[0,1],[1,0]]]}"#).unwrap();
        assert_eq!(m[(0, 1)], cplx(0.0, -1.0));
        assert_eq!(m[(1, 0)], cplx(0.0, 1.0));
    }

    #[test]
    fn rejects_non_square() {
        let e = matrix_from_json::<f64>(r#"{"n":2,"entries":[[[1,0],[0,0]],[[0,0]]]}"#);
        assert!(matches!(e, Err(Error::NotSquare(_))));
        let e = matrix_from_json::<f64>(r#"{"n":3,"entries":[[[1,0]]]}"#);
        assert!(matches!(e, Err(Error::NotSquare(_))));
    }

    #[test]
    fn rejects_non_finite() {
        // JSON has no NaN literal; exercise the check through the struct.
        let j = MatrixJson {
            n: 1,
            entries: vec![vec![[f64::INFINITY, 0.0]]],
        };
        assert_eq!(j.to_matrix::<f64>(), Err(Error::NonFinite));
    }
}
