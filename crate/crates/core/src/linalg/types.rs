use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexSquareMatrix;
use crate::linalg::norms::op_norm;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Which trace defines the Schatten norms and inner products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceConvention {
    /// The usual trace `Tr`.
    #[default]
    Standard,
    /// `tau = Tr / n`, so `tau(id) = 1`.
    Normalized,
}

impl TraceConvention {
    /// Factor applied to `Tr` for this convention.
    pub fn weight<T: Real>(self, n: usize) -> T {
        match self {
            TraceConvention::Standard => T::one(),
            TraceConvention::Normalized => T::one() / T::lit(n as f64),
        }
    }
}

/// Skew-Hermitian matrix `x* = -x`: a tangent vector at the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewHermitianTangent<T: Real> {
    mat: ComplexSquareMatrix<T>,
}

impl<T: Real> SkewHermitianTangent<T> {
    /// Validates `||m + m*|| <= skew_tol ||m||` and stores `(m - m*)/2`.
    pub fn new(m: ComplexSquareMatrix<T>, tol: &Tolerances) -> Result<Self> {
        let sym = &m + &m.adjoint();
        let residual = op_norm(&sym);
        let bound = Tolerances::get::<T>(tol.skew_tol) * op_norm(&m);
        if residual > bound && residual > T::min_positive_value() {
            return Err(Error::NotSkewHermitian {
                residual: residual.to_f64_lossy(),
            });
        }
        Ok(Self { mat: m.skew_part() })
    }

    /// Projects an arbitrary matrix onto its skew-Hermitian part.
    pub fn project(m: &ComplexSquareMatrix<T>) -> Self {
        Self { mat: m.skew_part() }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            mat: ComplexSquareMatrix::zeros(n),
        }
    }

    /// `diag(i theta_1, ..., i theta_n)`.
    pub fn diag(angles: &[T]) -> Self {
        let d: Vec<_> = angles.iter().map(|&a| crate::scalar::cplx(T::zero(), a)).collect();
        Self {
            mat: ComplexSquareMatrix::from_diag(&d),
        }
    }

    #[inline]
    pub fn mat(&self) -> &ComplexSquareMatrix<T> {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexSquareMatrix<T> {
        self.mat
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.mat.n()
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            mat: self.mat.scale_real(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat - &other.mat,
        }
    }

    /// Operator norm.
    pub fn norm_inf(&self) -> T {
        op_norm(&self.mat)
    }

    /// `u x u*`, again skew-Hermitian.
    pub fn conjugate_by(&self, u: &UnitaryPoint<T>) -> Self {
        Self::project(&(&(u.mat() * &self.mat) * &u.mat().adjoint()))
    }

    pub fn cast<U: Real>(&self) -> SkewHermitianTangent<U> {
        SkewHermitianTangent {
            mat: self.mat.cast(),
        }
    }
}

/// Unitary matrix `u* u = id`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryPoint<T: Real> {
    mat: ComplexSquareMatrix<T>,
}

impl<T: Real> UnitaryPoint<T> {
    /// Validates `||m* m - id|| <= unit_tol`.
    pub fn new(m: ComplexSquareMatrix<T>, tol: &Tolerances) -> Result<Self> {
        let residual = unitarity_residual(&m);
        if residual > Tolerances::get::<T>(tol.unit_tol) {
            return Err(Error::NotUnitary {
                residual: residual.to_f64_lossy(),
            });
        }
        Ok(Self { mat: m })
    }

    /// Wraps a matrix known to be unitary by construction.
    pub(crate) fn assume_unitary(m: ComplexSquareMatrix<T>) -> Self {
        Self { mat: m }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mat: ComplexSquareMatrix::identity(n),
        }
    }

    /// `diag(e^{i theta_k})`.
    pub fn diag_phases(angles: &[T]) -> Self {
        Self {
            mat: ComplexSquareMatrix::diag_phases(angles),
        }
    }

    /// Scalar unitary `e^{i theta}` in dimension one.
    pub fn phase(theta: T) -> Self {
        Self::diag_phases(&[theta])
    }

    #[inline]
    pub fn mat(&self) -> &ComplexSquareMatrix<T> {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexSquareMatrix<T> {
        self.mat
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.mat.n()
    }

    /// `u^{-1} = u*`.
    pub fn inverse(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    /// `u^{-1} v`.
    pub fn left_quotient(&self, v: &Self) -> Self {
        Self {
            mat: &self.mat.adjoint() * &v.mat,
        }
    }

    pub fn is_symmetry(&self, tol: T) -> bool {
        (&self.mat - &self.mat.adjoint()).max_abs() <= tol
    }

    pub fn cast<U: Real>(&self) -> UnitaryPoint<U> {
        UnitaryPoint {
            mat: self.mat.cast(),
        }
    }
}

impl<'a, T: Real> Mul<&'a UnitaryPoint<T>> for &'a UnitaryPoint<T> {
    type Output = UnitaryPoint<T>;
    fn mul(self, rhs: &'a UnitaryPoint<T>) -> UnitaryPoint<T> {
        UnitaryPoint {
            mat: &self.mat * &rhs.mat,
        }
    }
}

/// `||m* m - id||_inf`.
pub fn unitarity_residual<T: Real>(m: &ComplexSquareMatrix<T>) -> T {
    let g = &m.adjoint() * m;
    op_norm(&(&g - &ComplexSquareMatrix::identity(m.n())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn skew_validation_and_canonical_form() {
        let tol = Tolerances::default();
        let x = ComplexSquareMatrix::<f64>::from_rows(vec![
            vec![cplx(0.0, 1.0), cplx(1.0, 2.0)],
            vec![cplx(-1.0, 2.0), cplx(0.0, -3.0)],
        ])
        .unwrap();
        let t = SkewHermitianTangent::new(x.clone(), &tol).unwrap();
        assert_eq!(t.mat(), &x);
        let bad = ComplexSquareMatrix::<f64>::identity(2);
        assert!(matches!(
            SkewHermitianTangent::new(bad, &tol),
            Err(Error::NotSkewHermitian { .. })
        ));
    }

    #[test]
    fn unitary_validation() {
        let tol = Tolerances::default();
        assert!(UnitaryPoint::new(ComplexSquareMatrix::<f64>::diag_phases(&[0.2, 1.0]), &tol).is_ok());
        let m = ComplexSquareMatrix::<f64>::from_real_rows(&[&[1.0, 0.1], &[0.0, 1.0]]).unwrap();
        assert!(matches!(UnitaryPoint::new(m, &tol), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn normalized_trace_weight() {
        assert_eq!(TraceConvention::Normalized.weight::<f64>(4), 0.25);
        assert_eq!(TraceConvention::Standard.weight::<f64>(4), 1.0);
    }
}
