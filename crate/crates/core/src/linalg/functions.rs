//! Exponential and principal logarithm through the spectral calculus.

use num_complex::Complex;

use crate::error::Result;
use crate::linalg::matrix::ComplexSquareMatrix;
use crate::linalg::spectral::{spectral_normal, SpectralDecomposition};
use crate::linalg::types::{SkewHermitianTangent, UnitaryPoint};
use crate::scalar::{cplx, principal_angle, Real};
use crate::tolerance::Tolerances;

/// Principal logarithm of a unitary, with the branch-cut flag.
#[derive(Debug, Clone)]
pub struct PrincipalLog<T: Real> {
    pub tangent: SkewHermitianTangent<T>,
    /// Set when some eigenvalue lies within `branch_tol` of `-1`; the log is
    /// then one of several with norm `pi` and geodesics are not unique.
    pub branch_ambiguity: bool,
}

/// Eigen-angles of a unitary in `(-pi, pi]`, ascending, with branch flag.
#[derive(Debug, Clone)]
pub struct UnitaryAngles<T: Real> {
    pub decomposition: SpectralDecomposition<T>,
    pub angles: Vec<T>,
    pub branch_ambiguity: bool,
}

/// Spectral angles of `u`. Eigenvalues within `branch_tol` of `-1` get angle
/// exactly `pi`.
pub fn unitary_angles<T: Real>(u: &UnitaryPoint<T>, tol: &Tolerances) -> Result<UnitaryAngles<T>> {
    let decomposition = spectral_normal(u.mat(), tol)?;
    let branch = Tolerances::get::<T>(tol.branch_tol);
    let minus_one = cplx(-T::one(), T::zero());
    let mut branch_ambiguity = false;
    let angles = decomposition
        .eigenvalues
        .iter()
        .map(|&z| {
            if (z - minus_one).norm() <= branch {
                branch_ambiguity = true;
                T::PI()
            } else {
                principal_angle(z)
            }
        })
        .collect();
    Ok(UnitaryAngles {
        decomposition,
        angles,
        branch_ambiguity,
    })
}

/// `exp(x)` for skew-Hermitian `x`.
pub fn exp_skew<T: Real>(x: &SkewHermitianTangent<T>, tol: &Tolerances) -> Result<UnitaryPoint<T>> {
    let dec = spectral_normal(x.mat(), tol)?;
    Ok(exp_from_decomposition(&dec, T::one()))
}

/// `exp(t x)` given the decomposition of `x`. Only imaginary parts of the
/// eigenvalues are used, so the result is unitary to working precision.
pub(crate) fn exp_from_decomposition<T: Real>(dec: &SpectralDecomposition<T>, t: T) -> UnitaryPoint<T> {
    let m = dec.map(|z| Complex::from_polar(T::one(), z.im * t));
    UnitaryPoint::assume_unitary(m)
}

/// Principal logarithm: the skew-Hermitian `x` with `exp(x) = u` and spectrum in
/// `i(-pi, pi]`.
pub fn log_unitary<T: Real>(u: &UnitaryPoint<T>, tol: &Tolerances) -> Result<PrincipalLog<T>> {
    let ua = unitary_angles(u, tol)?;
    let d: Vec<_> = ua.angles.iter().map(|&a| cplx(T::zero(), a)).collect();
    let m = ComplexSquareMatrix::conjugate_diag(ua.decomposition.eigenvectors.mat(), &d);
    Ok(PrincipalLog {
        tangent: SkewHermitianTangent::project(&m),
        branch_ambiguity: ua.branch_ambiguity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norms::op_norm;
    use std::f64::consts::PI;

    type M = ComplexSquareMatrix<f64>;

    #[test]
    fn exp_of_zero_and_diagonal() {
        let tol = Tolerances::default();
        let e = exp_skew(&SkewHermitianTangent::<f64>::zero(3), &tol).unwrap();
        assert_eq!(e.mat(), &M::identity(3));
        let angles = [0.4, -1.3, 2.9];
        let e = exp_skew(&SkewHermitianTangent::diag(&angles), &tol).unwrap();
        assert!((e.mat() - &M::diag_phases(&angles)).max_abs() < 1e-15);
    }

    #[test]
    fn log_of_identity_is_zero() {
        let l = log_unitary(&UnitaryPoint::<f64>::identity(4), &Tolerances::default()).unwrap();
        assert_eq!(l.tangent.mat().max_abs(), 0.0);
        assert!(!l.branch_ambiguity);
    }

    #[test]
    fn log_on_branch_cut_is_flagged() {
        let u = UnitaryPoint::<f64>::phase(PI);
        let l = log_unitary(&u, &Tolerances::default()).unwrap();
        assert!(l.branch_ambiguity);
        assert!((l.tangent.mat()[(0, 0)] - cplx(0.0, PI)).norm() < 1e-15);
        // same for a tiny perturbation below the cut
        let u = UnitaryPoint::<f64>::phase(-PI + 1e-10);
        let l = log_unitary(&u, &Tolerances::default()).unwrap();
        assert!(l.branch_ambiguity);
        assert!((l.tangent.mat()[(0, 0)].im - PI).abs() < 1e-15);
    }

    #[test]
    fn chord_identity_on_diagonal() {
        let tol = Tolerances::default();
        for &a in &[0.1, 1.0, 2.5, PI] {
            let x = SkewHermitianTangent::diag(&[a, -0.3 * a, 0.0]);
            let e = exp_skew(&x, &tol).unwrap();
            let lhs = op_norm(&(&M::identity(3) - e.mat()));
            assert!((lhs - 2.0 * (a / 2.0).sin()).abs() < 1e-14);
        }
    }
}
