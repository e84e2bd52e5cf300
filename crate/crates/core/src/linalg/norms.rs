//! Operator norm, Schatten norms and the trace inner product.

use crate::error::{Error, Result};
use crate::linalg::jacobi::hermitian_eigen;
use crate::linalg::matrix::ComplexSquareMatrix;
use crate::linalg::types::{SkewHermitianTangent, TraceConvention};
use crate::scalar::Real;

const GRAM_SWEEPS: usize = 100;

/// Eigenvalues of `m* m`, clamped to be nonnegative, ascending.
fn gram_spectrum<T: Real>(m: &ComplexSquareMatrix<T>) -> Vec<T> {
    let g = &m.adjoint() * m;
    // Entries are finite by construction, and the Jacobi sweep converges for
    // any finite Hermitian input well within the sweep budget.
    hermitian_eigen(&g, GRAM_SWEEPS)
        .expect("Jacobi converges on finite Hermitian input")
        .values
        .into_iter()
        .map(|x| x.max(T::zero()))
        .collect()
}

/// Singular values of `m`, descending.
pub fn singular_values<T: Real>(m: &ComplexSquareMatrix<T>) -> Vec<T> {
    let mut s: Vec<T> = gram_spectrum(m).into_iter().map(T::sqrt).collect();
    s.reverse();
    s
}

/// Operator norm `||m||_inf`: the largest singular value.
pub fn op_norm<T: Real>(m: &ComplexSquareMatrix<T>) -> T {
    if m.max_abs() == T::zero() {
        return T::zero();
    }
    if m.n() == 1 {
        return m[(0, 0)].norm();
    }
    gram_spectrum(m).last().copied().unwrap_or_else(T::zero).sqrt()
}

fn check_p(p: u32) -> Result<()> {
    if p < 2 || !p.is_multiple_of(2) {
        Err(Error::InvalidP(p))
    } else {
        Ok(())
    }
}

/// `(w * sum sigma_i^p)^{1/p}` for singular values already computed.
pub(crate) fn schatten_from_moduli<T: Real>(
    moduli: impl IntoIterator<Item = T>,
    p: u32,
    conv: TraceConvention,
    n: usize,
) -> T {
    let s: Vec<T> = moduli.into_iter().map(T::abs).collect();
    let scale = s.iter().copied().fold(T::zero(), T::max);
    if scale == T::zero() {
        return T::zero();
    }
    let sum: T = s.iter().map(|&x| (x / scale).powi(p as i32)).sum();
    scale * (sum * conv.weight::<T>(n)).powf(T::one() / T::lit(p as f64))
}

/// Schatten `p`-norm `Tr((m* m)^{p/2})^{1/p}`, or with `tau = Tr/n` under the
/// normalized convention. `p` must be an even integer `>= 2`.
pub fn schatten_norm<T: Real>(m: &ComplexSquareMatrix<T>, p: u32, conv: TraceConvention) -> Result<T> {
    check_p(p)?;
    if p == 2 {
        let f = m.frobenius_norm();
        return Ok(f * conv.weight::<T>(m.n()).sqrt());
    }
    let moduli = gram_spectrum(m).into_iter().map(T::sqrt);
    Ok(schatten_from_moduli(moduli, p, conv, m.n()))
}

pub(crate) fn validate_p(p: u32) -> Result<()> {
    check_p(p)
}

/// `Re Tr(y* x)` scaled by the trace convention.
pub fn trace_inner<T: Real>(
    x: &SkewHermitianTangent<T>,
    y: &SkewHermitianTangent<T>,
    conv: TraceConvention,
) -> Result<T> {
    x.mat().check_same_dim(y.mat())?;
    let (a, b) = (x.mat().entries(), y.mat().entries());
    // Re Tr(y* x) = sum_ij Re(conj(y_ij) x_ij)
    let s: T = a.iter().zip(b).map(|(&xi, &yi)| (yi.conj() * xi).re).sum();
    Ok(s * conv.weight::<T>(x.n()))
}

/// Hessian form `H(y, z) = -2 Tr(y z)` of the squared 2-norm on skew-Hermitian
/// matrices (weighted by the trace convention).
pub fn hessian_form<T: Real>(
    y: &SkewHermitianTangent<T>,
    z: &SkewHermitianTangent<T>,
    conv: TraceConvention,
) -> Result<T> {
    y.mat().check_same_dim(z.mat())?;
    let tr = (y.mat() * z.mat()).trace();
    Ok(-T::lit(2.0) * tr.re * conv.weight::<T>(y.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type M = ComplexSquareMatrix<f64>;

    #[test]
    fn op_norm_examples() {
        assert_eq!(op_norm(&M::zeros(3)), 0.0);
        let d = M::from_diag(&[cplx(0.0, 3.0), cplx(0.0, -2.0)]);
        assert!((op_norm(&d) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn schatten_examples() {
        let id = M::identity(4);
        assert!((schatten_norm(&id, 2, TraceConvention::Standard).unwrap() - 2.0).abs() < 1e-14);
        assert!((schatten_norm(&id, 2, TraceConvention::Normalized).unwrap() - 1.0).abs() < 1e-14);
        let d = M::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        let v = schatten_norm(&d, 4, TraceConvention::Standard).unwrap();
        assert!((v - 2f64.powf(0.25)).abs() < 1e-14);
        assert_eq!(schatten_norm(&d, 3, TraceConvention::Standard), Err(Error::InvalidP(3)));
        assert_eq!(schatten_norm(&d, 0, TraceConvention::Standard), Err(Error::InvalidP(0)));
    }

    #[test]
    fn trace_inner_examples() {
        let x = SkewHermitianTangent::<f64>::diag(&[1.0, -1.0]);
        assert!((trace_inner(&x, &x, TraceConvention::Standard).unwrap() - 2.0).abs() < 1e-15);
        let a = SkewHermitianTangent::diag(&[1.0, 0.0]);
        let b = SkewHermitianTangent::diag(&[0.0, 1.0]);
        assert_eq!(trace_inner(&a, &b, TraceConvention::Standard).unwrap(), 0.0);
        let c = SkewHermitianTangent::<f64>::zero(3);
        assert!(matches!(
            trace_inner(&a, &c, TraceConvention::Standard),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
