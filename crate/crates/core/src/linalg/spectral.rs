//! Spectral decomposition of normal matrices by joint Jacobi diagonalization.
//!
//! A normal `m` splits as `h + i k` with commuting Hermitian `h = (m + m*)/2`
//! and `k = (m - m*)/(2i)`. We diagonalize `h`, cluster its eigenvalues, and
//! diagonalize the compression of `k` to each cluster.

use std::cmp::Ordering;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::jacobi::hermitian_eigen;
use crate::linalg::matrix::ComplexSquareMatrix;
use crate::linalg::norms::op_norm;
use crate::linalg::types::UnitaryPoint;
use crate::scalar::{principal_angle, Real, C};
use crate::tolerance::Tolerances;

/// `m = V diag(lambda) V*` with unitary `V`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition<T: Real> {
    /// Sorted by principal angle in `(-pi, pi]`, then by modulus.
    pub eigenvalues: Vec<C<T>>,
    /// Orthonormal eigenvectors as columns.
    pub eigenvectors: UnitaryPoint<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    /// `V diag(f(lambda)) V*`.
    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> ComplexSquareMatrix<T> {
        let d: Vec<_> = self.eigenvalues.iter().map(|&z| f(z)).collect();
        ComplexSquareMatrix::conjugate_diag(self.eigenvectors.mat(), &d)
    }

    pub fn reconstruct(&self) -> ComplexSquareMatrix<T> {
        self.map(|z| z)
    }

    /// Principal angles of the eigenvalues.
    pub fn angles(&self) -> Vec<T> {
        self.eigenvalues.iter().map(|&z| principal_angle(z)).collect()
    }
}

/// Diagonalizes a normal matrix.
///
/// Fails with [`Error::NotNormal`] when `||m m* - m* m||` exceeds
/// `normal_tol * max(1, ||m||_F^2)`.
pub fn spectral_normal<T: Real>(
    m: &ComplexSquareMatrix<T>,
    tol: &Tolerances,
) -> Result<SpectralDecomposition<T>> {
    let n = m.n();
    let fro = m.frobenius_norm();
    let comm = &(m * &m.adjoint()) - &(&m.adjoint() * m);
    let normal_residual = op_norm(&comm);
    let normal_bound = Tolerances::get::<T>(tol.normal_tol) * (fro * fro).max(T::one());
    if normal_residual > normal_bound {
        return Err(Error::NotNormal {
            residual: normal_residual.to_f64_lossy(),
        });
    }

    let bound = Tolerances::get::<T>(tol.eig_tol) * T::lit(n as f64) * fro.max(T::one());
    // The first pass splits on the plain Hermitian part. If near-degenerate
    // clusters leave a residual, retry on rotated parts e^{-i phi} m.
    for &phase in &[0.0, 0.618_033_988_749_895, 1.234_567_890_123] {
        let dec = joint_diagonalize(m, T::lit(phase), tol)?;
        let res = (m - &dec.reconstruct()).frobenius_norm();
        if res <= bound {
            return Ok(dec);
        }
    }
    Err(Error::NoConvergence {
        sweeps: tol.max_sweeps,
    })
}

fn joint_diagonalize<T: Real>(
    m: &ComplexSquareMatrix<T>,
    phase: T,
    tol: &Tolerances,
) -> Result<SpectralDecomposition<T>> {
    let n = m.n();
    let rotated = m.scale(Complex::from_polar(T::one(), -phase));
    let h = rotated.hermitian_part();
    // k = (r - r*) / (2i) = -i * skew(r)
    let k = rotated.skew_part().scale(Complex::new(T::zero(), -T::one()));
    let scale = h.frobenius_norm().max(k.frobenius_norm());

    let mut v = ComplexSquareMatrix::<T>::identity(n);
    if scale.is_zero() {
        return Ok(finish(m, v));
    }
    let cluster_gap = Tolerances::get::<T>(tol.cluster_tol) * scale;

    let clusters: Vec<Vec<usize>> = if h.max_abs() <= T::epsilon() * scale {
        vec![(0..n).collect()]
    } else {
        let eh = hermitian_eigen(&h, tol.max_sweeps)?;
        v = eh.vectors;
        let mut clusters = vec![vec![0]];
        for i in 1..n {
            if eh.values[i] - eh.values[i - 1] > cluster_gap {
                clusters.push(vec![i]);
            } else {
                clusters.last_mut().expect("nonempty").push(i);
            }
        }
        clusters
    };

    for cl in clusters.iter().filter(|c| c.len() > 1) {
        let s = cl.len();
        // Compression of k onto the span of the cluster's columns.
        let kv = &k * &v;
        let kc = ComplexSquareMatrix::from_fn(s, |a, b| {
            let (ca, cb) = (cl[a], cl[b]);
            (0..n).map(|r| v[(r, ca)].conj() * kv[(r, cb)]).fold(C::zero(), |x, y| x + y)
        });
        let ek = hermitian_eigen(&kc, tol.max_sweeps)?;
        let old: Vec<Vec<C<T>>> = cl.iter().map(|&c| v.column(c)).collect();
        for (b, &cb) in cl.iter().enumerate() {
            for r in 0..n {
                let mut acc = C::zero();
                for (a, col) in old.iter().enumerate() {
                    acc += col[r] * ek.vectors[(a, b)];
                }
                v[(r, cb)] = acc;
            }
        }
    }
    Ok(finish(m, v))
}

fn finish<T: Real>(m: &ComplexSquareMatrix<T>, v: ComplexSquareMatrix<T>) -> SpectralDecomposition<T> {
    let n = m.n();
    let mv = m * &v;
    let lambda: Vec<C<T>> = (0..n)
        .map(|j| (0..n).map(|r| v[(r, j)].conj() * mv[(r, j)]).fold(C::zero(), |x, y| x + y))
        .collect();
    let key = |z: C<T>| {
        if z.norm().is_zero() {
            T::zero()
        } else {
            principal_angle(z)
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (za, zb) = (lambda[a], lambda[b]);
        key(za)
            .partial_cmp(&key(zb))
            .unwrap_or(Ordering::Equal)
            .then(za.norm().partial_cmp(&zb.norm()).unwrap_or(Ordering::Equal))
    });
    let eigenvalues = order.iter().map(|&i| lambda[i]).collect();
    let vectors = ComplexSquareMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors: UnitaryPoint::assume_unitary(vectors),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;
    use std::f64::consts::PI;

    type M = ComplexSquareMatrix<f64>;

    #[test]
    fn identity_decomposes_trivially() {
        let d = spectral_normal(&M::identity(3), &Tolerances::default()).unwrap();
        assert_eq!(d.eigenvalues, vec![cplx(1.0, 0.0); 3]);
        assert_eq!(d.eigenvectors.mat(), &M::identity(3));
    }

    #[test]
    fn diagonal_sorted_by_angle() {
        let m = M::diag_phases(&[PI / 3.0, -PI / 6.0]);
        let d = spectral_normal(&m, &Tolerances::default()).unwrap();
        let a = d.angles();
        assert!((a[0] + PI / 6.0).abs() < 1e-15);
        assert!((a[1] - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_normal() {
        let m = M::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(
            spectral_normal(&m, &Tolerances::default()),
            Err(Error::NotNormal { .. })
        ));
    }

    #[test]
    fn conjugate_pair_is_resolved() {
        // Rotation by t has eigenvalues e^{+-it} with identical real parts.
        let t: f64 = 0.7;
        let m = M::from_real_rows(&[&[t.cos(), -t.sin()], &[t.sin(), t.cos()]]).unwrap();
        let d = spectral_normal(&m, &Tolerances::default()).unwrap();
        assert!((d.angles()[0] + t).abs() < 1e-14);
        assert!((d.angles()[1] - t).abs() < 1e-14);
        assert!((&m - &d.reconstruct()).max_abs() < 1e-14);
    }

    #[test]
    fn minus_one_sorts_last() {
        let m = M::from_diag(&[cplx(-1.0, -0.0), cplx(1.0, 0.0)]);
        let d = spectral_normal(&m, &Tolerances::default()).unwrap();
        assert_eq!(d.angles(), vec![0.0, PI]);
    }
}
