//! Cyclic Jacobi eigensolver for Hermitian matrices.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexSquareMatrix;
use crate::scalar::{Real, C};

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: ComplexSquareMatrix<T>,
}

/// Diagonalizes the Hermitian part of `h` by cyclic complex Jacobi rotations.
pub fn hermitian_eigen<T: Real>(
    h: &ComplexSquareMatrix<T>,
    max_sweeps: usize,
) -> Result<HermitianEigen<T>> {
    let n = h.n();
    let mut a = h.hermitian_part();
    let mut v = ComplexSquareMatrix::<T>::identity(n);
    let eps = T::epsilon();
    let total = a.frobenius_norm();

    let mut converged = n == 1 || total.is_zero();
    let mut sweeps = 0;
    while !converged {
        let off = off_diagonal_norm(&a);
        if off <= eps * total {
            converged = true;
            break;
        }
        if sweeps >= max_sweeps {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    debug_assert!(converged);

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexSquareMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm<T: Real>(a: &ComplexSquareMatrix<T>) -> T {
    let n = a.n();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One two-sided rotation annihilating `a[p][q]`.
///
/// The rotation is `G = diag(1, conj(e)) * [[c, s], [-s, c]]` on the `(p, q)`
/// plane, where `e` is the phase of `a[p][q]`.
fn rotate<T: Real>(a: &mut ComplexSquareMatrix<T>, v: &mut ComplexSquareMatrix<T>, p: usize, q: usize) {
    let g = a[(p, q)];
    let r = g.norm();
    if r.is_zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip entries already negligible against both diagonal entries.
    let tiny = T::epsilon() * T::lit(1e-2);
    if r <= tiny * app.abs() && r <= tiny * aqq.abs() {
        a[(p, q)] = C::zero();
        a[(q, p)] = C::zero();
        return;
    }
    let e = g / r;
    let tau = (aqq - app) / (r + r);
    let t = if tau.is_zero() {
        T::one()
    } else {
        tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let ec = e.conj();
    let n = a.n();

    // A <- A G, V <- V G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ec * s;
        a[(k, q)] = akp * s + akq * ec * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ec * s;
        v[(k, q)] = vkp * s + vkq * ec * c;
    }
    // A <- G* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * e * s;
        a[(q, k)] = apk * s + aqk * e * c;
    }
    a[(p, q)] = C::zero();
    a[(q, p)] = C::zero();
    a[(p, p)] = C::new(a[(p, p)].re, T::zero());
    a[(q, q)] = C::new(a[(q, q)].re, T::zero());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type M = ComplexSquareMatrix<f64>;

    fn residual(h: &M, e: &HermitianEigen<f64>) -> f64 {
        let d: Vec<_> = e.values.iter().map(|&x| cplx(x, 0.0)).collect();
        (h - &M::conjugate_diag(&e.vectors, &d)).max_abs()
    }

    #[test]
    fn two_by_two_complex() {
        let h = M::from_rows(vec![
            vec![cplx(2.0, 0.0), cplx(1.0, -1.0)],
            vec![cplx(1.0, 1.0), cplx(3.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eigen(&h, 50).unwrap();
        // trace 5, det 6 - 2 = 4 -> eigenvalues 1 and 4
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 4.0).abs() < 1e-14);
        assert!(residual(&h, &e) < 1e-14);
    }

    #[test]
    fn dense_hermitian_reconstructs() {
        let n = 7;
        let h = M::from_fn(n, |i, j| {
            let (a, b) = (i as f64, j as f64);
            let re = ((a + 1.0) * (b + 2.0)).sin() + ((b + 1.0) * (a + 2.0)).sin();
            let im = if i == j { 0.0 } else { (a - b) * 0.3 / (1.0 + a + b) };
            cplx(re, im)
        });
        let e = hermitian_eigen(&h, 100).unwrap();
        assert!(residual(&h, &e) < 1e-12);
        let vv = &e.vectors.adjoint() * &e.vectors;
        assert!((&vv - &M::identity(n)).max_abs() < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn degenerate_identity_is_fixed() {
        let e = hermitian_eigen(&M::identity(4), 10).unwrap();
        assert_eq!(e.values, vec![1.0; 4]);
        assert_eq!(e.vectors, M::identity(4));
    }
}
