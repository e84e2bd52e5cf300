use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cplx, Real, C};

/// Dense `n x n` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexSquareMatrix<T: Real> {
    n: usize,
    data: Vec<C<T>>,
}

impl<T: Real> fmt::Debug for ComplexSquareMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexSquareMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Real> ComplexSquareMatrix<T> {
    /// Builds a matrix from row-major entries, rejecting ragged or non-finite data.
    pub fn new(n: usize, data: Vec<C<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::NotSquare("dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::NotSquare(format!(
                "expected {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare(format!(
                "{n} rows with lengths {:?}",
                rows.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        Self::new(n, rows.into_iter().flatten().collect())
    }

    /// Real-entry convenience constructor.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| cplx(T::lit(x), T::zero())).collect())
                .collect(),
        )
    }

    pub(crate) fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { C::one() } else { C::zero() })
    }

    pub fn from_diag(diag: &[C<T>]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { diag[i] } else { C::zero() })
    }

    /// `diag(e^{i theta_k})`.
    pub fn diag_phases(angles: &[T]) -> Self {
        let d: Vec<_> = angles.iter().map(|&a| Complex::from_polar(T::one(), a)).collect();
        Self::from_diag(&d)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entries(&self) -> &[C<T>] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<C<T>>> {
        self.data.chunks(self.n).map(<[_]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C<T>> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C<T> {
        (0..self.n).map(|i| self[(i, i)]).fold(C::zero(), |a, b| a + b)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `(self + self*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// `(self - self*) / 2`.
    pub fn skew_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.n, |i, j| (self[(i, j)] - self[(j, i)].conj()) * half)
    }

    /// `V diag(d) V*` for a matrix `V` given column-wise.
    pub(crate) fn conjugate_diag(v: &Self, d: &[C<T>]) -> Self {
        let n = v.n;
        Self::from_fn(n, |i, j| {
            let mut acc = C::zero();
            for k in 0..n {
                acc += v[(i, k)] * d[k] * v[(j, k)].conj();
            }
            acc
        })
    }

    /// Determinant by LU factorization with partial pivoting.
    pub fn det(&self) -> C<T> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = C::one();
        for col in 0..n {
            let (piv, best) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold((col, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == T::zero() {
                return C::zero();
            }
            if piv != col {
                for k in 0..n {
                    a.swap(col * n + k, piv * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in (col + 1)..n {
                let factor = a[r * n + col] / p;
                if factor.is_zero() {
                    continue;
                }
                for k in col..n {
                    let v = a[col * n + k];
                    a[r * n + k] -= factor * v;
                }
            }
        }
        det
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            })
        } else {
            Ok(())
        }
    }

    /// Casts entries to another scalar type.
    pub fn cast<U: Real>(&self) -> ComplexSquareMatrix<U> {
        ComplexSquareMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .map(|z| cplx(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy())))
                .collect(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexSquareMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexSquareMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.n + j]
    }
}

impl<'a, T: Real> Mul<&'a ComplexSquareMatrix<T>> for &'a ComplexSquareMatrix<T> {
    type Output = ComplexSquareMatrix<T>;
    fn mul(self, rhs: &'a ComplexSquareMatrix<T>) -> ComplexSquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "matrix product dimension mismatch");
        let n = self.n;
        let mut out = vec![C::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        ComplexSquareMatrix { n, data: out }
    }
}

impl<'a, T: Real> Add<&'a ComplexSquareMatrix<T>> for &'a ComplexSquareMatrix<T> {
    type Output = ComplexSquareMatrix<T>;
    fn add(self, rhs: &'a ComplexSquareMatrix<T>) -> ComplexSquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "matrix sum dimension mismatch");
        ComplexSquareMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<'a, T: Real> Sub<&'a ComplexSquareMatrix<T>> for &'a ComplexSquareMatrix<T> {
    type Output = ComplexSquareMatrix<T>;
    fn sub(self, rhs: &'a ComplexSquareMatrix<T>) -> ComplexSquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "matrix difference dimension mismatch");
        ComplexSquareMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> Neg for &ComplexSquareMatrix<T> {
    type Output = ComplexSquareMatrix<T>;
    fn neg(self) -> ComplexSquareMatrix<T> {
        ComplexSquareMatrix {
            n: self.n,
            data: self.data.iter().map(|&z| -z).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexSquareMatrix<f64>;

    #[test]
    fn rejects_ragged_and_nonfinite() {
        assert!(matches!(
            M::from_rows(vec![vec![C::zero(); 2], vec![C::zero(); 1]]),
            Err(Error::NotSquare(_))
        ));
        assert_eq!(
            M::new(1, vec![cplx(f64::NAN, 0.0)]).unwrap_err(),
            Error::NonFinite
        );
        assert!(M::new(0, vec![]).is_err());
    }

    #[test]
    fn det_of_triangular_and_permuted() {
        let m = M::from_real_rows(&[&[0.0, 2.0], &[3.0, 1.0]]).unwrap();
        assert!((m.det() - cplx(-6.0, 0.0)).norm() < 1e-14);
        let d = M::diag_phases(&[0.3, -0.1, 0.5]);
        assert!((d.det() - Complex::from_polar(1.0, 0.7)).norm() < 1e-14);
    }

    #[test]
    fn product_matches_definition() {
        let a = M::from_rows(vec![
            vec![cplx(1.0, 1.0), cplx(0.0, 2.0)],
            vec![cplx(-1.0, 0.0), cplx(3.0, -1.0)],
        ])
        .unwrap();
        let b = a.adjoint();
        let p = &a * &b;
        for i in 0..2 {
            for j in 0..2 {
                let e: C<f64> = (0..2).map(|k| a[(i, k)] * b[(k, j)]).sum();
                assert!((p[(i, j)] - e).norm() < 1e-14);
            }
        }
        // a a* is Hermitian
        assert!((&p - &p.adjoint()).max_abs() < 1e-14);
    }
}
