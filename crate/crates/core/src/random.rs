//! Seeded random instances: skew-Hermitian tangents, Haar unitaries, points in
//! `d_inf` balls, symmetries.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::functions::exp_skew;
use crate::linalg::matrix::ComplexSquareMatrix;
use crate::linalg::types::{SkewHermitianTangent, UnitaryPoint};
use crate::scalar::{cplx, Real, C};
use crate::tolerance::Tolerances;

/// The crate-wide deterministic generator.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` of `seed`: trial `i` draws the same numbers no
/// matter how trials are scheduled across threads.
pub fn trial_rng(seed: u64, index: u64) -> SeededRng {
    let mut rng = seeded(seed);
    rng.set_stream(index);
    rng
}

/// Traceless part of a random skew-Hermitian matrix, rescaled to `norm`.
pub fn random_traceless_skew<T: Real, R: Rng + ?Sized>(n: usize, norm: T, rng: &mut R) -> SkewHermitianTangent<T> {
    loop {
        let x = random_skew::<T, R>(n, rng);
        let shift = x.mat().trace() / T::lit(n as f64);
        let y = SkewHermitianTangent::project(&(x.mat() - &ComplexSquareMatrix::identity(n).scale(shift)));
        let s = y.norm_inf();
        if s > T::lit(1e-12) {
            return y.scale(norm / s);
        }
    }
}

fn gauss<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

fn complex_gauss<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    cplx(gauss(rng), gauss(rng))
}

/// `(G - G*)/2` for a complex Gaussian `G`.
pub fn random_skew<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> SkewHermitianTangent<T> {
    let g = ComplexSquareMatrix::from_fn(n, |_, _| complex_gauss(rng));
    SkewHermitianTangent::project(&g)
}

/// Random skew-Hermitian matrix rescaled to operator norm `norm`.
pub fn random_skew_with_norm<T: Real, R: Rng + ?Sized>(
    n: usize,
    norm: T,
    rng: &mut R,
) -> SkewHermitianTangent<T> {
    loop {
        let x = random_skew::<T, R>(n, rng);
        let s = x.norm_inf();
        if s > T::lit(1e-12) {
            return x.scale(norm / s);
        }
    }
}

/// Haar-distributed unitary via Gram-Schmidt on a complex Gaussian matrix.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryPoint<T> {
    loop {
        let mut cols: Vec<Vec<C<T>>> = (0..n)
            .map(|_| (0..n).map(|_| complex_gauss(rng)).collect())
            .collect();
        let mut ok = true;
        for j in 0..n {
            // Two passes of modified Gram-Schmidt.
            for _ in 0..2 {
                for k in 0..j {
                    let proj: C<T> = (0..n)
                        .map(|i| cols[k][i].conj() * cols[j][i])
                        .fold(C::zero(), |a, b| a + b);
                    for i in 0..n {
                        let v = cols[k][i];
                        cols[j][i] -= proj * v;
                    }
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if norm < T::lit(1e-8) {
                ok = false;
                break;
            }
            for z in &mut cols[j] {
                *z /= norm;
            }
        }
        if ok {
            let m = ComplexSquareMatrix::from_fn(n, |i, j| cols[j][i]);
            return UnitaryPoint::assume_unitary(m);
        }
    }
}

fn exp_or_panic<T: Real>(x: &SkewHermitianTangent<T>) -> UnitaryPoint<T> {
    exp_skew(x, &Tolerances::for_scalar::<T>()).expect("exp of a finite skew-Hermitian matrix")
}

/// `w exp(y)` with `||y||_inf` uniform in `[0, r]`: a point of `B_inf[w, r]`.
pub fn random_in_ball<T: Real, R: Rng + ?Sized>(w: &UnitaryPoint<T>, r: T, rng: &mut R) -> UnitaryPoint<T> {
    let radius = r * T::lit(rng.random::<f64>());
    let y = random_skew_with_norm(w.n(), radius, rng);
    w * &exp_or_panic(&y)
}

/// `w exp(y)` with `||y||_inf = d` exactly.
pub fn random_at_distance<T: Real, R: Rng + ?Sized>(w: &UnitaryPoint<T>, d: T, rng: &mut R) -> UnitaryPoint<T> {
    let y = random_skew_with_norm(w.n(), d, rng);
    w * &exp_or_panic(&y)
}

/// Symmetry `id - 2p` for a Haar-random rank-`rank` projection `p`.
pub fn random_symmetry<T: Real, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> UnitaryPoint<T> {
    let v = haar_unitary::<T, R>(n, rng);
    let d: Vec<C<T>> = (0..n)
        .map(|i| if i < rank { -C::one() } else { C::one() })
        .collect();
    UnitaryPoint::assume_unitary(ComplexSquareMatrix::conjugate_diag(v.mat(), &d))
}

/// Haar unitary divided by an `n`-th root of its determinant.
pub fn random_special_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryPoint<T> {
    let u = haar_unitary::<T, R>(n, rng);
    let det = u.mat().det();
    let root = Complex::from_polar(T::one(), -det.arg() / T::lit(n as f64));
    UnitaryPoint::assume_unitary(u.mat().scale(root))
}

/// Uniform draw in `[lo, hi)`.
pub fn uniform<T: Real, R: Rng + ?Sized>(lo: T, hi: T, rng: &mut R) -> T {
    lo + (hi - lo) * T::lit(rng.random::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::types::unitarity_residual;

    #[test]
    fn haar_is_unitary() {
        let mut rng = seeded(1);
        for n in 1..8 {
            let u = haar_unitary::<f64, _>(n, &mut rng);
            assert!(unitarity_residual(u.mat()) < 1e-13);
        }
    }

    #[test]
    fn special_unitary_has_unit_det() {
        let mut rng = seeded(2);
        let u = random_special_unitary::<f64, _>(5, &mut rng);
        assert!((u.mat().det() - C::<f64>::one()).norm() < 1e-12);
    }

    #[test]
    fn skew_norm_is_exact() {
        let mut rng = seeded(3);
        let x = random_skew_with_norm::<f64, _>(6, 1.25, &mut rng);
        assert!((x.norm_inf() - 1.25).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_draw() {
        let a = haar_unitary::<f64, _>(4, &mut seeded(9));
        let b = haar_unitary::<f64, _>(4, &mut seeded(9));
        assert_eq!(a, b);
    }
}
