//! One-parameter geodesics `t -> u exp(t x)` and spectral flows along them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::functions::unitary_angles;
use crate::linalg::io::MatrixJson;
use crate::linalg::matrix::ComplexSquareMatrix;
use crate::linalg::norms::{schatten_from_moduli, validate_p};
use crate::linalg::spectral::spectral_normal;
use crate::linalg::types::{SkewHermitianTangent, TraceConvention, UnitaryPoint};
use crate::metric::relative_angles;
use crate::report::{fmt_real, to_csv};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Number of grid points used when a flow is requested without a grid.
pub const DEFAULT_FLOW_POINTS: usize = 201;

/// `t -> base exp(t direction)`.
///
/// The direction is kept diagonalized, `x = V diag(i theta) V*`, so that
/// evaluation costs two matrix products.
#[derive(Debug, Clone)]
pub struct Geodesic<T: Real> {
    base: UnitaryPoint<T>,
    direction: SkewHermitianTangent<T>,
    vectors: ComplexSquareMatrix<T>,
    angles: Vec<T>,
}

impl<T: Real> Geodesic<T> {
    /// Geodesic with the given base and direction; `||x||_inf <= pi + branch_tol`.
    pub fn new(base: UnitaryPoint<T>, direction: SkewHermitianTangent<T>, tol: &Tolerances) -> Result<Self> {
        base.mat().check_same_dim(direction.mat())?;
        let dec = spectral_normal(direction.mat(), tol)?;
        let angles: Vec<T> = dec.eigenvalues.iter().map(|z| z.im).collect();
        let speed = max_abs_angle_unclamped(&angles);
        if speed > T::PI() + Tolerances::get::<T>(tol.branch_tol) {
            return Err(Error::InvalidArgument(format!(
                "geodesic direction has operator norm {speed} > pi"
            )));
        }
        Ok(Self {
            base,
            direction,
            vectors: dec.eigenvectors.into_mat(),
            angles,
        })
    }

    fn from_relative(u: &UnitaryPoint<T>, v: &UnitaryPoint<T>, tol: &Tolerances) -> Result<(Self, bool)> {
        let ra = relative_angles(u, v, tol)?;
        let vectors = ra.decomposition.eigenvectors.into_mat();
        let d: Vec<_> = ra.angles.iter().map(|&a| crate::scalar::cplx(T::zero(), a)).collect();
        let direction = SkewHermitianTangent::project(&ComplexSquareMatrix::conjugate_diag(&vectors, &d));
        Ok((
            Self {
                base: u.clone(),
                direction,
                vectors,
                angles: ra.angles,
            },
            ra.branch_ambiguity,
        ))
    }

    pub fn base(&self) -> &UnitaryPoint<T> {
        &self.base
    }

    pub fn direction(&self) -> &SkewHermitianTangent<T> {
        &self.direction
    }

    /// Eigen-angles `theta` of the direction `x = V diag(i theta) V*`.
    pub fn direction_angles(&self) -> &[T] {
        &self.angles
    }

    /// `base exp(t x)`.
    pub fn eval(&self, t: T) -> UnitaryPoint<T> {
        let phases: Vec<T> = self.angles.iter().map(|&a| a * t).collect();
        let d = ComplexSquareMatrix::diag_phases(&phases);
        let e = ComplexSquareMatrix::conjugate_diag(&self.vectors, &d.diagonal());
        UnitaryPoint::assume_unitary(self.base.mat() * &e)
    }

    /// `d_inf` speed `||x||_inf`.
    pub fn speed_inf(&self) -> T {
        max_abs_angle_unclamped(&self.angles)
    }

    /// `d_p` speed `||x||_p`.
    pub fn speed_p(&self, p: u32, conv: TraceConvention) -> Result<T> {
        validate_p(p)?;
        Ok(schatten_from_moduli(self.angles.iter().copied(), p, conv, self.base.n()))
    }

    /// Same curve with `t` rescaled: `s -> base exp(s c x)`.
    pub fn rescaled(&self, c: T) -> Self {
        Self {
            base: self.base.clone(),
            direction: self.direction.scale(c),
            vectors: self.vectors.clone(),
            angles: self.angles.iter().map(|&a| a * c).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }
}

fn max_abs_angle_unclamped<T: Real>(angles: &[T]) -> T {
    angles.iter().map(|a| a.abs()).fold(T::zero(), T::max)
}

/// `gamma_{u,v}(t) = u exp(t log(u^-1 v))`, defined when the spectrum of
/// `u^-1 v` stays away from `-1`.
pub fn geodesic_between<T: Real>(u: &UnitaryPoint<T>, v: &UnitaryPoint<T>, tol: &Tolerances) -> Result<Geodesic<T>> {
    let (g, branch) = Geodesic::from_relative(u, v, tol)?;
    if branch {
        return Err(Error::AntipodalSpectrum);
    }
    Ok(g)
}

/// Like [`geodesic_between`], but accepts eigenvalue `-1` of `u^-1 v` and uses
/// angle `+pi` for it. The flag reports whether that happened.
pub fn principal_geodesic<T: Real>(
    u: &UnitaryPoint<T>,
    v: &UnitaryPoint<T>,
    tol: &Tolerances,
) -> Result<(Geodesic<T>, bool)> {
    Geodesic::from_relative(u, v, tol)
}

/// Extremes of `spec(-i log(u exp(t x)))` at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralFlowSample<T> {
    pub t: T,
    pub theta_min: T,
    pub theta_max: T,
    /// False if some eigenvalue is within `branch_tol` of `-1`.
    pub branch_ok: bool,
}

/// `count` equispaced points of `[a, b]`, endpoints included.
pub fn uniform_grid<T: Real>(a: T, b: T, count: usize) -> Vec<T> {
    match count {
        0 => vec![],
        1 => vec![a],
        _ => {
            let h = (b - a) / T::lit((count - 1) as f64);
            (0..count)
                .map(|i| if i == count - 1 { b } else { a + h * T::lit(i as f64) })
                .collect()
        }
    }
}

/// Spectral extremes along `t -> u exp(t x)` for every `t` in `grid`.
/// Branch-cut crossings are reported per sample, not as an error.
pub fn spectral_flow<T: Real>(
    u: &UnitaryPoint<T>,
    x: &SkewHermitianTangent<T>,
    grid: &[T],
    tol: &Tolerances,
) -> Result<Vec<SpectralFlowSample<T>>> {
    u.mat().check_same_dim(x.mat())?;
    let dec = spectral_normal(x.mat(), tol)?;
    let g = Geodesic {
        base: u.clone(),
        direction: x.clone(),
        vectors: dec.eigenvectors.into_mat(),
        angles: dec.eigenvalues.iter().map(|z| z.im).collect(),
    };
    grid.par_iter()
        .map(|&t| {
            let ua = unitary_angles(&g.eval(t), tol)?;
            let (lo, hi) = ua
                .angles
                .iter()
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &a| (lo.min(a), hi.max(a)));
            Ok(SpectralFlowSample {
                t,
                theta_min: lo,
                theta_max: hi,
                branch_ok: !ua.branch_ambiguity,
            })
        })
        .collect()
}

/// CSV with columns `t,theta_min,theta_max,branch_ok`.
pub fn spectral_flow_csv<T: Real>(samples: &[SpectralFlowSample<T>]) -> Result<String> {
    to_csv(
        &["t", "theta_min", "theta_max", "branch_ok"],
        samples.iter().map(|s| {
            vec![
                fmt_real(s.t),
                fmt_real(s.theta_min),
                fmt_real(s.theta_max),
                s.branch_ok.to_string(),
            ]
        }),
    )
}

/// Parameter grid `[t0, t1]` with `points` samples, as read from JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub t0: f64,
    pub t1: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            t0: 0.0,
            t1: 1.0,
            points: DEFAULT_FLOW_POINTS,
        }
    }
}

impl GridSpec {
    pub fn build<T: Real>(&self) -> Result<Vec<T>> {
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t1 > self.t0) || self.points < 2 {
            return Err(Error::Config(format!(
                "grid needs finite t0 < t1 and at least 2 points, got {self:?}"
            )));
        }
        Ok(uniform_grid(T::lit(self.t0), T::lit(self.t1), self.points))
    }
}

/// Input of the `flow` command: `u`, a skew-Hermitian `x` and a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowInput {
    pub u: MatrixJson,
    pub x: MatrixJson,
    #[serde(default)]
    pub grid: GridSpec,
}

impl FlowInput {
    pub fn run(&self, tol: &Tolerances) -> Result<Vec<SpectralFlowSample<f64>>> {
        let u = UnitaryPoint::new(self.u.to_matrix()?, tol)?;
        let x = SkewHermitianTangent::new(self.x.to_matrix()?, tol)?;
        spectral_flow(&u, &x, &self.grid.build()?, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::d_inf;
    use crate::random::{haar_unitary, random_skew_with_norm, seeded, uniform};
    use std::f64::consts::PI;

    type U = UnitaryPoint<f64>;

    fn rot() -> SkewHermitianTangent<f64> {
        let m = ComplexSquareMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        SkewHermitianTangent::new(m, &Tolerances::default()).unwrap()
    }

    #[test]
    fn trivial_geodesic() {
        let tol = Tolerances::default();
        let u = haar_unitary::<f64, _>(3, &mut seeded(4));
        let g = geodesic_between(&u, &u, &tol).unwrap();
        assert!(g.direction().mat().max_abs() < 1e-12);
        assert!((g.eval(0.5).mat() - u.mat()).max_abs() < 1e-12);
    }

    #[test]
    fn diagonal_midpoint() {
        let tol = Tolerances::default();
        let a = 2.2;
        let g = geodesic_between(&U::identity(2), &U::diag_phases(&[a, -a]), &tol).unwrap();
        let mid = g.eval(0.5);
        assert!((mid.mat() - U::diag_phases(&[a / 2.0, -a / 2.0]).mat()).max_abs() < 1e-14);
    }

    #[test]
    fn symmetry_geodesic_midpoint() {
        let tol = Tolerances::default();
        let ep = U::diag_phases(&[0.0, PI]);
        let g = Geodesic::new(ep.clone(), rot(), &tol).unwrap();
        let mid = g.eval(PI / 2.0);
        assert!((d_inf(&mid, &ep, &tol).unwrap() - PI / 2.0).abs() < 1e-12);
        let eq = g.eval(PI);
        assert!((d_inf(&mid, &eq, &tol).unwrap() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn endpoints_and_antipodes() {
        let tol = Tolerances::default();
        let mut rng = seeded(5);
        for _ in 0..50 {
            let u = haar_unitary::<f64, _>(4, &mut rng);
            let x = random_skew_with_norm(4, 3.0, &mut rng);
            let v = &u * &crate::linalg::functions::exp_skew(&x, &tol).unwrap();
            let g = geodesic_between(&u, &v, &tol).unwrap();
            assert!((g.eval(0.0).mat() - u.mat()).max_abs() < 1e-12);
            assert!((g.eval(1.0).mat() - v.mat()).max_abs() < 1e-9);
        }
        assert_eq!(
            geodesic_between(&U::identity(1), &U::phase(PI), &tol).unwrap_err(),
            Error::AntipodalSpectrum
        );
        let (g, flag) = principal_geodesic(&U::identity(1), &U::phase(PI), &tol).unwrap();
        assert!(flag);
        assert!((g.speed_inf() - PI).abs() < 1e-15);
    }

    #[test]
    fn group_law() {
        let tol = Tolerances::default();
        let mut rng = seeded(6);
        for _ in 0..50 {
            let u = haar_unitary::<f64, _>(5, &mut rng);
            let x = random_skew_with_norm(5, 2.0, &mut rng);
            let g = Geodesic::new(u, x.clone(), &tol).unwrap();
            let (s, t) = (uniform(-2.0, 2.0, &mut rng), uniform(-2.0, 2.0, &mut rng));
            let rhs = &g.eval(s) * &crate::linalg::functions::exp_skew(&x.scale(t), &tol).unwrap();
            assert!((g.eval(s + t).mat() - rhs.mat()).max_abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_long_direction() {
        let tol = Tolerances::default();
        let x = SkewHermitianTangent::diag(&[3.5]);
        assert!(Geodesic::new(U::identity(1), x, &tol).is_err());
    }

    #[test]
    fn flow_of_zero_is_constant() {
        let tol = Tolerances::default();
        let u = U::diag_phases(&[0.3, -1.0]);
        let grid = uniform_grid(0.0, 1.0, 11);
        let flow = spectral_flow(&u, &SkewHermitianTangent::zero(2), &grid, &tol).unwrap();
        for s in &flow {
            assert!((s.theta_min + 1.0).abs() < 1e-15 && (s.theta_max - 0.3).abs() < 1e-15);
            assert!(s.branch_ok);
        }
    }

    #[test]
    fn flow_matches_closed_form() {
        let tol = Tolerances::default();
        for &theta in &[0.5, 1.0, 2.0] {
            let u = U::diag_phases(&[theta, -theta]);
            let grid = uniform_grid(-1.0, 1.0, DEFAULT_FLOW_POINTS);
            let flow = spectral_flow(&u, &rot(), &grid, &tol).unwrap();
            assert!((flow[100].theta_max - theta).abs() < 1e-14);
            for s in &flow {
                let f = (theta.cos() * s.t.cos()).acos();
                assert!((s.theta_max - f).abs() < 1e-12, "{theta} {}", s.t);
                assert!(s.theta_min <= s.theta_max);
            }
        }
    }

    #[test]
    fn flow_csv_header() {
        let tol = Tolerances::default();
        let flow = spectral_flow(&U::identity(1), &SkewHermitianTangent::diag(&[1.0]), &[0.0, PI], &tol).unwrap();
        assert!(!flow[1].branch_ok);
        let csv = spectral_flow_csv(&flow).unwrap();
        assert!(csv.starts_with("t,theta_min,theta_max,branch_ok\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
