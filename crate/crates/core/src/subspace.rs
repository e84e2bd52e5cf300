//! Closed geodesic subsets of `U(n)`: membership residuals, geodesic-closure
//! checks, length parameters and convex-hull sampling.

use std::fmt;
use std::sync::Arc;

use num_traits::One;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{geodesic_between, principal_geodesic};
use crate::linalg::io::MatrixJson;
use crate::linalg::matrix::ComplexSquareMatrix;
use crate::linalg::norms::op_norm;
use crate::linalg::types::{TraceConvention, UnitaryPoint};
use crate::metric::{d_inf, in_ball, BallMetric, BallSpec};
use crate::random::seeded;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Residual oracle for a caller-defined subgroup; zero on members.
pub type MembershipOracle<T> = Arc<dyn Fn(&UnitaryPoint<T>) -> T + Send + Sync>;

/// The defining equations of a geodesic subset.
#[derive(Clone)]
pub enum SubspaceKind<T: Real> {
    Full,
    /// `det(u) = 1`.
    SpecialUnitary,
    /// `u = J u J` where `J` is entrywise conjugation in the orthonormal basis
    /// given by the columns of `basis`.
    Orthogonal { basis: UnitaryPoint<T> },
    /// Symmetries `u = u*` with `Tr(id - u) = 2m`, i.e. `e_p = id - 2p`, `rank p = m`.
    Grassmannian { rank: usize },
    /// Symmetries with `tau(id - u) = 2s` (normalized trace).
    GrassmannianTrace { s: T },
    Subgroup(MembershipOracle<T>),
    /// `phi(h) u rho(h)^-1 = u` for each pair `(phi(h), rho(h))`.
    FixedPointSet { pairs: Vec<(UnitaryPoint<T>, UnitaryPoint<T>)> },
    BallIntersection(Vec<BallSpec<T>>),
    /// Geodesic hull of `seeds`. Membership is tested against the enclosing
    /// `d_inf` ball, which contains the hull when its radius is below `pi/2`.
    ConvexHull { seeds: Vec<UnitaryPoint<T>>, enclosing: BallSpec<T> },
}

impl<T: Real> fmt::Debug for SubspaceKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Full => write!(f, "Full"),
            Self::SpecialUnitary => write!(f, "SpecialUnitary"),
            Self::Orthogonal { .. } => write!(f, "Orthogonal"),
            Self::Grassmannian { rank } => write!(f, "Grassmannian {{ rank: {rank} }}"),
            Self::GrassmannianTrace { s } => write!(f, "GrassmannianTrace {{ s: {s} }}"),
            Self::Subgroup(_) => write!(f, "Subgroup(<oracle>)"),
            Self::FixedPointSet { pairs } => write!(f, "FixedPointSet({} pairs)", pairs.len()),
            Self::BallIntersection(b) => write!(f, "BallIntersection({} balls)", b.len()),
            Self::ConvexHull { seeds, .. } => write!(f, "ConvexHull({} seeds)", seeds.len()),
        }
    }
}

/// A geodesic subset with its length parameter.
#[derive(Debug, Clone)]
pub struct SubspaceSpec<T: Real> {
    pub kind: SubspaceKind<T>,
    /// Overrides the kind's default length parameter.
    pub length_override: Option<T>,
}

/// Membership verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership<T> {
    pub member: bool,
    /// Largest violation of a defining equation.
    pub residual: T,
}

impl<T: Real> SubspaceSpec<T> {
    pub fn new(kind: SubspaceKind<T>) -> Self {
        Self {
            kind,
            length_override: None,
        }
    }

    pub fn full() -> Self {
        Self::new(SubspaceKind::Full)
    }

    pub fn special_unitary() -> Self {
        Self::new(SubspaceKind::SpecialUnitary)
    }

    pub fn grassmannian(rank: usize) -> Self {
        Self::new(SubspaceKind::Grassmannian { rank })
    }

    pub fn with_length_parameter(mut self, l: T) -> Result<Self> {
        if !(l > T::zero() && l <= T::PI()) {
            return Err(Error::InvalidArgument(format!("length parameter {l} not in (0, pi]")));
        }
        self.length_override = Some(l);
        Ok(self)
    }

    /// Length parameter in dimension `n`: `min(2 pi/n, pi)` for `SU(n)`, `pi`
    /// otherwise.
    pub fn length_parameter(&self, n: usize) -> T {
        if let Some(l) = self.length_override {
            return l;
        }
        match self.kind {
            SubspaceKind::SpecialUnitary => (T::lit(2.0) * T::PI() / T::lit(n as f64)).min(T::PI()),
            _ => T::PI(),
        }
    }

    /// Largest violation of the defining equations at `u`.
    pub fn residual(&self, u: &UnitaryPoint<T>, tol: &Tolerances) -> Result<T> {
        let n = u.n();
        let m = u.mat();
        Ok(match &self.kind {
            SubspaceKind::Full => T::zero(),
            SubspaceKind::SpecialUnitary => (m.det() - crate::C::<T>::one()).norm(),
            SubspaceKind::Orthogonal { basis } => {
                m.check_same_dim(basis.mat())?;
                let w = &(&basis.mat().adjoint() * m) * basis.mat();
                op_norm(&(&w - &w.conj()))
            }
            SubspaceKind::Grassmannian { rank } => {
                let tr = (&ComplexSquareMatrix::identity(n) - m).trace();
                let target = T::lit(2.0 * *rank as f64);
                symmetry_residual(m).max((tr - crate::scalar::cplx(target, T::zero())).norm())
            }
            SubspaceKind::GrassmannianTrace { s } => {
                let w = TraceConvention::Normalized.weight::<T>(n);
                let tr = (&ComplexSquareMatrix::identity(n) - m).trace() * w;
                symmetry_residual(m).max((tr - crate::scalar::cplx(T::lit(2.0) * *s, T::zero())).norm())
            }
            SubspaceKind::Subgroup(oracle) => oracle(u),
            SubspaceKind::FixedPointSet { pairs } => {
                let mut worst = T::zero();
                for (phi, rho) in pairs {
                    m.check_same_dim(phi.mat())?;
                    m.check_same_dim(rho.mat())?;
                    let moved = &(phi.mat() * m) * &rho.mat().adjoint();
                    worst = worst.max(op_norm(&(&moved - m)));
                }
                worst
            }
            SubspaceKind::BallIntersection(balls) => {
                let mut worst = T::zero();
                for b in balls {
                    worst = worst.max((-in_ball(u, b, tol)?.margin).max(T::zero()));
                }
                worst
            }
            SubspaceKind::ConvexHull { enclosing, .. } => (-in_ball(u, enclosing, tol)?.margin).max(T::zero()),
        })
    }

    /// Membership with residual at most `member_tol`.
    pub fn member(&self, u: &UnitaryPoint<T>, tol: &Tolerances) -> Result<Membership<T>> {
        let residual = self.residual(u, tol)?;
        Ok(Membership {
            member: residual <= Tolerances::get::<T>(tol.member_tol),
            residual,
        })
    }
}

fn symmetry_residual<T: Real>(m: &ComplexSquareMatrix<T>) -> T {
    op_norm(&(m - &m.adjoint()))
}

/// Orthogonal projection `p = p* = p^2`, carried together with `e_p = id - 2p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPoint<T: Real> {
    p: ComplexSquareMatrix<T>,
}

impl<T: Real> ProjectionPoint<T> {
    /// Validates `p* = p` and `p^2 = p` within `1e-9`.
    pub fn new(p: ComplexSquareMatrix<T>) -> Result<Self> {
        let residual = op_norm(&(&p - &p.adjoint())).max(op_norm(&(&(&p * &p) - &p)));
        if residual > T::lit(1e-9).max(T::epsilon() * T::lit(100.0)) {
            return Err(Error::NotProjection {
                residual: residual.to_f64_lossy(),
            });
        }
        Ok(Self { p })
    }

    /// Projection onto the span of the given coordinate axes.
    pub fn coordinate(n: usize, axes: &[usize]) -> Self {
        let mut p = ComplexSquareMatrix::zeros(n);
        for &a in axes {
            p[(a, a)] = crate::C::one();
        }
        Self { p }
    }

    /// `p = (id - u)/2` for a symmetry `u`.
    pub fn from_symmetry(u: &UnitaryPoint<T>) -> Result<Self> {
        let n = u.n();
        Self::new((&ComplexSquareMatrix::identity(n) - u.mat()).scale_real(T::lit(0.5)))
    }

    pub fn mat(&self) -> &ComplexSquareMatrix<T> {
        &self.p
    }

    /// `Tr p` (standard) or `tau(p)` (normalized).
    pub fn trace_value(&self, conv: TraceConvention) -> T {
        self.p.trace().re * conv.weight::<T>(self.p.n())
    }

    pub fn rank(&self) -> usize {
        self.p.trace().re.round().to_usize().unwrap_or(0)
    }

    /// `e_p = id - 2p`.
    pub fn symmetry(&self) -> UnitaryPoint<T> {
        let n = self.p.n();
        UnitaryPoint::assume_unitary(&ComplexSquareMatrix::identity(n) - &self.p.scale_real(T::lit(2.0)))
    }
}

/// Residuals sampled along a geodesic.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureReport<T> {
    pub distance: T,
    pub length_parameter: T,
    pub samples: Vec<(T, T)>,
    pub max_residual: T,
    /// The endpoints were antipodal and the principal branch was used.
    pub branch_ambiguity: bool,
    pub forced: bool,
}

/// Membership residuals along `gamma_{u,v}(t)` for `t` in `samples`.
///
/// Requires `d_inf(u, v) < length_parameter` unless `force` is set, in which
/// case the principal geodesic is used even across the branch cut.
pub fn geodesic_closure_check<T: Real>(
    m: &SubspaceSpec<T>,
    u: &UnitaryPoint<T>,
    v: &UnitaryPoint<T>,
    samples: &[T],
    force: bool,
    tol: &Tolerances,
) -> Result<ClosureReport<T>> {
    let distance = d_inf(u, v, tol)?;
    let l = m.length_parameter(u.n());
    if !force {
        for p in [u, v] {
            let mem = m.member(p, tol)?;
            if !mem.member {
                return Err(Error::NotInSubspace {
                    residual: mem.residual.to_f64_lossy(),
                });
            }
        }
        if distance >= l {
            return Err(Error::LengthParameterExceeded {
                distance: distance.to_f64_lossy(),
                length_parameter: l.to_f64_lossy(),
            });
        }
    }
    let (g, branch_ambiguity) = if force {
        principal_geodesic(u, v, tol)?
    } else {
        (geodesic_between(u, v, tol)?, false)
    };
    let samples: Vec<(T, T)> = samples
        .par_iter()
        .map(|&t| Ok((t, m.residual(&g.eval(t), tol)?)))
        .collect::<Result<_>>()?;
    let max_residual = samples.iter().map(|s| s.1).fold(T::zero(), T::max);
    Ok(ClosureReport {
        distance,
        length_parameter: l,
        samples,
        max_residual,
        branch_ambiguity,
        forced: force,
    })
}

/// Samples of the geodesic hull of `a`, built level by level: each of the
/// `depth` levels draws `count` points `gamma_{u,v}(t)` with distinct `u, v` from the
/// previous pool and `t` uniform in `[0, 1]`. Returns the final pool,
/// deduplicated at `1e-8`.
pub fn convex_hull_sample<T: Real>(
    a: &[UnitaryPoint<T>],
    ball: &BallSpec<T>,
    depth: usize,
    count: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<UnitaryPoint<T>>> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("empty seed set".into()));
    }
    if ball.metric != BallMetric::DInf || ball.radius >= T::FRAC_PI_2() {
        return Err(Error::RadiusViolation(format!(
            "enclosing ball must be a d_inf ball of radius < pi/2, got {:?} radius {}",
            ball.metric, ball.radius
        )));
    }
    for (i, u) in a.iter().enumerate() {
        let mem = in_ball(u, ball, tol)?;
        if !mem.inside {
            return Err(Error::RadiusViolation(format!("seed {i} has margin {}", mem.margin)));
        }
    }
    let mut rng = seeded(seed);
    let mut pool = dedup(a.to_vec());
    for _ in 0..depth {
        let draws: Vec<(usize, usize, T)> = (0..count)
            .map(|_| {
                let i = rng.random_range(0..pool.len());
                let mut j = rng.random_range(0..pool.len());
                if pool.len() > 1 {
                    while j == i {
                        j = rng.random_range(0..pool.len());
                    }
                }
                (i, j, T::lit(rng.random::<f64>()))
            })
            .collect();
        let fresh: Vec<UnitaryPoint<T>> = draws
            .par_iter()
            .map(|&(i, j, t)| Ok(geodesic_between(&pool[i], &pool[j], tol)?.eval(t)))
            .collect::<Result<_>>()?;
        pool.extend(fresh);
        pool = dedup(pool);
    }
    Ok(pool)
}

fn dedup<T: Real>(points: Vec<UnitaryPoint<T>>) -> Vec<UnitaryPoint<T>> {
    let mut out: Vec<UnitaryPoint<T>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| (q.mat() - p.mat()).max_abs() <= T::lit(1e-8)) {
            out.push(p);
        }
    }
    out
}

/// JSON description of a subspace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceConfig {
    #[serde(flatten)]
    pub kind: SubspaceKindConfig,
    #[serde(default)]
    pub length_parameter: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubspaceKindConfig {
    Full,
    SpecialUnitary,
    Orthogonal {
        #[serde(default)]
        basis: Option<MatrixJson>,
    },
    Grassmannian {
        #[serde(default)]
        rank: Option<usize>,
        #[serde(default)]
        trace_value: Option<f64>,
    },
    /// Unitaries commuting with every listed matrix.
    Subgroup { commutes_with: Vec<MatrixJson> },
    FixedPointSet { pairs: Vec<ActionPairJson> },
    BallIntersection { balls: Vec<BallJson> },
    ConvexHull { seeds: Vec<MatrixJson>, center: MatrixJson, radius: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionPairJson {
    pub left: MatrixJson,
    pub right: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallJson {
    pub center: MatrixJson,
    pub radius: f64,
    #[serde(default = "default_ball_metric")]
    pub metric: BallMetric,
}

fn default_ball_metric() -> BallMetric {
    BallMetric::DInf
}

fn unitary_from_json<T: Real>(m: &MatrixJson, tol: &Tolerances) -> Result<UnitaryPoint<T>> {
    UnitaryPoint::new(m.to_matrix::<T>()?, tol)
}

impl SubspaceConfig {
    pub fn build<T: Real>(&self, tol: &Tolerances) -> Result<SubspaceSpec<T>> {
        let kind = match &self.kind {
            SubspaceKindConfig::Full => SubspaceKind::Full,
            SubspaceKindConfig::SpecialUnitary => SubspaceKind::SpecialUnitary,
            SubspaceKindConfig::Orthogonal { basis: Some(b) } => SubspaceKind::Orthogonal {
                basis: unitary_from_json(b, tol)?,
            },
            SubspaceKindConfig::Orthogonal { basis: None } => {
                return Err(Error::Config("orthogonal subspace needs a basis (use the identity for real matrices)".into()))
            }
            SubspaceKindConfig::Grassmannian { rank: Some(m), trace_value: None } => {
                SubspaceKind::Grassmannian { rank: *m }
            }
            SubspaceKindConfig::Grassmannian { rank: None, trace_value: Some(s) } => {
                SubspaceKind::GrassmannianTrace { s: T::lit(*s) }
            }
            SubspaceKindConfig::Grassmannian { .. } => {
                return Err(Error::Config("grassmannian needs exactly one of rank, trace_value".into()))
            }
            SubspaceKindConfig::Subgroup { commutes_with } => {
                let gens: Vec<ComplexSquareMatrix<T>> = commutes_with
                    .iter()
                    .map(|m| m.to_matrix::<T>())
                    .collect::<Result<_>>()?;
                SubspaceKind::Subgroup(Arc::new(move |u: &UnitaryPoint<T>| {
                    gens.iter()
                        .map(|g| op_norm(&u.mat().commutator(g)))
                        .fold(T::zero(), T::max)
                }))
            }
            SubspaceKindConfig::FixedPointSet { pairs } => SubspaceKind::FixedPointSet {
                pairs: pairs
                    .iter()
                    .map(|p| Ok((unitary_from_json(&p.left, tol)?, unitary_from_json(&p.right, tol)?)))
                    .collect::<Result<_>>()?,
            },
            SubspaceKindConfig::BallIntersection { balls } => SubspaceKind::BallIntersection(
                balls
                    .iter()
                    .map(|b| BallSpec::new(unitary_from_json(&b.center, tol)?, T::lit(b.radius), b.metric))
                    .collect::<Result<_>>()?,
            ),
            SubspaceKindConfig::ConvexHull { seeds, center, radius } => SubspaceKind::ConvexHull {
                seeds: seeds.iter().map(|s| unitary_from_json(s, tol)).collect::<Result<_>>()?,
                enclosing: BallSpec::d_inf(unitary_from_json(center, tol)?, T::lit(*radius))?,
            },
        };
        let spec = SubspaceSpec::new(kind);
        match self.length_parameter {
            Some(l) => spec.with_length_parameter(T::lit(l)),
            None => Ok(spec),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::uniform_grid;
    use crate::linalg::functions::exp_skew;
    use crate::linalg::types::SkewHermitianTangent;
    use crate::random::{haar_unitary, random_in_ball};
    use std::f64::consts::PI;

    type U = UnitaryPoint<f64>;

    #[test]
    fn membership_examples() {
        let tol = Tolerances::default();
        let su = SubspaceSpec::<f64>::special_unitary();
        let m = su.member(&U::identity(3), &tol).unwrap();
        assert!(m.member && m.residual == 0.0);
        let r = su.residual(&U::diag_phases(&[PI / 2.0, 0.0]), &tol).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        let ep = ProjectionPoint::<f64>::coordinate(3, &[0]).symmetry();
        assert!(SubspaceSpec::grassmannian(1).member(&ep, &tol).unwrap().member);
        assert!(!SubspaceSpec::grassmannian(2).member(&ep, &tol).unwrap().member);
    }

    #[test]
    fn length_parameters() {
        let su = SubspaceSpec::<f64>::special_unitary();
        assert_eq!(su.length_parameter(2), PI);
        assert!((su.length_parameter(3) - 2.0 * PI / 3.0).abs() < 1e-15);
        assert_eq!(SubspaceSpec::<f64>::full().length_parameter(7), PI);
    }

    #[test]
    fn su3_geodesic_stays_in_su3() {
        let tol = Tolerances::default();
        let theta = 2.0;
        let v = exp_skew(&SkewHermitianTangent::diag(&[theta, -theta, 0.0]), &tol).unwrap();
        let rep = geodesic_closure_check(
            &SubspaceSpec::special_unitary(),
            &U::identity(3),
            &v,
            &uniform_grid(0.0, 1.0, 21),
            false,
            &tol,
        )
        .unwrap();
        assert!(rep.max_residual <= 1e-9);
    }

    #[test]
    fn su2_antipodal_leaves_su2() {
        let tol = Tolerances::default();
        let minus = U::diag_phases(&[PI, PI]);
        let su = SubspaceSpec::special_unitary();
        assert!(matches!(
            geodesic_closure_check(&su, &U::identity(2), &minus, &[0.5], false, &tol),
            Err(Error::LengthParameterExceeded { .. })
        ));
        let rep = geodesic_closure_check(&su, &U::identity(2), &minus, &[0.25, 0.5], true, &tol).unwrap();
        assert!(rep.branch_ambiguity);
        // det(eval(t)) = e^{2 pi i t}
        assert!((rep.samples[0].1 - 2f64.sqrt()).abs() < 1e-12);
        assert!((rep.samples[1].1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_geodesic() {
        let tol = Tolerances::default();
        let mut rng = seeded(3);
        let b = haar_unitary::<f64, _>(3, &mut rng);
        let o = SubspaceSpec::new(SubspaceKind::Orthogonal { basis: b.clone() });
        // real rotations conjugated into basis b
        let x = ComplexSquareMatrix::from_real_rows(&[&[0.0, -1.0, 0.3], &[1.0, 0.0, -0.2], &[-0.3, 0.2, 0.0]]).unwrap();
        let r = exp_skew(&SkewHermitianTangent::new(x, &tol).unwrap(), &tol).unwrap();
        let v = UnitaryPoint::new(&(b.mat() * r.mat()) * &b.mat().adjoint(), &tol).unwrap();
        let rep = geodesic_closure_check(&o, &U::identity(3), &v, &uniform_grid(0.0, 1.0, 11), false, &tol).unwrap();
        assert!(rep.max_residual < 1e-9);
    }

    #[test]
    fn grassmannian_trace_constant() {
        let tol = Tolerances::default();
        let mut rng = seeded(8);
        let gr = SubspaceSpec::grassmannian(2);
        for _ in 0..20 {
            let u = crate::random::random_symmetry::<f64, _>(5, 2, &mut rng);
            let v = crate::random::random_symmetry::<f64, _>(5, 2, &mut rng);
            if d_inf(&u, &v, &tol).unwrap() > PI - 1e-3 {
                continue;
            }
            let rep = geodesic_closure_check(&gr, &u, &v, &uniform_grid(0.0, 1.0, 11), false, &tol).unwrap();
            assert!(rep.max_residual < 1e-8, "{}", rep.max_residual);
        }
    }

    #[test]
    fn hull_samples_stay_in_ball() {
        let tol = Tolerances::default();
        let mut rng = seeded(21);
        let id = U::identity(3);
        let a: Vec<U> = (0..3).map(|_| random_in_ball(&id, 1.0, &mut rng)).collect();
        let ball = BallSpec::d_inf(id.clone(), 1.0).unwrap();
        let pts = convex_hull_sample(&a, &ball, 1, 500, 5, &tol).unwrap();
        assert!(pts.len() > 400);
        for p in &pts {
            assert!(d_inf(p, &id, &tol).unwrap() <= 1.0 + 1e-8);
        }
        let single = convex_hull_sample(&a[..1], &ball, 2, 10, 5, &tol).unwrap();
        assert_eq!(single.len(), 1);
        let far = vec![U::diag_phases(&[1.2, 0.0, 0.0])];
        assert!(matches!(
            convex_hull_sample(&far, &ball, 1, 10, 5, &tol),
            Err(Error::RadiusViolation(_))
        ));
    }

    #[test]
    fn config_roundtrip() {
        let tol = Tolerances::default();
        let cfg: SubspaceConfig = serde_json::from_str(r#"{"kind": "special_unitary"}"#).unwrap();
        let s = cfg.build::<f64>(&tol).unwrap();
        assert!(matches!(s.kind, SubspaceKind::SpecialUnitary));
        let cfg: SubspaceConfig =
            serde_json::from_str(r#"{"kind": "grassmannian", "rank": 1, "length_parameter": 1.5}"#).unwrap();
        let s = cfg.build::<f64>(&tol).unwrap();
        assert_eq!(s.length_parameter(3), 1.5);
        let cfg: SubspaceConfig = serde_json::from_str(
            r#"{"kind": "subgroup", "commutes_with": [{"n": 2, "entries": [[[1,0],[0,0]],[[0,0],[-1,0]]]}]}"#,
        )
        .unwrap();
        let s = cfg.build::<f64>(&tol).unwrap();
        assert!(s.member(&U::diag_phases(&[0.3, 1.0]), &tol).unwrap().member);
        assert!(serde_json::from_str::<SubspaceConfig>(r#"{"kind": "nope"}"#).is_err());
    }
}
