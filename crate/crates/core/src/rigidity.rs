//! Finite group actions `u -> phi(h) u rho(h)^-1` and their fixed points:
//! intertwiners between representations and invariant projections.
//!
//! A fixed point is the circumcenter of an orbit: the center problem is
//! invariant under the action and its minimizer is unique, so it is fixed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::center::{estimate_radius, solve_center, CenterOptions, CenterProblem, CenterResult, CenterSummary};
use crate::error::{Error, Result};
use crate::linalg::io::MatrixJson;
use crate::linalg::norms::op_norm;
use crate::linalg::types::{TraceConvention, UnitaryPoint};
use crate::metric::d_inf;
use crate::scalar::Real;
use crate::subspace::{ProjectionPoint, SubspaceConfig, SubspaceSpec};
use crate::tolerance::Tolerances;

const HOM_TOL: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-8;
const MAX_GROUP_ORDER: usize = 5040;
/// Margin added to the measured orbit radius when choosing `r`.
pub const RADIUS_MARGIN: f64 = 1e-3;

/// A finite group given by its full multiplication table, acting through a
/// pair of unitary representations.
#[derive(Debug, Clone)]
pub struct FiniteGroupAction<T: Real> {
    labels: Vec<String>,
    phi: Vec<UnitaryPoint<T>>,
    rho: Vec<UnitaryPoint<T>>,
    /// `table[a][b]` is the index of `ab`.
    table: Vec<Vec<usize>>,
}

fn max_entry_gap<T: Real>(a: &UnitaryPoint<T>, b: &UnitaryPoint<T>) -> T {
    (a.mat() - b.mat()).max_abs()
}

impl<T: Real> FiniteGroupAction<T> {
    /// Validates dimensions, the table shape, and that `phi`, `rho` respect the
    /// table within `1e-9` in operator norm.
    pub fn new(
        labels: Vec<String>,
        phi: Vec<UnitaryPoint<T>>,
        rho: Vec<UnitaryPoint<T>>,
        table: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let k = labels.len();
        if k == 0 || phi.len() != k || rho.len() != k {
            return Err(Error::InvalidArgument(format!(
                "{} labels, {} left and {} right matrices",
                k,
                phi.len(),
                rho.len()
            )));
        }
        if table.len() != k || table.iter().any(|r| r.len() != k || r.iter().any(|&c| c >= k)) {
            return Err(Error::InvalidArgument("multiplication table must be k x k with entries < k".into()));
        }
        for m in phi.iter().chain(&rho) {
            phi[0].mat().check_same_dim(m.mat())?;
        }
        let mut residual = T::zero();
        for a in 0..k {
            for b in 0..k {
                let c = table[a][b];
                residual = residual
                    .max(op_norm(&((&phi[a] * &phi[b]).mat() - phi[c].mat())))
                    .max(op_norm(&((&rho[a] * &rho[b]).mat() - rho[c].mat())));
            }
        }
        if residual > T::lit(HOM_TOL).max(T::epsilon() * T::lit(1e3)) {
            return Err(Error::NotHomomorphism {
                residual: residual.to_f64_lossy(),
            });
        }
        Ok(Self { labels, phi, rho, table })
    }

    /// The finite group generated by the pairs `(phi_i, rho_i)`, with its
    /// table computed by enumeration. Fails if the group has more than 5040
    /// elements.
    pub fn generate(generators: &[(UnitaryPoint<T>, UnitaryPoint<T>)]) -> Result<Self> {
        let (p0, _) = generators
            .first()
            .ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
        for (p, r) in generators {
            p0.mat().check_same_dim(p.mat())?;
            p0.mat().check_same_dim(r.mat())?;
        }
        let n = p0.n();
        let tol = T::lit(DEDUP_TOL);
        let find = |phi: &[UnitaryPoint<T>], rho: &[UnitaryPoint<T>], p: &UnitaryPoint<T>, r: &UnitaryPoint<T>| {
            (0..phi.len()).find(|&i| max_entry_gap(&phi[i], p) <= tol && max_entry_gap(&rho[i], r) <= tol)
        };
        let mut labels = vec!["e".to_string()];
        let mut phi = vec![UnitaryPoint::identity(n)];
        let mut rho = vec![UnitaryPoint::identity(n)];
        let mut frontier = 0;
        while frontier < phi.len() {
            for (g, (gp, gr)) in generators.iter().enumerate() {
                let p = &phi[frontier] * gp;
                let r = &rho[frontier] * gr;
                if find(&phi, &rho, &p, &r).is_none() {
                    if phi.len() >= MAX_GROUP_ORDER {
                        return Err(Error::InvalidArgument(format!(
                            "generated group exceeds {MAX_GROUP_ORDER} elements"
                        )));
                    }
                    let base = if frontier == 0 { String::new() } else { labels[frontier].clone() };
                    labels.push(format!("{base}g{g}"));
                    phi.push(p);
                    rho.push(r);
                }
            }
            frontier += 1;
        }
        let k = phi.len();
        let mut table = vec![vec![0; k]; k];
        for a in 0..k {
            for b in 0..k {
                let p = &phi[a] * &phi[b];
                let r = &rho[a] * &rho[b];
                table[a][b] = find(&phi, &rho, &p, &r).ok_or(Error::NotHomomorphism {
                    residual: f64::INFINITY,
                })?;
            }
        }
        Self::new(labels, phi, rho, table)
    }

    /// Conjugation action `u -> h u h^-1` of the group generated by `gens`.
    pub fn conjugation(gens: &[UnitaryPoint<T>]) -> Result<Self> {
        Self::generate(&gens.iter().map(|g| (g.clone(), g.clone())).collect::<Vec<_>>())
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn left(&self) -> &[UnitaryPoint<T>] {
        &self.phi
    }

    pub fn right(&self) -> &[UnitaryPoint<T>] {
        &self.rho
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn n(&self) -> usize {
        self.phi[0].n()
    }

    /// `phi(h) u rho(h)^-1`.
    pub fn act(&self, h: usize, u: &UnitaryPoint<T>) -> UnitaryPoint<T> {
        &(&self.phi[h] * u) * &self.rho[h].inverse()
    }

    /// `max_h d_inf(h.u, u)`.
    pub fn displacement(&self, u: &UnitaryPoint<T>, tol: &Tolerances) -> Result<T> {
        let d: Vec<T> = (0..self.order())
            .into_par_iter()
            .map(|h| d_inf(&self.act(h, u), u, tol))
            .collect::<Result<_>>()?;
        Ok(d.into_iter().fold(T::zero(), T::max))
    }
}

#[derive(Debug, Clone)]
pub struct OrbitReport<T: Real> {
    pub points: Vec<UnitaryPoint<T>>,
    /// Upper bound on the circumradius of the orbit relative to `M`.
    pub bound: T,
    pub witness: UnitaryPoint<T>,
    /// Largest distance from `h.p` to the orbit, over `h` and orbit points.
    pub closure_residual: T,
}

/// Orbit of `v`, deduplicated at `1e-8`, with a heuristic radius bound.
pub fn orbit<T: Real>(
    action: &FiniteGroupAction<T>,
    v: &UnitaryPoint<T>,
    m: &SubspaceSpec<T>,
    conv: TraceConvention,
    tol: &Tolerances,
) -> Result<OrbitReport<T>> {
    action.phi[0].mat().check_same_dim(v.mat())?;
    let images: Vec<UnitaryPoint<T>> = (0..action.order()).into_par_iter().map(|h| action.act(h, v)).collect();
    let dedup = T::lit(DEDUP_TOL);
    let mut points: Vec<UnitaryPoint<T>> = Vec::new();
    for p in images {
        if !points.iter().any(|q| max_entry_gap(q, &p) <= dedup) {
            points.push(p);
        }
    }
    let closure_residual = (0..action.order())
        .into_par_iter()
        .map(|h| {
            points
                .iter()
                .map(|p| {
                    let hp = action.act(h, p);
                    points.iter().map(|q| max_entry_gap(q, &hp)).fold(T::infinity(), T::min)
                })
                .fold(T::zero(), T::max)
        })
        .reduce(T::zero, T::max);
    let est = estimate_radius(&points, m, conv, tol)?;
    Ok(OrbitReport {
        points,
        bound: est.bound,
        witness: est.witness,
        closure_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RigidityOptions {
    /// Required `max_h d_inf(h.g, g)` of a returned fixed point.
    pub fix_tol: f64,
    /// Radius of the center problem; defaults to the orbit bound plus `1e-3`.
    pub radius: Option<f64>,
    pub conv: TraceConvention,
    pub center: CenterOptions,
}

impl Default for RigidityOptions {
    fn default() -> Self {
        Self {
            fix_tol: 1e-6,
            radius: None,
            conv: TraceConvention::Standard,
            center: CenterOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FixedPoint<T: Real> {
    pub point: UnitaryPoint<T>,
    /// `max_h d_inf(h.g, g)`.
    pub displacement: T,
    pub orbit: OrbitReport<T>,
    pub radius: T,
    pub limit: T,
    pub center: CenterResult<T>,
}

/// Fixed point of the action in `M`, as the circumcenter of the orbit of `v`.
///
/// Requires `bound + 1e-3 < min(pi, l)/2`; otherwise [`Error::RadiusTooLarge`]
/// reports the measured bound. The bound is heuristic: the error says no
/// small enough ball was found, not that none exists.
pub fn find_fixed_point<T: Real>(
    action: &FiniteGroupAction<T>,
    v: &UnitaryPoint<T>,
    m: &SubspaceSpec<T>,
    opts: &RigidityOptions,
    tol: &Tolerances,
) -> Result<FixedPoint<T>> {
    let orb = orbit(action, v, m, opts.conv, tol)?;
    let limit = T::PI().min(m.length_parameter(action.n())) / T::lit(2.0);
    if orb.bound + T::lit(RADIUS_MARGIN) >= limit {
        return Err(Error::RadiusTooLarge {
            bound: orb.bound.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    let radius = match opts.radius {
        Some(r) => {
            let r = T::lit(r);
            if r <= orb.bound || r >= limit {
                return Err(Error::InvalidArgument(format!(
                    "radius {r} must lie in ({}, {limit})",
                    orb.bound
                )));
            }
            r
        }
        None => orb.bound + T::lit(RADIUS_MARGIN),
    };
    let problem = CenterProblem::new(
        orb.points.clone(),
        m.clone(),
        radius,
        opts.conv,
        orb.witness.clone(),
        opts.center,
        tol,
    )?;
    let center = solve_center(&problem, tol)?.certified()?;
    let displacement = action.displacement(&center.center, tol)?;
    if displacement > T::lit(opts.fix_tol) {
        return Err(Error::FixedPointResidual {
            residual: displacement.to_f64_lossy(),
            tol: opts.fix_tol,
        });
    }
    Ok(FixedPoint {
        point: center.center.clone(),
        displacement,
        orbit: orb,
        radius,
        limit,
        center,
    })
}

#[derive(Debug, Clone)]
pub struct Intertwiner<T: Real> {
    pub g: UnitaryPoint<T>,
    /// `max_h ||phi(h) - g rho(h) g^-1||_inf`.
    pub residual: T,
    pub fixed: FixedPoint<T>,
}

/// `max_h ||phi(h) - g rho(h) g^-1||_inf`.
pub fn intertwining_residual<T: Real>(action: &FiniteGroupAction<T>, g: &UnitaryPoint<T>) -> T {
    (0..action.order())
        .map(|h| op_norm(&(action.phi[h].mat() - (&(g * &action.rho[h]) * &g.inverse()).mat())))
        .fold(T::zero(), T::max)
}

/// Finds `g` in `G` with `phi(h) = g rho(h) g^-1` for all `h`, starting from
/// the orbit of `u0` under `u -> phi(h) u rho(h)^-1`.
pub fn find_intertwiner<T: Real>(
    action: &FiniteGroupAction<T>,
    g_space: &SubspaceSpec<T>,
    u0: &UnitaryPoint<T>,
    opts: &RigidityOptions,
    tol: &Tolerances,
) -> Result<Intertwiner<T>> {
    let fixed = find_fixed_point(action, u0, g_space, opts, tol)?;
    let residual = intertwining_residual(action, &fixed.point);
    if residual > T::lit(opts.fix_tol) {
        return Err(Error::FixedPointResidual {
            residual: residual.to_f64_lossy(),
            tol: opts.fix_tol,
        });
    }
    Ok(Intertwiner {
        g: fixed.point.clone(),
        residual,
        fixed,
    })
}

#[derive(Debug, Clone)]
pub struct InvariantProjection<T: Real> {
    pub q: ProjectionPoint<T>,
    /// `max over generators ||h q - q h||_inf`.
    pub commutator: T,
    pub fixed: FixedPoint<T>,
}

/// Rank-`m` projection commuting with the finite group generated by `gens`,
/// found as the circumcenter of the conjugation orbit of `e_{p0}` inside the
/// Grassmannian.
pub fn find_invariant_projection<T: Real>(
    gens: &[UnitaryPoint<T>],
    p0: &ProjectionPoint<T>,
    opts: &RigidityOptions,
    tol: &Tolerances,
) -> Result<InvariantProjection<T>> {
    let n = p0.mat().n();
    let gens: Vec<UnitaryPoint<T>> = if gens.is_empty() {
        vec![UnitaryPoint::identity(n)]
    } else {
        gens.to_vec()
    };
    let action = FiniteGroupAction::conjugation(&gens)?;
    let gr = SubspaceSpec::grassmannian(p0.rank());
    let fixed = find_fixed_point(&action, &p0.symmetry(), &gr, opts, tol)?;
    let q = ProjectionPoint::from_symmetry(&fixed.point)?;
    let commutator = gens
        .iter()
        .map(|h| op_norm(&h.mat().commutator(q.mat())))
        .fold(T::zero(), T::max);
    if commutator > T::lit(opts.fix_tol) {
        return Err(Error::FixedPointResidual {
            residual: commutator.to_f64_lossy(),
            tol: opts.fix_tol,
        });
    }
    Ok(InvariantProjection { q, commutator, fixed })
}

/// Group element in JSON input. `right` defaults to `left` (conjugation).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementJson {
    #[serde(default)]
    pub label: Option<String>,
    pub left: MatrixJson,
    #[serde(default)]
    pub right: Option<MatrixJson>,
}

/// A group either as all elements plus a multiplication table, or as
/// generators whose closure is enumerated.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupJson {
    Table { elements: Vec<ElementJson>, table: Vec<Vec<usize>> },
    Generators { generators: Vec<ElementJson> },
}

impl GroupJson {
    pub fn build(&self, tol: &Tolerances) -> Result<FiniteGroupAction<f64>> {
        let pair = |e: &ElementJson| -> Result<(UnitaryPoint<f64>, UnitaryPoint<f64>)> {
            let l = UnitaryPoint::new(e.left.to_matrix()?, tol)?;
            let r = match &e.right {
                Some(r) => UnitaryPoint::new(r.to_matrix()?, tol)?,
                None => l.clone(),
            };
            Ok((l, r))
        };
        match self {
            GroupJson::Table { elements, table } => {
                let pairs: Vec<_> = elements.iter().map(pair).collect::<Result<_>>()?;
                let labels = elements
                    .iter()
                    .enumerate()
                    .map(|(i, e)| e.label.clone().unwrap_or_else(|| format!("h{i}")))
                    .collect();
                let (phi, rho) = pairs.into_iter().unzip();
                FiniteGroupAction::new(labels, phi, rho, table.clone())
            }
            GroupJson::Generators { generators } => {
                FiniteGroupAction::generate(&generators.iter().map(pair).collect::<Result<Vec<_>>>()?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RigidityMode {
    Intertwiner,
    InvariantSubspace,
    FixedPoint,
}

/// Input of the `rigidity` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidityInput {
    pub mode: RigidityMode,
    pub group: GroupJson,
    /// Starting point `v` (fixed-point, intertwiner; defaults to the identity)
    /// or the projection `p0` (invariant-subspace).
    #[serde(default)]
    pub start: Option<MatrixJson>,
    /// Ambient subspace for fixed-point and intertwiner modes; full by default.
    #[serde(default)]
    pub subspace: Option<SubspaceConfig>,
    #[serde(default)]
    pub options: RigidityOptions,
}

#[derive(Debug, Clone, Serialize)]
pub struct RigidityOutput {
    pub mode: RigidityMode,
    pub group_order: usize,
    pub result: MatrixJson,
    /// Intertwining residual, commutator norm, or displacement by mode.
    pub residual: f64,
    pub displacement: f64,
    pub orbit_size: usize,
    pub orbit_bound: f64,
    pub radius: f64,
    pub limit: f64,
    pub center: CenterSummary,
}

impl RigidityInput {
    pub fn run(&self, tol: &Tolerances) -> Result<RigidityOutput> {
        let action = self.group.build(tol)?;
        let n = action.n();
        let start = match &self.start {
            Some(m) => Some(m.to_matrix::<f64>()?),
            None => None,
        };
        let summarize = |fixed: &FixedPoint<f64>, result: MatrixJson, residual: f64| RigidityOutput {
            mode: self.mode,
            group_order: action.order(),
            result,
            residual,
            displacement: fixed.displacement,
            orbit_size: fixed.orbit.points.len(),
            orbit_bound: fixed.orbit.bound,
            radius: fixed.radius,
            limit: fixed.limit,
            center: fixed.center.summary(),
        };
        match self.mode {
            RigidityMode::InvariantSubspace => {
                let p0 = ProjectionPoint::new(
                    start.ok_or_else(|| Error::Config("invariant-subspace needs a start projection".into()))?,
                )?;
                let res = find_invariant_projection(action.left(), &p0, &self.options, tol)?;
                Ok(summarize(&res.fixed, MatrixJson::from_matrix(res.q.mat()), res.commutator))
            }
            mode => {
                let v = match start {
                    Some(m) => UnitaryPoint::new(m, tol)?,
                    None => UnitaryPoint::identity(n),
                };
                let space = match &self.subspace {
                    Some(c) => c.build(tol)?,
                    None => SubspaceSpec::full(),
                };
                if mode == RigidityMode::Intertwiner {
                    let res = find_intertwiner(&action, &space, &v, &self.options, tol)?;
                    Ok(summarize(&res.fixed, MatrixJson::from_matrix(res.g.mat()), res.residual))
                } else {
                    let res = find_fixed_point(&action, &v, &space, &self.options, tol)?;
                    let d = res.displacement;
                    Ok(summarize(&res, MatrixJson::from_matrix(res.point.mat()), d))
                }
            }
        }
    }
}

/// Permutation matrix sending `e_j` to `e_{perm[j]}`.
pub fn permutation_matrix<T: Real>(perm: &[usize]) -> UnitaryPoint<T> {
    let n = perm.len();
    let mut m = crate::linalg::matrix::ComplexSquareMatrix::zeros(n);
    for (j, &i) in perm.iter().enumerate() {
        m[(i, j)] = crate::C::new(T::one(), T::zero());
    }
    UnitaryPoint::assume_unitary(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::functions::exp_skew;
    use crate::metric::d_2;
    use crate::random::{haar_unitary, random_skew_with_norm, seeded};
    use std::f64::consts::{FRAC_PI_2, PI};

    type U = UnitaryPoint<f64>;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn conjugated_rep(gens: &[U], norm: f64, seed: u64) -> (FiniteGroupAction<f64>, U) {
        let g0 = exp_skew(&random_skew_with_norm::<f64, _>(gens[0].n(), norm, &mut seeded(seed)), &tol()).unwrap();
        let pairs: Vec<(U, U)> = gens
            .iter()
            .map(|p| (p.clone(), &(&g0.inverse() * p) * &g0))
            .collect();
        (FiniteGroupAction::generate(&pairs).unwrap(), g0)
    }

    #[test]
    fn table_validation_rejects_non_homomorphism() {
        let labels = vec!["e".into(), "s".into()];
        let phi = vec![U::identity(1), U::phase(PI)];
        let bad = vec![U::identity(1), U::phase(1.0)];
        let table = vec![vec![0, 1], vec![1, 0]];
        assert!(FiniteGroupAction::new(labels.clone(), phi.clone(), phi.clone(), table.clone()).is_ok());
        assert!(matches!(
            FiniteGroupAction::new(labels, phi, bad, table),
            Err(Error::NotHomomorphism { .. })
        ));
    }

    #[test]
    fn generated_groups_have_expected_order() {
        let c3 = permutation_matrix::<f64>(&[1, 2, 0]);
        let swap = permutation_matrix::<f64>(&[1, 0, 2]);
        assert_eq!(FiniteGroupAction::conjugation(std::slice::from_ref(&c3)).unwrap().order(), 3);
        assert_eq!(FiniteGroupAction::conjugation(&[c3, swap]).unwrap().order(), 6);
    }

    #[test]
    fn trivial_action_orbit_and_fixed_point() {
        let v = haar_unitary::<f64, _>(2, &mut seeded(3));
        let act = FiniteGroupAction::conjugation(&[U::identity(2)]).unwrap();
        let full = SubspaceSpec::full();
        let orb = orbit(&act, &v, &full, TraceConvention::Standard, &tol()).unwrap();
        assert_eq!(orb.points.len(), 1);
        let fp = find_fixed_point(&act, &v, &full, &RigidityOptions::default(), &tol()).unwrap();
        assert!(d_2(&fp.point, &v, TraceConvention::Standard, &tol()).unwrap() < 1e-9);
    }

    #[test]
    fn z2_negation_on_circle_has_no_fixed_point() {
        let act = FiniteGroupAction::generate(&[(U::phase(PI), U::identity(1))]).unwrap();
        let full = SubspaceSpec::full();
        let orb = orbit(&act, &U::identity(1), &full, TraceConvention::Standard, &tol()).unwrap();
        assert_eq!(orb.points.len(), 2);
        assert!((orb.bound - FRAC_PI_2).abs() < 1e-9);
        let err = find_fixed_point(&act, &U::identity(1), &full, &RigidityOptions::default(), &tol()).unwrap_err();
        assert!(matches!(err, Error::RadiusTooLarge { .. }), "{err:?}");
    }

    #[test]
    fn cyclic_intertwiner_recovered() {
        let (act, g0) = conjugated_rep(&[permutation_matrix(&[1, 2, 0])], 0.3, 5);
        let orb = orbit(&act, &U::identity(3), &SubspaceSpec::full(), TraceConvention::Standard, &tol()).unwrap();
        assert!(orb.points.len() <= 3);
        assert!(orb.closure_residual < 1e-8);
        let res = find_intertwiner(&act, &SubspaceSpec::full(), &U::identity(3), &RigidityOptions::default(), &tol())
            .unwrap();
        assert!(res.residual <= 1e-6, "{}", res.residual);
        assert!(intertwining_residual(&act, &g0) < 1e-12);
    }

    #[test]
    fn symmetric_group_intertwiner_recovered() {
        let gens = [permutation_matrix(&[1, 2, 0]), permutation_matrix(&[1, 0, 2])];
        let (act, _) = conjugated_rep(&gens, 0.3, 9);
        assert_eq!(act.order(), 6);
        let res = find_intertwiner(&act, &SubspaceSpec::full(), &U::identity(3), &RigidityOptions::default(), &tol())
            .unwrap();
        assert!(res.residual <= 1e-6, "{}", res.residual);
    }

    #[test]
    fn inequivalent_characters_rejected() {
        let act = FiniteGroupAction::generate(&[(U::identity(1), U::phase(PI))]).unwrap();
        let err = find_intertwiner(&act, &SubspaceSpec::full(), &U::identity(1), &RigidityOptions::default(), &tol())
            .unwrap_err();
        assert!(matches!(err, Error::RadiusTooLarge { .. }), "{err:?}");
    }

    #[test]
    fn invariant_projection_onto_third_axis() {
        let h = U::diag_phases(&[PI, PI, 0.0]);
        let v = [0.08, -0.05, 1.0];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut p = crate::linalg::matrix::ComplexSquareMatrix::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                p[(i, j)] = crate::C::new(v[i] * v[j] / (norm * norm), 0.0);
            }
        }
        let p0 = ProjectionPoint::new(p).unwrap();
        let res = find_invariant_projection(&[h], &p0, &RigidityOptions::default(), &tol()).unwrap();
        assert!(res.commutator <= 1e-6);
        let e3 = ProjectionPoint::<f64>::coordinate(3, &[2]);
        assert!((res.q.mat() - e3.mat()).max_abs() < 1e-6);
        assert_eq!(res.q.rank(), 1);
    }

    #[test]
    fn trivial_group_keeps_projection() {
        let p0 = ProjectionPoint::<f64>::coordinate(3, &[0, 2]);
        let res = find_invariant_projection(&[], &p0, &RigidityOptions::default(), &tol()).unwrap();
        assert!((res.q.mat() - p0.mat()).max_abs() < 1e-9);
    }

    #[test]
    fn coordinate_swap_has_no_invariant_line_nearby() {
        let swap = permutation_matrix::<f64>(&[1, 0]);
        let p0 = ProjectionPoint::coordinate(2, &[0]);
        let err = find_invariant_projection(&[swap], &p0, &RigidityOptions::default(), &tol()).unwrap_err();
        assert!(matches!(err, Error::RadiusTooLarge { .. }), "{err:?}");
    }

    #[test]
    fn json_roundtrip_generators() {
        let json = r#"{"mode":"fixed-point","group":{"generators":[{"left":{"n":1,"entries":[[[-1.0,0.0]]]},"right":{"n":1,"entries":[[[1.0,0.0]]]}}]}}"#;
        let input: RigidityInput = serde_json::from_str(json).unwrap();
        assert!(matches!(input.run(&tol()), Err(Error::RadiusTooLarge { .. })));
    }
}
