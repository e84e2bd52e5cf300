//! Minimax circumcenters: minimize `f_A(u) = max_a d_2(u, a)^2` over
//! `C = M ∩ ⋂_a B_inf[a, r]`.
//!
//! At an iterate `u` the sites are pulled back to the tangent space through
//! `l_a = log(u^-1 a)`; the search direction is the center of the Euclidean
//! minimum enclosing ball of the `l_a` (with one active site this is the pull
//! toward the farthest site). Steps `u exp(eta c)` are accepted by Armijo
//! backtracking from `eta = 1`, subject to feasibility in `C`.

mod meb;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convexity::strong_convexity_modulus;
use crate::error::{Error, Result};
use crate::geodesic::geodesic_between;
use crate::linalg::functions::{exp_skew, log_unitary};
use crate::linalg::io::MatrixJson;
use crate::linalg::matrix::ComplexSquareMatrix;
use crate::linalg::norms::trace_inner;
use crate::linalg::types::{SkewHermitianTangent, TraceConvention, UnitaryPoint};
use crate::metric::{d_2, d_inf, in_ball, BallSpec};
use crate::random::{random_in_ball, seeded};
use crate::report::{fmt_real, to_csv};
use crate::scalar::Real;
use crate::subspace::SubspaceSpec;
use crate::tolerance::Tolerances;

/// How the search direction is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Minimum-enclosing-ball center of the site logs, backtracking from 1.
    #[default]
    EnclosingBall,
    /// Geodesic toward the farthest site (ties by index), backtracking from
    /// `1/(k+2)`. Can stall where several sites are equally far.
    FarthestSite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CenterOptions {
    pub max_iters: usize,
    pub step_rule: StepRule,
    /// Stop once an accepted step is shorter than this in `d_2`.
    pub stop_tol: f64,
    /// Armijo sufficient-decrease fraction.
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for CenterOptions {
    fn default() -> Self {
        Self {
            max_iters: 100_000,
            step_rule: StepRule::EnclosingBall,
            stop_tol: 1e-9,
            armijo: 0.1,
            max_backtracks: 60,
        }
    }
}

/// Sites, subspace, radius and start of a circumcenter problem.
#[derive(Debug, Clone)]
pub struct CenterProblem<T: Real> {
    pub sites: Vec<UnitaryPoint<T>>,
    pub subspace: SubspaceSpec<T>,
    pub radius: T,
    pub conv: TraceConvention,
    pub start: UnitaryPoint<T>,
    pub options: CenterOptions,
}

impl<T: Real> CenterProblem<T> {
    /// Validates the problem: equal dimensions, `0 < r < l/2` with `l` the
    /// subspace length parameter, pairwise `d_inf < pi`, and a start in `C`.
    pub fn new(
        sites: Vec<UnitaryPoint<T>>,
        subspace: SubspaceSpec<T>,
        radius: T,
        conv: TraceConvention,
        start: UnitaryPoint<T>,
        options: CenterOptions,
        tol: &Tolerances,
    ) -> Result<Self> {
        let first = sites
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty site set".into()))?;
        for s in &sites {
            first.mat().check_same_dim(s.mat())?;
        }
        first.mat().check_same_dim(start.mat())?;
        let limit = subspace.length_parameter(first.n()) / T::lit(2.0);
        if !(radius > T::zero() && radius < limit) {
            return Err(Error::InvalidArgument(format!("radius {radius} must lie in (0, {limit})")));
        }
        for i in 0..sites.len() {
            for j in i + 1..sites.len() {
                let d = d_inf(&sites[i], &sites[j], tol)?;
                if d >= T::PI() - T::lit(tol.branch_tol) {
                    return Err(Error::InvalidArgument(format!("sites {i} and {j} are antipodal (d_inf = {d})")));
                }
            }
        }
        let p = Self {
            sites,
            subspace,
            radius,
            conv,
            start,
            options,
        };
        let feas = p.constraints().check(&p.start, tol)?;
        if !feas.ok {
            return Err(Error::InfeasibleStart(format!(
                "subspace residual {}, worst ball margin {}",
                feas.member_residual, feas.worst_margin
            )));
        }
        Ok(p)
    }

    fn constraints(&self) -> Constraints<'_, T> {
        Constraints {
            subspace: &self.subspace,
            balls: self
                .sites
                .iter()
                .map(|a| BallSpec::d_inf(a.clone(), self.radius))
                .collect::<Result<_>>()
                .expect("radius validated below pi"),
        }
    }

    /// `lambda = sin(2r)/(2r)`.
    pub fn lambda(&self) -> T {
        strong_convexity_modulus(self.radius)
    }
}

struct Constraints<'a, T: Real> {
    subspace: &'a SubspaceSpec<T>,
    balls: Vec<BallSpec<T>>,
}

struct Feasibility<T> {
    ok: bool,
    member_residual: T,
    margins: Vec<T>,
    worst_margin: T,
}

impl<T: Real> Constraints<'_, T> {
    fn check(&self, u: &UnitaryPoint<T>, tol: &Tolerances) -> Result<Feasibility<T>> {
        let mem = self.subspace.member(u, tol)?;
        let margins: Vec<T> = self
            .balls
            .iter()
            .map(|b| Ok(in_ball(u, b, tol)?.margin))
            .collect::<Result<_>>()?;
        let worst_margin = margins.iter().copied().fold(T::infinity(), T::min);
        Ok(Feasibility {
            ok: mem.member && worst_margin >= -T::lit(tol.ball_tol),
            member_residual: mem.residual,
            margins,
            worst_margin,
        })
    }
}

/// `f_A(u) = max_a d_2(u, a)^2`.
pub fn f_a<T: Real>(sites: &[UnitaryPoint<T>], u: &UnitaryPoint<T>, conv: TraceConvention, tol: &Tolerances) -> Result<T> {
    let d: Vec<T> = sites
        .par_iter()
        .map(|a| Ok(d_2(u, a, conv, tol)?.powi(2)))
        .collect::<Result<_>>()?;
    Ok(d.into_iter().fold(T::zero(), T::max))
}

/// `max_a d_inf(a, c)` for a candidate `c` in `M`: an upper bound on the
/// circumradius of `A` relative to `M`.
pub fn circumradius_upper<T: Real>(
    sites: &[UnitaryPoint<T>],
    subspace: &SubspaceSpec<T>,
    c: &UnitaryPoint<T>,
    tol: &Tolerances,
) -> Result<T> {
    let mem = subspace.member(c, tol)?;
    if !mem.member {
        return Err(Error::NotInSubspace {
            residual: mem.residual.to_f64_lossy(),
        });
    }
    let d: Vec<T> = sites.par_iter().map(|a| d_inf(a, c, tol)).collect::<Result<_>>()?;
    Ok(d.into_iter().fold(T::zero(), T::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterStatus {
    /// The last accepted (or attempted) step was below `stop_tol`.
    Converged,
    /// `max_iters` reached with a longer last step.
    Stalled,
}

/// Certificates attached to a center.
#[derive(Debug, Clone, Serialize)]
pub struct Certificates<T> {
    /// Ball margins `lambda_min(q + q*) - 2 cos r` per site.
    pub ball_margins: Vec<T>,
    pub member_residual: T,
    /// `max_{a,b} d_2(a, b)^2 / 4 <= min_C f_A`.
    pub f_lower: T,
    pub lambda: T,
    /// `d_2(center, minimizer)^2 <= (f_A(center) - f_lower)/lambda`.
    pub gap_bound: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow<T> {
    pub iter: usize,
    pub f: T,
    pub step: T,
}

#[derive(Debug, Clone)]
pub struct CenterResult<T: Real> {
    pub center: UnitaryPoint<T>,
    pub value: T,
    pub iterations: usize,
    pub max_move_last: T,
    pub status: CenterStatus,
    pub certificates: Certificates<T>,
    pub trace: Vec<TraceRow<T>>,
}

/// Serializable view of a [`CenterResult`].
#[derive(Debug, Clone, Serialize)]
pub struct CenterSummary {
    pub center: MatrixJson,
    pub value: f64,
    pub iterations: usize,
    pub max_move_last: f64,
    pub status: CenterStatus,
    pub certificates: Certificates<f64>,
}

impl<T: Real> CenterResult<T> {
    /// Errors with [`Error::StallWithoutCertificate`] unless converged.
    pub fn certified(self) -> Result<Self> {
        match self.status {
            CenterStatus::Converged => Ok(self),
            CenterStatus::Stalled => Err(Error::StallWithoutCertificate {
                iterations: self.iterations,
                last_move: self.max_move_last.to_f64_lossy(),
            }),
        }
    }

    pub fn summary(&self) -> CenterSummary {
        let c = &self.certificates;
        CenterSummary {
            center: MatrixJson::from_matrix(self.center.mat()),
            value: self.value.to_f64_lossy(),
            iterations: self.iterations,
            max_move_last: self.max_move_last.to_f64_lossy(),
            status: self.status,
            certificates: Certificates {
                ball_margins: c.ball_margins.iter().map(|m| m.to_f64_lossy()).collect(),
                member_residual: c.member_residual.to_f64_lossy(),
                f_lower: c.f_lower.to_f64_lossy(),
                lambda: c.lambda.to_f64_lossy(),
                gap_bound: c.gap_bound.to_f64_lossy(),
            },
        }
    }

    /// Iteration trace as CSV with columns `iter,f_A,step`.
    pub fn trace_csv(&self) -> Result<String> {
        to_csv(
            &["iter", "f_A", "step"],
            self.trace
                .iter()
                .map(|r| vec![r.iter.to_string(), fmt_real(r.f), fmt_real(r.step)]),
        )
    }
}

struct Run<T: Real> {
    center: UnitaryPoint<T>,
    iterations: usize,
    last_move: T,
    converged: bool,
    trace: Vec<TraceRow<T>>,
}

fn site_logs<T: Real>(
    u: &UnitaryPoint<T>,
    sites: &[UnitaryPoint<T>],
    tol: &Tolerances,
) -> Result<Vec<SkewHermitianTangent<T>>> {
    sites
        .par_iter()
        .map(|a| Ok(log_unitary(&u.left_quotient(a), tol)?.tangent))
        .collect()
}

fn norm2_sq<T: Real>(x: &SkewHermitianTangent<T>, conv: TraceConvention) -> T {
    trace_inner(x, x, conv).expect("same dimension")
}

/// Search direction at `u` and the model value `max_a ||l_a - c||^2`.
fn direction<T: Real>(
    logs: &[SkewHermitianTangent<T>],
    values: &[T],
    rule: StepRule,
    conv: TraceConvention,
) -> (SkewHermitianTangent<T>, T) {
    match rule {
        StepRule::EnclosingBall => {
            let k = logs.len();
            let gram: Vec<Vec<T>> = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| trace_inner(&logs[i], &logs[j], conv).expect("same dimension"))
                        .collect()
                })
                .collect();
            let (w, r2) = meb::meb(&gram);
            let mut c = SkewHermitianTangent::zero(logs[0].n());
            for (l, &wi) in logs.iter().zip(&w) {
                if wi > T::zero() {
                    c = c.add(&l.scale(wi));
                }
            }
            (c, r2)
        }
        StepRule::FarthestSite => {
            let mut far = 0;
            for (i, &v) in values.iter().enumerate() {
                if v > values[far] {
                    far = i;
                }
            }
            (logs[far].clone(), T::zero())
        }
    }
}

fn minimize<T: Real>(
    sites: &[UnitaryPoint<T>],
    constraints: &Constraints<'_, T>,
    conv: TraceConvention,
    start: &UnitaryPoint<T>,
    opts: &CenterOptions,
    tol: &Tolerances,
) -> Result<Run<T>> {
    let stop = T::lit(opts.stop_tol);
    let sigma = T::lit(opts.armijo);
    let mut u = start.clone();
    let mut logs = site_logs(&u, sites, tol)?;
    let mut values: Vec<T> = logs.iter().map(|l| norm2_sq(l, conv)).collect();
    let mut f = values.iter().copied().fold(T::zero(), T::max);
    let mut trace = vec![TraceRow {
        iter: 0,
        f,
        step: T::zero(),
    }];
    let mut last_move = T::infinity();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        let (c, model) = direction(&logs, &values, opts.step_rule, conv);
        let c_norm = norm2_sq(&c, conv).sqrt();
        let predicted = match opts.step_rule {
            StepRule::EnclosingBall => (f - model).max(T::zero()),
            StepRule::FarthestSite => c_norm * c_norm,
        };
        if c_norm < stop || predicted <= T::lit(1e-15) * f.max(T::one()) {
            last_move = c_norm.min(last_move);
            converged = true;
            break;
        }
        let noise = T::lit(1e-14) * f.max(T::one());
        let mut eta = match opts.step_rule {
            StepRule::EnclosingBall => T::one(),
            StepRule::FarthestSite => T::one() / T::lit((iterations + 2) as f64),
        };
        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            if eta * c_norm < stop {
                break;
            }
            let cand = &u * &exp_skew(&c.scale(eta), tol)?;
            if constraints.check(&cand, tol)?.ok {
                let cand_logs = site_logs(&cand, sites, tol)?;
                let cand_values: Vec<T> = cand_logs.iter().map(|l| norm2_sq(l, conv)).collect();
                let cand_f = cand_values.iter().copied().fold(T::zero(), T::max);
                if cand_f <= f - sigma * eta * predicted + noise {
                    accepted = Some((cand, cand_logs, cand_values, cand_f));
                    break;
                }
            }
            eta /= T::lit(2.0);
        }
        iterations += 1;
        match accepted {
            Some((cand, l, v, cf)) => {
                last_move = eta * c_norm;
                u = cand;
                logs = l;
                values = v;
                f = cf;
                trace.push(TraceRow {
                    iter: iterations,
                    f,
                    step: last_move,
                });
                if last_move < stop {
                    converged = true;
                    break;
                }
            }
            None => {
                // Every admissible step is shorter than stop_tol.
                last_move = (eta * c_norm).min(stop);
                trace.push(TraceRow {
                    iter: iterations,
                    f,
                    step: T::zero(),
                });
                converged = true;
                break;
            }
        }
    }
    Ok(Run {
        center: u,
        iterations,
        last_move,
        converged,
        trace,
    })
}

fn lower_bound<T: Real>(sites: &[UnitaryPoint<T>], conv: TraceConvention, tol: &Tolerances) -> Result<T> {
    let pairs: Vec<(usize, usize)> = (0..sites.len())
        .flat_map(|i| (i + 1..sites.len()).map(move |j| (i, j)))
        .collect();
    let d: Vec<T> = pairs
        .par_iter()
        .map(|&(i, j)| Ok(d_2(&sites[i], &sites[j], conv, tol)?.powi(2) / T::lit(4.0)))
        .collect::<Result<_>>()?;
    Ok(d.into_iter().fold(T::zero(), T::max))
}

/// Solves the circumcenter problem. A run that exhausts `max_iters` returns
/// its best iterate with status [`CenterStatus::Stalled`]; use
/// [`CenterResult::certified`] to turn that into an error.
pub fn solve_center<T: Real>(problem: &CenterProblem<T>, tol: &Tolerances) -> Result<CenterResult<T>> {
    let constraints = problem.constraints();
    let start_feas = constraints.check(&problem.start, tol)?;
    if !start_feas.ok {
        return Err(Error::InfeasibleStart(format!(
            "subspace residual {}, worst ball margin {}",
            start_feas.member_residual, start_feas.worst_margin
        )));
    }
    let run = minimize(
        &problem.sites,
        &constraints,
        problem.conv,
        &problem.start,
        &problem.options,
        tol,
    )?;
    let feas = constraints.check(&run.center, tol)?;
    let value = f_a(&problem.sites, &run.center, problem.conv, tol)?;
    let f_lower = lower_bound(&problem.sites, problem.conv, tol)?;
    let lambda = problem.lambda();
    Ok(CenterResult {
        center: run.center,
        value,
        iterations: run.iterations,
        max_move_last: run.last_move,
        status: if run.converged {
            CenterStatus::Converged
        } else {
            CenterStatus::Stalled
        },
        certificates: Certificates {
            ball_margins: feas.margins,
            member_residual: feas.member_residual,
            f_lower,
            lambda,
            // The floor covers rounding in `value` and `f_lower`.
            gap_bound: ((value - f_lower).max(T::zero()) + T::lit(64.0) * T::epsilon() * value.max(T::one())) / lambda,
        },
        trace: run.trace,
    })
}

#[derive(Debug, Clone)]
pub struct UniquenessReport<T: Real> {
    pub centers: Vec<UnitaryPoint<T>>,
    pub values: Vec<T>,
    /// Largest pairwise `d_2` between returned centers.
    pub spread: T,
    /// `2 max_i sqrt(gap_bound_i)`: what the certificates allow.
    pub allowed: T,
}

impl<T: Real> UniquenessReport<T> {
    pub fn within_certificate(&self) -> bool {
        self.spread <= self.allowed
    }
}

/// Solves from `k` feasible starts (the problem's own start plus random
/// feasible points) and compares the centers.
pub fn verify_uniqueness<T: Real>(
    problem: &CenterProblem<T>,
    k: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<UniquenessReport<T>> {
    let constraints = problem.constraints();
    let mut rng = seeded(seed);
    let mut starts = vec![problem.start.clone()];
    let mut attempts = 0;
    while starts.len() < k && attempts < 200 * k {
        attempts += 1;
        // Alternate between geodesics toward sites and perturbations of the start.
        let cand = if attempts % 2 == 0 {
            let a = &problem.sites[rand::Rng::random_range(&mut rng, 0..problem.sites.len())];
            match geodesic_between(&problem.start, a, tol) {
                Ok(g) => g.eval(T::lit(rand::Rng::random::<f64>(&mut rng))),
                Err(_) => continue,
            }
        } else {
            random_in_ball(&problem.start, problem.radius, &mut rng)
        };
        if constraints.check(&cand, tol)?.ok {
            starts.push(cand);
        }
    }
    let results: Vec<CenterResult<T>> = starts
        .par_iter()
        .map(|s| {
            let p = CenterProblem {
                start: s.clone(),
                ..problem.clone()
            };
            solve_center(&p, tol)
        })
        .collect::<Result<_>>()?;
    let mut spread = T::zero();
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            spread = spread.max(d_2(&results[i].center, &results[j].center, problem.conv, tol)?);
        }
    }
    let allowed = T::lit(2.0)
        * results
            .iter()
            .map(|r| r.certificates.gap_bound.sqrt())
            .fold(T::zero(), T::max);
    Ok(UniquenessReport {
        values: results.iter().map(|r| r.value).collect(),
        centers: results.into_iter().map(|r| r.center).collect(),
        spread,
        allowed,
    })
}

/// Heuristic circumradius estimate: a witness in `M` and `max_a d_inf(a, witness)`.
#[derive(Debug, Clone)]
pub struct RadiusEstimate<T: Real> {
    pub witness: UnitaryPoint<T>,
    pub bound: T,
    /// `bound + 1e-3`, the radius to use for a center problem.
    pub suggested_radius: T,
}

/// Best-effort radius helper. Starts at the best site in `M` (after one
/// averaged-log step, if that stays in `M`) and runs the center iteration
/// without ball constraints. The bound is an upper bound on the circumradius
/// relative to `M`, never a claim about its exact value.
pub fn estimate_radius<T: Real>(
    sites: &[UnitaryPoint<T>],
    subspace: &SubspaceSpec<T>,
    conv: TraceConvention,
    tol: &Tolerances,
) -> Result<RadiusEstimate<T>> {
    let first = sites
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty site set".into()))?;
    let constraints = Constraints {
        subspace,
        balls: vec![],
    };
    let mut best: Option<(UnitaryPoint<T>, T)> = None;
    let consider = |best: &mut Option<(UnitaryPoint<T>, T)>, c: UnitaryPoint<T>| -> Result<()> {
        if !subspace.member(&c, tol)?.member {
            return Ok(());
        }
        let b = circumradius_upper(sites, subspace, &c, tol)?;
        if best.as_ref().is_none_or(|(_, bb)| b < *bb) {
            *best = Some((c, b));
        }
        Ok(())
    };
    for s in sites {
        consider(&mut best, s.clone())?;
    }
    let start = match &best {
        Some((s, _)) => s.clone(),
        None => {
            return Err(Error::NotInSubspace {
                residual: subspace.residual(first, tol)?.to_f64_lossy(),
            })
        }
    };
    // Averaged-log step from the start.
    let logs = site_logs(&start, sites, tol)?;
    let mut mean = SkewHermitianTangent::zero(start.n());
    for l in &logs {
        mean = mean.add(&l.scale(T::one() / T::lit(sites.len() as f64)));
    }
    let averaged = &start * &exp_skew(&mean, tol)?;
    consider(&mut best, averaged.clone())?;
    for s in [start, averaged] {
        if !subspace.member(&s, tol)?.member {
            continue;
        }
        let run = minimize(sites, &constraints, conv, &s, &CenterOptions::default(), tol)?;
        consider(&mut best, run.center)?;
    }
    let (witness, bound) = best.expect("a site lies in M");
    Ok(RadiusEstimate {
        witness,
        bound,
        suggested_radius: bound + T::lit(1e-3),
    })
}

/// JSON input of the `center` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenterInput {
    pub sites: Vec<MatrixJson>,
    #[serde(default)]
    pub subspace: Option<crate::subspace::SubspaceConfig>,
    /// Defaults to the heuristic estimate plus `1e-3`.
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub conv: TraceConvention,
    /// Defaults to the radius witness.
    #[serde(default)]
    pub start: Option<MatrixJson>,
    #[serde(default)]
    pub options: CenterOptions,
}

impl CenterInput {
    pub fn build(&self, tol: &Tolerances) -> Result<CenterProblem<f64>> {
        let sites: Vec<UnitaryPoint<f64>> = self
            .sites
            .iter()
            .map(|m| UnitaryPoint::new(m.to_matrix()?, tol))
            .collect::<Result<_>>()?;
        let subspace = match &self.subspace {
            Some(c) => c.build(tol)?,
            None => SubspaceSpec::full(),
        };
        let estimate = if self.radius.is_none() || self.start.is_none() {
            Some(estimate_radius(&sites, &subspace, self.conv, tol)?)
        } else {
            None
        };
        let radius = self
            .radius
            .unwrap_or_else(|| estimate.as_ref().expect("estimated").suggested_radius);
        let start = match &self.start {
            Some(m) => UnitaryPoint::new(m.to_matrix::<f64>()?, tol)?,
            None => estimate.expect("estimated").witness,
        };
        CenterProblem::new(sites, subspace, radius, self.conv, start, self.options, tol)
    }
}

/// The identity-based start is common; keeps call sites short.
pub fn identity_start<T: Real>(n: usize) -> UnitaryPoint<T> {
    UnitaryPoint::assume_unitary(ComplexSquareMatrix::identity(n))
}
