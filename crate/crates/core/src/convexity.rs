//! Numerical convexity scans along geodesics.
//!
//! Every scan samples `f` on a grid and reports both nonuniform second
//! differences and chord slacks over consecutive grid triples. `d_inf` and the
//! spectral extremes are only piecewise smooth, so their verdict rests on the
//! chord test; the smooth `d_p^p` and `d_2^2` scans require both.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesic::{
    geodesic_between, principal_geodesic, spectral_flow, spectral_flow_csv, Geodesic, GridSpec, SpectralFlowSample,
};
use crate::linalg::io::MatrixJson;
use crate::linalg::matrix::ComplexSquareMatrix;
use crate::linalg::types::{SkewHermitianTangent, TraceConvention, UnitaryPoint};
use crate::metric::{d_inf, d_p, in_ball, BallSpec};
use crate::report::{fmt_real, to_csv};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Scan tolerances. `scan_tol = c h^2 + 1e-6` with `h` the largest grid step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct ScanOptions {
    pub c: f64,
    pub chord_tol: f64,
    /// Run even when the hypotheses of the underlying theorem fail.
    pub force: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            c: 10.0,
            chord_tol: 1e-8,
            force: false,
        }
    }
}

impl ScanOptions {
    pub fn forced() -> Self {
        Self {
            force: true,
            ..Self::default()
        }
    }

    pub fn scan_tol(&self, h: f64) -> f64 {
        self.c * h * h + 1e-6
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    DInf,
    DP,
    StrongD2,
    ThetaMax,
    ThetaMin,
    Counterexample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Convex,
    /// Statistics refer to `-f`.
    Concave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Inputs of a scan, kept for the JSON report.
#[derive(Debug, Clone, Serialize, Default)]
pub struct ScanContext {
    pub points: Vec<(String, MatrixJson)>,
    pub radius: Option<f64>,
    /// Geodesic speed in the metric relevant to the floor.
    pub speed: Option<f64>,
    pub p: Option<u32>,
    pub conv: Option<TraceConvention>,
    pub forced: bool,
    pub hypothesis_violations: Vec<String>,
}

impl ScanContext {
    fn with_point<T: Real>(mut self, name: &str, m: &ComplexSquareMatrix<T>) -> Self {
        self.points.push((name.to_string(), MatrixJson::from_matrix(m)));
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityScanReport<T> {
    pub kind: ScanKind,
    pub orientation: Orientation,
    pub grid: Vec<T>,
    pub values: Vec<T>,
    /// Interior second differences, one per grid point `1..len-1`.
    pub second_differences: Vec<T>,
    pub min_second_difference: T,
    pub floor: T,
    pub scan_tol: T,
    /// `min_i [chord(t_{i-1}, t_{i+1}) - f(t_i)]`.
    pub min_chord_slack: T,
    pub second_difference_ok: bool,
    pub chord_ok: bool,
    /// All interior second differences are strictly positive.
    pub strictly_positive: bool,
    pub verdict: Verdict,
    pub context: ScanContext,
}

impl<T: Real> ConvexityScanReport<T> {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// CSV with columns `t,f,d2f`; `d2f` is empty at the two endpoints.
    pub fn to_csv(&self) -> Result<String> {
        let last = self.grid.len().saturating_sub(1);
        to_csv(
            &["t", "f", "d2f"],
            self.grid.iter().zip(&self.values).enumerate().map(|(i, (&t, &f))| {
                let d2 = if i == 0 || i == last {
                    String::new()
                } else {
                    fmt_real(self.second_differences[i - 1])
                };
                vec![fmt_real(t), fmt_real(f), d2]
            }),
        )
    }
}

/// Second differences on a possibly nonuniform grid.
pub fn second_differences<T: Real>(grid: &[T], values: &[T]) -> Vec<T> {
    (1..grid.len().saturating_sub(1))
        .map(|i| {
            let (h0, h1) = (grid[i] - grid[i - 1], grid[i + 1] - grid[i]);
            let d0 = (values[i] - values[i - 1]) / h0;
            let d1 = (values[i + 1] - values[i]) / h1;
            T::lit(2.0) * (d1 - d0) / (h0 + h1)
        })
        .collect()
}

/// `theta f(s) + (1 - theta) f(t) - f(theta s + (1 - theta) t)`; nonnegative
/// for convex `f`.
pub fn chord_slack<T: Real>(f_s: T, f_t: T, f_mid: T, theta: T) -> T {
    theta * f_s + (T::one() - theta) * f_t - f_mid
}

fn consecutive_chord_slacks<T: Real>(grid: &[T], values: &[T]) -> Vec<T> {
    (1..grid.len().saturating_sub(1))
        .map(|i| {
            let theta = (grid[i + 1] - grid[i]) / (grid[i + 1] - grid[i - 1]);
            chord_slack(values[i - 1], values[i + 1], values[i], theta)
        })
        .collect()
}

/// Minimum chord slack of `f` over `count` random triples `s, t in [lo, hi]`,
/// `theta in [0, 1]`.
pub fn random_chord_test<T: Real, R: Rng + ?Sized>(
    f: impl Fn(T) -> Result<T>,
    lo: T,
    hi: T,
    count: usize,
    rng: &mut R,
) -> Result<T> {
    let mut worst = T::infinity();
    for _ in 0..count {
        let s = lo + (hi - lo) * T::lit(rng.random::<f64>());
        let t = lo + (hi - lo) * T::lit(rng.random::<f64>());
        let theta = T::lit(rng.random::<f64>());
        let mid = theta * s + (T::one() - theta) * t;
        worst = worst.min(chord_slack(f(s)?, f(t)?, f(mid)?, theta));
    }
    Ok(worst)
}

fn max_step<T: Real>(grid: &[T]) -> T {
    grid.windows(2).map(|w| (w[1] - w[0]).abs()).fold(T::zero(), T::max)
}

fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::InvalidArgument("a scan needs at least 3 grid points".into()));
    }
    if grid.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::InvalidArgument("scan grid must be strictly increasing".into()));
    }
    Ok(())
}

struct Build<T> {
    kind: ScanKind,
    orientation: Orientation,
    floor: T,
    require_second_differences: bool,
}

fn build_report<T: Real>(
    b: Build<T>,
    grid: Vec<T>,
    values: Vec<T>,
    opts: &ScanOptions,
    context: ScanContext,
) -> ConvexityScanReport<T> {
    let sign = match b.orientation {
        Orientation::Convex => T::one(),
        Orientation::Concave => -T::one(),
    };
    let oriented: Vec<T> = values.iter().map(|&v| sign * v).collect();
    let second_differences = second_differences(&grid, &values);
    let min_sd = second_differences
        .iter()
        .map(|&d| sign * d)
        .fold(T::infinity(), T::min);
    let min_chord_slack = consecutive_chord_slacks(&grid, &oriented)
        .into_iter()
        .fold(T::infinity(), T::min);
    let scan_tol = T::lit(opts.scan_tol(max_step(&grid).to_f64_lossy()));
    let second_difference_ok = min_sd >= b.floor - scan_tol;
    let chord_ok = min_chord_slack >= -T::lit(opts.chord_tol);
    let pass = chord_ok && (second_difference_ok || !b.require_second_differences);
    ConvexityScanReport {
        kind: b.kind,
        orientation: b.orientation,
        grid,
        values,
        second_differences,
        min_second_difference: min_sd,
        floor: b.floor,
        scan_tol,
        min_chord_slack,
        second_difference_ok,
        chord_ok,
        strictly_positive: min_sd > T::zero(),
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        context,
    }
}

fn hypothesis(violations: &[String], opts: &ScanOptions) -> Result<()> {
    if !violations.is_empty() && !opts.force {
        return Err(Error::HypothesisViolation(violations.join("; ")));
    }
    Ok(())
}

fn sample<T: Real>(grid: &[T], f: impl Fn(T) -> Result<T> + Sync) -> Result<Vec<T>> {
    grid.par_iter().map(|&t| f(t)).collect()
}

/// Convexity of `t -> d_inf(gamma_{u,v}(t), w)`. Hypotheses: `u, v` in
/// `B_inf[w, pi/2]` and `d_inf(u, v) < pi`.
pub fn scan_dinf_convexity<T: Real>(
    w: &UnitaryPoint<T>,
    u: &UnitaryPoint<T>,
    v: &UnitaryPoint<T>,
    grid: &[T],
    opts: &ScanOptions,
    tol: &Tolerances,
) -> Result<ConvexityScanReport<T>> {
    check_grid(grid)?;
    let mut violations = Vec::new();
    let r = d_inf(u, w, tol)?.max(d_inf(v, w, tol)?);
    if r > T::FRAC_PI_2() + T::lit(tol.ball_tol) {
        violations.push(format!("endpoints reach d_inf = {r} > pi/2 from w"));
    }
    let duv = d_inf(u, v, tol)?;
    let g = match geodesic_between(u, v, tol) {
        Ok(g) => g,
        Err(Error::AntipodalSpectrum) => {
            violations.push(format!("d_inf(u, v) = {duv} reaches pi"));
            hypothesis(&violations, opts)?;
            principal_geodesic(u, v, tol)?.0
        }
        Err(e) => return Err(e),
    };
    hypothesis(&violations, opts)?;
    let values = sample(grid, |t| d_inf(&g.eval(t), w, tol))?;
    let context = ScanContext {
        radius: Some(r.to_f64_lossy()),
        speed: Some(g.speed_inf().to_f64_lossy()),
        forced: opts.force,
        hypothesis_violations: violations,
        ..Default::default()
    }
    .with_point("w", w.mat())
    .with_point("u", u.mat())
    .with_point("v", v.mat());
    Ok(build_report(
        Build {
            kind: ScanKind::DInf,
            orientation: Orientation::Convex,
            floor: T::zero(),
            require_second_differences: false,
        },
        grid.to_vec(),
        values,
        opts,
        context,
    ))
}

/// Convexity of `t -> d_p(u, beta(t))^p`. Hypothesis: `beta(t)` in
/// `B_inf(u, pi/2)` at every grid point.
pub fn scan_dp_convexity<T: Real>(
    u: &UnitaryPoint<T>,
    beta: &Geodesic<T>,
    p: u32,
    conv: TraceConvention,
    grid: &[T],
    opts: &ScanOptions,
    tol: &Tolerances,
) -> Result<ConvexityScanReport<T>> {
    check_grid(grid)?;
    let dists = sample(grid, |t| d_inf(u, &beta.eval(t), tol))?;
    let violations: Vec<String> = grid
        .iter()
        .zip(&dists)
        .filter(|(_, &d)| d >= T::FRAC_PI_2())
        .map(|(t, d)| format!("d_inf(u, beta({t})) = {d} >= pi/2"))
        .collect();
    hypothesis(&violations, opts)?;
    let pp = p as i32;
    let values = sample(grid, |t| Ok(d_p(u, &beta.eval(t), p, conv, tol)?.powi(pp)))?;
    let context = ScanContext {
        speed: Some(beta.speed_p(p, conv)?.to_f64_lossy()),
        p: Some(p),
        conv: Some(conv),
        forced: opts.force,
        hypothesis_violations: violations,
        ..Default::default()
    }
    .with_point("u", u.mat())
    .with_point("base", beta.base().mat())
    .with_point("direction", beta.direction().mat());
    Ok(build_report(
        Build {
            kind: ScanKind::DP,
            orientation: Orientation::Convex,
            floor: T::zero(),
            require_second_differences: true,
        },
        grid.to_vec(),
        values,
        opts,
        context,
    ))
}

/// Strong-convexity floor `c^2 sin(2r)/r` of `d_2(w, .)^2` along a geodesic
/// with `d_2`-speed `c` inside `B_inf[w, r]`.
pub fn strong_convexity_floor<T: Real>(speed: T, r: T) -> T {
    speed * speed * (T::lit(2.0) * r).sin() / r
}

/// `lambda = sin(2r)/(2r)`, the modulus for unit-speed geodesics.
pub fn strong_convexity_modulus<T: Real>(r: T) -> T {
    (T::lit(2.0) * r).sin() / (T::lit(2.0) * r)
}

/// Strong convexity of `t -> d_2(w, beta(t))^2` with floor `c^2 sin(2r)/r`.
/// Hypothesis: `0 < r < pi/2` and `beta(t)` in `B_inf[w, r]` on the grid.
pub fn scan_strong_convexity_d2<T: Real>(
    w: &UnitaryPoint<T>,
    beta: &Geodesic<T>,
    r: T,
    conv: TraceConvention,
    grid: &[T],
    opts: &ScanOptions,
    tol: &Tolerances,
) -> Result<ConvexityScanReport<T>> {
    check_grid(grid)?;
    if !(r > T::zero() && r < T::FRAC_PI_2()) {
        return Err(Error::InvalidArgument(format!("radius {r} must lie in (0, pi/2)")));
    }
    let ball = BallSpec::d_inf(w.clone(), r)?;
    let margins = sample(grid, |t| Ok(in_ball(&beta.eval(t), &ball, tol)?.margin))?;
    let ball_tol = T::lit(tol.ball_tol);
    let violations: Vec<String> = grid
        .iter()
        .zip(&margins)
        .filter(|(_, &m)| m < -ball_tol)
        .map(|(t, m)| format!("beta({t}) outside B_inf[w, r] (margin {m})"))
        .collect();
    hypothesis(&violations, opts)?;
    let c = beta.speed_p(2, conv)?;
    let values = sample(grid, |t| Ok(d_p(w, &beta.eval(t), 2, conv, tol)?.powi(2)))?;
    let context = ScanContext {
        radius: Some(r.to_f64_lossy()),
        speed: Some(c.to_f64_lossy()),
        p: Some(2),
        conv: Some(conv),
        forced: opts.force,
        hypothesis_violations: violations,
        ..Default::default()
    }
    .with_point("w", w.mat())
    .with_point("base", beta.base().mat())
    .with_point("direction", beta.direction().mat());
    Ok(build_report(
        Build {
            kind: ScanKind::StrongD2,
            orientation: Orientation::Convex,
            floor: strong_convexity_floor(c, r),
            require_second_differences: true,
        },
        grid.to_vec(),
        values,
        opts,
        context,
    ))
}

/// The two-by-two family `u = diag(e^{i theta}, e^{-i theta})`,
/// `x = [[0, -1], [1, 0]]`, whose top spectral angle is
/// `arccos(cos(theta) cos(t))`.
pub fn counterexample_family<T: Real>(theta: T) -> (UnitaryPoint<T>, SkewHermitianTangent<T>) {
    let u = UnitaryPoint::diag_phases(&[theta, -theta]);
    let mut x = ComplexSquareMatrix::zeros(2);
    x[(0, 1)] = crate::scalar::cplx(-T::one(), T::zero());
    x[(1, 0)] = crate::scalar::cplx(T::one(), T::zero());
    (u, SkewHermitianTangent::project(&x))
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport<T> {
    pub theta: T,
    pub closed_form: Vec<T>,
    pub measured: Vec<T>,
    pub max_abs_difference: T,
    /// Central difference of the measured flow at `t = 0`.
    pub fpp0_estimate: T,
    pub cot_theta: T,
    pub scan: ConvexityScanReport<T>,
}

const FPP_STEP: f64 = 1e-3;

/// Closed form versus measured `theta_max` for [`counterexample_family`], and
/// an estimate of `f''(0)`, which equals `cot(theta)`.
pub fn counterexample_flow<T: Real>(theta: T, grid: &[T], tol: &Tolerances) -> Result<CounterexampleReport<T>> {
    check_grid(grid)?;
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(Error::InvalidArgument(format!("theta = {theta} must lie in (0, pi)")));
    }
    let (u, x) = counterexample_family(theta);
    let closed_form: Vec<T> = grid.iter().map(|&t| (theta.cos() * t.cos()).acos()).collect();
    let flow = spectral_flow(&u, &x, grid, tol)?;
    let measured: Vec<T> = flow.iter().map(|s| s.theta_max).collect();
    let max_abs_difference = closed_form
        .iter()
        .zip(&measured)
        .map(|(a, b)| (*a - *b).abs())
        .fold(T::zero(), T::max);
    let h = T::lit(FPP_STEP);
    let near = spectral_flow(&u, &x, &[-h, T::zero(), h], tol)?;
    let fpp0_estimate = (near[0].theta_max - T::lit(2.0) * near[1].theta_max + near[2].theta_max) / (h * h);
    let context = ScanContext::default()
        .with_point("u", u.mat())
        .with_point("direction", x.mat());
    let scan = build_report(
        Build {
            kind: ScanKind::Counterexample,
            orientation: Orientation::Convex,
            floor: T::zero(),
            require_second_differences: false,
        },
        grid.to_vec(),
        measured.clone(),
        &ScanOptions::forced(),
        context,
    );
    Ok(CounterexampleReport {
        theta,
        closed_form,
        measured,
        max_abs_difference,
        fpp0_estimate,
        cot_theta: theta.cos() / theta.sin(),
        scan,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaExtremesReport<T> {
    pub flow: Vec<SpectralFlowSample<T>>,
    pub theta_max: ConvexityScanReport<T>,
    pub theta_min: ConvexityScanReport<T>,
}

impl<T: Real> ThetaExtremesReport<T> {
    pub fn passed(&self) -> bool {
        self.theta_max.passed() && self.theta_min.passed()
    }
}

/// Convexity of `theta_max` and concavity of `theta_min` along `u exp(t x)`.
/// Hypothesis: spread `theta_max - theta_min < pi` and no eigenvalue at `-1`.
pub fn scan_theta_extremes<T: Real>(
    u: &UnitaryPoint<T>,
    x: &SkewHermitianTangent<T>,
    grid: &[T],
    opts: &ScanOptions,
    tol: &Tolerances,
) -> Result<ThetaExtremesReport<T>> {
    check_grid(grid)?;
    let flow = spectral_flow(u, x, grid, tol)?;
    let bad: Vec<f64> = flow
        .iter()
        .filter(|s| !s.branch_ok || s.theta_max - s.theta_min >= T::PI())
        .map(|s| s.t.to_f64_lossy())
        .collect();
    if !bad.is_empty() && !opts.force {
        return Err(Error::SpreadViolation(bad));
    }
    let violations: Vec<String> = bad.iter().map(|t| format!("spread reaches pi at t = {t}")).collect();
    let context = ScanContext {
        forced: opts.force,
        hypothesis_violations: violations,
        ..Default::default()
    }
    .with_point("u", u.mat())
    .with_point("direction", x.mat());
    let report = |kind, orientation, values| {
        build_report(
            Build {
                kind,
                orientation,
                floor: T::zero(),
                require_second_differences: false,
            },
            grid.to_vec(),
            values,
            opts,
            context.clone(),
        )
    };
    let theta_max = report(
        ScanKind::ThetaMax,
        Orientation::Convex,
        flow.iter().map(|s| s.theta_max).collect(),
    );
    let theta_min = report(
        ScanKind::ThetaMin,
        Orientation::Concave,
        flow.iter().map(|s| s.theta_min).collect(),
    );
    Ok(ThetaExtremesReport {
        flow,
        theta_max,
        theta_min,
    })
}

/// Input of the `scan` command.
#[derive(Debug, Clone, serde::Deserialize, Serialize)]
pub struct ScanInput {
    #[serde(flatten)]
    pub target: ScanTarget,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub options: ScanOptions,
}

#[derive(Debug, Clone, serde::Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanTarget {
    /// `t -> d_inf(w, gamma_{u,v}(t))`.
    DInf { w: MatrixJson, u: MatrixJson, v: MatrixJson },
    /// `t -> d_p(u, base exp(t direction))^p`.
    DP {
        u: MatrixJson,
        base: MatrixJson,
        direction: MatrixJson,
        p: u32,
        #[serde(default)]
        conv: TraceConvention,
    },
    /// `t -> d_2(w, base exp(t direction))^2` against the floor for radius `r`.
    StrongD2 {
        w: MatrixJson,
        base: MatrixJson,
        direction: MatrixJson,
        r: f64,
        #[serde(default)]
        conv: TraceConvention,
    },
    /// Extreme eigenvalue angles along `u exp(t direction)`.
    Theta { u: MatrixJson, direction: MatrixJson },
    /// The two-by-two family `diag(e^{i theta}, e^{-i theta}) exp(t x)`.
    Counterexample { theta: f64 },
}

/// Result of a `scan` command: verdict, a JSON report and named CSV tables.
#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub passed: bool,
    pub report: serde_json::Value,
    pub tables: Vec<(String, String)>,
}

impl ScanInput {
    pub fn run(&self, tol: &Tolerances) -> Result<ScanOutcome> {
        let grid: Vec<f64> = self.grid.build()?;
        let unitary = |m: &MatrixJson| UnitaryPoint::new(m.to_matrix()?, tol);
        let skew = |m: &MatrixJson| SkewHermitianTangent::new(m.to_matrix()?, tol);
        let single = |rep: ConvexityScanReport<f64>| -> Result<ScanOutcome> {
            Ok(ScanOutcome {
                passed: rep.passed(),
                tables: vec![("scan.csv".into(), rep.to_csv()?)],
                report: serde_json::to_value(&rep)?,
            })
        };
        match &self.target {
            ScanTarget::DInf { w, u, v } => single(scan_dinf_convexity(
                &unitary(w)?,
                &unitary(u)?,
                &unitary(v)?,
                &grid,
                &self.options,
                tol,
            )?),
            ScanTarget::DP {
                u,
                base,
                direction,
                p,
                conv,
            } => {
                let beta = Geodesic::new(unitary(base)?, skew(direction)?, tol)?;
                single(scan_dp_convexity(&unitary(u)?, &beta, *p, *conv, &grid, &self.options, tol)?)
            }
            ScanTarget::StrongD2 {
                w,
                base,
                direction,
                r,
                conv,
            } => {
                let beta = Geodesic::new(unitary(base)?, skew(direction)?, tol)?;
                single(scan_strong_convexity_d2(&unitary(w)?, &beta, *r, *conv, &grid, &self.options, tol)?)
            }
            ScanTarget::Theta { u, direction } => {
                let rep = scan_theta_extremes(&unitary(u)?, &skew(direction)?, &grid, &self.options, tol)?;
                Ok(ScanOutcome {
                    passed: rep.passed(),
                    tables: vec![
                        ("flow.csv".into(), spectral_flow_csv(&rep.flow)?),
                        ("theta_max.csv".into(), rep.theta_max.to_csv()?),
                        ("theta_min.csv".into(), rep.theta_min.to_csv()?),
                    ],
                    report: serde_json::to_value(&rep)?,
                })
            }
            ScanTarget::Counterexample { theta } => {
                let rep = counterexample_flow(*theta, &grid, tol)?;
                Ok(ScanOutcome {
                    // "Passing" here means the curve is convex, which it is not past pi/2.
                    passed: rep.scan.passed(),
                    tables: vec![("scan.csv".into(), rep.scan.to_csv()?)],
                    report: serde_json::to_value(&rep)?,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::uniform_grid;
    use crate::random::{haar_unitary, random_in_ball, random_skew_with_norm, seeded};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    type U = UnitaryPoint<f64>;

    fn unit_grid() -> Vec<f64> {
        uniform_grid(0.0, 1.0, 201)
    }

    #[test]
    fn constant_scan_passes() {
        let tol = Tolerances::default();
        let w = haar_unitary::<f64, _>(3, &mut seeded(1));
        let rep = scan_dinf_convexity(&w, &w, &w, &unit_grid(), &ScanOptions::default(), &tol).unwrap();
        assert!(rep.passed());
        assert!(rep.values.iter().all(|&v| v < 1e-7));
    }

    #[test]
    fn commuting_diagonals_piecewise_linear() {
        let tol = Tolerances::default();
        let (a, b) = (1.0, 1.3);
        let u = U::diag_phases(&[-a, 0.0]);
        let v = U::diag_phases(&[b, 0.0]);
        let rep = scan_dinf_convexity(&U::identity(2), &u, &v, &unit_grid(), &ScanOptions::default(), &tol).unwrap();
        assert!(rep.passed());
        for (&t, &f) in rep.grid.iter().zip(&rep.values) {
            assert!((f - (-a + t * (a + b)).abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_counterexample_fails_chord_test() {
        let tol = Tolerances::default();
        let eps = 0.05;
        let u = U::phase(FRAC_PI_2 + eps);
        let v = U::phase(-FRAC_PI_2 - eps);
        let w = U::identity(1);
        assert!(matches!(
            scan_dinf_convexity(&w, &u, &v, &unit_grid(), &ScanOptions::default(), &tol),
            Err(Error::HypothesisViolation(_))
        ));
        let rep = scan_dinf_convexity(&w, &u, &v, &unit_grid(), &ScanOptions::forced(), &tol).unwrap();
        assert!(!rep.passed());
        assert!(rep.min_chord_slack < -1e-3);
    }

    #[test]
    fn dp_through_base_is_power() {
        let tol = Tolerances::default();
        let mut rng = seeded(2);
        let u = haar_unitary::<f64, _>(4, &mut rng);
        let x = random_skew_with_norm(4, 1.2, &mut rng);
        let beta = Geodesic::new(u.clone(), x.clone(), &tol).unwrap();
        let grid = uniform_grid(-1.0, 1.0, 201);
        for p in [2, 4] {
            let rep = scan_dp_convexity(&u, &beta, p, TraceConvention::Standard, &grid, &ScanOptions::default(), &tol)
                .unwrap();
            assert!(rep.passed());
            let norm = crate::linalg::norms::schatten_norm(x.mat(), p, TraceConvention::Standard).unwrap();
            for (&t, &f) in rep.grid.iter().zip(&rep.values) {
                let expect = norm.powi(p as i32) * t.abs().powi(p as i32);
                assert!((f - expect).abs() < 1e-10, "p = {p}, t = {t}");
            }
        }
    }

    #[test]
    fn dp_random_p4_strict() {
        let tol = Tolerances::default();
        let mut rng = seeded(3);
        let n = 6;
        let u = haar_unitary::<f64, _>(n, &mut rng);
        let a = random_in_ball(&u, 0.7, &mut rng);
        let b = random_in_ball(&u, 0.7, &mut rng);
        let beta = geodesic_between(&a, &b, &tol).unwrap();
        let rep = scan_dp_convexity(&u, &beta, 4, TraceConvention::Normalized, &unit_grid(), &ScanOptions::default(), &tol)
            .unwrap();
        assert!(rep.passed());
        assert!(rep.strictly_positive);
    }

    #[test]
    fn strong_floor_values() {
        assert!((strong_convexity_floor(1.0, FRAC_PI_4) - 4.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn strong_convexity_on_prolongation_is_quadratic() {
        let tol = Tolerances::default();
        let mut rng = seeded(4);
        let w = haar_unitary::<f64, _>(3, &mut rng);
        let x = random_skew_with_norm(3, 0.5, &mut rng);
        let beta = Geodesic::new(w.clone(), x, &tol).unwrap();
        let rep = scan_strong_convexity_d2(
            &w,
            &beta,
            1.0,
            TraceConvention::Standard,
            &uniform_grid(-1.0, 1.0, 201),
            &ScanOptions::default(),
            &tol,
        )
        .unwrap();
        let c = beta.speed_p(2, TraceConvention::Standard).unwrap();
        assert!(rep.passed());
        assert!((rep.min_second_difference - 2.0 * c * c).abs() < 1e-6);
    }

    #[test]
    fn strong_convexity_rejects_escape() {
        let tol = Tolerances::default();
        let w = U::identity(1);
        let beta = Geodesic::new(w.clone(), SkewHermitianTangent::diag(&[1.0]), &tol).unwrap();
        let r = scan_strong_convexity_d2(
            &w,
            &beta,
            0.5,
            TraceConvention::Standard,
            &unit_grid(),
            &ScanOptions::default(),
            &tol,
        );
        assert!(matches!(r, Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn example_family_cot() {
        let tol = Tolerances::default();
        let grid = uniform_grid(-0.5, 0.5, 101);
        for &theta in &[FRAC_PI_4, 0.5, 1.0, 2.0, FRAC_PI_2 + 0.1] {
            let rep = counterexample_flow(theta, &grid, &tol).unwrap();
            assert!(rep.max_abs_difference < 1e-9, "{theta}: {}", rep.max_abs_difference);
            assert!((rep.fpp0_estimate - rep.cot_theta).abs() < 1e-4, "{theta}");
        }
        let rep = counterexample_flow(FRAC_PI_2 + 0.1, &grid, &tol).unwrap();
        assert!(rep.fpp0_estimate < 0.0);
        assert!(!rep.scan.passed());
        let rep = counterexample_flow(1e-6, &grid, &tol).unwrap();
        assert!(rep.scan.passed());
    }

    #[test]
    fn commuting_extremes_are_affine() {
        let tol = Tolerances::default();
        let u = U::diag_phases(&[0.2, -0.4, 0.9]);
        let x = SkewHermitianTangent::diag(&[0.3, 0.1, -0.5]);
        let rep = scan_theta_extremes(&u, &x, &uniform_grid(0.0, 1.0, 101), &ScanOptions::default(), &tol).unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn extremes_spread_violation() {
        let tol = Tolerances::default();
        let u = U::diag_phases(&[1.5, -1.5]);
        let x = SkewHermitianTangent::diag(&[1.0, -1.0]);
        assert!(matches!(
            scan_theta_extremes(&u, &x, &uniform_grid(0.0, 1.0, 11), &ScanOptions::default(), &tol),
            Err(Error::SpreadViolation(_))
        ));
    }

    #[test]
    fn scan_consistency_under_refinement() {
        // Halving h moves the minimum second difference by O(h^2).
        let tol = Tolerances::default();
        let theta = 1.0;
        // Compare at the common interior point t = 0.
        let mins: Vec<f64> = [41usize, 81, 161]
            .iter()
            .map(|&k| {
                let rep = counterexample_flow(theta, &uniform_grid(-0.4, 0.4, k), &tol).unwrap();
                rep.scan.second_differences[(k - 1) / 2 - 1]
            })
            .collect();
        let (d1, d2) = ((mins[0] - mins[1]).abs(), (mins[1] - mins[2]).abs());
        assert!(d2 < d1 / 2.0 + 1e-9, "{mins:?}");
    }

    #[test]
    fn csv_has_blank_endpoint_d2f() {
        let tol = Tolerances::default();
        let rep = counterexample_flow(1.0, &uniform_grid(-0.1, 0.1, 5), &tol).unwrap();
        let csv = rep.scan.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,f,d2f");
        assert!(lines[1].ends_with(','));
        assert!(!lines[2].ends_with(','));
    }
}
