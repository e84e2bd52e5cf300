//! Reproducible numerical experiments, one per checkable claim.
//!
//! Each experiment draws its random instances from `trial_rng(seed, i)`, so
//! results do not depend on thread scheduling, and returns pass/fail lines
//! plus CSV tables. [`run_experiment`] writes the tables, a deterministic
//! `summary.json` and a `meta.json` sidecar (timestamps, timings) to disk.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::center::{solve_center, verify_uniqueness, CenterOptions, CenterProblem};
use crate::convexity::{
    counterexample_flow, random_chord_test, scan_strong_convexity_d2, scan_theta_extremes, strong_convexity_modulus,
    ScanOptions,
};
use crate::error::{Error, Result};
use crate::geodesic::{geodesic_between, principal_geodesic, spectral_flow, uniform_grid, Geodesic};
use crate::linalg::functions::{exp_skew, log_unitary};
use crate::linalg::matrix::ComplexSquareMatrix;
use crate::linalg::norms::{op_norm, schatten_norm};
use crate::linalg::types::{TraceConvention, UnitaryPoint};
use crate::metric::{d_2, d_inf, in_ball, BallSpec};
use crate::random::{
    haar_unitary, random_in_ball, random_skew_with_norm, random_symmetry, random_traceless_skew, trial_rng, uniform,
};
use crate::report::{fmt_real, to_csv};
use crate::rigidity::{
    find_intertwiner, find_invariant_projection, permutation_matrix, FiniteGroupAction, RigidityOptions,
};
use crate::subspace::{ProjectionPoint, SubspaceSpec};
use crate::tolerance::Tolerances;

type U = UnitaryPoint<f64>;

/// Environment variable multiplying every library tolerance. For debugging
/// only: acceptance thresholds are never scaled.
pub const TOL_SCALE_ENV: &str = "UNIFINSLER_TOL_SCALE";

/// `base` scaled by `UNIFINSLER_TOL_SCALE` when set.
pub fn tolerances_from_env(base: Tolerances) -> Result<Tolerances> {
    match std::env::var(TOL_SCALE_ENV) {
        Ok(v) => {
            let f: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{TOL_SCALE_ENV}={v:?} is not a number")))?;
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::Config(format!("{TOL_SCALE_ENV} must be positive, got {f}")));
            }
            Ok(base.scaled(f))
        }
        Err(_) => Ok(base),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ExperimentId {
    Prop23,
    LogRoundtrip,
    Thm35,
    Cor310,
    Ex311,
    Thm43,
    Thm44,
    Thm63Midpoint,
    SymmetryGeodesic,
    SuLength,
    CenterOracle,
    RigidityDemo,
    NormBridges,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 13] = [
        Self::Prop23,
        Self::LogRoundtrip,
        Self::Thm35,
        Self::Cor310,
        Self::Ex311,
        Self::Thm43,
        Self::Thm44,
        Self::Thm63Midpoint,
        Self::SymmetryGeodesic,
        Self::SuLength,
        Self::CenterOracle,
        Self::RigidityDemo,
        Self::NormBridges,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Prop23 => "prop23",
            Self::LogRoundtrip => "log-roundtrip",
            Self::Thm35 => "thm35",
            Self::Cor310 => "cor310",
            Self::Ex311 => "ex311",
            Self::Thm43 => "thm43",
            Self::Thm44 => "thm44",
            Self::Thm63Midpoint => "thm63-midpoint",
            Self::SymmetryGeodesic => "symmetry-geodesic",
            Self::SuLength => "su-length",
            Self::CenterOracle => "center-oracle",
            Self::RigidityDemo => "rigidity-demo",
            Self::NormBridges => "norm-bridges",
        }
    }

    /// Acceptance criterion number checked by this experiment.
    pub fn criterion(self) -> u8 {
        match self {
            Self::Prop23 => 1,
            Self::LogRoundtrip => 2,
            Self::Thm35 => 3,
            Self::Cor310 | Self::Ex311 => 4,
            Self::Thm43 | Self::Thm44 => 5,
            Self::Thm63Midpoint => 6,
            Self::SymmetryGeodesic => 7,
            Self::SuLength => 8,
            Self::CenterOracle => 9,
            Self::RigidityDemo => 10,
            Self::NormBridges => 11,
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|id| id.as_str() == s).ok_or_else(|| {
            let known: Vec<_> = Self::ALL.iter().map(|id| id.as_str()).collect();
            Error::Config(format!("unknown experiment id {s:?}; known: {}", known.join(", ")))
        })
    }
}

impl TryFrom<String> for ExperimentId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ExperimentId> for String {
    fn from(id: ExperimentId) -> String {
        id.as_str().to_string()
    }
}

/// Configuration of one experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: ExperimentId,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_seed() -> u64 {
    7
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn new(experiment: ExperimentId, seed: u64) -> Self {
        Self {
            experiment,
            seed,
            tolerances: Tolerances::default(),
            out: default_out(),
        }
    }
}

/// One pass/fail line.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionLine {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    /// `"<= 1e-9"`-style statement of what was required.
    pub requirement: String,
}

impl CriterionLine {
    fn at_most(name: &str, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured <= bound,
            measured,
            requirement: format!("<= {bound:e}"),
        }
    }

    fn at_least(name: &str, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured >= bound,
            measured,
            requirement: format!(">= {bound:e}"),
        }
    }

    fn negative(name: &str, measured: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured < 0.0,
            measured,
            requirement: "< 0".into(),
        }
    }

    fn holds(name: &str, passed: bool, requirement: &str) -> Self {
        Self {
            name: name.into(),
            passed,
            measured: if passed { 1.0 } else { 0.0 },
            requirement: requirement.into(),
        }
    }
}

impl fmt::Display for CriterionLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: measured {:.6e} (required {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.requirement
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentId,
    pub criterion: u8,
    pub seed: u64,
    pub lines: Vec<CriterionLine>,
    /// Per-case errors; each also fails a line.
    pub errors: Vec<String>,
    #[serde(skip)]
    pub tables: Vec<(String, String)>,
    #[serde(skip)]
    pub elapsed_secs: f64,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed) && self.errors.is_empty()
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    experiment: ExperimentId,
    seed: u64,
    unix_time: u64,
    elapsed_secs: f64,
    tolerances: &'a Tolerances,
    tol_scale_env: Option<String>,
    version: &'static str,
}

/// Runs the experiment and writes `<out>/<id>/{*.csv, summary.json, meta.json}`.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentReport> {
    let tol = tolerances_from_env(cfg.tolerances)?;
    let report = evaluate(cfg.experiment, cfg.seed, &tol)?;
    let dir = cfg.out.join(cfg.experiment.as_str());
    write_report(&dir, &report, &tol)?;
    Ok(report)
}

fn write_report(dir: &Path, report: &ExperimentReport, tol: &Tolerances) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, body) in &report.tables {
        std::fs::write(dir.join(name), body)?;
    }
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(report)? + "\n")?;
    let meta = Meta {
        experiment: report.experiment,
        seed: report.seed,
        unix_time: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        elapsed_secs: report.elapsed_secs,
        tolerances: tol,
        tol_scale_env: std::env::var(TOL_SCALE_ENV).ok(),
        version: env!("CARGO_PKG_VERSION"),
    };
    std::fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

/// Runs an experiment in memory.
pub fn evaluate(id: ExperimentId, seed: u64, tol: &Tolerances) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut out = match id {
        ExperimentId::Prop23 => prop23(seed, tol),
        ExperimentId::LogRoundtrip => log_roundtrip(seed, tol),
        ExperimentId::Thm35 => thm35(seed, tol),
        ExperimentId::Cor310 => cor310(seed, tol),
        ExperimentId::Ex311 => ex311(tol),
        ExperimentId::Thm43 => strong_convexity(seed, TraceConvention::Standard, tol),
        ExperimentId::Thm44 => strong_convexity(seed, TraceConvention::Normalized, tol),
        ExperimentId::Thm63Midpoint => midpoint(seed, tol),
        ExperimentId::SymmetryGeodesic => symmetry_geodesic(seed, tol),
        ExperimentId::SuLength => su_length(seed, tol),
        ExperimentId::CenterOracle => center_oracle(seed, tol),
        ExperimentId::RigidityDemo => rigidity_demo(seed, tol),
        ExperimentId::NormBridges => norm_bridges(seed, tol),
    }?;
    let elapsed = start.elapsed().as_secs_f64();
    if let Some(limit) = runtime_limit(id) {
        out.lines.push(CriterionLine::at_most("runtime seconds", elapsed, limit));
    }
    Ok(ExperimentReport {
        experiment: id,
        criterion: id.criterion(),
        seed,
        lines: out.lines,
        errors: out.errors,
        tables: out.tables,
        elapsed_secs: elapsed,
    })
}

fn runtime_limit(id: ExperimentId) -> Option<f64> {
    match id {
        ExperimentId::Prop23 => Some(10.0),
        ExperimentId::CenterOracle => Some(60.0),
        _ => None,
    }
}

#[derive(Default)]
struct Outcome {
    lines: Vec<CriterionLine>,
    errors: Vec<String>,
    tables: Vec<(String, String)>,
}

impl Outcome {
    fn table(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        self.tables.push((name.into(), to_csv(header, rows)?));
        Ok(())
    }

    /// Splits per-trial results into successes and recorded errors.
    fn collect<R>(&mut self, label: &str, results: Vec<Result<R>>) -> Vec<(usize, R)> {
        let mut ok = Vec::new();
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => ok.push((i, v)),
                Err(e) => self.errors.push(format!("{label} trial {i}: {e}")),
            }
        }
        ok
    }
}

fn trials<R: Send>(count: usize, seed: u64, f: impl Fn(usize, &mut crate::random::SeededRng) -> Result<R> + Sync) -> Vec<Result<R>> {
    (0..count)
        .into_par_iter()
        .map(|i| f(i, &mut trial_rng(seed, i as u64)))
        .collect()
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn min_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------------------
// 1. ||id - exp(x)||_inf = 2 sin(||x||_inf / 2)

pub const PROP23_TRIALS: usize = 500;
pub const PROP23_TOL: f64 = 1e-9;

fn prop23(seed: u64, tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let res = trials(PROP23_TRIALS, seed, |_, rng| {
        let n = rng.random_range(1..=12);
        let norm = uniform(0.0, PI, rng);
        let x = random_skew_with_norm::<f64, _>(n, norm, rng);
        let e = exp_skew(&x, tol)?;
        let lhs = op_norm(&(&ComplexSquareMatrix::identity(n) - e.mat()));
        let rhs = 2.0 * (norm / 2.0).sin();
        Ok((n, norm, lhs, rhs))
    });
    let ok = out.collect("chord", res);
    out.lines.push(CriterionLine::at_most(
        "max |‖id − exp x‖∞ − 2 sin(‖x‖∞/2)|",
        max_of(ok.iter().map(|(_, r)| (r.2 - r.3).abs())),
        PROP23_TOL,
    ));
    out.table(
        "chord.csv",
        &["trial", "n", "norm", "lhs", "rhs", "abs_error"],
        ok.iter()
            .map(|(i, (n, norm, l, r))| {
                vec![i.to_string(), n.to_string(), fmt_real(*norm), fmt_real(*l), fmt_real(*r), fmt_real((l - r).abs())]
            })
            .collect(),
    )?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// 2. log(exp x) = x for ||x||_inf <= pi - 0.1

fn log_roundtrip(seed: u64, tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let res = trials(500, seed, |_, rng| {
        let n = rng.random_range(1..=12);
        let norm = uniform(0.0, PI - 0.1, rng);
        let x = random_skew_with_norm::<f64, _>(n, norm, rng);
        let back = log_unitary(&exp_skew(&x, tol)?, tol)?.tangent;
        Ok((n, norm, op_norm(&(back.mat() - x.mat()))))
    });
    let ok = out.collect("roundtrip", res);
    out.lines.push(CriterionLine::at_most(
        "max ‖log(exp x) − x‖∞",
        max_of(ok.iter().map(|(_, r)| r.2)),
        1e-8,
    ));
    out.table(
        "roundtrip.csv",
        &["trial", "n", "norm", "error"],
        ok.iter()
            .map(|(i, (n, norm, e))| vec![i.to_string(), n.to_string(), fmt_real(*norm), fmt_real(*e)])
            .collect(),
    )?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// 3. t -> d_inf(w, gamma(t)) is convex inside B_inf[w, 1.4]; sharp at pi/2

/// Chord slacks of `t -> d_inf(w, gamma_{u,v}(t))`: endpoint chord plus
/// `count` random chords.
pub fn dinf_chord_slack(
    w: &U,
    u: &U,
    v: &U,
    count: usize,
    rng: &mut crate::random::SeededRng,
    tol: &Tolerances,
) -> Result<f64> {
    let g = match geodesic_between(u, v, tol) {
        Ok(g) => g,
        Err(Error::AntipodalSpectrum) => principal_geodesic(u, v, tol)?.0,
        Err(e) => return Err(e),
    };
    let f = |t: f64| d_inf(w, &g.eval(t), tol);
    let ends = 0.5 * (f(0.0)? + f(1.0)?) - f(0.5)?;
    Ok(random_chord_test(f, 0.0, 1.0, count, rng)?.min(ends))
}

fn thm35(seed: u64, tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let res = trials(500, seed, |_, rng| {
        let n = rng.random_range(1..=8);
        let w = haar_unitary::<f64, _>(n, rng);
        let u = random_in_ball(&w, 1.4, rng);
        let v = random_in_ball(&w, 1.4, rng);
        let slack = dinf_chord_slack(&w, &u, &v, 50, rng, tol)?;
        Ok((n, d_inf(&w, &u, tol)?, d_inf(&w, &v, tol)?, slack))
    });
    let ok = out.collect("d_inf convexity", res);
    out.lines.push(CriterionLine::at_least(
        "min chord slack, r = 1.4",
        min_of(ok.iter().map(|(_, r)| r.3)),
        -1e-8,
    ));
    out.table(
        "dinf_chords.csv",
        &["trial", "n", "d_inf_wu", "d_inf_wv", "min_slack"],
        ok.iter()
            .map(|(i, (n, a, b, s))| vec![i.to_string(), n.to_string(), fmt_real(*a), fmt_real(*b), fmt_real(*s)])
            .collect(),
    )?;
    // Circle: endpoints at angle +-(pi/2 + 0.05) from w = 1.
    let r = FRAC_PI_2 + 0.05;
    let (w, u, v) = (U::identity(1), U::phase(r), U::phase(-r));
    let slack = dinf_chord_slack(&w, &u, &v, 50, &mut trial_rng(seed, u64::MAX), tol)?;
    out.lines.push(CriterionLine::at_least(
        "circle violation at r = π/2 + 0.05",
        -slack,
        1e-3,
    ));
    let g = geodesic_between(&u, &v, tol)?;
    let grid = uniform_grid(0.0, 1.0, 201);
    let rows = grid
        .iter()
        .map(|&t| Ok(vec![fmt_real(t), fmt_real(d_inf(&w, &g.eval(t), tol)?)]))
        .collect::<Result<Vec<_>>>()?;
    out.table("circle_sharpness.csv", &["t", "f"], rows)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// 4. theta_max convex / theta_min concave; the 2x2 family f''(0) = cot theta

fn cor310(seed: u64, tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let grid = uniform_grid(0.0, 1.0, 201);
    let opts = ScanOptions::default();
    let res = trials(200, seed, |_, rng| {
        // Redraw until the spread stays below pi along the whole segment.
        for _ in 0..100 {
            let y = random_skew_with_norm::<f64, _>(4, uniform(0.0, 1.2, rng), rng);
            let u = exp_skew(&y, tol)?;
            let x = random_skew_with_norm::<f64, _>(4, uniform(0.2, 1.5, rng), rng);
            match scan_theta_extremes(&u, &x, &grid, &opts, tol) {
                Ok(rep) => {
                    let (u, x) = (&u, &x);
                    let theta = |hi: bool| {
                        move |t: f64| -> Result<f64> {
                            let s = spectral_flow(u, x, &[t], tol)?[0];
                            Ok(if hi { s.theta_max } else { -s.theta_min })
                        }
                    };
                    let chords_max = random_chord_test(theta(true), 0.0, 1.0, 20, rng)?;
                    let chords_min = random_chord_test(theta(false), 0.0, 1.0, 20, rng)?;
                    let spread = max_of(rep.flow.iter().map(|s| s.theta_max - s.theta_min));
                    return Ok((
                        spread,
                        rep.theta_max.min_chord_slack.min(chords_max),
                        rep.theta_min.min_chord_slack.min(chords_min),
                    ));
                }
                Err(Error::SpreadViolation(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::InvalidArgument("no instance with spread below pi in 100 draws".into()))
    });
    let ok = out.collect("spectral flow", res);
    out.lines.push(CriterionLine::at_least(
        "θ_max min chord slack",
        min_of(ok.iter().map(|(_, r)| r.1)),
        -1e-8,
    ));
    out.lines.push(CriterionLine::at_least(
        "−θ_min min chord slack",
        min_of(ok.iter().map(|(_, r)| r.2)),
        -1e-8,
    ));
    out.table(
        "theta_extremes.csv",
        &["trial", "max_spread", "theta_max_slack", "neg_theta_min_slack"],
        ok.iter()
            .map(|(i, (s, a, b))| vec![i.to_string(), fmt_real(*s), fmt_real(*a), fmt_real(*b)])
            .collect(),
    )?;
    let ex = ex311(tol)?;
    out.lines.extend(ex.lines);
    out.errors.extend(ex.errors);
    out.tables.extend(ex.tables);
    Ok(out)
}

/// Angles checked against `cot theta`; the last one, past `pi/2`, must give
/// a negative second derivative.
pub const EX311_THETAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const EX311_NEGATIVE_THETA: f64 = FRAC_PI_2 + 0.1;

fn ex311(tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let grid = uniform_grid(-0.5, 0.5, 201);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for theta in EX311_THETAS.into_iter().chain([EX311_NEGATIVE_THETA]) {
        let rep = counterexample_flow(theta, &grid, tol)?;
        let err = (rep.fpp0_estimate - rep.cot_theta).abs();
        if theta != EX311_NEGATIVE_THETA {
            worst = worst.max(err);
        } else {
            out.lines.push(CriterionLine::negative("f''(0) at θ = π/2 + 0.1", rep.fpp0_estimate));
        }
        rows.push(vec![
            fmt_real(theta),
            fmt_real(rep.fpp0_estimate),
            fmt_real(rep.cot_theta),
            fmt_real(err),
            fmt_real(rep.max_abs_difference),
        ]);
    }
    out.lines.insert(0, CriterionLine::at_most("max |f''(0) − cot θ|", worst, 1e-4));
    out.table(
        "second_derivative.csv",
        &["theta", "fpp0", "cot_theta", "abs_error", "closed_form_max_diff"],
        rows,
    )?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// 5. Second differences of d_2(w, beta(t))^2 above c^2 sin(2r)/r

fn strong_convexity(seed: u64, conv: TraceConvention, tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let r = 1.0;
    let grid = uniform_grid(0.0, 1.0, 201);
    let opts = ScanOptions::default();
    let res = trials(200, seed, |_, rng| {
        let w = haar_unitary::<f64, _>(6, rng);
        let u = random_in_ball(&w, r, rng);
        let v = random_in_ball(&w, r, rng);
        let beta = geodesic_between(&u, &v, tol)?;
        let rep = scan_strong_convexity_d2(&w, &beta, r, conv, &grid, &opts, tol)?;
        Ok((
            rep.context.speed.unwrap_or(f64::NAN),
            rep.floor,
            rep.min_second_difference,
            rep.scan_tol,
        ))
    });
    let ok = out.collect("strong convexity", res);
    let name = format!("min (d²f − floor + tol), {conv:?} trace");
    out.lines.push(CriterionLine::at_least(
        &name,
        min_of(ok.iter().map(|(_, (_, floor, m, st))| m - floor + st)),
        0.0,
    ));
    out.table(
        "strong_convexity.csv",
        &["trial", "speed", "floor", "min_second_difference", "scan_tol"],
        ok.iter()
            .map(|(i, (c, f, m, st))| vec![i.to_string(), fmt_real(*c), fmt_real(*f), fmt_real(*m), fmt_real(*st)])
            .collect(),
    )?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// 6. f_A(mid) <= (f_A(u) + f_A(v))/2 - (lambda/2) d_2(u, v)^2

pub const MIDPOINT_RADIUS: f64 = 1.2;

/// Midpoint slack for sites `a`, feasible `u`, `v` (normalized trace).
pub fn midpoint_slack(sites: &[U], u: &U, v: &U, r: f64, tol: &Tolerances) -> Result<f64> {
    let conv = TraceConvention::Normalized;
    let f = |p: &U| crate::center::f_a(sites, p, conv, tol);
    let mid = geodesic_between(u, v, tol)?.eval(0.5);
    let lambda = strong_convexity_modulus(r);
    let d = d_2(u, v, conv, tol)?;
    Ok(0.5 * (f(u)? + f(v)?) - 0.5 * lambda * d * d - f(&mid)?)
}

fn midpoint(seed: u64, tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let r = MIDPOINT_RADIUS;
    let res = trials(500, seed, |_, rng| {
        let n = rng.random_range(2..=6);
        let w = haar_unitary::<f64, _>(n, rng);
        let k = rng.random_range(1..=4);
        let sites: Vec<U> = (0..k).map(|_| random_in_ball(&w, 0.4, rng)).collect();
        let balls: Vec<BallSpec<f64>> = sites
            .iter()
            .map(|a| BallSpec::d_inf(a.clone(), r))
            .collect::<Result<_>>()?;
        let feasible = |p: &U| -> Result<bool> {
            for b in &balls {
                if !in_ball(p, b, tol)?.inside {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let mut draw = || -> Result<U> {
            for _ in 0..1000 {
                let p = random_in_ball(&w, r + 0.4, rng);
                if feasible(&p)? {
                    return Ok(p);
                }
            }
            Ok(w.clone())
        };
        let (u, v) = (draw()?, draw()?);
        let d = d_2(&u, &v, TraceConvention::Normalized, tol)?;
        Ok((n, k, d, midpoint_slack(&sites, &u, &v, r, tol)?))
    });
    let ok = out.collect("midpoint", res);
    out.lines.push(CriterionLine::at_least(
        "min midpoint slack (λ/2), r = 1.2",
        min_of(ok.iter().map(|(_, r)| r.3)),
        -1e-8,
    ));
    out.table(
        "midpoint.csv",
        &["trial", "n", "sites", "d2_uv", "slack"],
        ok.iter()
            .map(|(i, (n, k, d, s))| vec![i.to_string(), n.to_string(), k.to_string(), fmt_real(*d), fmt_real(*s)])
            .collect(),
    )?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// 7. Geodesics between symmetries are symmetries, u exp(tx) = exp(-tx/2) u exp(tx/2)

fn symmetry_geodesic(seed: u64, tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let res = trials(200, seed, |_, rng| {
        for _ in 0..100 {
            let n = rng.random_range(2..=8);
            let m = rng.random_range(1..n);
            let u = random_symmetry::<f64, _>(n, m, rng);
            let v = random_symmetry::<f64, _>(n, m, rng);
            if d_inf(&u, &v, tol)? >= PI - 1e-6 {
                continue;
            }
            let g = geodesic_between(&u, &v, tol)?;
            let tr0 = u.mat().trace();
            let (mut sym, mut conj, mut trace) = (0.0f64, 0.0f64, 0.0f64);
            for t in uniform_grid(0.0, 1.0, 21) {
                let p = g.eval(t);
                sym = sym.max(op_norm(&(p.mat() - &p.mat().adjoint())));
                let half = exp_skew(&g.direction().scale(t / 2.0), tol)?;
                let other = &(&half.inverse() * &u) * &half;
                conj = conj.max(op_norm(&(p.mat() - other.mat())));
                trace = trace.max((p.mat().trace() - tr0).norm());
            }
            return Ok((n, m, sym, conj, trace));
        }
        Err(Error::InvalidArgument("no symmetry pair below pi in 100 draws".into()))
    });
    let ok = out.collect("symmetry geodesic", res);
    out.lines.push(CriterionLine::at_most(
        "max ‖γ − γ*‖∞",
        max_of(ok.iter().map(|(_, r)| r.2)),
        1e-8,
    ));
    out.lines.push(CriterionLine::at_most(
        "max ‖γ(t) − e^{−tx/2} u e^{tx/2}‖∞",
        max_of(ok.iter().map(|(_, r)| r.3)),
        1e-8,
    ));
    out.lines.push(CriterionLine::at_most(
        "max |Tr γ(t) − Tr u|",
        max_of(ok.iter().map(|(_, r)| r.4)),
        1e-9,
    ));
    out.table(
        "symmetry_geodesics.csv",
        &["trial", "n", "rank", "symmetry_error", "conjugation_error", "trace_error"],
        ok.iter()
            .map(|(i, (n, m, s, c, t))| {
                vec![i.to_string(), n.to_string(), m.to_string(), fmt_real(*s), fmt_real(*c), fmt_real(*t)]
            })
            .collect(),
    )?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// 8. SU(n) has length parameter 2 pi / n

fn det_error_along(g: &Geodesic<f64>, points: usize) -> f64 {
    uniform_grid(0.0, 1.0, points)
        .into_iter()
        .map(|t| (g.eval(t).mat().det() - crate::C::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max)
}

fn su_length(seed: u64, tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for n in 2..=5usize {
        let limit = 2.0 * PI / n as f64;
        let res = trials(100, seed ^ ((n as u64) << 32), |_, rng| {
            let u = exp_skew(&random_traceless_skew::<f64, _>(n, uniform(0.0, PI, rng), rng), tol)?;
            // d_inf(u, v) = ||y||_inf < 2 pi / n
            let y = random_traceless_skew::<f64, _>(n, uniform(0.0, limit * 0.999, rng), rng);
            let v = &u * &exp_skew(&y, tol)?;
            let d = d_inf(&u, &v, tol)?;
            let g = geodesic_between(&u, &v, tol)?;
            Ok((d, det_error_along(&g, 21)))
        });
        for (i, (d, e)) in out.collect(&format!("SU({n})"), res) {
            worst = worst.max(e);
            rows.push(vec![n.to_string(), i.to_string(), fmt_real(d), fmt_real(e)]);
        }
    }
    out.lines.push(CriterionLine::at_most("max |det γ(t) − 1|, n = 2..5", worst, 1e-8));
    // id and -id in SU(2) are at d_inf = pi = 2 pi / 2; the principal geodesic
    // leaves SU(2).
    let (g, _) = principal_geodesic(&U::identity(2), &U::diag_phases(&[PI, PI]), tol)?;
    let interior = uniform_grid(0.0, 1.0, 21)[1..20]
        .iter()
        .map(|&t| (g.eval(t).mat().det() - crate::C::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    out.lines.push(CriterionLine::at_least("SU(2) antipodal interior |det − 1|", interior, 1e-2));
    rows.push(vec!["2".into(), "antipodal".into(), fmt_real(PI), fmt_real(interior)]);
    out.table("su_length.csv", &["n", "trial", "d_inf", "max_det_error"], rows)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// 9. Centers against grid oracles; uniqueness over restarts

fn wrap(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

/// Minimizer of `f` over `[-pi, pi)` on a grid of step at most `step`;
/// `None` when `f` is infinite everywhere.
pub fn circle_grid_argmin(f: impl Fn(f64) -> f64, step: f64) -> Option<(f64, f64)> {
    let count = (2.0 * PI / step).ceil() as usize;
    (0..count)
        .map(|i| -PI + 2.0 * PI * i as f64 / count as f64)
        .map(|a| (a, f(a)))
        .filter(|(_, v)| v.is_finite())
        .min_by(|x, y| x.1.total_cmp(&y.1))
}

/// Coarse-to-fine grid minimizer over the torus `[-pi, pi)^2`: `side^2`
/// points per level, each level zooming by 10 around the best point.
pub fn torus_grid_argmin(f: impl Fn(f64, f64) -> f64, side: usize, levels: usize) -> Option<((f64, f64), f64)> {
    let (mut c, mut half) = ((0.0, 0.0), PI);
    let mut best: Option<((f64, f64), f64)> = None;
    for _ in 0..levels {
        let h = 2.0 * half / (side - 1) as f64;
        for i in 0..side {
            for j in 0..side {
                let p = (c.0 - half + h * i as f64, c.1 - half + h * j as f64);
                let v = f(p.0, p.1);
                if v.is_finite() && best.is_none_or(|(_, b)| v < b) {
                    best = Some((p, v));
                }
            }
        }
        c = best?.0;
        half /= 10.0;
    }
    best
}

/// Site-wise squared `d_2` (standard trace) between commuting diagonal
/// phases; `inf` outside the `d_inf` balls of radius `r`.
fn diagonal_objective(sites: &[[f64; 2]], r: f64, p: [f64; 2]) -> f64 {
    let mut worst = 0.0f64;
    for s in sites {
        let d = [wrap(p[0] - s[0]), wrap(p[1] - s[1])];
        if d[0].abs().max(d[1].abs()) > r {
            return f64::INFINITY;
        }
        worst = worst.max(d[0] * d[0] + d[1] * d[1]);
    }
    worst
}

pub const CIRCLE_THETAS: [f64; 3] = [0.3, 0.9, 1.4];
pub const DIAGONAL_ALPHAS: [f64; 3] = [0.4, 1.0, 1.4];
pub const ORACLE_TOL: f64 = 1e-4;
pub const RESTARTS: usize = 10;

fn center_oracle(seed: u64, tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let conv = TraceConvention::Standard;
    let mut rows = Vec::new();
    let mut worst_err = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut spread_circle = 0.0f64;
    let mut check = |case: String,
                     problem: CenterProblem<f64>,
                     oracle: U,
                     oracle_value: f64,
                     out: &mut Outcome,
                     restart_seed: u64|
     -> Result<f64> {
        let res = solve_center(&problem, tol)?.certified()?;
        let err = d_2(&res.center, &oracle, conv, tol)?;
        let uq = verify_uniqueness(&problem, RESTARTS, restart_seed, tol)?;
        worst_err = worst_err.max(err);
        worst_excess = worst_excess.max(uq.spread - uq.allowed);
        if out.tables.is_empty() {
            out.tables.push((format!("trace_{}.csv", case.replace([' ', '='], "_")), res.trace_csv()?));
        }
        rows.push(vec![
            case,
            fmt_real(err),
            fmt_real(res.value),
            fmt_real(oracle_value),
            fmt_real(res.certificates.gap_bound),
            fmt_real(uq.spread),
            fmt_real(uq.allowed),
        ]);
        Ok(uq.spread)
    };
    for (k, &theta) in CIRCLE_THETAS.iter().enumerate() {
        let r = (theta + 0.1).min(1.5);
        let sites = vec![U::phase(theta), U::phase(-theta)];
        let f = |a: f64| {
            let (d1, d2) = (wrap(a - theta), wrap(a + theta));
            if d1.abs() > r || d2.abs() > r {
                f64::INFINITY
            } else {
                (d1 * d1).max(d2 * d2)
            }
        };
        let (a, v) = circle_grid_argmin(f, ORACLE_TOL).ok_or_else(|| Error::InvalidArgument("empty C".into()))?;
        let problem = CenterProblem::new(sites, SubspaceSpec::full(), r, conv, U::identity(1), CenterOptions::default(), tol)?;
        let s = check(format!("circle theta={theta}"), problem, U::phase(a), v, &mut out, seed + k as u64)?;
        spread_circle = spread_circle.max(s);
    }
    for (k, &alpha) in DIAGONAL_ALPHAS.iter().enumerate() {
        let r = (alpha + 0.05).min(1.5);
        let raw = [[alpha, 0.0], [0.0, alpha]];
        let sites: Vec<U> = raw.iter().map(|s| U::diag_phases(s)).collect();
        let ((p0, p1), v) = torus_grid_argmin(|x, y| diagonal_objective(&raw, r, [x, y]), 201, 5)
            .ok_or_else(|| Error::InvalidArgument("empty C".into()))?;
        let problem = CenterProblem::new(sites, SubspaceSpec::full(), r, conv, U::identity(2), CenterOptions::default(), tol)?;
        check(
            format!("diagonal alpha={alpha}"),
            problem,
            U::diag_phases(&[p0, p1]),
            v,
            &mut out,
            seed + 100 + k as u64,
        )?;
    }
    // Random four-site problem in B_inf[id, 0.7], n = 4.
    let mut rng = trial_rng(seed, 0);
    let id = U::identity(4);
    let sites: Vec<U> = (0..4).map(|_| random_in_ball(&id, 0.7, &mut rng)).collect();
    let problem = CenterProblem::new(sites, SubspaceSpec::full(), 1.45, conv, id, CenterOptions::default(), tol)?;
    let uq = verify_uniqueness(&problem, RESTARTS, seed + 200, tol)?;
    worst_excess = worst_excess.max(uq.spread - uq.allowed);
    rows.push(vec![
        "random n=4".into(),
        String::new(),
        fmt_real(uq.values[0]),
        String::new(),
        String::new(),
        fmt_real(uq.spread),
        fmt_real(uq.allowed),
    ]);
    out.lines.push(CriterionLine::at_most("max d₂(center, grid oracle)", worst_err, ORACLE_TOL));
    out.lines.push(CriterionLine::at_most("max (spread − gap allowance)", worst_excess, 0.0));
    out.lines.push(CriterionLine::at_most("circle-pair spread", spread_circle, 1e-5));
    out.table(
        "centers.csv",
        &["case", "oracle_distance", "value", "oracle_value", "gap_bound", "spread", "allowed"],
        rows,
    )?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// 10. Intertwiners and invariant projections

pub const RIGIDITY_TOL: f64 = 1e-6;

/// `(phi, g0^-1 phi g0)` pairs for the representation generated by `gens`.
pub fn conjugated_representation(gens: &[U], g0: &U) -> Result<FiniteGroupAction<f64>> {
    let pairs: Vec<(U, U)> = gens.iter().map(|p| (p.clone(), &(&g0.inverse() * p) * g0)).collect();
    FiniteGroupAction::generate(&pairs)
}

fn rigidity_demo(seed: u64, tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let opts = RigidityOptions::default();
    let full = SubspaceSpec::full();
    let mut rows = Vec::new();
    let mut rng = trial_rng(seed, 0);
    let cases: [(&str, Vec<U>); 2] = [
        ("Z3", vec![permutation_matrix(&[1, 2, 0])]),
        ("S3", vec![permutation_matrix(&[1, 2, 0]), permutation_matrix(&[1, 0, 2])]),
    ];
    for (name, gens) in cases {
        let g0 = exp_skew(&random_skew_with_norm::<f64, _>(3, 0.3, &mut rng), tol)?;
        let act = conjugated_representation(&gens, &g0)?;
        match find_intertwiner(&act, &full, &U::identity(3), &opts, tol) {
            Ok(res) => {
                out.lines.push(CriterionLine::at_most(&format!("{name} intertwining residual"), res.residual, RIGIDITY_TOL));
                rows.push(vec![name.into(), "found".into(), fmt_real(res.residual), fmt_real(res.fixed.orbit.bound)]);
            }
            Err(e) => {
                out.lines.push(CriterionLine::holds(&format!("{name} intertwiner"), false, "found"));
                out.errors.push(format!("{name}: {e}"));
                rows.push(vec![name.into(), e.to_string(), String::new(), String::new()]);
            }
        }
    }
    let mut expect_too_large = |name: &str, r: Result<f64>, rows: &mut Vec<Vec<String>>| {
        let (ok, status, bound) = match r {
            Err(Error::RadiusTooLarge { bound, .. }) => (true, "radius_too_large".to_string(), fmt_real(bound)),
            Err(e) => (false, e.to_string(), String::new()),
            Ok(res) => (false, format!("unexpected success, residual {res}"), String::new()),
        };
        out.lines.push(CriterionLine::holds(name, ok, "RadiusTooLarge"));
        rows.push(vec![name.into(), status, String::new(), bound]);
    };
    let chars = FiniteGroupAction::generate(&[(U::identity(1), U::phase(PI))])?;
    expect_too_large(
        "inequivalent characters of Z2",
        find_intertwiner(&chars, &full, &U::identity(1), &opts, tol).map(|r| r.residual),
        &mut rows,
    );
    let swap = permutation_matrix::<f64>(&[1, 0]);
    expect_too_large(
        "coordinate swap on Gr1(C2)",
        find_invariant_projection(&[swap], &ProjectionPoint::coordinate(2, &[0]), &opts, tol).map(|r| r.commutator),
        &mut rows,
    );
    // p0 close to the third axis, H = {id, diag(-1, -1, 1)}.
    let v = [uniform(-0.1, 0.1, &mut rng), uniform(-0.1, 0.1, &mut rng), 1.0];
    let norm2: f64 = v.iter().map(|x| x * x).sum();
    let p = ComplexSquareMatrix::from_rows(
        (0..3)
            .map(|i| (0..3).map(|j| crate::C::new(v[i] * v[j] / norm2, 0.0)).collect())
            .collect(),
    )?;
    let h = U::diag_phases(&[PI, PI, 0.0]);
    match find_invariant_projection(&[h], &ProjectionPoint::new(p)?, &opts, tol) {
        Ok(res) => {
            let e3 = ProjectionPoint::<f64>::coordinate(3, &[2]);
            let dist = op_norm(&(res.q.mat() - e3.mat()));
            out.lines.push(CriterionLine::at_most("invariant projection commutator", res.commutator, RIGIDITY_TOL));
            out.lines.push(CriterionLine::at_most("‖q − e₃e₃*‖∞", dist, RIGIDITY_TOL));
            out.lines.push(CriterionLine::holds("q has rank 1", res.q.rank() == 1, "rank 1"));
            rows.push(vec!["projection".into(), "found".into(), fmt_real(res.commutator), fmt_real(res.fixed.orbit.bound)]);
        }
        Err(e) => {
            out.lines.push(CriterionLine::holds("invariant projection", false, "found"));
            out.errors.push(format!("projection: {e}"));
        }
    }
    out.table("rigidity.csv", &["case", "status", "residual", "orbit_bound"], rows)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// 11. (2/pi) d_inf <= ||u - v||_inf <= d_inf, sqrt(1 - pi^2/12) d_2 <= ||u - v||_2 <= d_2

fn norm_bridges(seed: u64, tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let c2 = (1.0 - PI * PI / 12.0).sqrt();
    let conv = TraceConvention::Standard;
    let res = trials(500, seed, |_, rng| {
        let n = rng.random_range(1..=8);
        let u = haar_unitary::<f64, _>(n, rng);
        let v = if rng.random_bool(0.5) {
            random_in_ball(&u, uniform(0.0, PI, rng), rng)
        } else {
            haar_unitary(n, rng)
        };
        let di = d_inf(&u, &v, tol)?;
        let d2 = d_2(&u, &v, conv, tol)?;
        let diff = u.mat() - v.mat();
        let ni = op_norm(&diff);
        let n2 = schatten_norm(&diff, 2, conv)?;
        Ok([ni - 2.0 / PI * di, di - ni, n2 - c2 * d2, d2 - n2])
    });
    let ok = out.collect("norm bridges", res);
    let names = [
        "‖u−v‖∞ − (2/π)d∞",
        "d∞ − ‖u−v‖∞",
        "‖u−v‖₂ − √(1−π²/12)d₂",
        "d₂ − ‖u−v‖₂",
    ];
    for (k, name) in names.iter().enumerate() {
        out.lines
            .push(CriterionLine::at_least(&format!("min {name}"), min_of(ok.iter().map(|(_, s)| s[k])), -1e-9));
    }
    out.table(
        "norm_bridges.csv",
        &["trial", "inf_lower", "inf_upper", "two_lower", "two_upper"],
        ok.iter()
            .map(|(i, s)| {
                let mut row = vec![i.to_string()];
                row.extend(s.iter().map(|&x| fmt_real(x)));
                row
            })
            .collect(),
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_roundtrip_and_unknown_rejected() {
        for id in ExperimentId::ALL {
            assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
        }
        assert!(matches!("thm99".parse::<ExperimentId>(), Err(Error::Config(_))));
        let bad: std::result::Result<RunConfig, _> = serde_json::from_str(r#"{"experiment":"nope"}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn run_config_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"experiment":"prop23"}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.tolerances, Tolerances::default());
    }

    #[test]
    fn ex311_rows() {
        let rep = evaluate(ExperimentId::Ex311, 0, &Tolerances::default()).unwrap();
        assert!(rep.passed(), "{:?}", rep.lines);
        let csv = &rep.tables[0].1;
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn prop23_deterministic_and_passing() {
        let tol = Tolerances::default();
        let a = evaluate(ExperimentId::Prop23, 7, &tol).unwrap();
        let b = evaluate(ExperimentId::Prop23, 7, &tol).unwrap();
        assert!(a.passed(), "{:?}", a.lines);
        assert_eq!(a.tables, b.tables);
    }

    #[test]
    fn grid_oracles() {
        let (a, v) = circle_grid_argmin(|a| (a - 0.3).powi(2), 1e-4).unwrap();
        assert!((a - 0.3).abs() < 1e-4 && v < 1e-8);
        let ((x, y), _) = torus_grid_argmin(|x, y| (x - 0.5).powi(2) + (y + 1.0).powi(2), 201, 5).unwrap();
        assert!((x - 0.5).abs() < 1e-6 && (y + 1.0).abs() < 1e-6);
        assert!((wrap(3.0 * PI / 2.0) + FRAC_PI_2).abs() < 1e-15);
    }

    /// Random sampling rarely finds it, but the lambda/2 midpoint bound fails
    /// for a site at the ball's edge and an off-diagonal chord; lambda/4 holds.
    #[test]
    fn midpoint_bound_worst_case() {
        let tol = Tolerances::default();
        let r = MIDPOINT_RADIUS;
        let (phi0, s) = (1.19, 0.1);
        let w0 = U::diag_phases(&[phi0, -phi0]);
        let mut e = ComplexSquareMatrix::zeros(2);
        e[(0, 1)] = crate::C::new(-s, 0.0);
        e[(1, 0)] = crate::C::new(s, 0.0);
        let e = crate::SkewHermitianTangent::project(&e);
        let u = &w0 * &exp_skew(&e.scale(-1.0), &tol).unwrap();
        let v = &w0 * &exp_skew(&e, &tol).unwrap();
        let sites = [U::identity(2)];
        for p in [&u, &v] {
            assert!(d_inf(&sites[0], p, &tol).unwrap() <= r);
        }
        let slack = midpoint_slack(&sites, &u, &v, r, &tol).unwrap();
        assert!(slack < -5e-4, "{slack}");
        let d = d_2(&u, &v, TraceConvention::Normalized, &tol).unwrap();
        let quarter = slack + 0.25 * strong_convexity_modulus(r) * d * d;
        assert!(quarter >= 0.0, "{quarter}");
    }

    #[test]
    fn run_writes_artifacts() {
        let dir = std::env::temp_dir().join(format!("unifinsler-exp-{}", std::process::id()));
        let cfg = RunConfig {
            out: dir.clone(),
            ..RunConfig::new(ExperimentId::Ex311, 1)
        };
        let rep = run_experiment(&cfg).unwrap();
        assert!(rep.passed());
        for f in ["second_derivative.csv", "summary.json", "meta.json"] {
            assert!(dir.join("ex311").join(f).exists(), "{f}");
        }
        std::fs::remove_dir_all(dir).ok();
    }
}
