use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use unifinsler::center::{verify_uniqueness, CenterInput};
use unifinsler::convexity::ScanInput;
use unifinsler::experiment::{run_experiment, tolerances_from_env, ExperimentId, RunConfig};
use unifinsler::geodesic::{spectral_flow_csv, FlowInput};
use unifinsler::rigidity::{RigidityInput, RigidityMode};
use unifinsler::Tolerances;

/// Finsler geometry of unitary groups: scans, centers, rigidity, spectral flows.
///
/// Set UNIFINSLER_TOL_SCALE to multiply every internal tolerance (debugging
/// aid only; acceptance thresholds are never scaled).
#[derive(Parser)]
#[command(name = "unifinsler", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for all random draws.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// JSON input for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Convexity scan along a geodesic; writes scan.json and CSV tables.
    Scan,
    /// Minimax circumcenter; writes center.json and trace.csv.
    Center {
        /// Re-solve from this many feasible starts and report the spread.
        #[arg(long, default_value_t = 0)]
        restarts: usize,
    },
    /// Fixed points of finite group actions; writes rigidity.json.
    Rigidity {
        /// Overrides the mode given in the config.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Extreme eigenvalue angles along u exp(t x); writes flow.csv.
    Flow,
    /// Runs a named experiment (all of them with `all`).
    Experiment {
        /// Experiment id, e.g. prop23 or center-oracle; overrides the config.
        id: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Intertwiner,
    InvariantSubspace,
    FixedPoint,
}

impl From<Mode> for RigidityMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Intertwiner => RigidityMode::Intertwiner,
            Mode::InvariantSubspace => RigidityMode::InvariantSubspace,
            Mode::FixedPoint => RigidityMode::FixedPoint,
        }
    }
}

fn read_config<T: DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    let path = path.context("this subcommand needs --config FILE.json")?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let tol = tolerances_from_env(Tolerances::default())?;
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Scan => {
            let input: ScanInput = read_config(cfg)?;
            let res = input.run(&tol)?;
            for (name, body) in &res.tables {
                write(&cli.out, name, body)?;
            }
            write(&cli.out, "scan.json", &serde_json::to_string_pretty(&res.report)?)?;
            println!("verdict: {}", if res.passed { "pass" } else { "fail" });
            Ok(res.passed)
        }
        Command::Center { restarts } => {
            let input: CenterInput = read_config(cfg)?;
            let problem = input.build(&tol)?;
            let res = unifinsler::center::solve_center(&problem, &tol)?;
            let mut summary = serde_json::to_value(res.summary())?;
            let mut ok = res.status == unifinsler::center::CenterStatus::Converged;
            if restarts > 0 {
                let uq = verify_uniqueness(&problem, restarts, cli.seed, &tol)?;
                summary["uniqueness"] = serde_json::json!({
                    "restarts": uq.centers.len(),
                    "spread": uq.spread,
                    "allowed": uq.allowed,
                    "within_certificate": uq.within_certificate(),
                });
                ok &= uq.within_certificate();
            }
            write(&cli.out, "center.json", &serde_json::to_string_pretty(&summary)?)?;
            write(&cli.out, "trace.csv", &res.trace_csv()?)?;
            println!("f_A = {:.17e} after {} iterations ({:?})", res.value, res.iterations, res.status);
            Ok(ok)
        }
        Command::Rigidity { mode } => {
            let mut input: RigidityInput = read_config(cfg)?;
            if let Some(m) = mode {
                input.mode = m.into();
            }
            let res = input.run(&tol)?;
            write(&cli.out, "rigidity.json", &serde_json::to_string_pretty(&res)?)?;
            println!("residual {:.3e}, orbit size {}", res.residual, res.orbit_size);
            Ok(true)
        }
        Command::Flow => {
            let input: FlowInput = read_config(cfg)?;
            let samples = input.run(&tol)?;
            write(&cli.out, "flow.csv", &spectral_flow_csv(&samples)?)?;
            Ok(samples.iter().all(|s| s.branch_ok))
        }
        Command::Experiment { id } => {
            let mut base: RunConfig = match (cfg, &id) {
                (Some(_), _) => read_config(cfg)?,
                (None, Some(_)) => RunConfig::new(ExperimentId::Prop23, cli.seed),
                (None, None) => bail!("give an experiment id or --config"),
            };
            if cfg.is_none() || cli.seed != 7 {
                base.seed = cli.seed;
            }
            if cfg.is_none() || cli.out != Path::new("out") {
                base.out = cli.out.clone();
            }
            let ids: Vec<ExperimentId> = match id.as_deref() {
                Some("all") => ExperimentId::ALL.to_vec(),
                Some(s) => vec![s.parse()?],
                None => vec![base.experiment],
            };
            let mut all = true;
            for id in ids {
                let rep = run_experiment(&RunConfig {
                    experiment: id,
                    ..base.clone()
                })?;
                println!("{id} (criterion {}) in {:.2}s", rep.criterion, rep.elapsed_secs);
                for line in &rep.lines {
                    println!("  {line}");
                }
                for e in &rep.errors {
                    println!("  [ERROR] {e}");
                }
                all &= rep.passed();
            }
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
