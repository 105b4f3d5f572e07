use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use containment_core::hull::{self, hull_of_offsets};
use containment_core::scenario::ParseError;
use containment_core::sim::{self, convergence_time};
use containment_core::{Error, HullMargins, Pose, Scenario, ScenarioConfig, SimulationRun, Vec2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::output::{self, fmt_f64, fmt_opt};
use crate::verdict::Verdict;

pub const DEFAULT_TOL: f64 = 1e-3;
pub const DEFAULT_CONTAIN_TOL: f64 = 1e-9;
pub const THREADS_ENV: &str = "CONTAINMENT_REF_THREADS";

/// Process exit status; the numeric values are a stable contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// Validation or verification failed.
    Failure = 2,
    Divergence = 3,
    /// Could not write output files.
    Io = 74,
    Usage = 64,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("invalid scenario: {0}")]
    Scenario(Error),
    #[error("cannot write output: {0}")]
    Write(#[from] io::Error),
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::Parse { .. } => ExitStatus::Usage,
            CliError::Scenario(_) => ExitStatus::Failure,
            CliError::Write(_) => ExitStatus::Io,
        }
    }
}

/// Flags shared by `validate` and `run`.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub tol: f64,
    pub contain_tol: f64,
    pub seed: Option<u64>,
    pub override_validation: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, contain_tol: DEFAULT_CONTAIN_TOL, seed: None, override_validation: false }
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    Scenario::from_json(&text).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

fn validation_verdict(config: &ScenarioConfig<f64>) -> Verdict {
    let report = config.validate();
    let margins = hull::margins(&config.model).ok();
    Verdict::from_validation(&report, config.gains.g4, config.graph.n(), margins)
}

/// Assumptions and gain condition only; nothing is integrated.
pub fn cmd_validate(path: &Path, opts: &RunOptions) -> Result<(Verdict, ExitStatus), CliError> {
    let scenario = load_scenario(path)?;
    let config = scenario.to_config::<f64>(opts.seed).map_err(CliError::Scenario)?;
    let verdict = validation_verdict(&config);
    let status = if verdict.passed { ExitStatus::Success } else { ExitStatus::Failure };
    Ok((verdict, status))
}

/// True when every agent's final pose lies in the scaled position hull and
/// the scaled heading interval at the final time.
pub fn containment_final(run: &SimulationRun<f64>, config: &ScenarioConfig<f64>, tol: f64) -> Option<bool> {
    let t = run.final_time();
    let hull = hull::leader_hull(&config.model, t, true).ok()?;
    let theta = hull::theta_interval(&config.model, t, true);
    Some(run.final_states().iter().all(|s| hull.contains_point(s.eta.position(), tol) && theta.contains(s.eta.theta, tol)))
}

fn finish_verdict(verdict: &mut Verdict, run: &SimulationRun<f64>, config: &ScenarioConfig<f64>, opts: &RunOptions) {
    verdict.simulated = true;
    verdict.tol = Some(opts.tol);
    verdict.convergence_time = convergence_time(run, opts.tol);
    verdict.final_xi_norm = run.diagnostics.last().map(|f| f.xi_norm());
    verdict.containment_final = containment_final(run, config, opts.contain_tol);
    verdict.envelope_violations = Some(run.envelope_violations());
    if let Ok(partition) = config.graph.partition::<f64>() {
        verdict.max_identity_residual =
            run.diagnostics.iter().map(|f| f.identity_residual(&partition)).fold(None, |m: Option<f64>, r| {
                Some(m.map_or(r, |m| m.max(r)))
            });
    }
    verdict.passed = verdict.validation_passed
        && verdict.convergence_time.is_some()
        && verdict.containment_final == Some(true)
        && verdict.envelope_violations == Some(0);
}

/// Integrates the scenario, streaming `trajectories.csv` and
/// `diagnostics.csv` into `out_dir` and writing `verdict.json` at the end.
/// The CSVs are flushed even if the run diverges.
pub fn cmd_run(path: &Path, out_dir: &Path, opts: &RunOptions) -> Result<(Verdict, ExitStatus), CliError> {
    let scenario = load_scenario(path)?;
    let mut config = scenario.to_config::<f64>(opts.seed).map_err(CliError::Scenario)?;
    config.override_validation = opts.override_validation;
    let mut verdict = validation_verdict(&config);
    verdict.validation_overridden = opts.override_validation;
    if !verdict.validation_passed && !opts.override_validation {
        return Ok((verdict, ExitStatus::Failure));
    }

    fs::create_dir_all(out_dir)?;
    let mut traj = BufWriter::new(File::create(out_dir.join("trajectories.csv"))?);
    let mut diag = BufWriter::new(File::create(out_dir.join("diagnostics.csv"))?);
    writeln!(traj, "{}", output::TRAJECTORY_HEADER)?;
    writeln!(diag, "{}", output::DIAGNOSTICS_HEADER)?;

    let mut write_err: Option<io::Error> = None;
    let result = sim::run_with(&config, |states, frame| {
        if write_err.is_some() {
            return;
        }
        let r = output::write_states(&mut traj, frame.t, states).and_then(|_| output::write_diagnostics(&mut diag, frame));
        if let Err(e) = r {
            write_err = Some(e);
        }
    });
    traj.flush()?;
    diag.flush()?;
    if let Some(e) = write_err {
        return Err(e.into());
    }

    let status = match result {
        Ok(run) => {
            finish_verdict(&mut verdict, &run, &config, opts);
            if verdict.passed { ExitStatus::Success } else { ExitStatus::Failure }
        }
        Err(Error::NonFiniteState { t }) => {
            verdict.simulated = true;
            verdict.tol = Some(opts.tol);
            verdict.diverged_at = Some(t);
            verdict.passed = false;
            ExitStatus::Divergence
        }
        Err(e) => return Err(CliError::Scenario(e)),
    };
    fs::write(out_dir.join("verdict.json"), verdict.to_json())?;
    Ok((verdict, status))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MarginsEntry {
    pub mu: f64,
    pub alpha_p: f64,
    pub alpha_theta: f64,
    /// Hull of the offsets, relative to the formation center.
    pub original_hull: Vec<[f64; 2]>,
    pub scaled_hull: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginsReport {
    pub entries: Vec<MarginsEntry>,
}

fn vertices(poly: &containment_core::ConvexPolygon<f64>) -> Vec<[f64; 2]> {
    poly.vertices().iter().map(|v| [v.x, v.y]).collect()
}

/// Margins for the file's μ, or for each value in `mu_sweep` when given.
pub fn cmd_margins(path: &Path, mu_sweep: Option<&[f64]>) -> Result<(MarginsReport, ExitStatus), CliError> {
    let scenario = load_scenario(path)?;
    let model = scenario.build_model::<f64>().map_err(CliError::Scenario)?;
    let mus = match mu_sweep {
        Some([]) => return Err(CliError::Usage("--mu-sweep needs at least one value".into())),
        Some(list) => list.to_vec(),
        None => vec![model.mu()],
    };
    let original = hull_of_offsets(&model.position_offsets()).map_err(CliError::Scenario)?;
    let mut entries = Vec::with_capacity(mus.len());
    for mu in mus {
        let m = model.with_mu(mu).map_err(CliError::Scenario)?;
        let HullMargins { alpha_p, alpha_theta } = hull::margins(&m).map_err(CliError::Scenario)?;
        entries.push(MarginsEntry {
            mu,
            alpha_p,
            alpha_theta,
            original_hull: vertices(&original),
            scaled_hull: vertices(&original.scale_about(Vec2::zero(), mu)),
        });
    }
    Ok((MarginsReport { entries }, ExitStatus::Success))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    G3,
    G4,
    Mu,
    Dt,
}

impl std::str::FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "g3" => Ok(Self::G3),
            "g4" => Ok(Self::G4),
            "mu" => Ok(Self::Mu),
            "dt" => Ok(Self::Dt),
            other => Err(format!("unknown sweep parameter `{other}` (expected g3, g4, mu or dt)")),
        }
    }
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::G3 => "g3",
            Self::G4 => "g4",
            Self::Mu => "mu",
            Self::Dt => "dt",
        }
    }

    fn apply(self, scenario: &mut Scenario, value: f64) {
        match self {
            Self::G3 => scenario.gains.g3 = value,
            Self::G4 => scenario.gains.g4 = value,
            Self::Mu => scenario.leaders.mu = value,
            Self::Dt => {
                // Keep the logging cadence in simulated time roughly fixed.
                let span = scenario.sim.dt * scenario.sim.log_every as f64;
                scenario.sim.dt = value;
                scenario.sim.log_every = ((span / value).round() as usize).max(1);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub status: &'static str,
    pub convergence_time: Option<f64>,
    pub final_xi_norm: Option<f64>,
    pub containment_final: Option<bool>,
    pub envelope_violations: Option<usize>,
    /// Max-abs difference of the final stacked state from the first row
    /// that produced one.
    pub final_state_diff: Option<f64>,
    final_states: Option<Vec<f64>>,
}

fn sweep_one(scenario: &Scenario, param: SweepParam, value: f64, opts: &RunOptions) -> SweepRow {
    let mut row = SweepRow {
        value,
        status: "error",
        convergence_time: None,
        final_xi_norm: None,
        containment_final: None,
        envelope_violations: None,
        final_state_diff: None,
        final_states: None,
    };
    let mut s = scenario.clone();
    param.apply(&mut s, value);
    let mut config = match s.to_config::<f64>(opts.seed) {
        Ok(c) => c,
        Err(_) => return row,
    };
    config.override_validation = opts.override_validation;
    let mut verdict = validation_verdict(&config);
    if !verdict.validation_passed && !opts.override_validation {
        row.status = "validation_failed";
        return row;
    }
    match sim::run(&config) {
        Ok(run) => {
            finish_verdict(&mut verdict, &run, &config, opts);
            row.status = if verdict.passed { "ok" } else { "verification_failed" };
            row.convergence_time = verdict.convergence_time;
            row.final_xi_norm = verdict.final_xi_norm;
            row.containment_final = verdict.containment_final;
            row.envelope_violations = verdict.envelope_violations;
            row.final_states = Some(
                run.final_states()
                    .iter()
                    .flat_map(|a| [a.eta, a.phi, a.rho])
                    .flat_map(|p: Pose<f64>| p.to_array())
                    .collect(),
            );
        }
        Err(Error::NonFiniteState { .. }) => row.status = "diverged",
        Err(_) => {}
    }
    row
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok().filter(|&n| n > 0)
}

/// Runs the scenario once per value, in parallel, returning rows in input
/// order.
pub fn cmd_sweep(
    path: &Path,
    param: SweepParam,
    values: &[f64],
    opts: &RunOptions,
) -> Result<(Vec<SweepRow>, ExitStatus), CliError> {
    if values.is_empty() {
        return Err(CliError::Usage("sweep needs at least one value".into()));
    }
    let scenario = load_scenario(path)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap().unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let mut rows: Vec<SweepRow> =
        pool.install(|| values.par_iter().map(|&v| sweep_one(&scenario, param, v, opts)).collect());

    if let Some(reference) = rows.iter().find_map(|r| r.final_states.clone()) {
        for row in &mut rows {
            row.final_state_diff = row.final_states.as_ref().map(|fs| {
                fs.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            });
        }
    }
    let status = if rows.iter().any(|r| r.status == "diverged") {
        ExitStatus::Divergence
    } else if rows.iter().all(|r| r.status == "ok") {
        ExitStatus::Success
    } else {
        ExitStatus::Failure
    };
    Ok((rows, status))
}

pub fn sweep_csv(param: SweepParam, rows: &[SweepRow]) -> String {
    let mut out = String::from(output::SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            param.name(),
            fmt_f64(r.value),
            r.status,
            fmt_opt(r.convergence_time),
            fmt_opt(r.final_xi_norm),
            r.containment_final.map(|b| b.to_string()).unwrap_or_default(),
            r.envelope_violations.map(|n| n.to_string()).unwrap_or_default(),
            fmt_opt(r.final_state_diff),
        ));
    }
    out
}
