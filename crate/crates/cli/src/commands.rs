use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use emaxwell::analysis::{
    assess_claim, calibrated_constant, calibration_drift, constraint_conservation, oracle_equivalence,
    self_convergence_order, verify_inequality, ConstraintReport, ConvergenceReport, DecayAssessment, InequalityReport,
    OracleCheckReport, CALIBRATION_TOLERANCE, TORUS_CAVEAT,
};
use emaxwell::integrator::{run_simulation_with, ProjectionEvent, RunError, TrajectoryRecord, VacuumEvent};
use emaxwell::model::ModelParams;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::{snapshot_path, timeseries_csv, write_atomic, write_json, write_snapshot, CSV_SCHEMA_VERSION};
use crate::suite::{Check, SuiteSpec};

pub const SHARP_TOLERANCE: f64 = 1e-10;
pub const ORACLE_TOLERANCE: f64 = 1e-6;
pub const ORDER_TARGET: f64 = 4.0;
pub const ORDER_TOLERANCE: f64 = 0.2;
pub const CONSTRAINT_TOLERANCE: f64 = 1e-8;

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok = 0,
    /// Config or IO problem.
    Error = 1,
    Vacuum = 2,
    AssertionFailed = 3,
}

pub struct Options {
    pub output_dir: PathBuf,
    pub seed: Option<u64>,
    pub quiet: bool,
}

impl Options {
    fn progress(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn prepare_dir(&self) -> Result<()> {
        fs::create_dir_all(&self.output_dir)
            .with_context(|| format!("cannot create output directory {}", self.output_dir.display()))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_config(path: &Path, opts: &Options) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::parse(&read(path)?).with_context(|| format!("invalid config {}", path.display()))?;
    if let Some(seed) = opts.seed {
        cfg.set_seed(seed);
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct Software {
    name: &'static str,
    version: &'static str,
}

const SOFTWARE: Software = Software {
    name: env!("CARGO_PKG_NAME"),
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Serialize)]
struct ProjectionSummary {
    count: usize,
    /// Largest pre-projection `max(r_E, r_B) / ||state||`.
    max_relative_residual: f64,
}

impl ProjectionSummary {
    fn new(events: &[ProjectionEvent]) -> Self {
        Self {
            count: events.len(),
            max_relative_residual: events.iter().map(ProjectionEvent::relative).fold(0.0, f64::max),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    software: Software,
    command: &'static str,
    csv_schema_version: u32,
    /// The effective configuration in the input format.
    config: Vec<String>,
    wall_time_seconds: f64,
    steps: u64,
    samples: usize,
    final_time: f64,
    vacuum: Option<VacuumEvent>,
    projections: ProjectionSummary,
    files: &'a [String],
}

struct RunOutput {
    record: TrajectoryRecord,
    files: Vec<String>,
}

/// Runs the configured simulation, writing snapshots as they come up and
/// the time series at the end.
fn simulate_and_write(cfg: &ExperimentConfig, opts: &Options) -> Result<RunOutput> {
    let run = cfg.run_config();
    let mut pending: Vec<f64> = cfg.snapshot_times.clone();
    pending.sort_by(f64::total_cmp);
    pending.dedup();
    let mut files = Vec::new();
    let mut taken = 0;
    let record = run_simulation_with(&run, |state, row| {
        let t = row.time();
        while taken < pending.len() && t >= pending[taken] - 1e-9 * pending[taken].abs().max(1.0) {
            let path = snapshot_path(&opts.output_dir, taken);
            write_snapshot(&path, state, row.step).map_err(|e| RunError::Output(e.to_string()))?;
            files.push(path.file_name().unwrap().to_string_lossy().into_owned());
            taken += 1;
        }
        opts.progress(format!("t = {t:.4}  E_N = {:.6e}  D_N = {:.6e}", row.energy.energy, row.energy.dissipation));
        Ok(())
    })
    .map_err(|e| match e {
        RunError::Output(msg) => anyhow!("writing snapshot: {msg}"),
        other => anyhow!("{other}"),
    })?;
    let csv = timeseries_csv(&record.samples, &run.diagnostics, &cfg.claims)?;
    write_atomic(&opts.path("timeseries.csv"), &csv)?;
    files.insert(0, "timeseries.csv".into());
    Ok(RunOutput { record, files })
}

fn write_manifest(cfg: &ExperimentConfig, opts: &Options, command: &'static str, out: &RunOutput, started: Instant) -> Result<()> {
    let r = &out.record;
    let manifest = Manifest {
        software: SOFTWARE,
        command,
        csv_schema_version: CSV_SCHEMA_VERSION,
        config: cfg.serialize().lines().map(String::from).collect(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        steps: r.steps,
        samples: r.samples.len(),
        final_time: r.samples.last().map_or(0.0, |s| s.time()),
        vacuum: r.vacuum,
        projections: ProjectionSummary::new(&r.projections),
        files: &out.files,
    };
    write_json(&opts.path("manifest.json"), &manifest)
}

fn vacuum_outcome(record: &TrajectoryRecord, opts: &Options) -> Outcome {
    match record.vacuum {
        Some(v) => {
            eprintln!("vacuum at t = {}: min density {:.3e}", v.time, v.min_density);
            Outcome::Vacuum
        }
        None => {
            opts.progress(format!("done: {} steps, {} samples", record.steps, record.samples.len()));
            Outcome::Ok
        }
    }
}

pub fn simulate(config: &Path, opts: &Options) -> Result<Outcome> {
    let started = Instant::now();
    let cfg = load_config(config, opts)?;
    opts.prepare_dir()?;
    let out = simulate_and_write(&cfg, opts)?;
    write_manifest(&cfg, opts, "simulate", &out, started)?;
    Ok(vacuum_outcome(&out.record, opts))
}

#[derive(Serialize)]
struct DecayReport<'a> {
    software: Software,
    caveat: &'static str,
    window: (f64, f64),
    /// Energy order `N` of the run, checked against each claim.
    energy_order: u32,
    b_infinity: [f64; 3],
    /// `Some(e)` when the series was `(1 + t)^e` instead of a simulation.
    synthetic_exponent: Option<f64>,
    vacuum: Option<VacuumEvent>,
    assessments: &'a [DecayAssessment],
}

fn synthetic_series(exponent: f64, t_end: f64, dt: f64) -> Vec<(f64, f64)> {
    let count = (t_end / dt + 1e-9).floor() as usize;
    (0..=count)
        .map(|i| {
            let t = i as f64 * dt;
            (t, (1.0 + t).powf(exponent))
        })
        .collect()
}

pub fn decay_study(config: &Path, opts: &Options) -> Result<Outcome> {
    let started = Instant::now();
    let cfg = load_config(config, opts)?;
    if cfg.claims.is_empty() {
        bail!("decay.claims: a decay study needs at least one claim");
    }
    let control = &cfg.run.control;
    if cfg.fit_window.1 > control.t_end + 1e-12 {
        bail!(
            "decay.window: t1 = {} is beyond control.t_end = {}",
            cfg.fit_window.1,
            control.t_end
        );
    }
    opts.prepare_dir()?;
    let n = cfg.run.diagnostics.energy_order;
    let params: &ModelParams = &cfg.run.model;

    let (series, vacuum): (Vec<Vec<(f64, f64)>>, Option<VacuumEvent>) = match cfg.synthetic_exponent {
        Some(e) => {
            let s = synthetic_series(e, control.t_end, control.sample_every);
            (vec![s; cfg.claims.len()], None)
        }
        None => {
            let out = simulate_and_write(&cfg, opts)?;
            write_manifest(&cfg, opts, "decay-study", &out, started)?;
            let series = (0..cfg.claims.len())
                .map(|i| out.record.samples.iter().map(|r| (r.time(), r.decay[i])).collect())
                .collect();
            (series, out.record.vacuum)
        }
    };
    let assessments: Vec<DecayAssessment> = cfg
        .claims
        .iter()
        .zip(&series)
        .map(|(claim, s)| assess_claim(claim, n, params, s, cfg.fit_window))
        .collect();
    for a in &assessments {
        let fitted = a.fit.as_ref().map_or("none".to_string(), |f| format!("{:.4}", f.exponent));
        opts.progress(format!(
            "{}: predicted {:.4}, fitted {fitted}, {:?}",
            crate::config::claim_to_string(&a.claim),
            a.predicted_exponent,
            a.verdict
        ));
    }
    let report = DecayReport {
        software: SOFTWARE,
        caveat: TORUS_CAVEAT,
        window: cfg.fit_window,
        energy_order: n,
        b_infinity: params.b_infinity,
        synthetic_exponent: cfg.synthetic_exponent,
        vacuum,
        assessments: &assessments,
    };
    write_json(&opts.path("decay_report.json"), &report)?;
    Ok(match vacuum {
        Some(_) => Outcome::Vacuum,
        None => Outcome::Ok,
    })
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Detail {
    Lemma {
        report: InequalityReport,
        /// Frozen reference for the maximum ratio, when one exists for these parameters.
        calibration: Option<f64>,
        drift: Option<f64>,
    },
    Oracle(OracleCheckReport),
    Convergence(ConvergenceReport),
    Constraints(ConstraintReport),
    None,
}

#[derive(Serialize)]
struct CheckResult {
    check: &'static str,
    status: Status,
    message: String,
    /// Seed that regenerates the offending sample through `replay_sample`.
    replay_seed: Option<u64>,
    detail: Detail,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    software: Software,
    seed: u64,
    passed: bool,
    suite: Vec<String>,
    checks: &'a [CheckResult],
}

fn run_check(check: &Check, spec: &SuiteSpec) -> CheckResult {
    let params = ModelParams::default();
    let name = check.name();
    let result = |ok: bool, message: String, replay_seed, detail| CheckResult {
        check: name,
        status: if ok { Status::Pass } else { Status::Fail },
        message,
        replay_seed,
        detail,
    };
    let error = |message: String| CheckResult {
        check: name,
        status: Status::Error,
        message,
        replay_seed: None,
        detail: Detail::None,
    };
    match check {
        Check::Lemma(lp) => match verify_inequality(lp, &spec.sampling) {
            Err(e) => error(e.to_string()),
            Ok(report) => {
                let worst = report.worst;
                let calibration = calibrated_constant(lp, &spec.sampling);
                let drift = calibration.map(|c| calibration_drift(report.max_ratio, c));
                let (ok, message) = if let Some(sharp) = report.sharp_bound_holds(SHARP_TOLERANCE) {
                    let c = report.sharp_constant.unwrap_or(1.0);
                    (sharp, format!("max ratio {:.12} against constant {c} (tolerance {SHARP_TOLERANCE:e})", report.max_ratio))
                } else if let (Some(c), Some(d)) = (calibration, drift) {
                    (
                        d.abs() <= CALIBRATION_TOLERANCE,
                        format!("max ratio {:.6}, calibrated {c}, drift {:+.2}%", report.max_ratio, 100.0 * d),
                    )
                } else {
                    (
                        report.max_ratio.is_finite(),
                        format!("max ratio {:.6} (no calibration for these parameters)", report.max_ratio),
                    )
                };
                let replay = (!ok).then_some(worst.replay_seed);
                result(ok, message, replay, Detail::Lemma { report, calibration, drift })
            }
        },
        Check::Oracle => match oracle_equivalence(&spec.oracle, &params) {
            Err(e) => error(e.to_string()),
            Ok(r) => result(
                r.relative_error <= ORACLE_TOLERANCE,
                format!("relative error {:.3e} (tolerance {ORACLE_TOLERANCE:e})", r.relative_error),
                None,
                Detail::Oracle(r),
            ),
        },
        Check::Convergence => match self_convergence_order(&spec.convergence, &params) {
            Err(e) => error(e.to_string()),
            Ok(r) => result(
                (r.order - ORDER_TARGET).abs() <= ORDER_TOLERANCE,
                format!("order {:.4} (target {ORDER_TARGET} +- {ORDER_TOLERANCE})", r.order),
                None,
                Detail::Convergence(r),
            ),
        },
        Check::Constraints => match constraint_conservation(&spec.constraints, &params) {
            Err(e) => error(e.to_string()),
            Ok(r) => result(
                r.max_relative_residual < CONSTRAINT_TOLERANCE,
                format!(
                    "max relative residual {:.3e} over {} projections (tolerance {CONSTRAINT_TOLERANCE:e})",
                    r.max_relative_residual, r.projections
                ),
                None,
                Detail::Constraints(r),
            ),
        },
    }
}

pub fn verify(suite: &Path, opts: &Options) -> Result<Outcome> {
    let mut spec = SuiteSpec::parse(&read(suite)?).with_context(|| format!("invalid suite {}", suite.display()))?;
    if let Some(seed) = opts.seed {
        spec.set_seed(seed);
    }
    opts.prepare_dir()?;
    let mut results = Vec::new();
    for check in &spec.checks {
        let r = run_check(check, &spec);
        opts.progress(format!("{}: {}", r.check, r.message));
        if let Some(seed) = r.replay_seed {
            eprintln!("{} failed; replay seed {seed}", r.check);
        }
        results.push(r);
    }
    let errors = results.iter().any(|r| matches!(r.status, Status::Error));
    let failures = results.iter().any(|r| matches!(r.status, Status::Fail));
    let report = VerifyReport {
        software: SOFTWARE,
        seed: spec.seed,
        passed: !errors && !failures,
        suite: spec.serialize().lines().map(String::from).collect(),
        checks: &results,
    };
    write_json(&opts.path("inequality_reports.json"), &report)?;
    for r in results.iter().filter(|r| matches!(r.status, Status::Error)) {
        eprintln!("{}: {}", r.check, r.message);
    }
    Ok(if errors {
        Outcome::Error
    } else if failures {
        Outcome::AssertionFailed
    } else {
        Outcome::Ok
    })
}
