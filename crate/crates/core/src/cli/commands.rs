use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::{Command, Context, CliError, ModelConfig};
use crate::audit::{
    determinant_suite, eigen_suite, expected_pattern_key, pattern_histogram, DeterminantSuite,
    SpectrumSummary,
};
use crate::eos::{CoefficientSample, TransportModel};
use crate::evolve::{evolve, EvolveError, Halt, MonitorRow, RunSetup};
use crate::kinematics::{normalize_velocity, FourCovector};
use crate::symbol::{betas, causality_report, characteristic_speeds, CausalityReport, DeterminantCheck};

pub(super) fn dispatch(command: Command, ctx: &Context, out: &mut Vec<u8>) -> Result<(), CliError> {
    match command {
        Command::CausalityCheck => causality_check(ctx, out),
        Command::CharSpeeds => char_speeds(ctx, out),
        Command::SymbolAudit => symbol_audit(ctx, out),
        Command::Evolve => run_evolve(ctx, out),
    }
}

fn model(ctx: &Context) -> Result<TransportModel, CliError> {
    ctx.config.model.build(&ctx.base)
}

/// Writes `bytes` to stdout and, if configured, to `<output.dir>/<name>`.
fn emit(ctx: &Context, name: &str, bytes: &[u8], out: &mut Vec<u8>) -> Result<(), CliError> {
    if let Some(dir) = &ctx.config.output.dir {
        let dir = ctx.base.join(dir);
        fs::create_dir_all(&dir)?;
        fs::write(dir.join(name), bytes)?;
    }
    out.write_all(bytes)?;
    Ok(())
}

fn emit_json<T: Serialize>(ctx: &Context, name: &str, value: &T, out: &mut Vec<u8>) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    emit(ctx, name, &bytes, out)
}

fn energies(ctx: &Context, model: &TransportModel) -> Result<Vec<f64>, CliError> {
    let e = ctx.config.scan.energies();
    let (lo, hi) = model.domain();
    if let Some(bad) = e.iter().find(|x| !(**x >= lo && **x <= hi)) {
        return Err(CliError::Config(format!(
            "scan energy {bad} lies outside the model domain [{lo}, {hi}]"
        )));
    }
    Ok(e)
}

fn coefficients(model: &TransportModel, eps: f64) -> Result<CoefficientSample, CliError> {
    model
        .evaluate(eps)
        .map_err(|e| CliError::Numerical(format!("model evaluation at ε = {eps}: {e}")))
}

#[derive(Serialize)]
struct Provenance<'a> {
    command: &'static str,
    config_hash: &'a str,
    seed: u64,
}

impl<'a> Provenance<'a> {
    fn new(command: Command, ctx: &'a Context) -> Self {
        Self {
            command: command.name(),
            config_hash: &ctx.config_hash,
            seed: ctx.seed,
        }
    }
}

#[derive(Serialize)]
struct CausalitySample {
    eps: f64,
    coefficients: CoefficientSample,
    /// `max_a √β_a` when all four are real.
    max_speed: Option<f64>,
    report: CausalityReport,
}

#[derive(Serialize)]
struct CausalityCheckReport<'a> {
    #[serde(flatten)]
    provenance: Provenance<'a>,
    model: &'a ModelConfig,
    all_pass: bool,
    samples: Vec<CausalitySample>,
}

fn causality_check(ctx: &Context, out: &mut Vec<u8>) -> Result<(), CliError> {
    let model = model(ctx)?;
    let samples = energies(ctx, &model)?
        .into_iter()
        .map(|eps| {
            let c = coefficients(&model, eps)?;
            let report = causality_report(&c);
            Ok(CausalitySample {
                eps,
                coefficients: c,
                max_speed: report.betas.and_then(|b| b.max_speed()),
                report,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let report = CausalityCheckReport {
        provenance: Provenance::new(Command::CausalityCheck, ctx),
        model: &ctx.config.model,
        all_pass: samples.iter().all(|s| s.report.verdict),
        samples,
    };
    emit_json(ctx, "causality-check.json", &report, out)
}

pub const CHAR_SPEED_COLUMNS: [&str; 9] = [
    "eps",
    "branch",
    "beta",
    "direction",
    "zeta_x",
    "zeta_y",
    "zeta_z",
    "lambda_minus",
    "lambda_plus",
];

fn char_speeds(ctx: &Context, out: &mut Vec<u8>) -> Result<(), CliError> {
    let model = model(ctx)?;
    let scan = &ctx.config.scan;
    let u = normalize_velocity(scan.velocity);
    let xi = FourCovector([1.0, 0.0, 0.0, 0.0]);
    let mut text = format!(
        "# command=char-speeds config_hash={} seed={}\n# velocity={:?}, xi=dt, zeta=(cos θ, sin θ, 0)\n{}\n",
        ctx.config_hash,
        ctx.seed,
        scan.velocity,
        CHAR_SPEED_COLUMNS.join(",")
    );
    for eps in energies(ctx, &model)? {
        let c = coefficients(&model, eps)?;
        let b = betas(&c).map_err(|e| CliError::Numerical(e.to_string()))?;
        let Some(values) = b.real_values() else {
            return Err(CliError::Numerical(format!(
                "β± form a complex pair at ε = {eps}; no real characteristic speeds"
            )));
        };
        for (label, beta) in ["beta1", "beta2", "beta_minus", "beta_plus"].iter().zip(values) {
            for d in 0..scan.directions {
                let th = 2.0 * std::f64::consts::PI * d as f64 / scan.directions as f64;
                let (s, co) = th.sin_cos();
                let zeta = FourCovector([0.0, co, s, 0.0]);
                let (lo, hi) =
                    characteristic_speeds(beta, &u, &xi, &zeta).unwrap_or((f64::NAN, f64::NAN));
                text.push_str(&format!(
                    "{eps:e},{label},{beta:e},{d},{:e},{:e},{:e},{lo:e},{hi:e}\n",
                    zeta.0[1], zeta.0[2], zeta.0[3]
                ));
            }
        }
    }
    emit(ctx, "char-speeds.csv", text.as_bytes(), out)
}

#[derive(Serialize)]
struct DeterminantSummary {
    samples: usize,
    tolerance: f64,
    max_rel_error: f64,
    failures: usize,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    rel_errors: Option<Vec<f64>>,
}

fn summarize(checks: &[DeterminantCheck], tolerance: f64, per_sample: bool) -> DeterminantSummary {
    let failures = checks.iter().filter(|d| !(d.rel_error <= tolerance)).count();
    DeterminantSummary {
        samples: checks.len(),
        tolerance,
        max_rel_error: checks.iter().map(|d| d.rel_error).fold(0.0, f64::max),
        failures,
        passed: failures == 0,
        rel_errors: per_sample.then(|| checks.iter().map(|d| d.rel_error).collect()),
    }
}

#[derive(Serialize)]
struct EigenSummary {
    samples: usize,
    imag_tolerance: f64,
    residual_tolerance: f64,
    max_imag_over_radius: f64,
    max_residual: Option<f64>,
    max_condition: Option<f64>,
    max_prediction_error: f64,
    expected_pattern: String,
    matching_pattern: usize,
    degenerate: usize,
    histogram: std::collections::BTreeMap<String, usize>,
    failures: usize,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_sample: Option<Vec<SpectrumSummary>>,
}

/// Acceptance rule for one eigenstructure sample.
pub fn eigen_sample_passes(s: &SpectrumSummary, imag_tol: f64, residual_tol: f64) -> bool {
    s.max_imag_over_radius <= imag_tol
        && s.geometric_total == 30
        && (s.degenerate || s.matches_expected)
        && s.residual.is_some_and(|r| r <= residual_tol)
}

fn max_opt(mut it: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    it.try_fold(0.0, |acc: f64, x| Some(acc.max(x?)))
}

#[derive(Serialize)]
struct AuditReport<'a> {
    #[serde(flatten)]
    provenance: Provenance<'a>,
    passed: bool,
    first_order_determinant: DeterminantSummary,
    second_order_determinant: DeterminantSummary,
    rank_one_identity: DeterminantSummary,
    eigenstructure: EigenSummary,
}

fn symbol_audit(ctx: &Context, out: &mut Vec<u8>) -> Result<(), CliError> {
    let a = &ctx.config.audit;
    let p = a.params(ctx.seed);
    let exec = ctx.config.execution;
    let numerical = |e: crate::symbol::SymbolError| CliError::Numerical(e.to_string());
    let first = determinant_suite(DeterminantSuite::FirstOrder, &p, a.determinant_samples, exec).map_err(numerical)?;
    let second = determinant_suite(DeterminantSuite::SecondOrder, &p, a.determinant_samples, exec).map_err(numerical)?;
    let rank = determinant_suite(DeterminantSuite::RankOne, &p, a.rank_one_samples, exec).map_err(numerical)?;
    let eig = eigen_suite(&p, &a.spectrum, a.eigen_samples, exec).map_err(numerical)?;
    let failures = eig
        .iter()
        .filter(|s| !eigen_sample_passes(s, a.imag_tolerance, a.residual_tolerance))
        .count();
    let eigenstructure = EigenSummary {
        samples: eig.len(),
        imag_tolerance: a.imag_tolerance,
        residual_tolerance: a.residual_tolerance,
        max_imag_over_radius: eig.iter().map(|s| s.max_imag_over_radius).fold(0.0, f64::max),
        max_residual: max_opt(eig.iter().map(|s| s.residual)),
        max_condition: max_opt(eig.iter().map(|s| s.condition)),
        max_prediction_error: eig.iter().map(|s| s.prediction_error).fold(0.0, f64::max),
        expected_pattern: expected_pattern_key(),
        matching_pattern: eig.iter().filter(|s| s.matches_expected).count(),
        degenerate: eig.iter().filter(|s| s.degenerate).count(),
        histogram: pattern_histogram(&eig),
        failures,
        passed: failures == 0,
        per_sample: a.per_sample.then_some(eig),
    };
    let report = AuditReport {
        provenance: Provenance::new(Command::SymbolAudit, ctx),
        first_order_determinant: summarize(&first, a.det_tolerance, a.per_sample),
        second_order_determinant: summarize(&second, a.det_tolerance, a.per_sample),
        rank_one_identity: summarize(&rank, a.rank_one_tolerance, a.per_sample),
        passed: false,
        eigenstructure,
    };
    let passed = report.first_order_determinant.passed
        && report.second_order_determinant.passed
        && report.rank_one_identity.passed
        && report.eigenstructure.passed;
    let report = AuditReport { passed, ..report };
    emit_json(ctx, "symbol-audit.json", &report, out)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Numerical("symbol audit exceeded its tolerances".into()))
    }
}

#[derive(Serialize)]
struct EvolveSummary<'a> {
    #[serde(flatten)]
    provenance: Provenance<'a>,
    dt: f64,
    steps_planned: usize,
    steps_taken: usize,
    time: f64,
    initial_speed_bound: f64,
    floor: f64,
    halt: &'a Halt,
    final_monitors: Option<&'a MonitorRow>,
    monitors_file: &'static str,
    snapshots: Vec<String>,
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn run_evolve(ctx: &Context, out: &mut Vec<u8>) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let grid = cfg
        .grid
        .as_ref()
        .ok_or_else(|| CliError::Config("evolve needs a [grid] block".into()))?
        .build()?;
    let initial = cfg
        .initial
        .clone()
        .ok_or_else(|| CliError::Config("evolve needs an [initial] block".into()))?;
    let dir = cfg
        .output
        .dir
        .as_ref()
        .ok_or_else(|| CliError::Config("evolve needs output.dir".into()))?;
    let dir = ctx.base.join(dir);
    let setup = RunSetup {
        grid,
        model: model(ctx)?,
        initial,
        solver: cfg.solver,
        execution: cfg.execution,
    };
    let report = evolve(&setup, Some(&dir)).map_err(|e| match e {
        EvolveError::Config(_) | EvolveError::Acausal { .. } => CliError::Config(e.to_string()),
        EvolveError::Io(io) => CliError::Io(io),
        other => CliError::Numerical(other.to_string()),
    })?;
    let summary = EvolveSummary {
        provenance: Provenance::new(Command::Evolve, ctx),
        dt: report.dt,
        steps_planned: report.steps_planned,
        steps_taken: report.steps_taken,
        time: report.time,
        initial_speed_bound: report.initial_speed_bound,
        floor: report.floor,
        halt: &report.halt,
        final_monitors: report.monitors.last(),
        monitors_file: "monitors.csv",
        snapshots: report.snapshots.iter().map(|p| file_name(p)).collect(),
    };
    emit_json(ctx, "summary.json", &summary, out)?;
    match &report.halt {
        Halt::Completed => Ok(()),
        Halt::Failed { kind, message, .. } => Err(CliError::Numerical(format!("run halted ({kind}): {message}"))),
    }
}
