//! Scenario execution: derive couplings, compile, verify, write artifacts.
//!
//! All outputs are produced in memory first and written only after the
//! whole run has succeeded, so a failing run leaves no partial files.
//! Nothing in the pipeline draws random numbers; identical configs and
//! constants produce byte-identical artifacts.

use crate::config::{ConfigError, ScenarioConfig};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use trapspin_core::compile::compile;
use trapspin_core::constants::Constants;
use trapspin_core::physics::{
    canonical_error_bound, coupling_constants, derive_frequencies, CouplingMatrix,
};
use trapspin_core::schedule::{PulseSchedule, TargetSpec};
use trapspin_core::verify::{
    accumulation_check, fit_exponent, fit_size_scaling, iterations_bound, sequence_error,
    SweepPoint, VerificationReport,
};

/// How much of the pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Compile and export the schedule.
    Compile,
    /// Compile plus verification sweeps and tabular outputs.
    Verify,
    /// Everything, plus the human-readable summary.
    Report,
}

/// One named pass/fail check evaluated during the run.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Results of a scenario run.
pub struct RunOutcome {
    /// Files to write: relative name and contents.
    pub artifacts: Vec<(PathBuf, String)>,
    pub checks: Vec<Check>,
    pub summary_line: String,
}

impl RunOutcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Errors from running a scenario.
#[derive(Debug)]
pub enum ScenarioError {
    Config(ConfigError),
    /// A size or iteration cap was exceeded; nothing was written.
    RuntimeGuard(String),
    Pipeline(String),
}

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioError::Config(e) => write!(f, "{e}"),
            ScenarioError::RuntimeGuard(d) => write!(f, "runtime guard: {d}"),
            ScenarioError::Pipeline(d) => write!(f, "{d}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<ConfigError> for ScenarioError {
    fn from(e: ConfigError) -> Self {
        ScenarioError::Config(e)
    }
}

macro_rules! pipeline {
    ($expr:expr) => {
        $expr.map_err(|e| ScenarioError::Pipeline(e.to_string()))?
    };
}

/// Run a scenario through the requested stage.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    consts: &Constants,
    stage: Stage,
    max_n_override: Option<usize>,
) -> Result<RunOutcome, ScenarioError> {
    let max_n = max_n_override.unwrap_or(cfg.verify.max_n);
    if cfg.trap.n > max_n {
        return Err(ScenarioError::RuntimeGuard(format!(
            "trap.n = {} exceeds the sweep cap of {max_n} (raise with --max-n, hard cap {})",
            cfg.trap.n,
            trapspin_core::operator::MAX_SITES
        )));
    }
    if let Some(worst) = cfg
        .verify
        .fn_n_values
        .iter()
        .chain(std::iter::once(&cfg.trap.n))
        .find(|&&n| n > trapspin_core::operator::MAX_SITES)
    {
        return Err(ScenarioError::RuntimeGuard(format!(
            "chain size {worst} exceeds the dense-representation cap of {}",
            trapspin_core::operator::MAX_SITES
        )));
    }

    // Physical model.
    let freqs = pipeline!(derive_frequencies(&cfg.trap, consts));
    let couplings = pipeline!(coupling_constants(&freqs, &cfg.trap, consts));
    let jz = couplings.nn_jz();

    // Iteration bound from the variant's bound coefficient.
    let f_value = cfg.target.bound_f(cfg.verify.bound_n);
    let bound_m = iterations_bound(
        1.0,
        cfg.verify.bound_jz_total,
        cfg.verify.error_target,
        f_value,
    );
    let default_span = (cfg.verify.bound_jz_total / jz) / bound_m as f64;
    let target = cfg.target.resolve(jz, bound_m, Some(default_span))?;

    // Compile and export.
    let schedule = pipeline!(compile(&target, &couplings));
    let exported = schedule.export();

    let mut checks = vec![roundtrip_check(&schedule, &exported)];
    let mut artifacts = vec![(PathBuf::from("schedule.txt"), exported)];

    let mut report = VerificationReport {
        canonical_budget: Some(canonical_error_bound(
            cfg.verify.bound_n,
            cfg.verify.budget_kbar,
            freqs.epsilon,
        )),
        iteration_bound: Some(bound_m),
        pulse_count: Some(schedule.pulse_count()),
        ..Default::default()
    };
    report.metadata = metadata(cfg, &couplings, &freqs.epsilon, &target, bound_m);
    for w in freqs.warnings().iter().chain(&schedule.meta.warnings) {
        report.metadata.push(("warning".into(), w.clone()));
    }

    if stage != Stage::Compile {
        run_verification(cfg, &couplings, &target, &mut report, &mut checks)?;
        artifacts.push((PathBuf::from("report.csv"), report.to_csv()));
        artifacts.push((
            PathBuf::from("error_vs_t.dat"),
            error_plot_data(&report.points, jz),
        ));
        if let Some((fit, range)) = &report.size_fit {
            artifacts.push((
                PathBuf::from("fn_fit.dat"),
                fn_plot_data(&fit.points, fit.slope, fit.intercept, range),
            ));
        }
    }
    if stage == Stage::Report {
        let mut text = report.summary();
        text.push_str("\nchecks\n------\n");
        for c in &checks {
            let _ = writeln!(
                text,
                "[{}] {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        artifacts.push((PathBuf::from("report.txt"), text));
    }

    let summary_line = format!(
        "target {} on {} spins: Jz = {} rad/s, {} pulses, m = {}",
        target_label(&target),
        cfg.trap.n,
        jz,
        schedule.pulse_count(),
        target.iterations,
    );
    Ok(RunOutcome {
        artifacts,
        checks,
        summary_line,
    })
}

fn target_label(target: &TargetSpec) -> String {
    format!("{:?}", target.kind)
        .split([' ', '{'])
        .next()
        .unwrap_or("target")
        .to_string()
}

fn roundtrip_check(schedule: &PulseSchedule, exported: &str) -> Check {
    let ok = match PulseSchedule::parse(exported) {
        Ok(parsed) => parsed == *schedule && parsed.export() == exported,
        Err(_) => false,
    };
    Check {
        name: "schedule-roundtrip".into(),
        passed: ok,
        detail: if ok {
            "export/parse round-trip is bit-exact".into()
        } else {
            "export/parse round-trip mismatch".into()
        },
    }
}

fn run_verification(
    cfg: &ScenarioConfig,
    couplings: &CouplingMatrix,
    target: &TargetSpec,
    report: &mut VerificationReport,
    checks: &mut Vec<Check>,
) -> Result<(), ScenarioError> {
    let jz = couplings.nn_jz();
    let n = cfg.trap.n;

    // Error sweep over the configured spans.
    let spans: Vec<f64> = cfg.verify.jz_t_values.iter().map(|jt| jt / jz).collect();
    for &t in &spans {
        let e = pipeline!(sequence_error(target, couplings, t));
        report.points.push(SweepPoint {
            n,
            t,
            jz,
            raw: e.raw,
            phase_optimized: e.phase_optimized,
        });
    }
    let in_range = report
        .points
        .iter()
        .all(|p| (0.0..=2.0 + 1e-12).contains(&p.raw) && p.phase_optimized <= p.raw + 1e-12);
    checks.push(Check {
        name: "error-range".into(),
        passed: in_range,
        detail: "all error norms within [0, 2]".into(),
    });

    if spans.len() >= 3 {
        let fit = pipeline!(fit_exponent(target, couplings, &spans));
        report.exponent = Some((fit.exponent, fit.stderr));
        if let Some((want, tol)) = cfg.verify.expect_exponent {
            let ok = (fit.exponent - want).abs() <= tol;
            checks.push(Check {
                name: "error-exponent".into(),
                passed: ok,
                detail: format!(
                    "fitted exponent {} vs expected {want} +- {tol}",
                    fit.exponent
                ),
            });
        }
    }

    if cfg.verify.fn_n_values.len() >= 3 {
        let fit = pipeline!(fit_size_scaling(
            target,
            &cfg.verify.fn_n_values,
            target.span,
            jz
        ));
        checks.push(Check {
            name: "size-scaling".into(),
            passed: fit.slope > 0.0,
            detail: format!("normalized error slope {} against N", fit.slope),
        });
        report.size_fit = Some((fit, cfg.verify.fn_n_values.clone()));
    }

    for &m in &cfg.verify.accumulation_m {
        let acc = pipeline!(accumulation_check(target, couplings, target.span, m));
        checks.push(Check {
            name: format!("accumulation-m{m}"),
            passed: acc.bound_satisfied,
            detail: format!(
                "total {} vs per-iteration sum {}",
                acc.total.phase_optimized,
                acc.per_iteration
                    .iter()
                    .map(|e| e.phase_optimized)
                    .sum::<f64>()
            ),
        });
    }
    Ok(())
}

fn metadata(
    cfg: &ScenarioConfig,
    couplings: &CouplingMatrix,
    epsilon: &f64,
    target: &TargetSpec,
    bound_m: usize,
) -> Vec<(String, String)> {
    let jz = couplings.nn_jz();
    let mut md: Vec<(String, String)> = vec![
        ("n".into(), cfg.trap.n.to_string()),
        ("jz_rad_per_s".into(), jz.to_string()),
        ("epsilon".into(), epsilon.to_string()),
        (
            "jxy_over_jz".into(),
            (couplings.jxy(1, 2) / jz).to_string(),
        ),
        ("target".into(), target_label(target)),
        ("trotter_order".into(), target.trotter_order.to_string()),
        ("span_s".into(), target.span.to_string()),
        ("iterations".into(), target.iterations.to_string()),
        ("bound_n".into(), cfg.verify.bound_n.to_string()),
        (
            "bound_jz_total".into(),
            cfg.verify.bound_jz_total.to_string(),
        ),
        ("error_target".into(), cfg.verify.error_target.to_string()),
        ("iteration_bound".into(), bound_m.to_string()),
        (
            "convention".into(),
            "all frequencies and couplings are angular (rad/s); cyclic quotes differ by 2*pi"
                .into(),
        ),
        (
            "drive_convention".into(),
            "driven-Ising free evolutions use the full drive coefficient; block sequences use half"
                .into(),
        ),
    ];
    md.retain(|(_, v)| !v.is_empty());
    md
}

fn error_plot_data(points: &[SweepPoint], jz: f64) -> String {
    let mut out = String::from("# t_s  jz_t  raw_err  phase_err  (log-log axes recommended)\n");
    for p in points {
        let _ = writeln!(out, "{} {} {} {}", p.t, p.t * jz, p.raw, p.phase_optimized);
    }
    out
}

fn fn_plot_data(points: &[(usize, f64)], slope: f64, intercept: f64, range: &[usize]) -> String {
    let mut out = String::from("# n  normalized_err  fit_line\n");
    for (n, v) in points {
        let _ = writeln!(out, "{} {} {}", n, v, slope * *n as f64 + intercept);
    }
    let _ = writeln!(out, "# fit over N = {range:?}: slope {slope} intercept {intercept}");
    out
}

/// Write artifacts under `out_dir`, creating it if needed.
pub fn write_artifacts(
    out_dir: &Path,
    artifacts: &[(PathBuf, String)],
) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (name, contents) in artifacts {
        let path = out_dir.join(name);
        std::fs::write(&path, contents)?;
        written.push(path);
    }
    Ok(written)
}
