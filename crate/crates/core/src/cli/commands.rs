use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::report::{csv, datum_value, write_json, write_text};
use super::svg::{self, Axes, Mark, Series};
use crate::asymptotics::{
    alpha, barrier_field, calibrate_c_eps, default_band, fit_blowup_rate_with_mode, sandwich_check, solve_c0,
    solve_c0_fast, BarrierKind, BarrierParams, BlowupFit, Calibration, FitMode, SandwichReport,
};
use crate::ergodic::{
    ergodic_continuation, exp_transform_check, rayleigh_minimize, ErgodicMethod, RayleighOptions, TransformCheck,
};
use crate::error::{Error, Result};
use crate::geometry::{
    distance_bruteforce, distance_fast_march, extended_distance, DistanceField, Domain, EikonalReport, Grid,
    ScalarField,
};
use crate::norms::{identity_suite, IdentityReport, Norm, NormReport, NormSpec};
use crate::oracles::{dense_dirichlet_eigen, MAX_EIGEN_NODES};
use crate::pde::{gradient_diagnostic, BlowupOptions, GradientStats, ProblemSpec, Regime, Solver};

/// Relative gate on the fitted exponent.
pub const ALPHA_GATE: f64 = 0.10;
/// Relative gate on the fitted leading constant.
pub const C0_GATE: f64 = 0.15;
/// Relative gate between ergodic routes and against the eigen oracle.
pub const ERGODIC_GATE: f64 = 0.02;
/// Relative gate of the `v ↔ −log w` comparison.
pub const TRANSFORM_GATE: f64 = 0.05;
/// Probe set `{d_H > 0.1}` of the transform check.
pub const TRANSFORM_DELTA: f64 = 0.1;

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    /// Names of failed checks; empty when everything passed.
    pub failures: Vec<String>,
    pub summary: String,
}

impl Verdict {
    fn from_checks(checks: &BTreeMap<String, bool>, summary: String) -> Self {
        Verdict {
            failures: checks.iter().filter(|(_, ok)| !**ok).map(|(k, _)| k.clone()).collect(),
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn distance_field(config: &RunConfig) -> Result<DistanceField> {
    let domain = Domain::new(config.domain.clone())?;
    let grid = Arc::new(Grid::build(&domain, config.resolution)?);
    distance_fast_march(grid, &Norm::new(config.norm.clone())?)
}

fn create_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    Ok(())
}

// ---------------------------------------------------------------- norms

#[derive(Debug, Serialize)]
struct NormsOutput {
    seed: u64,
    #[serde(flatten)]
    identities: IdentityReport,
    constants: NormReport,
}

pub fn cmd_norms(config: &RunConfig, out: &Path) -> Result<Verdict> {
    create_dir(out)?;
    let norm = Norm::new(config.norm.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let identities = identity_suite(&norm, config.tolerances.norm_samples, &mut rng)?;
    let constants = norm.estimate_constants(config.tolerances.constant_samples)?;
    let checks: BTreeMap<String, bool> = identities
        .max_violation
        .iter()
        .map(|(k, &v)| (k.clone(), v <= identities.tolerance))
        .collect();
    let worst = identities.max_violation.values().fold(0.0f64, |m, &v| m.max(v));
    let summary = format!("norms {}: worst violation {worst:.3e} (gate {:.0e})", config.norm, identities.tolerance);
    write_json(
        &out.join("norms.json"),
        "norms",
        &NormsOutput {
            seed: config.seed,
            identities,
            constants,
        },
    )?;
    Ok(Verdict::from_checks(&checks, summary))
}

// ---------------------------------------------------------------- distance

#[derive(Debug, Serialize)]
struct DistanceOutput {
    norm: NormSpec,
    resolution: usize,
    h: f64,
    inradius: f64,
    eikonal: EikonalReport,
    /// Sup over Interior nodes of `|d_march − d_bruteforce|`.
    oracle_sup_difference: f64,
    oracle_gate: f64,
    pass: bool,
}

pub fn cmd_distance(config: &RunConfig, out: &Path) -> Result<Verdict> {
    create_dir(out)?;
    let dist = distance_field(config)?;
    let grid = dist.grid().clone();
    let brute = distance_bruteforce(grid.clone(), dist.norm(), config.tolerances.boundary_samples)?;
    let sup = (0..grid.len())
        .filter(|&k| grid.is_interior(k))
        .map(|k| (dist.signed(k) - brute.signed(k)).abs())
        .fold(0.0, f64::max);
    let gate = 2.0 * grid.h;
    let output = DistanceOutput {
        norm: config.norm.clone(),
        resolution: config.resolution,
        h: grid.h,
        inradius: dist.inradius(),
        eikonal: dist.report(),
        oracle_sup_difference: sup,
        oracle_gate: gate,
        pass: sup <= gate,
    };
    dist.save_csv(&out.join("distance.csv"))?;
    if config.plots {
        write_text(&out.join("distance.svg"), &svg::heat_map("d_H", &dist.d))?;
    }
    let checks = BTreeMap::from([("oracle_agreement".to_string(), output.pass)]);
    let summary = format!("distance: oracle sup difference {sup:.3e} (gate {gate:.3e}), median residual {:.3e}", output.eikonal.median);
    write_json(&out.join("eikonal.json"), "distance", &output)?;
    Ok(Verdict::from_checks(&checks, summary))
}

// ---------------------------------------------------------------- solve

/// Leading-order prediction for the boundary behaviour.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Theory {
    pub mode: FitMode,
    /// Exponent of `d^{−α}`; zero in logarithmic mode.
    pub alpha: f64,
    pub c0: f64,
}

pub fn theory(problem: &ProblemSpec) -> Result<Theory> {
    let mode = FitMode::for_problem(problem);
    let q = problem.q;
    let s = problem.source;
    let (c0, a) = match problem.regime() {
        Regime::Subcritical => (solve_c0(q, 0.0)?, alpha(q)),
        Regime::Critical => (solve_c0(q, s.c1)?, alpha(q)),
        Regime::Fast => solve_c0_fast(q, s.c1, s.beta)?,
    };
    let alpha = if mode == FitMode::Logarithmic { 0.0 } else { a };
    Ok(Theory { mode, alpha, c0 })
}

#[derive(Debug, Serialize)]
struct Sandwich {
    calibration: Calibration,
    band: (f64, f64),
    report: SandwichReport,
    holds: bool,
}

#[derive(Debug, Serialize)]
struct SolveOutput {
    problem: ProblemSpec,
    resolution: usize,
    h: f64,
    m_schedule: Vec<serde_json::Value>,
    monitor_delta: f64,
    interior_deltas: Vec<f64>,
    stabilized: bool,
    /// `max(0, −min(u_{k+1} − u_k))` along the schedule.
    monotone_violation: f64,
    newton_iters: Vec<usize>,
    fit: BlowupFit,
    theory: Theory,
    /// `None` in logarithmic mode.
    alpha_rel_err: Option<f64>,
    c0_rel_err: f64,
    /// `None` when `λ = 0` (the calibration needs `λ > 0`).
    sandwich: Option<Sandwich>,
    gradient: GradientStats,
    checks: BTreeMap<String, bool>,
    passed: bool,
}

pub fn cmd_solve(config: &RunConfig, out: &Path) -> Result<Verdict> {
    create_dir(out)?;
    let problem = config.problem()?;
    let dist = distance_field(config)?;
    let h = dist.grid().h;
    let tol = &config.tolerances;
    let schedule = config.schedules.m_schedule();
    let monitor_delta = tol.monitor_delta.unwrap_or(8.0 * h);
    let run = Solver::new(&problem, &dist)?.blowup(
        &schedule,
        &BlowupOptions {
            stop_tol: tol.stop_tol,
            monitor_delta,
            full_schedule: true,
        },
    )?;
    let u = run.limit();
    let th = theory(&problem)?;
    let band = match tol.band {
        Some([lo, hi]) => (lo, hi),
        None => default_band(&dist, tol.delta0),
    };
    let fit = fit_blowup_rate_with_mode(u, &dist, th.mode, band)?;
    let alpha_rel_err = (th.mode == FitMode::PowerLaw).then(|| (fit.alpha_fit / th.alpha - 1.0).abs());
    let c0_rel_err = (fit.c0_fit / th.c0 - 1.0).abs();

    let sandwich = if problem.lambda > 0.0 {
        let partial = BarrierParams {
            eps: tol.barrier_eps,
            delta: 0.0,
            c_eps: 0.0,
            delta0: tol.delta0,
            c0: th.c0,
            alpha: th.alpha,
        };
        let calibration = calibrate_c_eps(&problem, &dist, partial)?;
        let d_ext = extended_distance(&dist, tol.delta0)?;
        let sub = barrier_field(&calibration.params, &d_ext, BarrierKind::Sub)?;
        let sup = barrier_field(&calibration.params, &d_ext, BarrierKind::Super)?;
        let band = (3.0 * h, tol.delta0);
        let report = sandwich_check(u, &sub, &sup, &dist, band);
        Some(Sandwich {
            holds: report.holds() && !calibration.capped,
            calibration,
            band,
            report,
        })
    } else {
        None
    };

    let mut checks = BTreeMap::new();
    checks.insert("finite".to_string(), u.is_finite());
    checks.insert("monotone".to_string(), run.worst_violation() <= 2.0 * problem.newton_tol());
    checks.insert("fit_c0".to_string(), c0_rel_err <= C0_GATE);
    if let Some(e) = alpha_rel_err {
        checks.insert("fit_alpha".to_string(), e <= ALPHA_GATE);
    }
    if let Some(s) = &sandwich {
        checks.insert("sandwich".to_string(), s.holds);
    }
    let passed = checks.values().all(|&ok| ok);
    let output = SolveOutput {
        problem: problem.clone(),
        resolution: config.resolution,
        h,
        m_schedule: run.m_schedule.iter().map(|&m| datum_value(m)).collect(),
        monitor_delta,
        interior_deltas: run.interior_deltas.clone(),
        stabilized: run.stabilized,
        monotone_violation: run.worst_violation(),
        newton_iters: run.reports.iter().map(|r| r.newton_iters).collect(),
        gradient: gradient_diagnostic(u, &dist, &problem),
        fit,
        theory: th,
        alpha_rel_err,
        c0_rel_err,
        sandwich,
        checks: checks.clone(),
        passed,
    };
    u.save_csv(&out.join("solution.csv"))?;
    if config.plots {
        write_text(&out.join("profile.svg"), &profile_plot(u, &dist, &th))?;
    }
    let summary = match th.mode {
        FitMode::PowerLaw => format!(
            "solve q={}: alpha_fit={:.4} (theory {:.4}), C0_fit={:.4} (theory {:.4})",
            problem.q, output.fit.alpha_fit, th.alpha, output.fit.c0_fit, th.c0
        ),
        FitMode::Logarithmic => {
            format!("solve q={}: log-mode C0_fit={:.4} (theory {:.4})", problem.q, output.fit.c0_fit, th.c0)
        }
    };
    // Written last: its presence marks a completed run.
    write_json(&out.join("fit.json"), "solve", &output)?;
    Ok(Verdict::from_checks(&checks, summary))
}

/// `u` against `d_H` on Interior nodes with the leading term overlaid.
fn profile_plot(u: &ScalarField, dist: &DistanceField, th: &Theory) -> String {
    let grid = u.grid();
    let h = grid.h;
    let pts: Vec<(f64, f64)> = (0..grid.len())
        .filter(|&k| grid.is_interior(k) && dist.signed(k) >= h)
        .filter_map(|k| u.get(k).map(|v| (dist.signed(k), v)))
        .collect();
    let stride = pts.len().div_ceil(3000).max(1);
    let pts: Vec<(f64, f64)> = pts.into_iter().step_by(stride).collect();
    let (lo, hi) = (h, dist.inradius().max(2.0 * h));
    let line: Vec<(f64, f64)> = (0..=100)
        .map(|i| lo * (hi / lo).powf(i as f64 / 100.0))
        .map(|d| match th.mode {
            FitMode::PowerLaw => (d, th.c0 * d.powf(-th.alpha)),
            FitMode::Logarithmic => (d, -th.c0 * d.ln()),
        })
        .collect();
    let log_y = th.mode == FitMode::PowerLaw;
    svg::plot(
        "blow-up profile",
        "d_H",
        "u",
        Axes { log_x: true, log_y },
        &[
            Series {
                label: "solution".into(),
                points: pts,
                mark: Mark::Dots,
            },
            Series {
                label: "leading term".into(),
                points: line,
                mark: Mark::Line,
            },
        ],
    )
}

// ---------------------------------------------------------------- ergodic

#[derive(Debug, Serialize)]
struct RayleighSummary {
    u0: f64,
    iterations: usize,
    /// Positivity projections over the last 50 iterates.
    tail_projections: usize,
}

#[derive(Debug, Serialize)]
struct OracleSummary {
    value: f64,
    continuation_rel_err: f64,
    rayleigh_rel_err: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ErgodicOutput {
    problem: ProblemSpec,
    resolution: usize,
    h: f64,
    u0: f64,
    method: ErgodicMethod,
    /// `(λ, λ·u_λ(x₀))` in schedule order.
    trace: Vec<(f64, f64)>,
    /// `|u0 − u0_rayleigh|`; `None` unless `q = 2`.
    agreement: Option<f64>,
    converged: bool,
    x0: [f64; 2],
    eq_residual: f64,
    probe_delta: f64,
    rayleigh: Option<RayleighSummary>,
    transform: Option<TransformCheck>,
    oracle: Option<OracleSummary>,
    checks: BTreeMap<String, bool>,
    passed: bool,
}

pub fn cmd_ergodic(config: &RunConfig, out: &Path) -> Result<Verdict> {
    create_dir(out)?;
    let problem = config.problem()?;
    let dist = distance_field(config)?;
    let grid = dist.grid().clone();
    let cont = ergodic_continuation(&problem, &dist, &config.schedules.lambda_schedule(), None)?;
    let mut checks = BTreeMap::from([("converged".to_string(), cont.converged)]);

    let ray = if problem.q == 2.0 {
        Some(rayleigh_minimize(dist.norm(), &dist, &problem.source, None, &RayleighOptions::default())?)
    } else {
        None
    };
    let cont = match &ray {
        Some(r) => cont.with_agreement(r.u0),
        None => cont,
    };
    let transform = match &ray {
        Some(r) => {
            let t = exp_transform_check(&cont.v, &r.w, &dist, TRANSFORM_DELTA)?;
            checks.insert("agreement".into(), cont.agreement.unwrap_or(0.0) <= ERGODIC_GATE * r.u0.abs());
            checks.insert("transform".into(), t.relative <= TRANSFORM_GATE);
            Some(t)
        }
        None => None,
    };
    // The linear eigenproblem is an exact reference only for the Euclidean
    // norm with q = 2 and a constant source.
    let oracle = if problem.q == 2.0
        && problem.norm == NormSpec::Euclidean
        && problem.source.c1 == 0.0
        && grid.interior_count() <= MAX_EIGEN_NODES
    {
        let f = ScalarField::from_partial(grid.clone(), |k| grid.is_interior(k).then_some(problem.source.f0));
        let value = dense_dirichlet_eigen(&grid, &f)?.value;
        let rel = |x: f64| (x / value - 1.0).abs();
        let o = OracleSummary {
            value,
            continuation_rel_err: rel(cont.u0),
            rayleigh_rel_err: ray.as_ref().map(|r| rel(r.u0)),
        };
        checks.insert("oracle_continuation".into(), o.continuation_rel_err <= ERGODIC_GATE);
        if let Some(e) = o.rayleigh_rel_err {
            checks.insert("oracle_rayleigh".into(), e <= ERGODIC_GATE);
        }
        Some(o)
    } else {
        None
    };

    let trace_csv = csv(
        &["lambda", "lambda_u_x0"],
        cont.lambda_trace.iter().map(|(l, t)| vec![l.to_string(), t.to_string()]),
    );
    write_text(&out.join("trace.csv"), &trace_csv)?;
    cont.v.save_csv(&out.join("v.csv"))?;
    if let Some(r) = &ray {
        r.w.save_csv(&out.join("w.csv"))?;
    }
    if config.plots {
        let plot = svg::plot(
            "vanishing discount",
            "lambda",
            "lambda u(x0)",
            Axes { log_x: true, log_y: false },
            &[
                Series {
                    label: "continuation".into(),
                    points: cont.lambda_trace.clone(),
                    mark: Mark::Line,
                },
                Series {
                    label: "extrapolated".into(),
                    points: cont.lambda_trace.iter().map(|&(l, _)| (l, cont.u0)).collect(),
                    mark: Mark::Line,
                },
            ],
        );
        write_text(&out.join("trace.svg"), &plot)?;
    }
    let passed = checks.values().all(|&ok| ok);
    let summary = format!(
        "ergodic q={}: u0={:.6}{}",
        problem.q,
        cont.u0,
        ray.as_ref().map(|r| format!(" (rayleigh {:.6})", r.u0)).unwrap_or_default()
    );
    let output = ErgodicOutput {
        problem,
        resolution: config.resolution,
        h: grid.h,
        u0: cont.u0,
        method: cont.method,
        trace: cont.lambda_trace.clone(),
        agreement: cont.agreement,
        converged: cont.converged,
        x0: grid.point(cont.x0),
        eq_residual: cont.eq_residual,
        probe_delta: cont.probe_delta,
        rayleigh: ray.as_ref().map(|r| RayleighSummary {
            u0: r.u0,
            iterations: r.iterations(),
            tail_projections: r.tail_projections(50),
        }),
        transform,
        oracle,
        checks: checks.clone(),
        passed,
    };
    write_json(&out.join("ergodic.json"), "ergodic", &output)?;
    Ok(Verdict::from_checks(&checks, summary))
}

// ---------------------------------------------------------------- sweep

/// One `(q, norm, resolution)` entry of a sweep.
#[derive(Debug, Clone)]
pub struct Instance {
    pub index: usize,
    pub name: String,
    pub config: RunConfig,
}

fn slug(s: &str) -> String {
    let raw: String = s
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect();
    raw.trim_matches('_').to_string()
}

/// Cartesian product in `q`-major, then norm, then resolution order.
pub fn sweep_instances(config: &RunConfig) -> Result<Vec<Instance>> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep needs a [sweep] section".into()))?;
    let mut out = Vec::new();
    for &q in &sweep.q {
        for norm in &sweep.norms {
            for &res in &sweep.resolutions {
                let index = out.len();
                out.push(Instance {
                    index,
                    name: format!("{index:03}_q{q}_{}_r{res}", slug(&norm.to_string())),
                    config: config.with_instance(q, norm.clone(), res),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
struct Row {
    instance: usize,
    status: &'static str,
    cells: Vec<String>,
}

const SUMMARY_HEADER: [&str; 14] = [
    "index",
    "run",
    "q",
    "norm",
    "resolution",
    "status",
    "mode",
    "alpha_fit",
    "c0_fit",
    "alpha_theory",
    "c0_theory",
    "alpha_rel_err",
    "c0_rel_err",
    "failed_checks",
];

/// Summary row read back from the run directory, so resumed and fresh runs
/// produce identical rows.
fn summary_row(inst: &Instance, dir: &Path) -> Row {
    let base = vec![
        inst.index.to_string(),
        inst.name.clone(),
        inst.config.problem.q.to_string(),
        inst.config.norm.to_string().replace(',', ";"),
        inst.config.resolution.to_string(),
    ];
    let parsed = std::fs::read_to_string(dir.join("fit.json"))
        .ok()
        .and_then(|t| serde_json::from_str::<serde_json::Value>(&t).ok());
    let Some(v) = parsed else {
        let mut cells = base;
        cells.extend(["error".into(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new()]);
        return Row {
            instance: inst.index,
            status: "error",
            cells,
        };
    };
    let num = |ptr: &str| match v.pointer(ptr) {
        Some(serde_json::Value::Number(n)) => n.to_string(),
        _ => String::new(),
    };
    let failed: Vec<String> = v
        .get("checks")
        .and_then(|c| c.as_object())
        .map(|m| m.iter().filter(|(_, ok)| ok.as_bool() != Some(true)).map(|(k, _)| k.clone()).collect())
        .unwrap_or_default();
    let status = if failed.is_empty() { "pass" } else { "fail" };
    let mut cells = base;
    cells.extend([
        status.to_string(),
        v.pointer("/theory/mode").and_then(|m| m.as_str()).unwrap_or_default().to_string(),
        num("/fit/alpha_fit"),
        num("/fit/c0_fit"),
        num("/theory/alpha"),
        num("/theory/c0"),
        num("/alpha_rel_err"),
        num("/c0_rel_err"),
        failed.join(";"),
    ]);
    Row {
        instance: inst.index,
        status,
        cells,
    }
}

#[derive(Debug, Serialize)]
struct FailureRecord<'a> {
    error: String,
    kind: &'a str,
}

/// Error class shared by the failure records and the exit codes.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Config(_) | Error::InvalidNorm(_) | Error::InvalidDomain(_) | Error::InvalidProblem(_) | Error::InvalidArgument(_) => {
            "usage"
        }
        _ => "numerical",
    }
}

pub fn write_failure(out: &Path, command: &str, e: &Error) -> Result<()> {
    create_dir(out)?;
    write_json(
        &out.join("failure.json"),
        command,
        &FailureRecord {
            error: e.to_string(),
            kind: error_kind(e),
        },
    )
}

fn run_instance(inst: &Instance, runs: &Path, resume: bool) -> Result<(Row, bool)> {
    let dir = runs.join(&inst.name);
    let done = dir.join("fit.json").is_file();
    if !(resume && done) {
        create_dir(&dir)?;
        let _ = std::fs::remove_file(dir.join("failure.json"));
        let _ = std::fs::remove_file(dir.join("fit.json"));
        let mut text = serde_json::to_string_pretty(&inst.config)?;
        text.push('\n');
        write_text(&dir.join("config.json"), &text)?;
        if let Err(e) = cmd_solve(&inst.config, &dir) {
            write_failure(&dir, "solve", &e)?;
        }
    }
    Ok((summary_row(inst, &dir), resume && done))
}

#[derive(Debug, Serialize)]
struct SweepOutput {
    instances: usize,
    passed: usize,
    failed: usize,
    errors: usize,
    runs: Vec<String>,
}

/// Runs every instance on a pool of `workers` threads. Each instance is
/// deterministic, and rows are collected in instance order, so outputs do
/// not depend on `workers`. With `resume`, directories holding a complete
/// `fit.json` are not recomputed.
pub fn cmd_sweep(config: &RunConfig, out: &Path, workers: usize, resume: bool) -> Result<Verdict> {
    let instances = sweep_instances(config)?;
    let runs: PathBuf = out.join("runs");
    create_dir(&runs)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))?;
    let results: Vec<Result<(Row, bool)>> =
        pool.install(|| instances.par_iter().map(|inst| run_instance(inst, &runs, resume)).collect());
    let mut rows = Vec::with_capacity(results.len());
    let mut skipped = 0;
    for r in results {
        let (row, was_skipped) = r?;
        skipped += usize::from(was_skipped);
        rows.push(row);
    }
    debug_assert!(rows.iter().enumerate().all(|(i, r)| r.instance == i));
    write_text(&out.join("summary.csv"), &csv(&SUMMARY_HEADER, rows.iter().map(|r| r.cells.clone())))?;
    let count = |s: &str| rows.iter().filter(|r| r.status == s).count();
    let output = SweepOutput {
        instances: rows.len(),
        passed: count("pass"),
        failed: count("fail"),
        errors: count("error"),
        runs: instances.iter().map(|i| i.name.clone()).collect(),
    };
    let failures = rows.iter().filter(|r| r.status != "pass").map(|r| r.cells[1].clone()).collect();
    let summary = format!(
        "sweep: {} runs, {} pass, {} fail, {} error, {skipped} resumed",
        output.instances, output.passed, output.failed, output.errors
    );
    write_json(&out.join("sweep.json"), "sweep", &output)?;
    Ok(Verdict { failures, summary })
}
