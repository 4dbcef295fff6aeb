use serde::{Deserialize, Serialize};

use super::discrete::{Discretization, Form};
use crate::error::{Error, Result};
use crate::linalg::sparse_solve;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
}

impl NewtonOptions {
    pub fn with_tol(tol: f64) -> Self {
        NewtonOptions {
            tol,
            max_iter: 200,
            max_halvings: 20,
        }
    }
}

/// Solver telemetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub newton_iters: usize,
    /// Sup-norm residual at the start and after every accepted step.
    pub residual_history: Vec<f64>,
    /// Step halvings performed by the line search.
    pub damping_events: usize,
    /// Faces where `γ·I` replaced `½∇²H²`, summed over all Jacobians.
    pub regularization_hits: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub formulation: String,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
}

const BOOSTS: [f64; 8] = [0.0, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4];

/// Halves `t` from 1 until the sup residual drops below `norm`; on success
/// `trial` holds the accepted state.
#[allow(clippy::too_many_arguments)]
fn line_search(
    disc: &Discretization,
    form: Form,
    vals: &[f64],
    trial: &mut [f64],
    step: &[f64],
    norm: f64,
    positive: bool,
    opts: &NewtonOptions,
    report: &mut SolveReport,
) -> Option<(Vec<f64>, f64)> {
    let rows = disc.rows();
    let mut t = 1.0;
    for _ in 0..=opts.max_halvings {
        trial.copy_from_slice(vals);
        for (r, &k) in rows.iter().enumerate() {
            trial[k] += t * step[r];
        }
        if !positive || rows.iter().all(|&k| trial[k] > 0.0) {
            let tr = disc.residual(form, trial);
            let tn = sup(&tr);
            if tn < norm {
                return Some((tr, tn));
            }
        }
        t *= 0.5;
        report.damping_events += 1;
    }
    None
}

/// Damped Newton on the unknown rows of `vals`; non-interior entries of
/// `vals` are Dirichlet data and stay untouched. With `positive` every
/// trial state must keep the unknowns strictly positive.
pub(crate) fn newton(
    disc: &Discretization,
    form: Form,
    vals: &mut [f64],
    positive: bool,
    opts: &NewtonOptions,
) -> Result<SolveReport> {
    let rows = disc.rows().to_vec();
    let mut res = disc.residual(form, vals);
    let mut norm = sup(&res);
    let mut report = SolveReport {
        newton_iters: 0,
        residual_history: vec![norm],
        damping_events: 0,
        regularization_hits: 0,
        converged: false,
        final_residual: norm,
        formulation: match form {
            Form::Direct => "direct".into(),
            Form::Profile { .. } => "profile".into(),
        },
    };
    if !norm.is_finite() {
        return Err(Error::NonConvergence {
            iterations: 0,
            residual: norm,
        });
    }
    let mut trial = vals.to_vec();
    while norm > opts.tol {
        if report.newton_iters == opts.max_iter {
            return Err(Error::NonConvergence {
                iterations: report.newton_iters,
                residual: norm,
            });
        }
        let (mut triplets, hits) = disc.jacobian(form, vals);
        report.regularization_hits += hits;
        let rhs: Vec<f64> = res.iter().map(|r| -r).collect();
        let diag: Vec<usize> = triplets
            .iter()
            .enumerate()
            .filter(|(_, t)| t.0 == t.1)
            .map(|(i, _)| i)
            .collect();
        let base: Vec<f64> = diag.iter().map(|&i| triplets[i].2).collect();

        // Plain Newton first; if no damped step lowers the sup residual,
        // inflate the diagonal to J_rr·(1 + σ), which tends to a Jacobi sweep.
        let mut accepted = None;
        for sigma in BOOSTS {
            for (&i, &b) in diag.iter().zip(&base) {
                triplets[i].2 = b * (1.0 + sigma);
            }
            let step = match sparse_solve(rows.len(), &triplets, &rhs) {
                Ok(step) => step,
                Err(e) if sigma == 0.0 => return Err(e),
                Err(_) => continue,
            };
            accepted = line_search(disc, form, vals, &mut trial, &step, norm, positive, opts, &mut report);
            if accepted.is_some() {
                break;
            }
        }
        let Some((tr, tn)) = accepted else {
            return Err(Error::NonConvergence {
                iterations: report.newton_iters,
                residual: norm,
            });
        };
        vals.copy_from_slice(&trial);
        res = tr;
        norm = tn;
        report.newton_iters += 1;
        report.residual_history.push(norm);
    }
    report.converged = true;
    report.final_residual = norm;
    Ok(report)
}

/// Newton for `R(w; f − μ) = 0` with the unknown at grid node `pin` held
/// fixed and the scalar `μ` solved for in its place. The residual is affine
/// in the source, so `∂R/∂μ` is an exact difference of two residuals.
pub(crate) fn newton_pinned(
    disc: &Discretization,
    form: Form,
    vals: &mut [f64],
    pin: usize,
    mu: &mut f64,
    positive: bool,
    opts: &NewtonOptions,
) -> Result<SolveReport> {
    let rows = disc.rows().to_vec();
    let pin_row = rows
        .binary_search(&pin)
        .map_err(|_| Error::InvalidArgument(format!("pinned node {pin} is not an unknown")))?;
    let shifted = |mu: f64| -> Result<Discretization> {
        let mut p = disc.problem().clone();
        p.source.f0 -= mu;
        disc.with_problem(&p)
    };
    let mut res = shifted(*mu)?.residual(form, vals);
    let mut norm = sup(&res);
    let mut report = SolveReport {
        newton_iters: 0,
        residual_history: vec![norm],
        damping_events: 0,
        regularization_hits: 0,
        converged: false,
        final_residual: norm,
        formulation: "profile (pinned)".into(),
    };
    if !norm.is_finite() {
        return Err(Error::NonConvergence {
            iterations: 0,
            residual: norm,
        });
    }
    let mut trial = vals.to_vec();
    while norm > opts.tol {
        if report.newton_iters == opts.max_iter {
            return Err(Error::NonConvergence {
                iterations: report.newton_iters,
                residual: norm,
            });
        }
        let here = shifted(*mu)?;
        let (jac, hits) = here.jacobian(form, vals);
        report.regularization_hits += hits;
        let unit = shifted(*mu + 1.0)?.residual(form, vals);
        let mut triplets: Vec<(usize, usize, f64)> = jac.into_iter().filter(|t| t.1 != pin_row).collect();
        triplets.extend(unit.iter().zip(&res).enumerate().map(|(r, (a, b))| (r, pin_row, a - b)));
        let diag: Vec<usize> = triplets
            .iter()
            .enumerate()
            .filter(|(_, t)| t.0 == t.1 && t.1 != pin_row)
            .map(|(i, _)| i)
            .collect();
        let base: Vec<f64> = diag.iter().map(|&i| triplets[i].2).collect();
        let rhs: Vec<f64> = res.iter().map(|r| -r).collect();

        let mut accepted = None;
        'boost: for sigma in BOOSTS {
            for (&i, &b) in diag.iter().zip(&base) {
                triplets[i].2 = b * (1.0 + sigma);
            }
            let step = match sparse_solve(rows.len(), &triplets, &rhs) {
                Ok(step) => step,
                Err(e) if sigma == 0.0 => return Err(e),
                Err(_) => continue,
            };
            let mut t = 1.0;
            for _ in 0..=opts.max_halvings {
                trial.copy_from_slice(vals);
                for (r, &k) in rows.iter().enumerate() {
                    if r != pin_row {
                        trial[k] += t * step[r];
                    }
                }
                let mu_t = *mu + t * step[pin_row];
                if !positive || rows.iter().all(|&k| trial[k] > 0.0) {
                    let tr = shifted(mu_t)?.residual(form, &trial);
                    let tn = sup(&tr);
                    if tn < norm {
                        accepted = Some((tr, tn, mu_t));
                        break 'boost;
                    }
                }
                t *= 0.5;
                report.damping_events += 1;
            }
        }
        let Some((tr, tn, mu_t)) = accepted else {
            return Err(Error::NonConvergence {
                iterations: report.newton_iters,
                residual: norm,
            });
        };
        vals.copy_from_slice(&trial);
        *mu = mu_t;
        res = tr;
        norm = tn;
        report.newton_iters += 1;
        report.residual_history.push(norm);
    }
    report.converged = true;
    report.final_residual = norm;
    Ok(report)
}
