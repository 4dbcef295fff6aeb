use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DistanceField, ScalarField};
use crate::pde::{centered_gradient, Discretization, Form, Profile, ProblemSpec, Regime, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErgodicMethod {
    Continuation,
    Rayleigh,
}

/// Outcome of the vanishing-discount continuation.
#[derive(Debug, Clone)]
pub struct ErgodicResult {
    /// Extrapolated limit of `λ·u_λ(x₀)`.
    pub u0: f64,
    /// `v = u_λ − u_λ(x₀)` at the smallest `λ`; `v(x₀) = 0`.
    pub v: ScalarField,
    pub x0: usize,
    /// `(λ, λ·u_λ(x₀))` in schedule order.
    pub lambda_trace: Vec<(f64, f64)>,
    pub method: ErgodicMethod,
    /// `|u0_continuation − u0_rayleigh|` once both routes have run.
    pub agreement: Option<f64>,
    /// Trace increments decrease over the last four points.
    pub converged: bool,
    /// Sup over `{d_H > δ}` of `|∇_h u_λ|`, per schedule point.
    pub grad_sup_trace: Vec<f64>,
    /// Sup over `{d_H > δ}` of `|λ·v_λ|`, per schedule point.
    pub lambda_v_trace: Vec<f64>,
    /// Sup of the residual of `−Δ_H v + H(∇v)^q + u₀ = f` over `{d_H > δ}`.
    pub eq_residual: f64,
    /// The probe set `{d_H > δ}` used for the traces above.
    pub probe_delta: f64,
}

impl ErgodicResult {
    pub fn with_agreement(mut self, u0_other: f64) -> Self {
        self.agreement = Some((self.u0 - u0_other).abs());
        self
    }
}

/// `λ_k = 2^{−k}`, `k = 0..=k_max`.
pub fn dyadic_schedule(k_max: u32) -> Vec<f64> {
    (0..=k_max).map(|k| 0.5f64.powi(k as i32)).collect()
}

/// Richardson extrapolation to `λ = 0` under `T(λ) = u₀ + aλ + bλ² + …`,
/// using up to the last three points.
pub fn richardson(trace: &[(f64, f64)]) -> f64 {
    match trace.len() {
        0 => f64::NAN,
        1 => trace[0].1,
        2 => {
            let ((l1, t1), (l2, t2)) = (trace[0], trace[1]);
            (l1 * t2 - l2 * t1) / (l1 - l2)
        }
        n => {
            // Lagrange interpolation at λ = 0 through the last three points.
            let pts = &trace[n - 3..];
            let mut acc = 0.0;
            for (i, &(li, ti)) in pts.iter().enumerate() {
                let mut w = 1.0;
                for (j, &(lj, _)) in pts.iter().enumerate() {
                    if i != j {
                        w *= lj / (lj - li);
                    }
                }
                acc += w * ti;
            }
            acc
        }
    }
}

/// Residual of `−Δ_H v + H(∇v)^q + u₀ = f` on Interior nodes of `{d_H > δ}`
/// (direct scheme with `λ = 0`).
pub fn ergodic_residual(problem: &ProblemSpec, dist: &DistanceField, v: &ScalarField, u0: f64, delta: f64) -> Result<f64> {
    let mut shifted = problem.with_lambda(0.0);
    shifted.source.f0 -= u0;
    let disc = Discretization::new(&shifted, dist)?;
    let vals: Vec<f64> = (0..v.values.len()).map(|k| v.get(k).unwrap_or(f64::NAN)).collect();
    let res = disc.residual(Form::Direct, &vals);
    Ok(disc
        .rows()
        .iter()
        .zip(&res)
        .filter(|(&k, r)| dist.signed(k) > delta && r.is_finite())
        .fold(0.0f64, |m, (_, r)| m.max(r.abs())))
}

fn field_min(v: &ScalarField) -> f64 {
    v.iter_defined().map(|(_, x)| x).fold(f64::INFINITY, f64::min)
}

/// Probe set radius used by the continuation diagnostics.
pub(crate) fn probe_delta(dist: &DistanceField) -> f64 {
    0.2 * dist.inradius()
}

/// Blow-up solutions for a decreasing `λ` schedule in the normalized form
/// `−Δ_H v + H(∇v)^q + λv + μ = f`, `v(x₀) = 0`, `μ = λ·u_λ(x₀)`, each
/// warm-started from the previous pair.
pub fn ergodic_continuation(
    problem: &ProblemSpec,
    dist: &DistanceField,
    schedule: &[f64],
    x0: Option<usize>,
) -> Result<ErgodicResult> {
    if problem.regime() != Regime::Subcritical {
        return Err(Error::InvalidProblem(format!(
            "the ergodic limit needs f = o(d^-q'), got beta = {} >= q' = {}",
            problem.source.beta,
            problem.q_prime()
        )));
    }
    if schedule.is_empty() || schedule.iter().any(|l| !(*l > 0.0)) || schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument(format!(
            "lambda schedule must be positive and strictly decreasing: {schedule:?}"
        )));
    }
    let grid = dist.grid().clone();
    let x0 = x0.unwrap_or_else(|| dist.deepest_node());
    if !grid.is_interior(x0) {
        return Err(Error::InvalidArgument(format!("x0 = {x0} is not an Interior node")));
    }
    let delta = probe_delta(dist);
    let probe: Vec<usize> = (0..grid.len()).filter(|&k| grid.is_interior(k) && dist.signed(k) > delta).collect();

    let mut trace: Vec<(f64, f64)> = Vec::new();
    let mut grad_sup_trace = Vec::new();
    let mut lambda_v_trace = Vec::new();
    let base = Solver::new(&problem.with_lambda(schedule[0]), dist)?;
    // Shape of the first blow-up solution seeds the pinned iteration.
    let first = base.solve(f64::INFINITY, None)?.u;
    let ux0 = first.get(x0).ok_or(Error::EmptySet("solution at x0"))?;
    let mut v = ScalarField::from_partial(grid.clone(), |k| first.get(k).map(|u| u - ux0));
    let mut mu = schedule[0] * ux0;
    for &lambda in schedule {
        let solver = base.with_problem(&problem.with_lambda(lambda))?;
        let solver = match solver.profile() {
            Profile::Log => solver.with_offset(0.0),
            Profile::Power { .. } => solver.with_offset(field_min(&v) - 1.0),
        };
        // μ = λ·u_λ(x₀) moves by O(λ) per halving, so the previous pair is
        // a good start.
        let (state, mu_next) = solver.solve_pinned(x0, mu, Some(&v))?;
        mu = mu_next;
        v = state.u;
        trace.push((lambda, mu));
        grad_sup_trace.push(probe.iter().filter_map(|&k| centered_gradient(&v, k)).fold(0.0, f64::max));
        lambda_v_trace.push(probe.iter().filter_map(|&k| v.get(k)).fold(0.0f64, |m, x| m.max((lambda * x).abs())));
    }
    let u0 = richardson(&trace);
    let steps: Vec<f64> = trace.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
    let tail = &steps[steps.len().saturating_sub(3)..];
    let converged = steps.len() >= 3 && tail.windows(2).all(|w| w[1] < w[0]);
    let eq_residual = ergodic_residual(problem, dist, &v, u0, delta)?;
    Ok(ErgodicResult {
        u0,
        v,
        x0,
        lambda_trace: trace,
        method: ErgodicMethod::Continuation,
        agreement: None,
        converged,
        grad_sup_trace,
        lambda_v_trace,
        eq_residual,
        probe_delta: delta,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniquenessProbe {
    pub lambda_floor: f64,
    /// `(c, sup over the probe set of |λ_floor·v_c + μ_c|)`: how far the
    /// discounted solution with constant `u₀ + c` is from solving the
    /// ergodic equation.
    pub residuals: Vec<(f64, f64)>,
    /// Every `c ≠ 0` residual is at least 10× the `c = 0` one.
    pub separated: bool,
    /// Residual increases with `|c|` on each side of zero.
    pub monotone: bool,
}

/// For each offset `c`, solves `−Δ_H v + H(∇v)^q + λ_floor·v + μ = f − (u₀ + c)`
/// with blow-up data and `v(x₀) = 0`. The ergodic residual of `v` with
/// constant `u₀ + c` is then `−(λ_floor·v + μ)`, which only `c = 0` makes
/// small.
pub fn ergodic_constant_uniqueness_probe(
    problem: &ProblemSpec,
    dist: &DistanceField,
    u0: f64,
    offsets: &[f64],
    lambda_floor: f64,
) -> Result<UniquenessProbe> {
    let grid = dist.grid().clone();
    let delta = probe_delta(dist);
    let probe: Vec<usize> = (0..grid.len()).filter(|&k| grid.is_interior(k) && dist.signed(k) > delta).collect();
    let mut residuals = Vec::with_capacity(offsets.len());
    let x0 = dist.deepest_node();
    let base = Solver::new(&problem.with_lambda(lambda_floor), dist)?;
    let first = base.solve(f64::INFINITY, None)?.u;
    let ux0 = first.get(x0).ok_or(Error::EmptySet("solution at x0"))?;
    let shape = ScalarField::from_partial(grid.clone(), |k| first.get(k).map(|u| u - ux0));
    for &c in offsets {
        let mut p = problem.with_lambda(lambda_floor);
        p.source.f0 -= u0 + c;
        let solver = base.with_problem(&p)?;
        let solver = match solver.profile() {
            Profile::Log => solver.with_offset(0.0),
            Profile::Power { .. } => solver.with_offset(field_min(&shape) - 1.0),
        };
        // −Δv + H^q + (u₀ + c) − f = −(λv + μ) for the pinned pair.
        let (state, mu) = solver.solve_pinned(x0, -c, Some(&shape))?;
        let r = probe
            .iter()
            .filter_map(|&k| state.u.get(k))
            .fold(0.0f64, |m, v| m.max((lambda_floor * v + mu).abs()));
        residuals.push((c, r));
    }
    let zero = residuals.iter().find(|(c, _)| *c == 0.0).map(|r| r.1);
    let separated = match zero {
        Some(z) => residuals.iter().filter(|(c, _)| *c != 0.0).all(|(_, r)| *r >= 10.0 * z),
        None => false,
    };
    let side = |positive: bool| {
        let mut pts: Vec<(f64, f64)> = residuals
            .iter()
            .copied()
            .filter(|(c, _)| if positive { *c >= 0.0 } else { *c <= 0.0 })
            .map(|(c, r)| (c.abs(), r))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.windows(2).all(|w| w[1].1 >= w[0].1)
    };
    let monotone = side(true) && side(false);
    Ok(UniquenessProbe {
        lambda_floor,
        residuals,
        separated,
        monotone,
    })
}
