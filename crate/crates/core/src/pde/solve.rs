use serde::{Deserialize, Serialize};

use super::discrete::{Discretization, Form};
use super::newton::{newton, newton_pinned, NewtonOptions, SolveReport};
use super::{Profile, ProblemSpec};
use crate::error::{Error, Result};
use crate::geometry::{DistanceField, ScalarField};

/// Unknown used by the Newton iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// `u` itself; only finite boundary data.
    Direct,
    /// `w` with `u = Φ(w) + offset`; admits `M = ∞`.
    Profile,
}

/// Truncated and blow-up solver bound to one problem and distance field.
#[derive(Debug, Clone)]
pub struct Solver {
    disc: Discretization,
    profile: Profile,
    formulation: Formulation,
    newton: NewtonOptions,
    offset: Option<f64>,
}

/// Solution and its profile variable.
#[derive(Debug, Clone)]
pub struct State {
    pub u: ScalarField,
    /// Full-grid unknown values (the `w` variable in profile form).
    pub(crate) vals: Vec<f64>,
    pub report: SolveReport,
    pub offset: f64,
}

impl Solver {
    pub fn new(problem: &ProblemSpec, dist: &DistanceField) -> Result<Self> {
        let disc = Discretization::new(problem, dist)?;
        Ok(Solver {
            profile: Profile::for_problem(problem)?,
            formulation: Formulation::Profile,
            newton: NewtonOptions::with_tol(problem.newton_tol()),
            offset: None,
            disc,
        })
    }

    pub fn with_formulation(mut self, formulation: Formulation) -> Self {
        self.formulation = formulation;
        self
    }

    pub fn with_newton(mut self, newton: NewtonOptions) -> Self {
        self.newton = newton;
        self
    }

    /// Fixes the profile offset instead of deriving it from the data `M`.
    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = Some(offset);
        self
    }

    /// Same grid and numbering, different problem data.
    pub fn with_problem(&self, problem: &ProblemSpec) -> Result<Self> {
        Ok(Solver {
            disc: self.disc.with_problem(problem)?,
            profile: Profile::for_problem(problem)?,
            newton: NewtonOptions::with_tol(problem.newton_tol()),
            ..self.clone()
        })
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn problem(&self) -> &ProblemSpec {
        self.disc.problem()
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn newton_options(&self) -> &NewtonOptions {
        &self.newton
    }

    /// Offset used for data `m_min`: zero for the log profile, `min(M, 0) − 1`
    /// for the power profile so that `Φ⁻¹(M − offset)` exists.
    pub fn offset_for(&self, m_min: f64) -> f64 {
        self.offset.unwrap_or(match self.profile {
            Profile::Log => 0.0,
            Profile::Power { .. } => m_min.min(0.0) - 1.0,
        })
    }

    fn form(&self, offset: f64) -> Form {
        match self.formulation {
            Formulation::Direct => Form::Direct,
            Formulation::Profile => Form::Profile {
                profile: self.profile,
                offset,
            },
        }
    }

    /// Value carried by every non-interior node.
    fn datum(&self, m: f64, offset: f64) -> Result<f64> {
        match self.formulation {
            Formulation::Direct if m.is_finite() => Ok(m),
            Formulation::Direct => Err(Error::InvalidArgument("direct form needs finite M".into())),
            Formulation::Profile => {
                let v = m - offset;
                if m == f64::INFINITY {
                    Ok(0.0)
                } else if self.profile.accepts(v) && m.is_finite() {
                    Ok(self.profile.inverse(v))
                } else {
                    Err(Error::InvalidArgument(format!("M = {m} is below the profile offset {offset}")))
                }
            }
        }
    }

    fn to_unknown(&self, u: f64, offset: f64) -> Option<f64> {
        match self.formulation {
            Formulation::Direct => u.is_finite().then_some(u),
            Formulation::Profile => {
                let v = u - offset;
                self.profile
                    .accepts(v)
                    .then(|| self.profile.inverse(v))
                    .filter(|w| *w > 0.0 && w.is_finite())
            }
        }
    }

    fn to_solution(&self, x: f64, offset: f64) -> f64 {
        match self.formulation {
            Formulation::Direct => x,
            Formulation::Profile => self.profile.phi(x) + offset,
        }
    }

    /// Constant barriers: for `λ > 0`, `max(M, sup f/λ)` is a supersolution
    /// and `min(M, inf f/λ)` a subsolution, so every solution lies between.
    fn order_interval(&self, m: f64) -> (f64, f64) {
        let lambda = self.disc.problem().lambda;
        if lambda <= 0.0 {
            return (f64::NEG_INFINITY, f64::INFINITY);
        }
        let f = self.disc.rows().iter().map(|&k| self.disc.source()[k] / lambda);
        let (lo, hi) = f.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        (lo.min(m), hi.max(m))
    }

    /// Initial unknowns. A supplied guess is first projected onto
    /// `bounds`: the transformed scheme has spurious roots that steep
    /// guesses outside the order interval can reach.
    fn initial(&self, datum: f64, offset: f64, init: Option<&ScalarField>, bounds: (f64, f64)) -> Vec<f64> {
        let d = self.disc.floored_distance();
        let mut vals = vec![datum; self.disc.grid().len()];
        for &k in self.disc.rows() {
            let guess = match self.formulation {
                // u = M, or w = max(w_b, d): the boundary-layer profile clipped at the datum.
                Formulation::Direct => datum,
                Formulation::Profile => datum.max(d[k]),
            };
            vals[k] = init
                .and_then(|u| u.get(k))
                .and_then(|u| self.to_unknown(u.clamp(bounds.0, bounds.1), offset))
                .unwrap_or(guess);
        }
        vals
    }

    fn finish(&self, vals: Vec<f64>, m: f64, offset: f64, report: SolveReport) -> State {
        let grid = self.disc.grid().clone();
        let mut u = ScalarField::undefined(grid.clone());
        for k in 0..grid.len() {
            if grid.is_interior(k) {
                u.set(k, self.to_solution(vals[k], offset));
            } else if grid.class(k) == crate::geometry::NodeClass::BoundaryLayer && m.is_finite() {
                u.set(k, m);
            }
        }
        State {
            u,
            vals,
            report,
            offset,
        }
    }

    fn run(&self, m: f64, offset: f64, mut vals: Vec<f64>) -> Result<State> {
        let datum = self.datum(m, offset)?;
        for k in 0..vals.len() {
            if !self.disc.grid().is_interior(k) {
                vals[k] = datum;
            }
        }
        let positive = self.formulation == Formulation::Profile;
        let start = vals.clone();
        match newton(&self.disc, self.form(offset), &mut vals, positive, &self.newton) {
            Ok(report) => Ok(self.finish(vals, m, offset, report)),
            Err(err) if positive && m.is_finite() => self.run_via_direct(m, offset, &start).map_err(|_| err),
            Err(err) => Err(err),
        }
    }

    /// Profile Newton can stall far from the solution; the direct scheme is
    /// more forgiving for finite data and lands within `O(h²)` of the
    /// profile solution, from where profile Newton converges quickly.
    fn run_via_direct(&self, m: f64, offset: f64, start: &[f64]) -> Result<State> {
        let grid = self.disc.grid().clone();
        let u0 = ScalarField::from_partial(grid.clone(), |k| {
            grid.is_interior(k).then(|| self.to_solution(start[k], offset))
        });
        let direct = self.clone().with_formulation(Formulation::Direct);
        let pre = direct.solve(m, Some(&u0))?;
        let mut vals = self.initial(self.datum(m, offset)?, offset, Some(&pre.u), self.order_interval(m));
        let mut report = newton(&self.disc, self.form(offset), &mut vals, true, &self.newton)?;
        report.newton_iters += pre.report.newton_iters;
        report.damping_events += pre.report.damping_events;
        report.regularization_hits += pre.report.regularization_hits;
        report.formulation = "profile (direct warm start)".into();
        Ok(self.finish(vals, m, offset, report))
    }

    /// Truncated problem with constant datum `M` (possibly `∞`).
    pub fn solve(&self, m: f64, init: Option<&ScalarField>) -> Result<State> {
        let offset = self.offset_for(m);
        let vals = self.initial(self.datum(m, offset)?, offset, init, self.order_interval(m));
        self.run(m, offset, vals)
    }

    /// Blow-up solution of `−Δ_H v + H(∇v)^q + λv + μ = f` normalized by
    /// `v(pin) = 0`, with the constant `μ` as an unknown. For `λ > 0` this is
    /// `v = u_λ − u_λ(pin)` and `μ = λ·u_λ(pin)`; unlike a plain solve it
    /// stays well conditioned as `λ → 0`. Profile formulation only.
    pub fn solve_pinned(&self, pin: usize, mu: f64, init: Option<&ScalarField>) -> Result<(State, f64)> {
        if self.formulation != Formulation::Profile {
            return Err(Error::InvalidArgument("pinned solves need the profile formulation".into()));
        }
        let m = f64::INFINITY;
        let offset = self.offset_for(m);
        let pinned = self
            .to_unknown(0.0, offset)
            .ok_or_else(|| Error::InvalidArgument(format!("v(pin) = 0 lies below the profile offset {offset}")))?;
        // v = u − u(pin) obeys no constant barrier.
        let mut vals = self.initial(self.datum(m, offset)?, offset, init, (f64::NEG_INFINITY, f64::INFINITY));
        vals[pin] = pinned;
        let mut mu = mu;
        let report = newton_pinned(&self.disc, self.form(offset), &mut vals, pin, &mut mu, true, &self.newton)?;
        Ok((self.finish(vals, m, offset, report), mu))
    }

    /// Warm-started sweep over an increasing schedule.
    pub fn blowup(&self, schedule: &[f64], opts: &BlowupOptions) -> Result<BlowupRun> {
        validate_schedule(schedule)?;
        let offset = self.offset_for(schedule[0]);
        let grid = self.disc.grid().clone();
        let monitor: Vec<usize> = self
            .disc
            .rows()
            .iter()
            .copied()
            .filter(|&k| self.disc.floored_distance()[k] > opts.monitor_delta)
            .collect();
        if monitor.is_empty() {
            return Err(Error::EmptySet("blow-up monitor set"));
        }
        let mut run = BlowupRun {
            m_schedule: Vec::new(),
            solutions: Vec::new(),
            reports: Vec::new(),
            interior_deltas: Vec::new(),
            min_increments: Vec::new(),
            stabilized: false,
            offset,
        };
        let mut vals: Option<Vec<f64>> = None;
        for &m in schedule {
            let start = match vals.take() {
                Some(v) => v,
                None => self.initial(self.datum(m, offset)?, offset, None, self.order_interval(m)),
            };
            let state = self.run(m, offset, start)?;
            if let Some(prev) = run.solutions.last() {
                let delta = monitor
                    .iter()
                    .map(|&k| (state.u.values[k] - prev.values[k]).abs())
                    .fold(0.0, f64::max);
                let incr = (0..grid.len())
                    .filter(|&k| grid.is_interior(k))
                    .map(|k| state.u.values[k] - prev.values[k])
                    .fold(f64::INFINITY, f64::min);
                run.interior_deltas.push(delta);
                run.min_increments.push(incr);
            }
            run.m_schedule.push(m);
            run.solutions.push(state.u);
            run.reports.push(state.report);
            vals = Some(state.vals);
            if let Some(&delta) = run.interior_deltas.last() {
                if delta <= opts.stop_tol {
                    run.stabilized = true;
                    if !opts.full_schedule {
                        break;
                    }
                }
            }
        }
        Ok(run)
    }
}

fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty M schedule".into()));
    }
    if schedule.iter().any(|m| m.is_nan()) || schedule.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument(format!("M schedule must be strictly increasing: {schedule:?}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupOptions {
    /// Stop once the sup change on the monitor set falls below this.
    pub stop_tol: f64,
    /// Monitor set `{d_H > monitor_delta}`.
    pub monitor_delta: f64,
    /// Keep going after stabilization (used to check the whole chain).
    pub full_schedule: bool,
}

/// Output of the increasing-`M` sweep.
#[derive(Debug, Clone)]
pub struct BlowupRun {
    pub m_schedule: Vec<f64>,
    pub solutions: Vec<ScalarField>,
    pub reports: Vec<SolveReport>,
    /// Sup change on the monitor set between consecutive solutions.
    pub interior_deltas: Vec<f64>,
    /// Minimum of `u_{k+1} − u_k` over all Interior nodes.
    pub min_increments: Vec<f64>,
    pub stabilized: bool,
    pub offset: f64,
}

impl BlowupRun {
    pub fn limit(&self) -> &ScalarField {
        self.solutions.last().expect("a run holds at least one solution")
    }

    /// Largest monotonicity violation `max(0, −min(u_{k+1} − u_k))`.
    pub fn worst_violation(&self) -> f64 {
        self.min_increments.iter().fold(0.0f64, |m, &v| m.max(-v))
    }
}

/// Truncated problem with datum `M`, warm-started from `u_init` if given.
pub fn solve_truncated(
    problem: &ProblemSpec,
    dist: &DistanceField,
    m: f64,
    u_init: Option<&ScalarField>,
) -> Result<(ScalarField, SolveReport)> {
    let state = Solver::new(problem, dist)?.solve(m, u_init)?;
    Ok((state.u, state.report))
}

/// Increasing-`M` sweep; stops once the change on `{d_H > monitor_delta}`
/// drops below `stop_tol`.
pub fn solve_blowup(
    problem: &ProblemSpec,
    dist: &DistanceField,
    schedule: &[f64],
    stop_tol: f64,
    monitor_delta: f64,
) -> Result<BlowupRun> {
    Solver::new(problem, dist)?.blowup(
        schedule,
        &BlowupOptions {
            stop_tol,
            monitor_delta,
            full_schedule: false,
        },
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub ordered: bool,
    /// `max(0, sup(u_a − u_b))`.
    pub worst_violation: f64,
    pub sup_difference: f64,
    pub tolerance: f64,
}

/// Solves both truncated problems and checks `u_a ≤ u_b + 2·tol`.
pub fn comparison_check(
    problem_a: &ProblemSpec,
    problem_b: &ProblemSpec,
    dist: &DistanceField,
    m: f64,
) -> Result<ComparisonReport> {
    let sa = Solver::new(problem_a, dist)?;
    let sb = sa.with_problem(problem_b)?;
    // A common offset keeps both solves on the same change of unknown.
    let offset = sa.offset_for(m).min(sb.offset_for(m));
    let ua = sa.with_offset(offset).solve(m, None)?.u;
    let ub = sb.with_offset(offset).solve(m, None)?.u;
    let tolerance = 2.0 * problem_a.newton_tol().max(problem_b.newton_tol());
    Ok(compare_fields(&ua, &ub, tolerance))
}

pub(crate) fn compare_fields(ua: &ScalarField, ub: &ScalarField, tolerance: f64) -> ComparisonReport {
    let grid = ua.grid();
    let mut worst = 0.0f64;
    let mut sup_difference = 0.0f64;
    for k in 0..grid.len() {
        if grid.is_interior(k) {
            let d = ua.values[k] - ub.values[k];
            worst = worst.max(d);
            sup_difference = sup_difference.max(d.abs());
        }
    }
    ComparisonReport {
        ordered: worst <= tolerance,
        worst_violation: worst,
        sup_difference,
        tolerance,
    }
}
