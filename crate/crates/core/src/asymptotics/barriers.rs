use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{extended_distance, DistanceField, ScalarField};
use crate::pde::{Discretization, Form, ProblemSpec};

/// Parameters of `w̲ = (C₀−ε)(d+δ)^{−α} − C_ε` and `w̄ = (C₀+ε)(d−δ)^{−α} + C_ε`;
/// with `α = 0` the power is replaced by `−log`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierParams {
    pub eps: f64,
    pub delta: f64,
    pub c_eps: f64,
    pub delta0: f64,
    pub c0: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierKind {
    Sub,
    Super,
}

/// Largest `C_ε` the calibration accepts.
pub const C_EPS_CAP: f64 = 1e6;

impl BarrierParams {
    fn profile(&self, s: f64) -> f64 {
        if self.alpha == 0.0 {
            -s.ln()
        } else {
            s.powf(-self.alpha)
        }
    }

    /// Barrier value at extended distance `d`, if the argument is positive.
    pub fn value(&self, kind: BarrierKind, d: f64) -> Option<f64> {
        let (s, coef, shift) = match kind {
            BarrierKind::Sub => (d + self.delta, self.c0 - self.eps, -self.c_eps),
            BarrierKind::Super => (d - self.delta, self.c0 + self.eps, self.c_eps),
        };
        (s > 0.0).then(|| coef * self.profile(s) + shift)
    }
}

/// Nodal barrier field from the extended distance; undefined where the
/// argument `d ± δ` is not positive.
pub fn barrier_field(params: &BarrierParams, d_ext: &ScalarField, kind: BarrierKind) -> Result<ScalarField> {
    let field = ScalarField::from_partial(d_ext.grid().clone(), |k| {
        d_ext.get(k).and_then(|d| params.value(kind, d))
    });
    if field.iter_defined().next().is_none() {
        return Err(Error::EmptySet("barrier evaluation set"));
    }
    Ok(field)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Calibration {
    pub params: BarrierParams,
    /// `C_ε` needed by each barrier on its own.
    pub c_sub: f64,
    pub c_super: f64,
    pub capped: bool,
    pub rows_checked: usize,
    /// Rows with `d_H ≥ 3h` enter the calibration; the closer layers are
    /// under-resolved, and `c_unresolved` is what they alone would demand.
    pub resolved_floor: f64,
    pub c_unresolved: f64,
}

/// Smallest `C_ε` making the discrete residual of `w̄` nonnegative and that
/// of `w̲` nonpositive on resolved rows (`d_H ≥ 3h`) where the stencil of the
/// barrier is defined.
///
/// Adding a constant `c` to a field shifts the residual by exactly `λc`,
/// so the threshold is obtained in closed form from the `C_ε = 0` fields.
pub fn calibrate_c_eps(problem: &ProblemSpec, dist: &DistanceField, partial: BarrierParams) -> Result<Calibration> {
    if !(problem.lambda > 0.0) {
        return Err(Error::InvalidArgument("calibration needs lambda > 0".into()));
    }
    let disc = Discretization::new(problem, dist)?;
    let d_ext = extended_distance(dist, partial.delta0)?;
    let base = BarrierParams { c_eps: 0.0, ..partial };
    let rows = disc.rows();
    let floor = 3.0 * dist.grid().h;
    let mut rows_checked = 0;
    let mut c_unresolved = 0.0f64;
    let mut need = |kind: BarrierKind| -> Result<f64> {
        let field = barrier_field(&base, &d_ext, kind)?;
        let vals: Vec<f64> = (0..field.values.len()).map(|k| field.get(k).unwrap_or(f64::NAN)).collect();
        let res = disc.residual(Form::Direct, &vals);
        let mut worst = 0.0f64;
        for (r, &k) in rows.iter().enumerate() {
            let in_set = match kind {
                BarrierKind::Super => dist.signed(k) > base.delta,
                BarrierKind::Sub => true,
            };
            if !in_set || !res[r].is_finite() {
                continue;
            }
            let demand = match kind {
                BarrierKind::Super => -res[r],
                BarrierKind::Sub => res[r],
            };
            if dist.signed(k) >= floor {
                rows_checked += 1;
                worst = worst.max(demand);
            } else {
                c_unresolved = c_unresolved.max(demand / problem.lambda);
            }
        }
        Ok(worst / problem.lambda)
    };
    let c_super = need(BarrierKind::Super)?;
    let c_sub = need(BarrierKind::Sub)?;
    let c = c_super.max(c_sub).max(0.0);
    let capped = c > C_EPS_CAP;
    Ok(Calibration {
        params: BarrierParams {
            c_eps: c.min(C_EPS_CAP),
            ..partial
        },
        c_sub,
        c_super,
        capped,
        rows_checked,
        resolved_floor: floor,
        c_unresolved,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SandwichReport {
    pub nodes: usize,
    pub below_sub: usize,
    pub above_super: usize,
    /// Largest `w̲ − u` and `u − w̄` (negative when strictly inside).
    pub worst_sub_gap: f64,
    pub worst_super_gap: f64,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.nodes > 0 && self.below_sub == 0 && self.above_super == 0
    }
}

/// Counts nodes in `band.0 ≤ d_H ≤ band.1` violating `w̲ ≤ u ≤ w̄`.
pub fn sandwich_check(
    u: &ScalarField,
    sub: &ScalarField,
    sup: &ScalarField,
    dist: &DistanceField,
    band: (f64, f64),
) -> SandwichReport {
    let mut rep = SandwichReport {
        nodes: 0,
        below_sub: 0,
        above_super: 0,
        worst_sub_gap: f64::NEG_INFINITY,
        worst_super_gap: f64::NEG_INFINITY,
    };
    let grid = u.grid();
    for k in 0..grid.len() {
        let d = dist.signed(k);
        if !grid.is_interior(k) || d < band.0 || d > band.1 {
            continue;
        }
        let (Some(v), Some(lo), Some(hi)) = (u.get(k), sub.get(k), sup.get(k)) else {
            continue;
        };
        rep.nodes += 1;
        rep.worst_sub_gap = rep.worst_sub_gap.max(lo - v);
        rep.worst_super_gap = rep.worst_super_gap.max(v - hi);
        rep.below_sub += usize::from(v < lo);
        rep.above_super += usize::from(v > hi);
    }
    rep
}
