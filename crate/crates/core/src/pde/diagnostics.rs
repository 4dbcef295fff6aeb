use serde::{Deserialize, Serialize};

use super::ProblemSpec;
use crate::geometry::{DistanceField, ScalarField};

/// Scaled gradient `s = |∇_h u|·d_H^{1/(q−1)}` and local gradient bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradientStats {
    pub sup_scaled: f64,
    pub p95_scaled: f64,
    pub count: usize,
    /// `(δ, sup over {d_H > δ} of |∇_h u|)`, increasing `δ`.
    pub local_bounds: Vec<(f64, f64)>,
}

/// Centered-difference gradient magnitude at interior nodes whose four
/// neighbours carry finite values.
pub(crate) fn centered_gradient(u: &ScalarField, k: usize) -> Option<f64> {
    let grid = u.grid();
    let at = |di, dj| grid.offset(k, di, dj).and_then(|n| u.get(n)).filter(|v| v.is_finite());
    let h = grid.h;
    let gx = (at(1, 0)? - at(-1, 0)?) / (2.0 * h);
    let gy = (at(0, 1)? - at(0, -1)?) / (2.0 * h);
    Some(gx.hypot(gy))
}

/// Statistics over Interior nodes with `d_H ≥ 3h`.
pub fn gradient_diagnostic(u: &ScalarField, dist: &DistanceField, problem: &ProblemSpec) -> GradientStats {
    let grid = u.grid();
    let power = 1.0 / (problem.q - 1.0);
    let floor = 3.0 * grid.h;
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for k in 0..grid.len() {
        if !grid.is_interior(k) || dist.signed(k) < floor {
            continue;
        }
        if let Some(g) = centered_gradient(u, k) {
            samples.push((dist.signed(k), g));
        }
    }
    let mut scaled: Vec<f64> = samples.iter().map(|&(d, g)| g * d.powf(power)).collect();
    scaled.sort_by(f64::total_cmp);
    let p95 = scaled
        .get(((scaled.len().max(1) - 1) as f64 * 0.95).round() as usize)
        .copied()
        .unwrap_or(0.0);
    let inradius = dist.inradius();
    let local_bounds = [0.05, 0.1, 0.2, 0.4]
        .iter()
        .map(|&frac| {
            let delta = frac * inradius;
            let sup = samples.iter().filter(|&&(d, _)| d > delta).map(|&(_, g)| g).fold(0.0, f64::max);
            (delta, sup)
        })
        .collect();
    GradientStats {
        sup_scaled: scaled.last().copied().unwrap_or(0.0),
        p95_scaled: p95,
        count: scaled.len(),
        local_bounds,
    }
}
