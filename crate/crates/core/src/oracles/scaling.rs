use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance_fast_march, Domain, DomainSpec, Grid, ScalarField};
use crate::norms::{Norm, Vec2};
use crate::pde::{solve_truncated, ProblemSpec, SourceSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingReport {
    pub r: f64,
    pub alpha: f64,
    pub nodes: usize,
    /// `sup |r^α·ũ(x₀ + r x) − u(x)|` over Interior nodes of the unit grid.
    pub sup_mismatch: f64,
    pub relative_mismatch: f64,
}

/// Compares the solution on `𝒲_r(x₀)` with data `(λ, K·r^{−q′})`, rescaled by
/// `r^α`, against the solution on the unit Wulff shape with data `(λr², K)`.
/// Both use the datum `M = 0`; `base` fixes the norm, `q`, `λ` and `K = f0`.
pub fn scaling_check(base: &ProblemSpec, r: f64, x0: Vec2, resolution: usize) -> Result<ScalingReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale r must be positive, got {r}")));
    }
    if base.source.c1 != 0.0 {
        return Err(Error::InvalidArgument("scaling check needs a constant source K".into()));
    }
    let k = base.source.f0;
    let (q, lambda) = (base.q, base.lambda);
    let alpha = base.alpha();
    let norm = Norm::new(base.norm.clone())?;

    let solve = |domain: DomainSpec, lambda: f64, k: f64| -> Result<(ScalarField, Vec2)> {
        let dom = Domain::new(domain.clone())?;
        let center = dom.center();
        let grid = Arc::new(Grid::build(&dom, resolution)?);
        let dist = distance_fast_march(grid, &norm)?;
        let problem = ProblemSpec::new(base.norm.clone(), domain, q, lambda, SourceSpec::constant(k))?;
        Ok((solve_truncated(&problem, &dist, 0.0, None)?.0, center))
    };
    let unit_domain = DomainSpec::wulff(base.norm.clone(), 1.0);
    let small_domain = DomainSpec::wulff(base.norm.clone(), r).centered_at(x0);
    let (unit, c1) = solve(unit_domain, lambda * r * r, k)?;
    let (small, c_small) = solve(small_domain, lambda, k * r.powf(-base.q_prime()))?;

    let grid = unit.grid().clone();
    let scale = r.powf(alpha);
    let (mut sup_mismatch, mut sup_ref, mut nodes) = (0.0f64, 0.0f64, 0);
    for k in (0..grid.len()).filter(|&k| grid.is_interior(k)) {
        let x = grid.point(k);
        let y = [c_small[0] + r * (x[0] - c1[0]), c_small[1] + r * (x[1] - c1[1])];
        let (Some(v), Some(w)) = (unit.get(k), small.sample(y)) else {
            continue;
        };
        nodes += 1;
        sup_mismatch = sup_mismatch.max((scale * w - v).abs());
        sup_ref = sup_ref.max(v.abs());
    }
    if nodes == 0 {
        return Err(Error::EmptySet("scaling comparison nodes"));
    }
    Ok(ScalingReport {
        r,
        alpha,
        nodes,
        sup_mismatch,
        relative_mismatch: sup_mismatch / sup_ref.max(f64::MIN_POSITIVE),
    })
}
