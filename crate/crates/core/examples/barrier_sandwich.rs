//! Explicit sub- and supersolutions near the boundary with a calibrated
//! constant, and the check that they enclose the blow-up solution.
//!
//! cargo run --example barrier_sandwich

use std::sync::Arc;

use finsler_blowup::asymptotics::{
    alpha, barrier_field, calibrate_c_eps, sandwich_check, solve_c0, BarrierKind, BarrierParams,
};
use finsler_blowup::geometry::{distance_fast_march, extended_distance, Domain, DomainSpec, Grid};
use finsler_blowup::norms::{Norm, NormSpec};
use finsler_blowup::pde::{solve_truncated, ProblemSpec, SourceSpec};

fn main() -> finsler_blowup::Result<()> {
    let domain = DomainSpec::disk(1.0);
    let grid = Arc::new(Grid::build(&Domain::new(domain.clone())?, 64)?);
    let dist = distance_fast_march(grid.clone(), &Norm::euclidean())?;
    let delta0 = 0.2;
    for q in [1.5, 2.0] {
        let p = ProblemSpec::new(NormSpec::Euclidean, domain.clone(), q, 1.0, SourceSpec::constant(0.0))?;
        let (u, _) = solve_truncated(&p, &dist, f64::INFINITY, None)?;
        for eps in [1.0, 0.5, 0.25] {
            let partial = BarrierParams {
                eps,
                delta: 0.0,
                c_eps: 0.0,
                delta0,
                c0: solve_c0(q, 0.0)?,
                alpha: alpha(q),
            };
            let cal = calibrate_c_eps(&p, &dist, partial)?;
            let d_ext = extended_distance(&dist, delta0)?;
            let sub = barrier_field(&cal.params, &d_ext, BarrierKind::Sub)?;
            let sup = barrier_field(&cal.params, &d_ext, BarrierKind::Super)?;
            let rep = sandwich_check(&u, &sub, &sup, &dist, (3.0 * grid.h, delta0));
            println!(
                "q = {q}, eps = {eps}: C_eps = {:.3} (sub {:.3}, super {:.3}); {} nodes, sandwich holds: {}",
                cal.params.c_eps,
                cal.c_sub,
                cal.c_super,
                rep.nodes,
                rep.holds()
            );
        }
    }
    Ok(())
}
