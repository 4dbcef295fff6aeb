//! Truncated problems with finite boundary datum M: growth in M and the
//! comparison principle in the source.
//!
//! cargo run --example truncated_problem

use std::sync::Arc;

use finsler_blowup::geometry::{distance_fast_march, Domain, DomainSpec, Grid};
use finsler_blowup::norms::{Norm, NormSpec};
use finsler_blowup::pde::{comparison_check, solve_truncated, ProblemSpec, SourceSpec};

fn main() -> finsler_blowup::Result<()> {
    let domain = DomainSpec::disk(1.0);
    let grid = Arc::new(Grid::build(&Domain::new(domain.clone())?, 48)?);
    let dist = distance_fast_march(grid, &Norm::euclidean())?;
    let problem = ProblemSpec::new(NormSpec::Euclidean, domain, 1.5, 1.0, SourceSpec::constant(1.0))?;
    let center = dist.deepest_node();
    for m in [0.0, 5.0, 20.0] {
        let (u, rep) = solve_truncated(&problem, &dist, m, None)?;
        println!(
            "M = {m:>4}: u(center) = {:.6}, {} Newton steps, residual {:.1e} ({})",
            u.get(center).unwrap(),
            rep.newton_iters,
            rep.final_residual,
            rep.formulation
        );
    }
    let larger = problem.with_source(SourceSpec::constant(2.0));
    let cmp = comparison_check(&problem, &larger, &dist, 10.0)?;
    println!("f = 1 vs f = 2: ordered = {}, sup|u_a - u_b| = {:.4}", cmp.ordered, cmp.sup_difference);
    Ok(())
}
