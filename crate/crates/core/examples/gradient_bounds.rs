//! Scaled gradient |∇u|·d^{1/(q−1)} of the blow-up solution, which stays
//! bounded up to the boundary, at two resolutions.
//!
//! cargo run --example gradient_bounds

use std::sync::Arc;

use finsler_blowup::geometry::{distance_fast_march, Domain, DomainSpec, Grid};
use finsler_blowup::norms::{Norm, NormSpec};
use finsler_blowup::pde::{gradient_diagnostic, solve_truncated, ProblemSpec, SourceSpec};

fn main() -> finsler_blowup::Result<()> {
    let domain = DomainSpec::disk(1.0);
    let p = ProblemSpec::new(NormSpec::Euclidean, domain.clone(), 1.5, 1.0, SourceSpec::constant(0.0))?;
    for res in [48, 96] {
        let grid = Arc::new(Grid::build(&Domain::new(domain.clone())?, res)?);
        let dist = distance_fast_march(grid, &Norm::euclidean())?;
        let (u, _) = solve_truncated(&p, &dist, f64::INFINITY, None)?;
        let g = gradient_diagnostic(&u, &dist, &p);
        println!("res {res}: sup {:.4}, p95 {:.4} over {} nodes", g.sup_scaled, g.p95_scaled, g.count);
        for (delta, sup) in &g.local_bounds {
            println!("  sup |∇u| on d > {delta:.3}: {sup:.4}");
        }
    }
    Ok(())
}
