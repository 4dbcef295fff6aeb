//! Radial reference solutions on Wulff shapes: a collocation BVP, an
//! independent shooting method, and the 2-D solver on the same problem.
//!
//! cargo run --example radial_oracle

use std::sync::Arc;

use finsler_blowup::geometry::{distance_fast_march, Domain, DomainSpec, Grid};
use finsler_blowup::norms::{Norm, NormSpec};
use finsler_blowup::oracles::{radial_to_field, shooting_center_value, solve_radial};
use finsler_blowup::pde::{solve_truncated, ProblemSpec, SourceSpec};

fn main() -> finsler_blowup::Result<()> {
    let (q, k) = (1.5, 1.0);
    let sol = solve_radial(2, q, k, 2001)?;
    let shot = shooting_center_value(2, q, k, 20_000);
    println!("U(0): collocation {:.8}, shooting {:.8}", sol.center_value(), shot);
    for spec in [NormSpec::Euclidean, NormSpec::ellipse_diag(2.0, 0.5)] {
        let norm = Norm::new(spec.clone())?;
        let domain = DomainSpec::wulff(spec.clone(), 1.0);
        let grid = Arc::new(Grid::build(&Domain::new(domain.clone())?, 64)?);
        let dist = distance_fast_march(grid.clone(), &norm)?;
        let p = ProblemSpec::new(spec.clone(), domain, q, 1e-3, SourceSpec::constant(k))?;
        let (u, _) = solve_truncated(&p, &dist, 0.0, None)?;
        let oracle = radial_to_field(&sol, &norm, grid.clone(), [0.0, 0.0]);
        let sup = (0..grid.len())
            .filter(|&n| grid.is_interior(n))
            .map(|n| (u.get(n).unwrap() - oracle.get(n).unwrap()).abs())
            .fold(0.0, f64::max);
        println!("{spec}: sup |u - U(H°(x))| = {sup:.4} ({:.2}% of U(0))", 100.0 * sup / sol.center_value());
    }
    Ok(())
}
