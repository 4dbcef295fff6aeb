//! Ergodic constant by vanishing discount and, for quadratic growth, by
//! Rayleigh descent on the exponential transform, against the eigen oracle.
//!
//! cargo run --example ergodic_constant

use std::sync::Arc;

use finsler_blowup::ergodic::{dyadic_schedule, ergodic_continuation, exp_transform_check, rayleigh_minimize, RayleighOptions};
use finsler_blowup::geometry::{distance_fast_march, Domain, DomainSpec, Grid, ScalarField};
use finsler_blowup::norms::{Norm, NormSpec};
use finsler_blowup::oracles::dense_dirichlet_eigen;
use finsler_blowup::pde::{ProblemSpec, SourceSpec};

fn main() -> finsler_blowup::Result<()> {
    let domain = DomainSpec::disk(1.0);
    let grid = Arc::new(Grid::build(&Domain::new(domain.clone())?, 64)?);
    let dist = distance_fast_march(grid.clone(), &Norm::euclidean())?;
    let f = SourceSpec::constant(0.0);
    for q in [2.0, 1.5] {
        let p = ProblemSpec::new(NormSpec::Euclidean, domain.clone(), q, 1.0, f)?;
        let cont = ergodic_continuation(&p, &dist, &dyadic_schedule(12), None)?;
        println!("q = {q}: u0 = {:.6} (converged {}, residual {:.3})", cont.u0, cont.converged, cont.eq_residual);
        for (l, t) in cont.lambda_trace.iter().rev().take(3) {
            println!("  lambda = {l:.2e}: lambda u(x0) = {t:.6}");
        }
        if q == 2.0 {
            let ray = rayleigh_minimize(dist.norm(), &dist, &f, None, &RayleighOptions::default())?;
            let check = exp_transform_check(&cont.v, &ray.w, &dist, 0.1)?;
            let zero = ScalarField::from_partial(grid.clone(), |k| grid.is_interior(k).then_some(0.0));
            let oracle = dense_dirichlet_eigen(&grid, &zero)?;
            println!("  Rayleigh u0 = {:.6} after {} iterations", ray.u0, ray.iterations());
            println!("  v vs -log w: relative {:.2e}", check.relative);
            println!("  eigen oracle {:.6}; j0,1^2 = 5.783186", oracle.value);
        }
    }
    Ok(())
}
