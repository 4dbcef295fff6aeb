//! Anisotropic distance to the boundary by fast marching, checked against
//! the brute-force oracle.
//!
//! cargo run --example anisotropic_distance

use std::sync::Arc;

use finsler_blowup::geometry::{distance_bruteforce, distance_fast_march, Domain, DomainSpec, Grid};
use finsler_blowup::norms::{Norm, NormSpec};

fn main() -> finsler_blowup::Result<()> {
    let norm = Norm::new(NormSpec::ellipse_diag(4.0, 1.0))?;
    for domain in [DomainSpec::disk(1.0), DomainSpec::ellipse(1.0, 0.6)] {
        for res in [32, 64] {
            let grid = Arc::new(Grid::build(&Domain::new(domain.clone())?, res)?);
            let fast = distance_fast_march(grid.clone(), &norm)?;
            let brute = distance_bruteforce(grid.clone(), &norm, 4096)?;
            let sup = (0..grid.len())
                .filter(|&k| grid.is_interior(k))
                .map(|k| (fast.signed(k) - brute.signed(k)).abs())
                .fold(0.0, f64::max);
            let rep = fast.report();
            println!(
                "{:?} res {res}: inradius {:.4}, |fast - brute| = {sup:.2e} (2h = {:.2e}), median eikonal residual {:.2e}",
                domain.shape,
                fast.inradius(),
                2.0 * grid.h,
                rep.median
            );
        }
    }
    Ok(())
}
