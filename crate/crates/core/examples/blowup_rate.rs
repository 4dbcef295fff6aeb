//! Blow-up solutions as the limit of an increasing datum schedule, and the
//! leading boundary rate against the closed-form constants.
//!
//! cargo run --example blowup_rate

use std::sync::Arc;

use finsler_blowup::asymptotics::{default_band, fit_blowup_rate, fit_power_with_constant, solve_c0, FitMode};
use finsler_blowup::geometry::{distance_fast_march, Domain, DomainSpec, Grid};
use finsler_blowup::norms::{Norm, NormSpec};
use finsler_blowup::pde::{solve_blowup, ProblemSpec, SourceSpec};

fn main() -> finsler_blowup::Result<()> {
    let domain = DomainSpec::disk(1.0);
    let grid = Arc::new(Grid::build(&Domain::new(domain.clone())?, 96)?);
    let dist = distance_fast_march(grid.clone(), &Norm::euclidean())?;
    let schedule = [10.0, 20.0, 40.0, 80.0, 160.0, f64::INFINITY];
    for q in [2.0, 1.5] {
        let p = ProblemSpec::new(NormSpec::Euclidean, domain.clone(), q, 1.0, SourceSpec::constant(0.0))?;
        let run = solve_blowup(&p, &dist, &schedule, 1e-3, 8.0 * grid.h)?;
        println!("q = {q}: M schedule {:?}", run.m_schedule);
        println!("  interior changes {:?}", run.interior_deltas);
        println!("  monotonicity violation {:.1e}", run.worst_violation());
        let band = default_band(&dist, 0.2);
        let fit = fit_blowup_rate(run.limit(), &dist, q, band)?;
        let c0 = solve_c0(q, 0.0)?;
        match fit.mode {
            FitMode::Logarithmic => println!("  u ~ C0 log(1/d): C0 = {:.4} (theory {c0})", fit.c0_fit),
            FitMode::PowerLaw => {
                println!("  u ~ C0 d^-a: a = {:.4}, C0 = {:.4} (theory a = {}, C0 = {c0})", fit.alpha_fit, fit.c0_fit, p.alpha());
                let affine = fit_power_with_constant(run.limit(), &dist, band)?;
                println!(
                    "  with a constant term: a = {:.4}, C0 = {:.4}, constant {:.2}",
                    affine.alpha_fit, affine.c0_fit, affine.constant
                );
            }
        }
    }
    Ok(())
}
