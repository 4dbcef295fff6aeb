//! Norms, their polar norms and the identities tying them together.
//!
//! cargo run --example norm_identities

use finsler_blowup::norms::{identity_suite, polar_by_sweep, Norm, NormSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> finsler_blowup::Result<()> {
    let specs = [
        NormSpec::Euclidean,
        NormSpec::ellipse_diag(4.0, 1.0),
        NormSpec::SmoothedLp { p: 4.0, eps_smooth: 0.05 },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for spec in specs {
        let norm = Norm::new(spec)?;
        let xi = [3.0, 4.0];
        let (sweep, _) = polar_by_sweep(|e| norm.eval(e), xi);
        println!("{}", norm.spec());
        println!("  H(3,4) = {:.6}   H°(3,4) = {:.6} (sweep {:.6})", norm.eval(xi), norm.eval_polar(xi), sweep);
        println!("  ∇H(3,4) = {:?}", norm.grad(xi)?);
        let c = norm.estimate_constants(4096)?;
        println!("  a = {:.4}, b = {:.4}, gamma = {:.4}", c.a_lower, c.b_upper, c.gamma_est);
        let rep = identity_suite(&norm, 500, &mut rng)?;
        for (name, v) in &rep.max_violation {
            println!("  {name:<16} {v:.2e}");
        }
        println!("  within {:.0e}: {}", rep.tolerance, rep.pass);
    }
    Ok(())
}
