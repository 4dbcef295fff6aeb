//! Rescaling identity between a small Wulff shape and the unit one.
//!
//! cargo run --example scaling_identity

use finsler_blowup::geometry::DomainSpec;
use finsler_blowup::norms::NormSpec;
use finsler_blowup::oracles::scaling_check;
use finsler_blowup::pde::{ProblemSpec, SourceSpec};

fn main() -> finsler_blowup::Result<()> {
    let base = ProblemSpec::new(
        NormSpec::Euclidean,
        DomainSpec::wulff(NormSpec::Euclidean, 1.0),
        1.5,
        1.0,
        SourceSpec::constant(1.0),
    )?;
    for r in [1.0, 0.5, 0.25] {
        let rep = scaling_check(&base, r, [0.3, -0.2], 64)?;
        println!(
            "r = {r}: alpha = {}, {} nodes, relative mismatch {:.3}%",
            rep.alpha,
            rep.nodes,
            100.0 * rep.relative_mismatch
        );
    }
    Ok(())
}
