//! Vanishing-discount limit: the ergodic constant `u₀` and corrector `v`
//! with `−Δ_H v + H(∇v)^q + u₀ = f` and `v → ∞` on the boundary.

mod continuation;
mod rayleigh;

pub use continuation::{
    dyadic_schedule, ergodic_constant_uniqueness_probe, ergodic_continuation, ergodic_residual, richardson,
    ErgodicMethod, ErgodicResult, UniquenessProbe,
};
pub use rayleigh::{exp_transform_check, rayleigh_minimize, EigenResult, RayleighOptions, TransformCheck};
