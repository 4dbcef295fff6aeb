//! Explicit blow-up constants, barrier families and rate extraction.

mod barriers;
mod constants;
mod fit;

pub use barriers::{
    barrier_field, calibrate_c_eps, sandwich_check, BarrierKind, BarrierParams, Calibration, SandwichReport,
    C_EPS_CAP,
};
pub use constants::{alpha, q_prime, solve_c0, solve_c0_fast};
pub use fit::{
    default_band, fit_blowup_rate, fit_blowup_rate_with_mode, fit_power_with_constant, AffineFit, BlowupFit,
    FitMode, MIN_BAND_NODES,
};
