//! Change of unknown `u = Φ(w) + offset` with `Φ` matched to the leading
//! boundary behaviour, so that blow-up data become the finite value `w = 0`.

use serde::{Deserialize, Serialize};

use super::{ProblemSpec, Regime};
use crate::asymptotics::{alpha, solve_c0, solve_c0_fast};
use crate::error::Result;

/// Decreasing profile `Φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `Φ(w) = −log w`.
    Log,
    /// `Φ(w) = c·w^{−e}`.
    Power { c: f64, e: f64 },
}

impl Profile {
    /// Profile matching the leading asymptotics of `problem`.
    pub fn for_problem(problem: &ProblemSpec) -> Result<Self> {
        let q = problem.q;
        let s = problem.source;
        Ok(match problem.regime() {
            Regime::Fast => {
                let (c, e) = solve_c0_fast(q, s.c1, s.beta)?;
                Profile::Power { c, e }
            }
            _ if q == 2.0 => Profile::Log,
            Regime::Critical => Profile::Power {
                c: solve_c0(q, s.c1)?,
                e: alpha(q),
            },
            Regime::Subcritical => Profile::Power {
                c: solve_c0(q, 0.0)?,
                e: alpha(q),
            },
        })
    }

    pub fn phi(&self, w: f64) -> f64 {
        match *self {
            Profile::Log => -w.ln(),
            Profile::Power { c, e } => c * w.powf(-e),
        }
    }

    /// `Φ⁻¹(v)`; for the power profile `v` must be positive, and `v = ∞`
    /// maps to `0`.
    pub fn inverse(&self, v: f64) -> f64 {
        match *self {
            Profile::Log => (-v).exp(),
            Profile::Power { c, e } => (c / v).powf(1.0 / e),
        }
    }

    /// Smallest admissible `v = u − offset` for which `Φ⁻¹` is defined.
    pub fn accepts(&self, v: f64) -> bool {
        match self {
            Profile::Log => !v.is_nan(),
            Profile::Power { .. } => v > 0.0,
        }
    }
}
