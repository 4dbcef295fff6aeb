//! Discretization of `−Δ_H u + H(∇u)^q + λu = f` and its Newton solvers.

mod diagnostics;
mod discrete;
mod newton;
mod profile;
mod solve;

pub use diagnostics::{gradient_diagnostic, GradientStats};
pub(crate) use diagnostics::centered_gradient;
pub use discrete::{assemble_residual, Discretization, Form};
pub use newton::{NewtonOptions, SolveReport};
pub use profile::Profile;
pub use solve::{
    comparison_check, solve_blowup, solve_truncated, BlowupOptions, BlowupRun, ComparisonReport, Formulation,
    Solver, State,
};

use serde::{Deserialize, Serialize};

use crate::asymptotics::{alpha, q_prime};
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::norms::NormSpec;

/// `f(x) = f0 + C1·d_H(x)^{−β}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    #[serde(default)]
    pub f0: f64,
    #[serde(default)]
    pub c1: f64,
    #[serde(default)]
    pub beta: f64,
}

/// Boundary behaviour of the source relative to `d^{−q′}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `f = o(d^{−q′})`.
    Subcritical,
    /// `f·d^{q′} → C₁`.
    Critical,
    /// `f ∼ C₁ d^{−β}` with `β > q′`.
    Fast,
}

impl SourceSpec {
    pub fn constant(f0: f64) -> Self {
        SourceSpec { f0, c1: 0.0, beta: 0.0 }
    }

    pub fn singular(f0: f64, c1: f64, beta: f64) -> Self {
        SourceSpec { f0, c1, beta }
    }

    pub fn regime(&self, q: f64) -> Regime {
        let qp = q_prime(q);
        if self.c1 == 0.0 || self.beta < qp * (1.0 - 1e-12) {
            Regime::Subcritical
        } else if self.beta <= qp * (1.0 + 1e-12) {
            Regime::Critical
        } else {
            Regime::Fast
        }
    }

    /// Source value at anisotropic distance `d` (already floored by the caller).
    pub fn eval(&self, d: f64) -> f64 {
        if self.c1 == 0.0 {
            self.f0
        } else {
            self.f0 + self.c1 * d.powf(-self.beta)
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.f0.is_finite()
            && self.c1.is_finite()
            && self.c1 >= 0.0
            && self.beta.is_finite()
            && self.beta >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidProblem(format!("invalid source {self:?}")))
        }
    }
}

/// A PDE instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub norm: NormSpec,
    pub domain: DomainSpec,
    pub q: f64,
    pub lambda: f64,
    pub source: SourceSpec,
}

impl ProblemSpec {
    pub fn new(norm: NormSpec, domain: DomainSpec, q: f64, lambda: f64, source: SourceSpec) -> Result<Self> {
        let p = ProblemSpec {
            norm,
            domain,
            q,
            lambda,
            source,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 1.0 && self.q <= 2.0) {
            return Err(Error::InvalidProblem(format!("q must lie in (1, 2], got {}", self.q)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidProblem(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        self.norm.validate()?;
        self.source.validate()
    }

    pub fn q_prime(&self) -> f64 {
        q_prime(self.q)
    }

    pub fn alpha(&self) -> f64 {
        alpha(self.q)
    }

    pub fn regime(&self) -> Regime {
        self.source.regime(self.q)
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        ProblemSpec { lambda, ..self.clone() }
    }

    pub fn with_source(&self, source: SourceSpec) -> Self {
        ProblemSpec { source, ..self.clone() }
    }

    /// Newton tolerance `1e−9·(1 + |f0| + C1)`.
    pub fn newton_tol(&self) -> f64 {
        1e-9 * (1.0 + self.source.f0.abs() + self.source.c1)
    }
}
