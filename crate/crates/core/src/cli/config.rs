use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ergodic::dyadic_schedule;
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::norms::NormSpec;
use crate::pde::{ProblemSpec, SourceSpec};

/// PDE fragment of a run; norm and domain live at the top level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub source: SourceSpec,
}

fn default_q() -> f64 {
    1.5
}

fn default_lambda() -> f64 {
    1.0
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            q: default_q(),
            lambda: default_lambda(),
            source: SourceSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedules {
    /// Finite boundary data, strictly increasing.
    #[serde(default = "default_m")]
    pub m: Vec<f64>,
    /// Append `M = ∞` (exact blow-up data) to `m`.
    #[serde(default = "yes")]
    pub m_infinity: bool,
    /// Discount factors for the ergodic continuation, strictly decreasing;
    /// `λ_k = 2^{−k}`, `k = 0..=12` when absent.
    #[serde(default)]
    pub lambda: Option<Vec<f64>>,
}

fn default_m() -> Vec<f64> {
    vec![10.0, 20.0, 40.0, 80.0, 160.0]
}

fn yes() -> bool {
    true
}

impl Default for Schedules {
    fn default() -> Self {
        Schedules {
            m: default_m(),
            m_infinity: true,
            lambda: None,
        }
    }
}

impl Schedules {
    pub fn m_schedule(&self) -> Vec<f64> {
        let mut m = self.m.clone();
        if self.m_infinity {
            m.push(f64::INFINITY);
        }
        m
    }

    pub fn lambda_schedule(&self) -> Vec<f64> {
        self.lambda.clone().unwrap_or_else(|| dyadic_schedule(12))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Blow-up sweep stops once the interior change drops below this.
    #[serde(default = "default_stop_tol")]
    pub stop_tol: f64,
    /// Monitor set `{d_H > monitor_delta}`; `8h` when absent.
    #[serde(default)]
    pub monitor_delta: Option<f64>,
    /// Fit band `[d_min, d_max]`; `[5h, min(δ₀, 0.2·inradius)]` when absent.
    #[serde(default)]
    pub band: Option<[f64; 2]>,
    /// Outer edge of the boundary layer used by barriers and fits.
    #[serde(default = "default_delta0")]
    pub delta0: f64,
    #[serde(default = "default_barrier_eps")]
    pub barrier_eps: f64,
    /// Random vectors per identity in `norms`.
    #[serde(default = "default_norm_samples")]
    pub norm_samples: usize,
    /// Unit-circle samples for the norm constants.
    #[serde(default = "default_constant_samples")]
    pub constant_samples: usize,
    /// Boundary samples of the brute-force distance oracle.
    #[serde(default = "default_boundary_samples")]
    pub boundary_samples: usize,
}

fn default_stop_tol() -> f64 {
    1e-3
}
fn default_delta0() -> f64 {
    0.2
}
fn default_barrier_eps() -> f64 {
    0.5
}
fn default_norm_samples() -> usize {
    1000
}
fn default_constant_samples() -> usize {
    4096
}
fn default_boundary_samples() -> usize {
    4096
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            stop_tol: default_stop_tol(),
            monitor_delta: None,
            band: None,
            delta0: default_delta0(),
            barrier_eps: default_barrier_eps(),
            norm_samples: default_norm_samples(),
            constant_samples: default_constant_samples(),
            boundary_samples: default_boundary_samples(),
        }
    }
}

/// Parameter grid of `sweep`: every `(q, norm, resolution)` triple is one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub q: Vec<f64>,
    pub norms: Vec<NormSpec>,
    pub resolutions: Vec<usize>,
}

/// One experiment. Every field has a default, so an empty file is a valid
/// config (Euclidean unit disk, q = 1.5, λ = 1, f = 0, 64 cells).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_norm")]
    pub norm: NormSpec,
    #[serde(default = "default_domain")]
    pub domain: DomainSpec,
    /// Grid cells across the longer side of the bounding box.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default)]
    pub schedules: Schedules,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Output directory; `--out` takes precedence.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Seeds the random inputs of `norms`.
    #[serde(default)]
    pub seed: u64,
    /// Emit SVG plots next to the CSV/JSON outputs.
    #[serde(default = "yes")]
    pub plots: bool,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

fn default_norm() -> NormSpec {
    NormSpec::Euclidean
}

fn default_domain() -> DomainSpec {
    DomainSpec::disk(1.0)
}

fn default_resolution() -> usize {
    64
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            norm: default_norm(),
            domain: default_domain(),
            resolution: default_resolution(),
            problem: ProblemConfig::default(),
            schedules: Schedules::default(),
            tolerances: Tolerances::default(),
            out: None,
            seed: 0,
            plots: true,
            sweep: None,
        }
    }
}

impl RunConfig {
    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let config = if is_json { Self::from_json(&text)? } else { Self::from_toml(&text)? };
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        ProblemSpec::new(
            self.norm.clone(),
            self.domain.clone(),
            self.problem.q,
            self.problem.lambda,
            self.problem.source,
        )
    }

    /// Checks everything that does not need a grid.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.problem()?;
        if self.resolution < 8 {
            return bad(format!("resolution must be at least 8, got {}", self.resolution));
        }
        let m = &self.schedules.m;
        if m.iter().any(|v| !v.is_finite()) || m.windows(2).any(|w| !(w[0] < w[1])) {
            return bad(format!("schedules.m must be finite and strictly increasing: {m:?}"));
        }
        if m.is_empty() && !self.schedules.m_infinity {
            return bad("schedules.m is empty and m_infinity is false".into());
        }
        if let Some(l) = &self.schedules.lambda {
            if l.is_empty() || l.iter().any(|v| !(*v > 0.0 && v.is_finite())) || l.windows(2).any(|w| !(w[1] < w[0])) {
                return bad(format!("schedules.lambda must be positive and strictly decreasing: {l:?}"));
            }
        }
        let t = &self.tolerances;
        if !(t.stop_tol >= 0.0) || !(t.delta0 > 0.0) || !(t.barrier_eps > 0.0) {
            return bad("stop_tol must be >= 0; delta0 and barrier_eps must be positive".into());
        }
        if t.norm_samples == 0 || t.boundary_samples < 16 {
            return bad("norm_samples must be positive and boundary_samples at least 16".into());
        }
        if let Some([lo, hi]) = t.band {
            if !(lo > 0.0 && hi > lo) {
                return bad(format!("band must satisfy 0 < d_min < d_max, got [{lo}, {hi}]"));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.q.is_empty() || sweep.norms.is_empty() || sweep.resolutions.is_empty() {
                return bad("every sweep axis needs at least one entry".into());
            }
            for &q in &sweep.q {
                self.with_instance(q, sweep.norms[0].clone(), self.resolution).problem()?;
            }
            if let Some(&r) = sweep.resolutions.iter().find(|&&r| r < 8) {
                return bad(format!("sweep resolution must be at least 8, got {r}"));
            }
        }
        Ok(())
    }

    /// Copy for one sweep instance; the grid itself is dropped.
    pub fn with_instance(&self, q: f64, norm: NormSpec, resolution: usize) -> Self {
        let mut c = self.clone();
        c.problem.q = q;
        c.norm = norm;
        c.resolution = resolution;
        c.sweep = None;
        c.out = None;
        c
    }
}
