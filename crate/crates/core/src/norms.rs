//! Smooth anisotropic norms `H` on the plane, their polar norms `H°`, and
//! the convex-analysis identities the solver relies on.
//!
//! Three families are supported:
//!
//! * `Euclidean`: `H(ξ) = |ξ|`.
//! * `Ellipse`: `H(ξ) = sqrt(ξ·Aξ)` for a symmetric positive-definite `A`.
//!   The polar norm is `sqrt(x·A⁻¹x)`.
//! * `SmoothedLp`: `H(ξ) = N⁻¹ (Σᵢ (ξᵢ² + ε|ξ|²)^{p/2})^{1/p}`, normalised so
//!   that `H(e₁) = 1`. The `ε|ξ|²` term keeps `∇²H²` positive definite on the
//!   axes. Its polar norm has no closed form and is computed numerically.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

/// Number of angular samples in the brute-force polar sweep.
pub const POLAR_SWEEP_SAMPLES: usize = 720;
/// Golden-section refinement steps after the sweep.
pub const POLAR_GOLDEN_STEPS: usize = 30;
/// Angular nodes of the interpolation table used for bulk polar evaluation.
const POLAR_TABLE_NODES: usize = 4096;

/// Serializable description of a norm family and its parameters.
///
/// In config files a norm is written as a family name plus a flat parameter
/// list: `{ family = "ellipse", params = [4, 0, 0, 1] }` (matrix entries
/// row-major), `{ family = "smoothed_lp", params = [4, 0.05] }` (`p`,
/// `eps_smooth`), or `{ family = "euclidean", params = [] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNormSpec", into = "RawNormSpec")]
pub enum NormSpec {
    Euclidean,
    Ellipse { a: Mat2 },
    SmoothedLp { p: f64, eps_smooth: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawNormSpec {
    family: String,
    #[serde(default)]
    params: Vec<f64>,
}

impl TryFrom<RawNormSpec> for NormSpec {
    type Error = Error;

    fn try_from(raw: RawNormSpec) -> Result<Self> {
        let spec = match (raw.family.to_ascii_lowercase().as_str(), raw.params.as_slice()) {
            ("euclidean", []) => NormSpec::Euclidean,
            ("ellipse", &[a11, a12, a21, a22]) => NormSpec::Ellipse {
                a: [[a11, a12], [a21, a22]],
            },
            ("smoothed_lp", &[p, eps_smooth]) => NormSpec::SmoothedLp { p, eps_smooth },
            (family, params) => {
                return Err(Error::InvalidNorm(format!(
                    "unknown family `{family}` with {} parameters",
                    params.len()
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<NormSpec> for RawNormSpec {
    fn from(spec: NormSpec) -> Self {
        match spec {
            NormSpec::Euclidean => RawNormSpec {
                family: "euclidean".into(),
                params: vec![],
            },
            NormSpec::Ellipse { a } => RawNormSpec {
                family: "ellipse".into(),
                params: vec![a[0][0], a[0][1], a[1][0], a[1][1]],
            },
            NormSpec::SmoothedLp { p, eps_smooth } => RawNormSpec {
                family: "smoothed_lp".into(),
                params: vec![p, eps_smooth],
            },
        }
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Euclidean => write!(f, "euclidean"),
            NormSpec::Ellipse { a } => write!(
                f,
                "ellipse[{},{},{},{}]",
                a[0][0], a[0][1], a[1][0], a[1][1]
            ),
            NormSpec::SmoothedLp { p, eps_smooth } => write!(f, "smoothed_lp[{p},{eps_smooth}]"),
        }
    }
}

impl NormSpec {
    pub fn ellipse_diag(a11: f64, a22: f64) -> Self {
        NormSpec::Ellipse {
            a: [[a11, 0.0], [0.0, a22]],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NormSpec::Euclidean => Ok(()),
            NormSpec::Ellipse { a } => {
                if !a.iter().flatten().all(|v| v.is_finite()) {
                    return Err(Error::InvalidNorm("matrix entries must be finite".into()));
                }
                if (a[0][1] - a[1][0]).abs() > 1e-12 * (1.0 + a[0][1].abs()) {
                    return Err(Error::InvalidNorm("matrix must be symmetric".into()));
                }
                let (lo, _) = sym_eigenvalues(a);
                if lo <= 0.0 {
                    return Err(Error::InvalidNorm(format!(
                        "matrix must be positive definite (smallest eigenvalue {lo})"
                    )));
                }
                Ok(())
            }
            NormSpec::SmoothedLp { p, eps_smooth } => {
                if !(p.is_finite() && p > 1.0) {
                    return Err(Error::InvalidNorm(format!("p must exceed 1, got {p}")));
                }
                if !(eps_smooth.is_finite() && eps_smooth >= 0.0) {
                    return Err(Error::InvalidNorm("eps_smooth must be >= 0".into()));
                }
                if p != 2.0 && eps_smooth == 0.0 {
                    return Err(Error::InvalidNorm(
                        "eps_smooth must be positive when p != 2".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Structural constants of a norm estimated by sampling the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    /// Best constant with `a|ξ| ≤ H(ξ)`.
    pub a_lower: f64,
    /// Best constant with `H(ξ) ≤ b|ξ|`.
    pub b_upper: f64,
    /// Smallest eigenvalue of `½∇²H²` over the unit circle.
    pub gamma_est: f64,
    pub sample_count: usize,
}

#[derive(Debug, Clone)]
enum Kind {
    Euclidean,
    Ellipse { a: Mat2, a_inv: Mat2 },
    SmoothedLp { p: f64, eps: f64, scale: f64, table: Arc<PolarTable> },
}

/// A validated norm. Immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct Norm {
    spec: NormSpec,
    kind: Kind,
}

impl Norm {
    pub fn new(spec: NormSpec) -> Result<Self> {
        spec.validate()?;
        let kind = match spec {
            NormSpec::Euclidean => Kind::Euclidean,
            NormSpec::Ellipse { a } => {
                let a = [[a[0][0], a[0][1]], [a[0][1], a[1][1]]];
                Kind::Ellipse {
                    a,
                    a_inv: inverse(a),
                }
            }
            NormSpec::SmoothedLp { p, eps_smooth } => {
                let scale = ((1.0 + eps_smooth).powf(p / 2.0) + eps_smooth.powf(p / 2.0))
                    .powf(1.0 / p);
                let raw = Norm {
                    spec: spec.clone(),
                    kind: Kind::SmoothedLp {
                        p,
                        eps: eps_smooth,
                        scale,
                        table: Arc::new(PolarTable::default()),
                    },
                };
                let table = PolarTable::build(&raw);
                Kind::SmoothedLp {
                    p,
                    eps: eps_smooth,
                    scale,
                    table: Arc::new(table),
                }
            }
        };
        Ok(Norm { spec, kind })
    }

    pub fn euclidean() -> Self {
        Norm::new(NormSpec::Euclidean).expect("euclidean norm is valid")
    }

    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }

    /// `H(ξ)`.
    pub fn eval(&self, xi: Vec2) -> f64 {
        match &self.kind {
            Kind::Euclidean => xi[0].hypot(xi[1]),
            Kind::Ellipse { a, .. } => quad(*a, xi).max(0.0).sqrt(),
            Kind::SmoothedLp { p, eps, scale, .. } => {
                let r2 = xi[0] * xi[0] + xi[1] * xi[1];
                if r2 == 0.0 {
                    return 0.0;
                }
                // Factor out |ξ| so the powers stay in range.
                let r = r2.sqrt();
                let u = [xi[0] / r, xi[1] / r];
                let g: f64 = u.iter().map(|c| (c * c + eps).powf(p / 2.0)).sum();
                r * g.powf(1.0 / p) / scale
            }
        }
    }

    /// `∇H(ξ)`, defined for `ξ ≠ 0`.
    pub fn grad(&self, xi: Vec2) -> Result<Vec2> {
        if xi == [0.0, 0.0] {
            return Err(Error::Origin("gradient of H"));
        }
        Ok(self.grad_unchecked(xi))
    }

    fn grad_unchecked(&self, xi: Vec2) -> Vec2 {
        match &self.kind {
            Kind::Euclidean => {
                let r = xi[0].hypot(xi[1]);
                [xi[0] / r, xi[1] / r]
            }
            Kind::Ellipse { a, .. } => {
                let h = quad(*a, xi).sqrt();
                let ax = matvec(*a, xi);
                [ax[0] / h, ax[1] / h]
            }
            Kind::SmoothedLp { p, eps, scale, .. } => {
                // H is 0-homogeneous in its gradient: evaluate on the unit circle.
                let r = xi[0].hypot(xi[1]);
                let u = [xi[0] / r, xi[1] / r];
                let (g, dg, _) = lp_parts(*p, *eps, u);
                let c = g.powf(1.0 / p - 1.0) / (p * scale);
                [c * dg[0], c * dg[1]]
            }
        }
    }

    /// `½∇²(H²)(ξ)`, the coefficient matrix of the non-divergence form of the
    /// Finsler Laplacian. Symmetric, positive definite and 0-homogeneous.
    pub fn hess_h2(&self, xi: Vec2) -> Result<Mat2> {
        if xi == [0.0, 0.0] {
            return Err(Error::Origin("Hessian of H²"));
        }
        Ok(self.hess_h2_unchecked(xi))
    }

    pub(crate) fn hess_h2_unchecked(&self, xi: Vec2) -> Mat2 {
        match &self.kind {
            Kind::Euclidean => [[1.0, 0.0], [0.0, 1.0]],
            Kind::Ellipse { a, .. } => *a,
            Kind::SmoothedLp { p, eps, scale, .. } => {
                let r = xi[0].hypot(xi[1]);
                let u = [xi[0] / r, xi[1] / r];
                let (g, dg, d2g) = lp_parts(*p, *eps, u);
                // H² = N⁻² G^{2/p}
                let c1 = (2.0 / p) * (2.0 / p - 1.0) * g.powf(2.0 / p - 2.0);
                let c2 = (2.0 / p) * g.powf(2.0 / p - 1.0);
                let n2 = scale * scale;
                let mut m = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        m[i][j] = 0.5 * (c1 * dg[i] * dg[j] + c2 * d2g[i][j]) / n2;
                    }
                }
                m
            }
        }
    }

    /// The flux `H(ξ)∇H(ξ) = ½∇(H²)`, continuous through the origin.
    pub fn flux(&self, xi: Vec2) -> Vec2 {
        if xi == [0.0, 0.0] {
            return [0.0, 0.0];
        }
        match &self.kind {
            Kind::Euclidean => xi,
            Kind::Ellipse { a, .. } => matvec(*a, xi),
            Kind::SmoothedLp { .. } => {
                let h = self.eval(xi);
                let g = self.grad_unchecked(xi);
                [h * g[0], h * g[1]]
            }
        }
    }

    /// `H°(x) = sup_{ξ≠0} ξ·x / H(ξ)`.
    pub fn eval_polar(&self, x: Vec2) -> f64 {
        match &self.kind {
            Kind::Euclidean => x[0].hypot(x[1]),
            Kind::Ellipse { a_inv, .. } => quad(*a_inv, x).max(0.0).sqrt(),
            Kind::SmoothedLp { table, .. } => {
                let r = x[0].hypot(x[1]);
                if r == 0.0 {
                    0.0
                } else {
                    r * table.eval(x[1].atan2(x[0]))
                }
            }
        }
    }

    /// `∇H°(x)`, defined for `x ≠ 0`.
    pub fn grad_polar(&self, x: Vec2) -> Result<Vec2> {
        if x == [0.0, 0.0] {
            return Err(Error::Origin("gradient of the polar norm"));
        }
        Ok(match &self.kind {
            Kind::Euclidean => {
                let r = x[0].hypot(x[1]);
                [x[0] / r, x[1] / r]
            }
            Kind::Ellipse { a_inv, .. } => {
                let h = quad(*a_inv, x).sqrt();
                let ax = matvec(*a_inv, x);
                [ax[0] / h, ax[1] / h]
            }
            Kind::SmoothedLp { .. } => {
                let step = 1e-6 * x[0].hypot(x[1]);
                let dx = self.eval_polar([x[0] + step, x[1]]) - self.eval_polar([x[0] - step, x[1]]);
                let dy = self.eval_polar([x[0], x[1] + step]) - self.eval_polar([x[0], x[1] - step]);
                [dx / (2.0 * step), dy / (2.0 * step)]
            }
        })
    }

    /// Membership in the open Wulff shape `𝒲_r(x0) = {x : H°(x − x0) < r}`.
    pub fn wulff_contains(&self, x: Vec2, r: f64, x0: Vec2) -> bool {
        debug_assert!(r > 0.0);
        self.eval_polar([x[0] - x0[0], x[1] - x0[1]]) < r
    }

    /// Estimates `a`, `b` and the ellipticity constant `γ` on `samples`
    /// equally spaced unit directions.
    pub fn estimate_constants(&self, samples: usize) -> Result<NormReport> {
        if samples < 64 {
            return Err(Error::InvalidArgument(format!(
                "need at least 64 samples, got {samples}"
            )));
        }
        let mut a_lower = f64::INFINITY;
        let mut b_upper = 0.0f64;
        let mut gamma_est = f64::INFINITY;
        for k in 0..samples {
            let t = 2.0 * PI * k as f64 / samples as f64;
            let xi = [t.cos(), t.sin()];
            let h = self.eval(xi);
            a_lower = a_lower.min(h);
            b_upper = b_upper.max(h);
            let (lo, _) = sym_eigenvalues(self.hess_h2_unchecked(xi));
            gamma_est = gamma_est.min(lo);
        }
        Ok(NormReport {
            a_lower,
            b_upper,
            gamma_est,
            sample_count: samples,
        })
    }
}

/// `G(u) = Σ (uᵢ² + ε|u|²)^{p/2}` with its gradient and Hessian at `u`.
fn lp_parts(p: f64, eps: f64, u: Vec2) -> (f64, Vec2, Mat2) {
    let r2 = u[0] * u[0] + u[1] * u[1];
    let s = [u[0] * u[0] + eps * r2, u[1] * u[1] + eps * r2];
    let g = s[0].powf(p / 2.0) + s[1].powf(p / 2.0);
    let t = [s[0].powf(p / 2.0 - 1.0), s[1].powf(p / 2.0 - 1.0)];
    let tsum = t[0] + t[1];
    let dg = [
        p * u[0] * (t[0] + eps * tsum),
        p * u[1] * (t[1] + eps * tsum),
    ];
    // ∂t_i/∂u_l = (p/2 − 1) s_i^{p/2−2} (2u_i δ_il + 2ε u_l)
    let dt = |i: usize, l: usize| -> f64 {
        if s[i] == 0.0 {
            return 0.0;
        }
        let kron = if i == l { 2.0 * u[i] } else { 0.0 };
        (p / 2.0 - 1.0) * s[i].powf(p / 2.0 - 2.0) * (kron + 2.0 * eps * u[l])
    };
    let mut d2g = [[0.0; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            let delta = if k == l { t[k] + eps * tsum } else { 0.0 };
            d2g[k][l] = p * delta + p * u[k] * (dt(k, l) + eps * (dt(0, l) + dt(1, l)));
        }
    }
    (g, dg, d2g)
}

/// Polar norm of an arbitrary 1-homogeneous positive function `f` at `x`,
/// by an angular sweep followed by golden-section refinement:
/// `sup_θ (e_θ·x) / f(e_θ)`. Returns the value and the maximizing direction.
pub fn polar_by_sweep(f: impl Fn(Vec2) -> f64, x: Vec2) -> (f64, Vec2) {
    let ratio = |t: f64| {
        let e = [t.cos(), t.sin()];
        (e[0] * x[0] + e[1] * x[1]) / f(e)
    };
    let dt = 2.0 * PI / POLAR_SWEEP_SAMPLES as f64;
    let (mut best_t, mut best) = (0.0, f64::NEG_INFINITY);
    for k in 0..POLAR_SWEEP_SAMPLES {
        let t = k as f64 * dt;
        let v = ratio(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let (t, v) = golden_max(ratio, best_t - dt, best_t + dt, POLAR_GOLDEN_STEPS);
    if v > best {
        (v, [t.cos(), t.sin()])
    } else {
        (best, [best_t.cos(), best_t.sin()])
    }
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, steps: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..steps {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Periodic cubic Hermite table of `θ ↦ H°(e_θ)`. Node values come from the
/// sweep; node slopes from the envelope identity `∇H°(x) = ξ*/H(ξ*)`.
#[derive(Debug, Clone, Default)]
struct PolarTable {
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl PolarTable {
    fn build(norm: &Norm) -> Self {
        let n = POLAR_TABLE_NODES;
        let mut values = Vec::with_capacity(n);
        let mut slopes = Vec::with_capacity(n);
        for k in 0..n {
            let t = 2.0 * PI * k as f64 / n as f64;
            let x = [t.cos(), t.sin()];
            let (v, xi) = polar_by_sweep(|e| norm.eval(e), x);
            let h = norm.eval(xi);
            let grad = [xi[0] / h, xi[1] / h];
            values.push(v);
            slopes.push(-grad[0] * x[1] + grad[1] * x[0]);
        }
        PolarTable { values, slopes }
    }

    fn eval(&self, theta: f64) -> f64 {
        let n = self.values.len();
        let dt = 2.0 * PI / n as f64;
        let s = theta.rem_euclid(2.0 * PI) / dt;
        let k = (s.floor() as usize).min(n - 1);
        let t = s - k as f64;
        let k1 = (k + 1) % n;
        let (p0, p1) = (self.values[k], self.values[k1]);
        let (m0, m1) = (self.slopes[k] * dt, self.slopes[k1] * dt);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1
    }
}

pub(crate) fn quad(a: Mat2, x: Vec2) -> f64 {
    x[0] * (a[0][0] * x[0] + a[0][1] * x[1]) + x[1] * (a[1][0] * x[0] + a[1][1] * x[1])
}

pub(crate) fn matvec(a: Mat2, x: Vec2) -> Vec2 {
    [
        a[0][0] * x[0] + a[0][1] * x[1],
        a[1][0] * x[0] + a[1][1] * x[1],
    ]
}

fn inverse(a: Mat2) -> Mat2 {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ]
}

/// Eigenvalues `(min, max)` of a symmetric 2×2 matrix.
pub fn sym_eigenvalues(a: Mat2) -> (f64, f64) {
    let tr = a[0][0] + a[1][1];
    let off = 0.5 * (a[0][1] + a[1][0]);
    let diff = a[0][0] - a[1][1];
    let disc = (0.25 * diff * diff + off * off).sqrt();
    (0.5 * tr - disc, 0.5 * tr + disc)
}

/// Gate for families with a closed-form polar norm.
pub const CLOSED_FORM_TOL: f64 = 1e-8;
/// Gate when the polar norm is computed numerically.
pub const NUMERIC_POLAR_TOL: f64 = 1e-6;

/// Largest violation of each convex-analysis identity over random inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub norm: NormSpec,
    pub samples: usize,
    pub tolerance: f64,
    /// Identity name to largest relative violation; sorted by name.
    pub max_violation: BTreeMap<String, f64>,
    pub pass: bool,
}

/// Checks on `samples` random nonzero vectors with radii log-uniform in
/// `[1e−2, 1e2]`:
///
/// * `euler`: `∇H(ξ)·ξ = H(ξ)`
/// * `homogeneity`: `H(tξ) = |t|H(ξ)`
/// * `dual_unit`: `H°(∇H(ξ)) = 1`
/// * `polar_dual_unit`: `H(∇H°(x)) = 1`
/// * `inverse`: `H°(x)·∇H(∇H°(x)) = x`
/// * `polar_sweep`: `H°` against the brute-force sweep
/// * `bidual`: the sweep polar of `H°` recovers `H`
///
/// Violations are relative to the natural scale of each side.
pub fn identity_suite(norm: &Norm, samples: usize, rng: &mut impl Rng) -> Result<IdentityReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("identity suite needs at least one sample".into()));
    }
    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    let mut record = |name: &str, v: f64| {
        let slot = worst.entry(name.to_string()).or_insert(0.0);
        // NaN must surface as a failure.
        *slot = if v.is_nan() { f64::INFINITY } else { slot.max(v) };
    };
    let draw = |rng: &mut dyn rand::RngCore| {
        let r = 10f64.powf(rng.gen_range(-2.0..2.0));
        let t = rng.gen_range(0.0..2.0 * PI);
        [r * t.cos(), r * t.sin()]
    };
    for _ in 0..samples {
        let xi = draw(rng);
        let t = rng.gen_range(-10.0..10.0);
        let h = norm.eval(xi);
        let g = norm.grad(xi)?;
        record("euler", (g[0] * xi[0] + g[1] * xi[1] - h).abs() / h);
        record("homogeneity", (norm.eval([t * xi[0], t * xi[1]]) - t.abs() * h).abs() / (t.abs() * h).max(f64::MIN_POSITIVE));
        record("dual_unit", (norm.eval_polar(g) - 1.0).abs());
        let (twice, _) = polar_by_sweep(|e| norm.eval_polar(e), xi);
        record("bidual", (twice - h).abs() / h);

        let x = draw(rng);
        let r = x[0].hypot(x[1]);
        let hp = norm.eval_polar(x);
        let gp = norm.grad_polar(x)?;
        record("polar_dual_unit", (norm.eval(gp) - 1.0).abs());
        let back = norm.grad(gp)?;
        record("inverse", (hp * back[0] - x[0]).hypot(hp * back[1] - x[1]) / r);
        let (sweep, _) = polar_by_sweep(|e| norm.eval(e), x);
        record("polar_sweep", (sweep - hp).abs() / hp);
    }
    let tolerance = match norm.spec() {
        NormSpec::SmoothedLp { .. } => NUMERIC_POLAR_TOL,
        _ => CLOSED_FORM_TOL,
    };
    let pass = worst.values().all(|&v| v <= tolerance);
    Ok(IdentityReport {
        norm: norm.spec().clone(),
        samples,
        tolerance,
        max_violation: worst,
        pass,
    })
}
