//! Conservative face-flux discretization with analytic Jacobian.
//!
//! At the east face of node P the gradient is
//! `((u_E − u_P)/h, (u_N + u_NE − u_S − u_SE)/(4h))`, and similarly for the
//! other three faces; the node residual is `−Σ ±F·n̂/h` plus a local term in
//! `(u_P, ∇_c u)` with `∇_c` the centered gradient. With the Euclidean norm
//! the flux part is exactly the 5-point Laplacian.

use std::sync::Arc;

use rayon::prelude::*;

use super::{Profile, ProblemSpec};
use crate::error::{Error, Result};
use crate::geometry::{DistanceField, Grid, ScalarField};
use crate::norms::{Mat2, Norm, Vec2};

/// Which unknown the residual is written in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Form {
    /// The solution `u` itself.
    Direct,
    /// `w` with `u = Φ(w) + offset`; the residual is the `u`-residual
    /// divided by `|Φ′(w)|`.
    Profile { profile: Profile, offset: f64 },
}

/// `(di, dj, cx, cy)`: node offset and its weight (times `h`) in the two
/// gradient components.
type Tap = (isize, isize, f64, f64);

struct Face {
    comp: usize,
    sign: f64,
    taps: [Tap; 6],
}

const FACES: [Face; 4] = [
    Face {
        comp: 0,
        sign: 1.0,
        taps: [(1, 0, 1.0, 0.0), (0, 0, -1.0, 0.0), (0, 1, 0.0, 0.25), (1, 1, 0.0, 0.25), (0, -1, 0.0, -0.25), (1, -1, 0.0, -0.25)],
    },
    Face {
        comp: 0,
        sign: -1.0,
        taps: [(0, 0, 1.0, 0.0), (-1, 0, -1.0, 0.0), (0, 1, 0.0, 0.25), (-1, 1, 0.0, 0.25), (0, -1, 0.0, -0.25), (-1, -1, 0.0, -0.25)],
    },
    Face {
        comp: 1,
        sign: 1.0,
        taps: [(0, 1, 0.0, 1.0), (0, 0, 0.0, -1.0), (1, 0, 0.25, 0.0), (1, 1, 0.25, 0.0), (-1, 0, -0.25, 0.0), (-1, 1, -0.25, 0.0)],
    },
    Face {
        comp: 1,
        sign: -1.0,
        taps: [(0, 0, 0.0, 1.0), (0, -1, 0.0, -1.0), (1, 0, 0.25, 0.0), (1, -1, 0.25, 0.0), (-1, 0, -0.25, 0.0), (-1, -1, -0.25, 0.0)],
    },
];

const CENTER: [Tap; 4] = [(1, 0, 0.5, 0.0), (-1, 0, -0.5, 0.0), (0, 1, 0.0, 0.5), (0, -1, 0.0, -0.5)];

pub(crate) struct Assembly {
    pub residual: Vec<f64>,
    pub triplets: Vec<(usize, usize, f64)>,
    pub reg_hits: usize,
}

/// Per-problem discretization data: unknown numbering, nodal source and
/// the regularization constant.
#[derive(Debug, Clone)]
pub struct Discretization {
    grid: Arc<Grid>,
    norm: Norm,
    problem: ProblemSpec,
    f: Vec<f64>,
    d_floor: Vec<f64>,
    rows: Vec<usize>,
    row_of: Vec<usize>,
    gamma: f64,
    hess_mean: Mat2,
}

const NO_ROW: usize = usize::MAX;

/// Mean of `½∇²H²` over unit directions.
fn mean_hessian(norm: &Norm) -> Mat2 {
    const N: usize = 256;
    let mut a = [[0.0; 2]; 2];
    for i in 0..N {
        let t = std::f64::consts::TAU * (i as f64 + 0.5) / N as f64;
        let h = norm.hess_h2_unchecked([t.cos(), t.sin()]);
        for r in 0..2 {
            for c in 0..2 {
                a[r][c] += h[r][c] / N as f64;
            }
        }
    }
    a
}

impl Discretization {
    pub fn new(problem: &ProblemSpec, dist: &DistanceField) -> Result<Self> {
        problem.validate()?;
        if dist.norm().spec() != &problem.norm {
            return Err(Error::InvalidArgument(format!(
                "distance field computed for norm {} but problem uses {}",
                dist.norm().spec(),
                problem.norm
            )));
        }
        let grid = dist.grid().clone();
        let norm = dist.norm().clone();
        let rows: Vec<usize> = (0..grid.len()).filter(|&k| grid.is_interior(k)).collect();
        let mut row_of = vec![NO_ROW; grid.len()];
        for (r, &k) in rows.iter().enumerate() {
            row_of[k] = r;
        }
        let half = 0.5 * grid.h;
        let d_floor: Vec<f64> = (0..grid.len())
            .map(|k| if grid.is_interior(k) { dist.signed(k).max(half) } else { f64::NAN })
            .collect();
        let gamma = norm.estimate_constants(1024)?.gamma_est;
        let mut disc = Discretization {
            grid,
            norm,
            problem: problem.clone(),
            f: Vec::new(),
            d_floor,
            rows,
            row_of,
            gamma,
            hess_mean: mean_hessian(dist.norm()),
        };
        disc.f = disc.source_values(&problem.source);
        Ok(disc)
    }

    fn source_values(&self, source: &super::SourceSpec) -> Vec<f64> {
        self.d_floor.iter().map(|&d| if d.is_nan() { f64::NAN } else { source.eval(d) }).collect()
    }

    /// Same grid and norm, different problem data.
    pub fn with_problem(&self, problem: &ProblemSpec) -> Result<Self> {
        problem.validate()?;
        if problem.norm != self.problem.norm {
            return Err(Error::InvalidArgument("norm must not change".into()));
        }
        let mut disc = self.clone();
        disc.problem = problem.clone();
        disc.f = disc.source_values(&problem.source);
        Ok(disc)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    /// Interior nodes in unknown order.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Source values per node (NaN off the interior).
    pub fn source(&self) -> &[f64] {
        &self.f
    }

    /// Distance floored at `h/2`, per node (NaN off the interior).
    pub fn floored_distance(&self) -> &[f64] {
        &self.d_floor
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Gradient threshold `1e−8·(1 + sup|v|/h)` below which the Jacobian
    /// uses the direction mean of `½∇²H²` in place of `½∇²H²`. The mean is
    /// exact for quadratic norms, where `γ·I` would make every step from a
    /// flat start wrong.
    pub fn eps_reg(&self, vals: &[f64]) -> f64 {
        let sup = vals.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
        1e-8 * (1.0 + sup / self.grid.h)
    }

    /// Residual per unknown; `vals` holds one value per grid node.
    pub fn residual(&self, form: Form, vals: &[f64]) -> Vec<f64> {
        self.assemble(form, vals, false).residual
    }

    /// Jacobian triplets `(row, col, value)` and regularization hit count.
    pub fn jacobian(&self, form: Form, vals: &[f64]) -> (Vec<(usize, usize, f64)>, usize) {
        let a = self.assemble(form, vals, true);
        (a.triplets, a.reg_hits)
    }

    pub(crate) fn assemble(&self, form: Form, vals: &[f64], with_jac: bool) -> Assembly {
        assert_eq!(vals.len(), self.grid.len());
        let eps_reg = self.eps_reg(vals);
        let per_row: Vec<(f64, Vec<(usize, f64)>, usize)> = self
            .rows
            .par_iter()
            .map(|&k| self.row(form, vals, k, with_jac, eps_reg))
            .collect();
        let mut residual = Vec::with_capacity(per_row.len());
        let mut triplets = Vec::new();
        let mut reg_hits = 0;
        for (r, (res, entries, hits)) in per_row.into_iter().enumerate() {
            residual.push(res);
            triplets.extend(entries.into_iter().map(|(c, v)| (r, c, v)));
            reg_hits += hits;
        }
        Assembly {
            residual,
            triplets,
            reg_hits,
        }
    }

    fn row(&self, form: Form, vals: &[f64], k: usize, with_jac: bool, eps_reg: f64) -> (f64, Vec<(usize, f64)>, usize) {
        let h = self.grid.h;
        let node = |di: isize, dj: isize| self.grid.offset(k, di, dj).expect("interior stencil stays on the grid");
        let grad = |taps: &[Tap]| -> Vec2 {
            taps.iter().fold([0.0, 0.0], |g, &(di, dj, cx, cy)| {
                let v = vals[node(di, dj)];
                [g[0] + cx * v / h, g[1] + cy * v / h]
            })
        };
        // Jacobian weights on the 3×3 stencil, indexed (di+1)*3 + (dj+1).
        let mut jac = [0.0; 9];
        let slot = |di: isize, dj: isize| ((di + 1) * 3 + (dj + 1)) as usize;
        let mut hits = 0;

        let mut div = 0.0;
        for face in &FACES {
            let g = grad(&face.taps);
            let flux = self.norm.flux(g);
            div += face.sign * flux[face.comp] / h;
            if with_jac {
                let a: Mat2 = if g[0].hypot(g[1]) < eps_reg {
                    hits += 1;
                    self.hess_mean
                } else {
                    self.norm.hess_h2_unchecked(g)
                };
                for &(di, dj, cx, cy) in &face.taps {
                    let d = a[face.comp][0] * cx + a[face.comp][1] * cy;
                    jac[slot(di, dj)] -= face.sign * d / (h * h);
                }
            }
        }

        let gc = grad(&CENTER);
        let (local, d_w, d_g) = self.local(form, k, vals[k], gc);
        let res = -div + local;
        if !with_jac {
            return (res, Vec::new(), 0);
        }
        jac[slot(0, 0)] += d_w;
        for &(di, dj, cx, cy) in &CENTER {
            jac[slot(di, dj)] += (d_g[0] * cx + d_g[1] * cy) / h;
        }
        let mut entries = Vec::with_capacity(9);
        for di in -1..=1 {
            for dj in -1..=1 {
                let col = self.row_of[node(di, dj)];
                if col != NO_ROW {
                    entries.push((col, jac[slot(di, dj)]));
                }
            }
        }
        (res, entries, hits)
    }

    /// Local term and its derivatives in the node value and the centered
    /// gradient.
    fn local(&self, form: Form, k: usize, w: f64, g: Vec2) -> (f64, f64, Vec2) {
        let q = self.problem.q;
        let lambda = self.problem.lambda;
        let f = self.f[k];
        let hn = self.norm.eval(g);
        let flux = self.norm.flux(g);
        // ∂H^q/∂g = q·H^{q−2}·H∇H, continuous at 0 for q > 1.
        let dhq = |scale: f64| -> Vec2 {
            if hn > 0.0 {
                let c = scale * q * hn.powf(q - 2.0);
                [c * flux[0], c * flux[1]]
            } else {
                [0.0, 0.0]
            }
        };
        match form {
            Form::Direct => (hn.powf(q) + lambda * w - f, lambda, dhq(1.0)),
            Form::Profile {
                profile: Profile::Log,
                offset,
            } => {
                // Exact cancellation of the H² terms at q = 2.
                let s = f - lambda * offset;
                (w * s + lambda * w * w.ln(), s + lambda * (w.ln() + 1.0), [0.0, 0.0])
            }
            Form::Profile {
                profile: Profile::Power { c, e },
                offset,
            } => {
                let ce = c * e;
                let a = (e + 1.0) / w;
                let m = (e + 1.0) * (q - 1.0);
                let b = ce.powf(q - 1.0) * w.powf(-m);
                let t = lambda * offset - f;
                let s = lambda / e * w + t * w.powf(e + 1.0) / ce;
                let h2 = hn * hn;
                let hq = hn.powf(q);
                let value = a * h2 - b * hq - s;
                let d_w = -a / w * h2 + m * b / w * hq - (lambda / e + (e + 1.0) * t * w.powf(e) / ce);
                let bq = dhq(b);
                let d_g = [2.0 * a * flux[0] - bq[0], 2.0 * a * flux[1] - bq[1]];
                (value, d_w, d_g)
            }
        }
    }

    /// Full-grid value vector with the unknowns from `x` and `datum` elsewhere.
    pub fn scatter(&self, x: &[f64], datum: f64) -> Vec<f64> {
        let mut vals = vec![datum; self.grid.len()];
        for (r, &k) in self.rows.iter().enumerate() {
            vals[k] = x[r];
        }
        vals
    }

    pub fn gather(&self, vals: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|&k| vals[k]).collect()
    }
}

/// Residual of the `u`-form scheme with Dirichlet value `M` on every
/// non-interior node; defined on Interior nodes.
pub fn assemble_residual(problem: &ProblemSpec, u: &ScalarField, dist: &DistanceField, m: f64) -> Result<ScalarField> {
    let disc = Discretization::new(problem, dist)?;
    let mut vals = vec![m; disc.grid.len()];
    for &k in &disc.rows {
        vals[k] = u.get(k).ok_or_else(|| Error::InvalidArgument(format!("u undefined at interior node {k}")))?;
    }
    let res = disc.residual(Form::Direct, &vals);
    let mut out = ScalarField::undefined(disc.grid.clone());
    for (r, &k) in disc.rows.iter().enumerate() {
        out.set(k, res[r]);
    }
    Ok(out)
}
