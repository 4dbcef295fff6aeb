use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Grid, ScalarField};
use crate::norms::Norm;

/// Radial profile on `[0, 1]` solving `−U″ − (n−1)U′/r + |U′|^q = K`,
/// `U′(0) = 0`, `U(1) = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialSolution {
    pub n: usize,
    pub q: f64,
    pub k: f64,
    pub r_nodes: Vec<f64>,
    pub u: Vec<f64>,
    pub u_prime: Vec<f64>,
    /// Sup of the discrete ODE residual at the last Newton iterate.
    pub residual: f64,
}

impl RadialSolution {
    pub fn center_value(&self) -> f64 {
        self.u[0]
    }

    /// Monotone cubic (Fritsch–Carlson) interpolation; zero for `r ≥ 1`.
    pub fn eval(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        let r = r.max(0.0);
        let dr = self.r_nodes[1] - self.r_nodes[0];
        let i = ((r / dr) as usize).min(self.r_nodes.len() - 2);
        let t = (r - self.r_nodes[i]) / dr;
        let (y0, y1) = (self.u[i], self.u[i + 1]);
        let (m0, m1) = (self.slope(i), self.slope(i + 1));
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * dr * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * dr * m1
    }

    /// Fritsch–Carlson tangent at node `i`; the harmonic mean of the
    /// adjacent secants keeps the interpolant monotone and vanishes at extrema.
    fn slope(&self, i: usize) -> f64 {
        let dr = self.r_nodes[1] - self.r_nodes[0];
        let secant = |j: usize| (self.u[j + 1] - self.u[j]) / dr;
        let last = self.u.len() - 1;
        if i == 0 {
            return secant(0);
        }
        if i == last {
            return secant(last - 1);
        }
        let (a, b) = (secant(i - 1), secant(i));
        if a * b > 0.0 {
            2.0 * a * b / (a + b)
        } else {
            0.0
        }
    }

    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "r,U,Uprime")?;
        for ((r, u), p) in self.r_nodes.iter().zip(&self.u).zip(&self.u_prime) {
            writeln!(w, "{r},{u},{p}")?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut f)
    }
}

/// Solves the radial problem by second-order finite differences and Newton.
/// At `r = 0` the operator is replaced by its limit `−n·U″`.
pub fn solve_radial(n: usize, q: f64, k: f64, nodes: usize) -> Result<RadialSolution> {
    if n < 2 || !(q > 1.0 && q <= 2.0) {
        return Err(Error::InvalidArgument(format!("radial oracle needs n >= 2 and q in (1, 2], got n={n}, q={q}")));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("radial oracle needs K > 0, got {k}")));
    }
    if nodes < 200 {
        return Err(Error::InvalidArgument(format!("radial oracle needs at least 200 nodes, got {nodes}")));
    }
    let nf = n as f64;
    let dr = 1.0 / (nodes - 1) as f64;
    let r: Vec<f64> = (0..nodes).map(|i| i as f64 * dr).collect();
    // Unknowns U_0..U_{N−2}; U_{N−1} = 0. Start from the q-free solution.
    let m = nodes - 1;
    let mut u: Vec<f64> = r.iter().map(|&ri| k * (1.0 - ri * ri) / (2.0 * nf)).collect();

    let value = |u: &[f64], i: usize| -> (f64, [f64; 3]) {
        if i == 0 {
            // −n·U″ with the ghost value U_{−1} = U_1.
            let c = 2.0 * nf / (dr * dr);
            return (-c * (u[1] - u[0]) - k, [0.0, c, -c]);
        }
        let (a, b, c) = (u[i - 1], u[i], u[i + 1]);
        let g = (c - a) / (2.0 * dr);
        let gq = g.abs().powf(q);
        let dgq = q * g.abs().powf(q - 1.0) * g.signum() / (2.0 * dr);
        let lap = (c - 2.0 * b + a) / (dr * dr) + (nf - 1.0) / r[i] * g;
        let w = (nf - 1.0) / (r[i] * 2.0 * dr);
        let jl = -1.0 / (dr * dr) + w - dgq;
        let jd = 2.0 / (dr * dr);
        let ju = -1.0 / (dr * dr) - w + dgq;
        (-lap + gq - k, [jl, jd, ju])
    };
    let residual = |u: &[f64]| -> Vec<f64> { (0..m).map(|i| value(u, i).0).collect() };
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |s, x| s.max(x.abs()));

    let mut res = residual(&u);
    let mut norm = sup(&res);
    // Round-off in the second difference scales like ε·sup|U|/dr².
    let tol = 1e-8 * k + 64.0 * f64::EPSILON * k / (dr * dr);
    for _ in 0..100 {
        if norm <= tol {
            break;
        }
        let (mut lo, mut di, mut up) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        for i in 0..m {
            let (_, j) = value(&u, i);
            lo[i] = j[0];
            di[i] = j[1];
            up[i] = j[2];
        }
        let step = thomas(&lo, &di, &up, &res.iter().map(|v| -v).collect::<Vec<_>>());
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = u.iter().enumerate().map(|(i, v)| if i < m { v + t * step[i] } else { *v }).collect();
            let tr = residual(&trial);
            let tn = sup(&tr);
            if tn < norm {
                u = trial;
                res = tr;
                norm = tn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm > tol {
        return Err(Error::NonConvergence {
            iterations: 100,
            residual: norm,
        });
    }
    let mut u_prime = vec![0.0; nodes];
    for i in 1..m {
        u_prime[i] = (u[i + 1] - u[i - 1]) / (2.0 * dr);
    }
    u_prime[m] = (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) / (2.0 * dr);
    Ok(RadialSolution {
        n,
        q,
        k,
        r_nodes: r,
        u,
        u_prime,
        residual: norm,
    })
}

/// Tridiagonal solve; `lo[0]` and `up[n−1]` are ignored.
fn thomas(lo: &[f64], di: &[f64], up: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = di.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = up[0] / di[0];
    d[0] = rhs[0] / di[0];
    for i in 1..n {
        let den = di[i] - lo[i] * c[i - 1];
        c[i] = if i + 1 < n { up[i] / den } else { 0.0 };
        d[i] = (rhs[i] - lo[i] * d[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// `U(0)` by RK4 shooting on `V = U′`, `V′ = −(n−1)V/r + |V|^q − K`,
/// started from the series `V ≈ −K r/n`. The equation involves `U` only
/// through `U′`, so `U(0) = −∫₀¹ V dr` fixes the translation.
pub fn shooting_center_value(n: usize, q: f64, k: f64, steps: usize) -> f64 {
    let nf = n as f64;
    // State (V, I) with I′ = V.
    let rhs = |r: f64, s: [f64; 2]| [-(nf - 1.0) * s[0] / r + s[0].abs().powf(q) - k, s[0]];
    let axpy = |s: [f64; 2], a: f64, d: [f64; 2]| [s[0] + a * d[0], s[1] + a * d[1]];
    let dr = 1.0 / steps as f64;
    // The series is accurate to O(r³) over the first step.
    let mut s = [-k * dr / nf, -k * dr * dr / (2.0 * nf)];
    let mut r = dr;
    for _ in 1..steps {
        let k1 = rhs(r, s);
        let k2 = rhs(r + 0.5 * dr, axpy(s, 0.5 * dr, k1));
        let k3 = rhs(r + 0.5 * dr, axpy(s, 0.5 * dr, k2));
        let k4 = rhs(r + dr, axpy(s, dr, k3));
        for c in 0..2 {
            s[c] += dr / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        r += dr;
    }
    -s[1]
}

/// Nodal field `U(H°(x − center))` on a grid built for the unit Wulff shape.
pub fn radial_to_field(sol: &RadialSolution, norm: &Norm, grid: Arc<Grid>, center: [f64; 2]) -> ScalarField {
    let g = grid.clone();
    ScalarField::from_fn(grid, |k| {
        let x = g.point(k);
        sol.eval(norm.eval_polar([x[0] - center[0], x[1] - center[1]]))
    })
}
