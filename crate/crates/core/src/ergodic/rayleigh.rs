use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DistanceField, ScalarField};
use crate::linalg::SparseLu;
use crate::norms::Norm;
use crate::oracles::dense_dirichlet_eigen;
use crate::pde::SourceSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RayleighOptions {
    pub max_iters: usize,
    /// Stop once the preconditioned gradient norm falls below
    /// `tol·max(1, |R|)`; the quotient error is of order its square.
    pub tol: f64,
}

impl Default for RayleighOptions {
    fn default() -> Self {
        RayleighOptions {
            max_iters: 5000,
            tol: 1e-7,
        }
    }
}

/// Minimizer of `(∫H(∇w)² + ∫f w²) / ∫w²` over `w ≥ 0` vanishing off the
/// Interior nodes.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub u0: f64,
    /// Normalized so that `h²·Σw² = 1`.
    pub w: ScalarField,
    /// Quotient per accepted iterate; nonincreasing.
    pub rayleigh_history: Vec<f64>,
    /// Nodes lifted to the positivity floor, per iterate.
    pub projections: Vec<usize>,
}

impl EigenResult {
    pub fn iterations(&self) -> usize {
        self.rayleigh_history.len().saturating_sub(1)
    }

    /// Projection count over the last `n` iterates.
    pub fn tail_projections(&self, n: usize) -> usize {
        self.projections.iter().rev().take(n).sum()
    }
}

/// Corner-gradient energy. Each grid cell contributes the mean of
/// `H(g)²·h²` over its four corners, where `g` is the one-sided gradient
/// along the two cell edges meeting at that corner. For the Euclidean norm
/// the sum is exactly the 5-point Dirichlet energy.
struct Energy<'a> {
    norm: &'a Norm,
    nx: usize,
    ny: usize,
    h: f64,
    /// Full-grid index to unknown, `usize::MAX` off the interior.
    row_of: Vec<usize>,
    potential: Vec<f64>,
}

/// Corners of cell `(i, j)`: node offset, x-neighbour offset with `sx`,
/// y-neighbour offset with `sy`.
const CORNERS: [((usize, usize), (usize, usize), f64, (usize, usize), f64); 4] = [
    ((0, 0), (1, 0), 1.0, (0, 1), 1.0),
    ((1, 0), (0, 0), -1.0, (1, 1), 1.0),
    ((0, 1), (1, 1), 1.0, (0, 0), -1.0),
    ((1, 1), (0, 1), -1.0, (1, 0), -1.0),
];

impl Energy<'_> {
    fn value_at(&self, psi: &[f64], k: usize) -> f64 {
        match self.row_of[k] {
            usize::MAX => 0.0,
            r => psi[r],
        }
    }

    /// Quotient numerator and, optionally, its gradient.
    fn numerator(&self, psi: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let h = self.h;
        let idx = |i: usize, j: usize| j * self.nx + i;
        let mut total = 0.0;
        let mut grad = grad;
        if let Some(g) = grad.as_deref_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        for j in 0..self.ny - 1 {
            for i in 0..self.nx - 1 {
                let cell = [idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1)];
                if cell.iter().all(|&k| self.row_of[k] == usize::MAX) {
                    continue;
                }
                for &((ai, aj), (xi, xj), sx, (yi, yj), sy) in &CORNERS {
                    let (a, x, y) = (idx(i + ai, j + aj), idx(i + xi, j + xj), idx(i + yi, j + yj));
                    let va = self.value_at(psi, a);
                    let g = [sx * (self.value_at(psi, x) - va) / h, sy * (self.value_at(psi, y) - va) / h];
                    let hv = self.norm.eval(g);
                    total += 0.25 * hv * hv * h * h;
                    if let Some(out) = grad.as_deref_mut() {
                        // ∂(¼H²h²)/∂g = ½h²·flux.
                        let f = self.norm.flux(g);
                        let (cx, cy) = (0.5 * h * sx * f[0], 0.5 * h * sy * f[1]);
                        for (k, c) in [(x, cx), (y, cy), (a, -cx - cy)] {
                            if self.row_of[k] != usize::MAX {
                                out[self.row_of[k]] += c;
                            }
                        }
                    }
                }
            }
        }
        let h2 = h * h;
        for (r, (&p, &f)) in psi.iter().zip(&self.potential).enumerate() {
            total += f * p * p * h2;
            if let Some(out) = grad.as_deref_mut() {
                out[r] += 2.0 * f * p * h2;
            }
        }
        total
    }
}

/// Iterates are kept at or above this value on Interior nodes; `w` has
/// unit mass, so typical values are of order one.
const POSITIVITY_FLOOR: f64 = 1e-12;

fn stall(iterations: usize, gradient: f64, history: Vec<f64>) -> Error {
    Error::DescentStall {
        iterations,
        gradient,
        history,
    }
}

fn mass(psi: &[f64], h: f64) -> f64 {
    psi.iter().map(|p| p * p).sum::<f64>() * h * h
}

/// Sobolev-preconditioned projected descent on the Rayleigh quotient.
///
/// The preconditioner is the 5-point Dirichlet stiffness `A`. In the
/// Euclidean case a unit step damps mode `i` by `R/μ_i`, so steps start at
/// one and are halved until the quotient does not increase; iterates are
/// clipped at zero and renormalized.
pub fn rayleigh_minimize(
    norm: &Norm,
    dist: &DistanceField,
    f: &SourceSpec,
    init: Option<&ScalarField>,
    opts: &RayleighOptions,
) -> Result<EigenResult> {
    let grid = dist.grid().clone();
    let h = grid.h;
    let rows: Vec<usize> = (0..grid.len()).filter(|&k| grid.is_interior(k)).collect();
    if rows.is_empty() {
        return Err(Error::EmptySet("Rayleigh interior"));
    }
    let mut row_of = vec![usize::MAX; grid.len()];
    for (r, &k) in rows.iter().enumerate() {
        row_of[k] = r;
    }
    let potential: Vec<f64> = rows.iter().map(|&k| f.eval(dist.signed(k).max(0.5 * h))).collect();
    let energy = Energy {
        norm,
        nx: grid.nx,
        ny: grid.ny,
        h,
        row_of: row_of.clone(),
        potential: potential.clone(),
    };

    let mut trip = Vec::with_capacity(5 * rows.len());
    for (r, &k) in rows.iter().enumerate() {
        trip.push((r, r, 4.0));
        for n in grid.neighbors4(k) {
            if row_of[n] != usize::MAX {
                trip.push((r, row_of[n], -1.0));
            }
        }
    }
    let pre = SparseLu::factor(rows.len(), &trip)?;

    let mut psi: Vec<f64> = match init {
        Some(field) => rows.iter().map(|&k| field.get(k).unwrap_or(0.0).max(POSITIVITY_FLOOR)).collect(),
        None => {
            let pot = ScalarField::from_partial(grid.clone(), |k| (row_of[k] != usize::MAX).then(|| potential[row_of[k]]));
            dense_dirichlet_eigen(&grid, &pot)?.vector.into_iter().map(|v| v.max(POSITIVITY_FLOOR)).collect()
        }
    };
    let m0 = mass(&psi, h);
    if !(m0 > 0.0) {
        return Err(Error::InvalidArgument("Rayleigh initial guess vanishes".into()));
    }
    psi.iter_mut().for_each(|p| *p /= m0.sqrt());

    let mut grad = vec![0.0; rows.len()];
    let mut quotient = energy.numerator(&psi, Some(&mut grad));
    let mut history = vec![quotient];
    let mut projections = vec![0];
    let mut tau = 1.0f64;
    let mut size = f64::INFINITY;
    let mut tol = opts.tol;
    for _ in 0..opts.max_iters {
        // Gradient of the quotient at unit mass: ∇N − 2R·h²ψ.
        let g: Vec<f64> = grad.iter().zip(&psi).map(|(gn, p)| gn - 2.0 * quotient * h * h * p).collect();
        let dir = pre.solve(&g)?;
        size = g.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt();
        tol = opts.tol * quotient.abs().max(1.0);
        if size <= tol {
            break;
        }
        let mut accepted = None;
        let mut t = (2.0 * tau).min(1.0);
        for _ in 0..50 {
            let mut clipped = 0;
            let mut trial: Vec<f64> = psi
                .iter()
                .zip(&dir)
                .map(|(p, d)| {
                    let v = p - 0.5 * t * d;
                    if v < POSITIVITY_FLOOR {
                        clipped += 1;
                        POSITIVITY_FLOOR
                    } else {
                        v
                    }
                })
                .collect();
            let m = mass(&trial, h);
            if m > 0.0 {
                trial.iter_mut().for_each(|p| *p /= m.sqrt());
                let value = energy.numerator(&trial, None);
                if value <= quotient {
                    accepted = Some((trial, value, clipped));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((trial, value, clipped)) = accepted else {
            // No descent left; fine if the gradient is at round-off level.
            if size <= 1e2 * tol {
                break;
            }
            return Err(stall(history.len() - 1, size, history));
        };
        tau = t;
        psi = trial;
        quotient = energy.numerator(&psi, Some(&mut grad));
        debug_assert!(quotient <= value + 1e-12 * value.abs());
        history.push(quotient);
        projections.push(clipped);
    }
    if size > tol && history.len() > opts.max_iters {
        return Err(stall(opts.max_iters, size, history));
    }
    let w = ScalarField::from_partial(grid.clone(), |k| Some(if row_of[k] == usize::MAX { 0.0 } else { psi[row_of[k]] }));
    Ok(EigenResult {
        u0: quotient,
        w,
        rayleigh_history: history,
        projections,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformCheck {
    pub nodes: usize,
    /// `sup |(v − min v) − (−log(w / max w))|` over the probe set.
    pub sup_abs: f64,
    /// `sup_abs` relative to `sup (v − min v)`.
    pub relative: f64,
}

/// Compares `v` with `−log w` on `{d_H > δ}` after removing each one's
/// additive constant on that set.
pub fn exp_transform_check(v: &ScalarField, w: &ScalarField, dist: &DistanceField, delta: f64) -> Result<TransformCheck> {
    let grid = dist.grid();
    let pairs: Vec<(f64, f64)> = (0..grid.len())
        .filter(|&k| grid.is_interior(k) && dist.signed(k) > delta)
        .filter_map(|k| Some((v.get(k)?, w.get(k)?)))
        .filter(|&(a, b)| a.is_finite() && b > 0.0)
        .collect();
    if pairs.is_empty() {
        return Err(Error::EmptySet("exp-transform probe set"));
    }
    let v_min = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let w_max = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut sup_abs = 0.0f64;
    let mut scale = 0.0f64;
    for &(a, b) in &pairs {
        let lhs = a - v_min;
        sup_abs = sup_abs.max((lhs + (b / w_max).ln()).abs());
        scale = scale.max(lhs);
    }
    Ok(TransformCheck {
        nodes: pairs.len(),
        sup_abs,
        relative: if scale > 0.0 { sup_abs / scale } else { sup_abs },
    })
}
