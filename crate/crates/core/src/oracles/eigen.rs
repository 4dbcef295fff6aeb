use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Grid, ScalarField};
use crate::linalg::SparseLu;

/// Largest Interior node count the oracle accepts.
pub const MAX_EIGEN_NODES: usize = 20_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    /// Positive eigenvector, normalized to unit max, on Interior nodes.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// Whether boundary crossings were located on grid lines.
    pub cut_cell: bool,
}

impl EigenPair {
    pub fn to_field(&self, grid: std::sync::Arc<Grid>) -> ScalarField {
        let rows: Vec<usize> = (0..grid.len()).filter(|&k| grid.is_interior(k)).collect();
        let mut field = ScalarField::undefined(grid);
        for (r, &k) in rows.iter().enumerate() {
            field.set(k, self.vector[r]);
        }
        field
    }
}

/// Fraction `θ ∈ (0, 1]` of the grid step from `k` to the boundary towards
/// neighbour `n`, found by bisection on the domain predicate.
fn crossing(grid: &Grid, k: usize, n: usize) -> f64 {
    let Some(domain) = grid.domain() else { return 1.0 };
    let (a, b) = (grid.point(k), grid.point(n));
    let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if domain.contains(at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Guard against a crossing so close to the node that the stencil degenerates.
    (0.5 * (lo + hi)).max(1e-3)
}

/// Smallest eigenvalue of the Dirichlet Laplacian plus the potential `f` on
/// the Interior nodes of `grid`, by shifted inverse iteration.
///
/// Grids built from an analytic domain use the Shortley–Weller stencil with
/// the true boundary crossings (second order); classifier grids use the
/// plain 5-point stencil with zero data on non-interior nodes.
pub fn dense_dirichlet_eigen(grid: &Grid, f: &ScalarField) -> Result<EigenPair> {
    let rows: Vec<usize> = (0..grid.len()).filter(|&k| grid.is_interior(k)).collect();
    if rows.is_empty() {
        return Err(Error::EmptySet("eigen oracle interior"));
    }
    if rows.len() > MAX_EIGEN_NODES {
        return Err(Error::InvalidArgument(format!(
            "eigen oracle limited to {MAX_EIGEN_NODES} interior nodes, got {}",
            rows.len()
        )));
    }
    let mut row_of = vec![usize::MAX; grid.len()];
    for (r, &k) in rows.iter().enumerate() {
        row_of[k] = r;
    }
    let pot: Vec<f64> = rows
        .iter()
        .map(|&k| f.get(k).ok_or_else(|| Error::InvalidArgument(format!("potential undefined at node {k}"))))
        .collect::<Result<_>>()?;
    let shift = pot.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let h = grid.h;
    let cut_cell = grid.domain().is_some();

    let mut trip = Vec::with_capacity(5 * rows.len());
    for (r, &k) in rows.iter().enumerate() {
        let mut diag = pot[r] - shift;
        for (di, dj) in [(1isize, 0isize), (0, 1)] {
            let fwd = grid.offset(k, di, dj).expect("interior node has neighbours");
            let bwd = grid.offset(k, -di, -dj).expect("interior node has neighbours");
            let arm = |n: usize| if grid.is_interior(n) { 1.0 } else { crossing(grid, k, n) };
            let (hp, hm) = (arm(fwd) * h, arm(bwd) * h);
            // u″ ≈ 2/(h₊+h₋)·[(u₊−u)/h₊ − (u−u₋)/h₋], with u = 0 on the boundary.
            let s = 2.0 / (hp + hm);
            diag += s * (1.0 / hp + 1.0 / hm);
            for (n, len) in [(fwd, hp), (bwd, hm)] {
                if grid.is_interior(n) {
                    trip.push((r, row_of[n], -s / len));
                }
            }
        }
        trip.push((r, r, diag));
    }
    let lu = SparseLu::factor(rows.len(), &trip)?;

    let mut x = vec![1.0; rows.len()];
    let mut value = f64::NAN;
    let mut iterations = 0;
    for it in 1..=500 {
        iterations = it;
        let y = lu.solve(&x)?;
        // x has unit max norm; y ≈ x/(λ − σ).
        let mu = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / x.iter().map(|a| a * a).sum::<f64>();
        let next = shift + 1.0 / mu;
        let scale = y.iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m });
        x = y.iter().map(|v| v / scale).collect();
        let done = (next - value).abs() <= 1e-13 * next.abs().max(1.0);
        value = next;
        if done {
            break;
        }
    }
    if x.iter().any(|&v| v < -1e-10) {
        return Err(Error::InvalidArgument("inverse iteration produced a sign-changing eigenvector".into()));
    }
    Ok(EigenPair {
        value,
        vector: x.into_iter().map(|v| v.max(0.0)).collect(),
        iterations,
        cut_cell,
    })
}
