//! Anisotropic distance `d_H(x) = inf_{y∈∂Ω} H°(x − y)`, computed by an
//! ordered upwind march and by a brute-force oracle.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Domain, Grid, ScalarField};
use crate::error::{Error, Result};
use crate::norms::{golden_max, Norm, Vec2};

/// 8-neighbour ring in counter-clockwise order.
const RING: [(isize, isize); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

/// Golden-section steps for the segment minimization of one update.
const SEGMENT_STEPS: usize = 40;
/// Samples used for the exact initialization of the boundary ring.
const INIT_SAMPLES: usize = 2048;
/// Fraction of the inradius used as default `band_mu`.
const BAND_FRACTION: f64 = 0.25;

/// Anisotropic distance on a grid.
///
/// `d` is defined on Interior nodes, `d_signed` on all nodes (negative
/// outside), `eikonal_residual` wherever a centered gradient exists.
#[derive(Debug, Clone)]
pub struct DistanceField {
    norm: Norm,
    pub d: ScalarField,
    pub d_signed: ScalarField,
    pub eikonal_residual: ScalarField,
    /// Ridge (cut-locus) nodes, dilated by one cell.
    pub ridge: Vec<bool>,
    pub band_mu: f64,
}

/// Summary statistics of `|H(∇_h d) − 1|` away from the boundary and ridge.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EikonalReport {
    pub median: f64,
    pub p95: f64,
    pub max: f64,
    /// Maximum including ridge nodes (informational).
    pub max_with_ridge: f64,
    pub evaluated: usize,
    pub ridge_excluded: usize,
}

impl DistanceField {
    fn from_signed(grid: Arc<Grid>, norm: &Norm, signed: Vec<f64>) -> Self {
        let d = ScalarField::from_partial(grid.clone(), |k| grid.is_interior(k).then(|| signed[k]));
        let d_signed = ScalarField::from_fn(grid.clone(), |k| signed[k]);
        let h = grid.h;
        let eikonal_residual = ScalarField::from_partial(grid.clone(), |k| {
            if !grid.is_interior(k) {
                return None;
            }
            let at = |di, dj| grid.offset(k, di, dj).map(|n| signed[n]);
            let g = [(at(1, 0)? - at(-1, 0)?) / (2.0 * h), (at(0, 1)? - at(0, -1)?) / (2.0 * h)];
            Some((norm.eval(g) - 1.0).abs())
        });
        let ridge = detect_ridge(&grid, norm, &signed);
        let inradius = d.iter_defined().map(|(_, v)| v).fold(0.0, f64::max);
        DistanceField {
            norm: norm.clone(),
            d,
            d_signed,
            eikonal_residual,
            ridge,
            band_mu: BAND_FRACTION * inradius,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.d.grid()
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    /// Signed distance at node `k`.
    pub fn signed(&self, k: usize) -> f64 {
        self.d_signed.values[k]
    }

    /// Largest interior distance.
    pub fn inradius(&self) -> f64 {
        self.d.iter_defined().map(|(_, v)| v).fold(0.0, f64::max)
    }

    /// Interior node of largest distance (lowest index on ties).
    pub fn deepest_node(&self) -> usize {
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        for (k, v) in self.d.iter_defined() {
            if v > best.1 {
                best = (k, v);
            }
        }
        best.0
    }

    pub fn with_band_mu(mut self, band_mu: f64) -> Self {
        self.band_mu = band_mu;
        self
    }

    /// Residual statistics on Interior nodes with `d ≥ 2h`, ridge excluded.
    pub fn report(&self) -> EikonalReport {
        let floor = 2.0 * self.grid().h;
        let mut kept = Vec::new();
        let mut max_with_ridge = 0.0f64;
        let mut ridge_excluded = 0;
        for (k, r) in self.eikonal_residual.iter_defined() {
            if self.signed(k) < floor {
                continue;
            }
            max_with_ridge = max_with_ridge.max(r);
            if self.ridge[k] {
                ridge_excluded += 1;
            } else {
                kept.push(r);
            }
        }
        kept.sort_by(f64::total_cmp);
        let pick = |f: f64| {
            if kept.is_empty() {
                f64::NAN
            } else {
                kept[((kept.len() - 1) as f64 * f).round() as usize]
            }
        };
        EikonalReport {
            median: pick(0.5),
            p95: pick(0.95),
            max: kept.last().copied().unwrap_or(f64::NAN),
            max_with_ridge,
            evaluated: kept.len(),
            ridge_excluded,
        }
    }

    /// CSV `x,y,value,residual` with `value = d_signed`.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        self.d_signed.write_csv_with(w, &[("residual", &self.eikonal_residual)])
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut f)?;
        f.flush()?;
        Ok(())
    }
}

/// A node is a ridge node if it is a strict kink maximum along one of the
/// four grid lines through it.
fn detect_ridge(grid: &Grid, norm: &Norm, signed: &[f64]) -> Vec<bool> {
    let h = grid.h;
    let mut core = vec![false; grid.len()];
    for (k, flag) in core.iter_mut().enumerate() {
        if !grid.is_interior(k) {
            continue;
        }
        *flag = [(1, 0), (0, 1), (1, 1), (1, -1)].iter().any(|&(di, dj)| {
            let (Some(a), Some(b)) = (grid.offset(k, di, dj), grid.offset(k, -di, -dj)) else {
                return false;
            };
            let step = norm.eval_polar([h * di as f64, h * dj as f64]);
            let (da, db, dk) = (signed[a], signed[b], signed[k]);
            dk >= da && dk >= db && dk - 0.5 * (da + db) > 0.1 * step
        });
    }
    let mut ridge = core.clone();
    for k in 0..grid.len() {
        if core[k] {
            for n in grid.neighbors8(k) {
                ridge[n] = true;
            }
        }
    }
    ridge
}

/// Dense parametric sampling of `∂Ω` with local golden refinement.
struct BoundarySampler<'a> {
    domain: &'a Domain,
    norm: &'a Norm,
    params: Vec<f64>,
    points: Vec<Vec2>,
}

impl<'a> BoundarySampler<'a> {
    fn new(domain: &'a Domain, norm: &'a Norm, samples: usize) -> Self {
        let params: Vec<f64> = (0..samples).map(|i| 2.0 * PI * i as f64 / samples as f64).collect();
        let points = params.iter().map(|&t| domain.boundary_point(t)).collect();
        BoundarySampler {
            domain,
            norm,
            params,
            points,
        }
    }

    fn dist(&self, x: Vec2, y: Vec2) -> f64 {
        self.norm.eval_polar([x[0] - y[0], x[1] - y[1]])
    }

    /// `min_y H°(x − y)` over the boundary.
    fn distance(&self, x: Vec2) -> f64 {
        let n = self.points.len();
        let vals: Vec<f64> = self.points.iter().map(|&y| self.dist(x, y)).collect();
        let mut minima: Vec<usize> = (0..n)
            .filter(|&i| vals[i] <= vals[(i + n - 1) % n] && vals[i] <= vals[(i + 1) % n])
            .collect();
        minima.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        let dt = 2.0 * PI / n as f64;
        minima
            .iter()
            .take(3)
            .map(|&i| {
                let t = self.params[i];
                let (_, neg) = golden_max(
                    |s| -self.dist(x, self.domain.boundary_point(s)),
                    t - dt,
                    t + dt,
                    SEGMENT_STEPS,
                );
                (-neg).min(vals[i])
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn require_domain(grid: &Grid) -> Result<&Domain> {
    grid.domain()
        .ok_or_else(|| Error::InvalidArgument("distance needs a grid built from a domain".into()))
}

/// Brute-force oracle: every node minimizes `H°(x − y)` over
/// `boundary_samples` boundary points, then refines locally.
pub fn distance_bruteforce(grid: Arc<Grid>, norm: &Norm, boundary_samples: usize) -> Result<DistanceField> {
    if boundary_samples < 256 {
        return Err(Error::InvalidArgument(format!(
            "boundary_samples must be at least 256, got {boundary_samples}"
        )));
    }
    let domain = require_domain(&grid)?;
    let sampler = BoundarySampler::new(domain, norm, boundary_samples);
    let signed: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let d = sampler.distance(grid.point(k));
            if grid.is_interior(k) {
                d
            } else {
                -d
            }
        })
        .collect();
    Ok(DistanceField::from_signed(grid, norm, signed))
}

/// First-order ordered upwind march (8-neighbour semi-Lagrangian update).
///
/// Nodes with a neighbour across `∂Ω` are initialized exactly; the march
/// then runs inward over Interior nodes and outward over the rest.
pub fn distance_fast_march(grid: Arc<Grid>, norm: &Norm) -> Result<DistanceField> {
    let domain = require_domain(&grid)?;
    let sampler = BoundarySampler::new(domain, norm, INIT_SAMPLES);
    let seeds: Vec<(usize, f64)> = (0..grid.len())
        .into_par_iter()
        .filter(|&k| {
            let inside = grid.is_interior(k);
            grid.neighbors8(k).any(|n| grid.is_interior(n) != inside)
        })
        .map(|k| (k, sampler.distance(grid.point(k))))
        .collect();

    let inner: Vec<bool> = (0..grid.len()).map(|k| grid.is_interior(k)).collect();
    let outer: Vec<bool> = inner.iter().map(|b| !b).collect();
    let pick = |region: &[bool]| -> Vec<(usize, f64)> {
        seeds.iter().copied().filter(|&(k, _)| region[k]).collect()
    };
    let d_in = march(&grid, norm, &inner, &pick(&inner))?;
    let d_out = march(&grid, norm, &outer, &pick(&outer))?;
    let signed = (0..grid.len()).map(|k| if inner[k] { d_in[k] } else { -d_out[k] }).collect();
    Ok(DistanceField::from_signed(grid, norm, signed))
}

#[derive(PartialEq)]
struct Entry {
    d: f64,
    k: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Min-heap on (d, k).
    fn cmp(&self, other: &Self) -> Ordering {
        other.d.total_cmp(&self.d).then(other.k.cmp(&self.k))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn march(grid: &Grid, norm: &Norm, region: &[bool], seeds: &[(usize, f64)]) -> Result<Vec<f64>> {
    let n = grid.len();
    let mut value = vec![f64::INFINITY; n];
    let mut known = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &(k, d) in seeds {
        value[k] = d;
        known[k] = true;
    }
    for &(k, _) in seeds {
        for m in grid.neighbors8(k) {
            if region[m] && !known[m] {
                let d = update(grid, norm, &value, &known, m)?;
                if d < value[m] {
                    value[m] = d;
                    heap.push(Entry { d, k: m });
                }
            }
        }
    }
    while let Some(Entry { d, k }) = heap.pop() {
        if known[k] || d > value[k] {
            continue;
        }
        known[k] = true;
        for m in grid.neighbors8(k) {
            if region[m] && !known[m] {
                let d = update(grid, norm, &value, &known, m)?;
                if d < value[m] {
                    value[m] = d;
                    heap.push(Entry { d, k: m });
                }
            }
        }
    }
    if let Some(k) = (0..n).find(|&k| region[k] && !known[k]) {
        return Err(Error::EikonalUpdate { node: k });
    }
    Ok(value)
}

/// `min over known neighbours a, b of (1−s)d_a + s d_b + H°(x − y_s)`.
fn update(grid: &Grid, norm: &Norm, value: &[f64], known: &[bool], k: usize) -> Result<f64> {
    let h = grid.h;
    let rel = |(di, dj): (isize, isize)| [-h * di as f64, -h * dj as f64];
    let known_at = |o: (isize, isize)| grid.offset(k, o.0, o.1).filter(|&m| known[m]);
    let mut best = f64::INFINITY;
    for m in 0..RING.len() {
        let (oa, ob) = (RING[m], RING[(m + 1) % RING.len()]);
        let Some(a) = known_at(oa) else { continue };
        let (xa, da) = (rel(oa), value[a]);
        best = best.min(da + norm.eval_polar(xa));
        if let Some(b) = known_at(ob) {
            let (xb, db) = (rel(ob), value[b]);
            let phi = |s: f64| {
                let x = [xa[0] + s * (xb[0] - xa[0]), xa[1] + s * (xb[1] - xa[1])];
                (1.0 - s) * da + s * db + norm.eval_polar(x)
            };
            let (_, neg) = golden_max(|s| -phi(s), 0.0, 1.0, SEGMENT_STEPS);
            best = best.min(-neg).min(db + norm.eval_polar(xb));
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::EikonalUpdate { node: k })
    }
}

/// `C²` clamp of the signed distance: identity below `δ₀/2`, quintic blend
/// up to the constant `δ₀`.
pub fn extended_distance(dist: &DistanceField, delta0: f64) -> Result<ScalarField> {
    if !(delta0 > 0.0 && delta0 < dist.band_mu) {
        return Err(Error::InvalidArgument(format!(
            "delta0 = {delta0} must lie in (0, band_mu = {})",
            dist.band_mu
        )));
    }
    let mut out = dist.d_signed.clone();
    for v in out.values.iter_mut() {
        *v = clamp_blend(*v, delta0);
    }
    Ok(out)
}

/// Monotone `C²` map equal to `s` for `s ≤ δ₀/2` and to `δ₀` for `s ≥ δ₀`.
pub(crate) fn clamp_blend(s: f64, delta0: f64) -> f64 {
    let a = 0.5 * delta0;
    if s <= a {
        return s;
    }
    if s >= delta0 {
        return delta0;
    }
    let len = delta0 - a;
    let t = (s - a) / len;
    // P(0)=0, P'(0)=1, P''(0)=0, P(1)=1, P'(1)=P''(1)=0.
    let p = t + t.powi(3) * (4.0 + t * (-7.0 + 3.0 * t));
    a + len * p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::norms::NormSpec;

    fn disk_grid(res: usize) -> Arc<Grid> {
        Arc::new(Grid::build(&Domain::new(DomainSpec::disk(1.0)).unwrap(), res).unwrap())
    }

    #[test]
    fn euclidean_disk_center() {
        let grid = disk_grid(64);
        let dist = distance_fast_march(grid.clone(), &Norm::euclidean()).unwrap();
        let c = grid.nearest([0.0, 0.0]);
        assert!((dist.signed(c) - 1.0).abs() <= 2.0 * grid.h);
        assert!(dist.ridge[c]);
    }

    #[test]
    fn bruteforce_exact_on_disk() {
        let grid = disk_grid(32);
        let dist = distance_bruteforce(grid.clone(), &Norm::euclidean(), 4096).unwrap();
        for k in 0..grid.len() {
            let p = grid.point(k);
            assert!((dist.signed(k) - (1.0 - p[0].hypot(p[1]))).abs() < 1e-4);
        }
    }

    #[test]
    fn bruteforce_symmetry() {
        let grid = Arc::new(Grid::build(&Domain::new(DomainSpec::ellipse(1.0, 0.6)).unwrap(), 32).unwrap());
        let norm = Norm::new(NormSpec::ellipse_diag(4.0, 1.0)).unwrap();
        let dist = distance_bruteforce(grid.clone(), &norm, 1024).unwrap();
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let a = dist.signed(grid.index(i, j));
                let b = dist.signed(grid.index(i, grid.ny - 1 - j));
                let c = dist.signed(grid.index(grid.nx - 1 - i, j));
                assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn boundary_ring_is_small() {
        let grid = disk_grid(48);
        let dist = distance_fast_march(grid.clone(), &Norm::new(NormSpec::ellipse_diag(4.0, 1.0)).unwrap()).unwrap();
        for k in 0..grid.len() {
            if grid.is_interior(k) {
                assert!(dist.signed(k) > 0.0);
                if grid.neighbors4(k).any(|n| !grid.is_interior(n)) {
                    // H° ≤ |·|/a with a = 1 here.
                    assert!(dist.signed(k) <= grid.h * (1.0 + 1e-9));
                }
            } else if grid.class(k) == crate::geometry::NodeClass::Exterior {
                assert!(dist.signed(k) < 0.0);
            }
        }
    }

    #[test]
    fn rejects_few_samples() {
        assert!(distance_bruteforce(disk_grid(16), &Norm::euclidean(), 100).is_err());
    }

    #[test]
    fn blend_is_c2() {
        let d0 = 0.2;
        assert_eq!(clamp_blend(0.05, d0), 0.05);
        assert_eq!(clamp_blend(0.4, d0), d0);
        // Jumps of the first and second differences across the knots vanish
        // linearly with the probe width.
        for s0 in [0.5 * d0, d0] {
            let jumps = |e: f64| {
                let first = |s: f64| (clamp_blend(s + e, d0) - clamp_blend(s - e, d0)) / (2.0 * e);
                let second = |s: f64| {
                    (clamp_blend(s + e, d0) - 2.0 * clamp_blend(s, d0) + clamp_blend(s - e, d0)) / (e * e)
                };
                (
                    (first(s0 - 2.0 * e) - first(s0 + 2.0 * e)).abs(),
                    (second(s0 - 2.0 * e) - second(s0 + 2.0 * e)).abs(),
                )
            };
            let (f1, s1) = jumps(1e-3);
            let (f2, s2) = jumps(1e-4);
            assert!(f2 < 1e-3 && s2 < 0.2 * s1.max(1e-12) + 1e-6, "{f1} {s1} {f2} {s2}");
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let v = clamp_blend(i as f64 * 3e-4, d0);
            assert!(v >= prev && v <= d0);
            prev = v;
        }
    }
}
