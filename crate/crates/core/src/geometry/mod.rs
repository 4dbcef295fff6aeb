//! Domains with C² boundary, their uniform grid discretization and nodal
//! scalar fields.

mod distance;

pub use distance::{
    distance_bruteforce, distance_fast_march, extended_distance, DistanceField, EikonalReport,
};

use std::collections::VecDeque;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{Norm, NormSpec, Vec2};

/// Shape family of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    Disk { radius: f64 },
    Ellipse { semi_axes: [f64; 2] },
    /// The Wulff shape `{H°(x) < radius}` of a norm.
    Wulff { norm: NormSpec, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(flatten)]
    pub shape: Shape,
    #[serde(default)]
    pub center: Vec2,
}

impl DomainSpec {
    pub fn disk(radius: f64) -> Self {
        DomainSpec {
            shape: Shape::Disk { radius },
            center: [0.0, 0.0],
        }
    }

    pub fn ellipse(a: f64, b: f64) -> Self {
        DomainSpec {
            shape: Shape::Ellipse { semi_axes: [a, b] },
            center: [0.0, 0.0],
        }
    }

    pub fn wulff(norm: NormSpec, radius: f64) -> Self {
        DomainSpec {
            shape: Shape::Wulff { norm, radius },
            center: [0.0, 0.0],
        }
    }

    pub fn centered_at(mut self, center: Vec2) -> Self {
        self.center = center;
        self
    }
}

/// A validated domain with membership and boundary parametrization.
#[derive(Debug, Clone)]
pub struct Domain {
    spec: DomainSpec,
    wulff_norm: Option<Norm>,
}

impl Domain {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let wulff_norm = match &spec.shape {
            Shape::Disk { radius } if positive(*radius) => None,
            Shape::Ellipse { semi_axes } if semi_axes.iter().all(|&v| positive(v)) => None,
            Shape::Wulff { norm, radius } if positive(*radius) => Some(Norm::new(norm.clone())?),
            other => {
                return Err(Error::InvalidDomain(format!(
                    "radii must be positive and finite: {other:?}"
                )))
            }
        };
        if !spec.center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidDomain("center must be finite".into()));
        }
        Ok(Domain { spec, wulff_norm })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn center(&self) -> Vec2 {
        self.spec.center
    }

    /// Open-set membership.
    pub fn contains(&self, x: Vec2) -> bool {
        let y = [x[0] - self.spec.center[0], x[1] - self.spec.center[1]];
        match &self.spec.shape {
            Shape::Disk { radius } => y[0].hypot(y[1]) < *radius,
            Shape::Ellipse { semi_axes: [a, b] } => (y[0] / a).powi(2) + (y[1] / b).powi(2) < 1.0,
            Shape::Wulff { radius, .. } => self.wulff_norm().eval_polar(y) < *radius,
        }
    }

    fn wulff_norm(&self) -> &Norm {
        self.wulff_norm.as_ref().expect("wulff domain carries its norm")
    }

    /// Boundary point for parameter `t ∈ [0, 2π)`.
    pub fn boundary_point(&self, t: f64) -> Vec2 {
        let c = self.spec.center;
        let (ct, st) = (t.cos(), t.sin());
        match &self.spec.shape {
            Shape::Disk { radius } => [c[0] + radius * ct, c[1] + radius * st],
            Shape::Ellipse { semi_axes: [a, b] } => [c[0] + a * ct, c[1] + b * st],
            Shape::Wulff { radius, .. } => {
                let s = radius / self.wulff_norm().eval_polar([ct, st]);
                [c[0] + s * ct, c[1] + s * st]
            }
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bbox(&self) -> (Vec2, Vec2) {
        let c = self.spec.center;
        let half = match &self.spec.shape {
            Shape::Disk { radius } => [*radius, *radius],
            Shape::Ellipse { semi_axes } => *semi_axes,
            // The support function of the polar ball {H° < r} is r·H.
            Shape::Wulff { radius, .. } => {
                let n = self.wulff_norm();
                [radius * n.eval([1.0, 0.0]), radius * n.eval([0.0, 1.0])]
            }
        };
        ([c[0] - half[0], c[1] - half[1]], [c[0] + half[0], c[1] + half[1]])
    }
}

/// Node classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeClass {
    Interior,
    /// Exterior node with at least one interior 4-neighbour.
    BoundaryLayer,
    Exterior,
}

/// Uniform Cartesian grid. Node `(i, j)` sits at `origin + h·(i, j)` and has
/// linear index `j·nx + i`.
#[derive(Debug, Clone)]
pub struct Grid {
    pub origin: Vec2,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    classes: Vec<NodeClass>,
    domain: Option<Domain>,
}

/// Padding, in cells, around the domain's bounding box.
const PAD: usize = 3;

impl Grid {
    /// Grid over the bounding box of `domain`, padded by at least three cells, with
    /// `h = max(width, height) / resolution`.
    pub fn build(domain: &Domain, resolution: usize) -> Result<Self> {
        if resolution < 16 {
            return Err(Error::GridTooCoarse {
                resolution,
                reason: "resolution must be at least 16".into(),
            });
        }
        let (lo, hi) = domain.bbox();
        let extent = [hi[0] - lo[0], hi[1] - lo[1]];
        let h = extent[0].max(extent[1]) / resolution as f64;
        let cells = |e: f64| (e / h - 1e-9).ceil() as usize;
        let nx = cells(extent[0]) + 2 * PAD + 1;
        let ny = cells(extent[1]) + 2 * PAD + 1;
        // Centered so that symmetric domains get symmetric node sets.
        let origin = [
            0.5 * (lo[0] + hi[0]) - 0.5 * (nx - 1) as f64 * h,
            0.5 * (lo[1] + hi[1]) - 0.5 * (ny - 1) as f64 * h,
        ];
        let mut grid = Grid::from_classifier(origin, h, nx, ny, |x| domain.contains(x));
        grid.domain = Some(domain.clone());
        grid.check(resolution)?;
        Ok(grid)
    }

    /// Grid with an arbitrary interior predicate and no analytic domain
    /// attached (used for rectangles and other test geometries).
    pub fn from_classifier(
        origin: Vec2,
        h: f64,
        nx: usize,
        ny: usize,
        inside: impl Fn(Vec2) -> bool,
    ) -> Self {
        let mut classes = vec![NodeClass::Exterior; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let x = [origin[0] + h * i as f64, origin[1] + h * j as f64];
                if inside(x) {
                    classes[j * nx + i] = NodeClass::Interior;
                }
            }
        }
        let mut grid = Grid {
            origin,
            h,
            nx,
            ny,
            classes,
            domain: None,
        };
        for k in 0..nx * ny {
            if grid.classes[k] != NodeClass::Interior
                && grid.neighbors4(k).any(|n| grid.classes[n] == NodeClass::Interior)
            {
                grid.classes[k] = NodeClass::BoundaryLayer;
            }
        }
        grid
    }

    fn check(&self, resolution: usize) -> Result<()> {
        let interior: Vec<usize> = (0..self.len()).filter(|&k| self.is_interior(k)).collect();
        let Some(&start) = interior.first() else {
            return Err(Error::GridTooCoarse {
                resolution,
                reason: "no interior nodes".into(),
            });
        };
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut count = 1;
        while let Some(k) = queue.pop_front() {
            for n in self.neighbors4(k) {
                if self.is_interior(n) && !seen[n] {
                    seen[n] = true;
                    count += 1;
                    queue.push_back(n);
                }
            }
        }
        if count != interior.len() {
            return Err(Error::GridTooCoarse {
                resolution,
                reason: "interior nodes are not 4-connected".into(),
            });
        }
        Ok(())
    }

    pub fn domain(&self) -> Option<&Domain> {
        self.domain.as_ref()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, k: usize) -> NodeClass {
        self.classes[k]
    }

    pub fn is_interior(&self, k: usize) -> bool {
        self.classes[k] == NodeClass::Interior
    }

    pub fn interior_count(&self) -> usize {
        self.classes.iter().filter(|c| **c == NodeClass::Interior).count()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    pub fn point(&self, k: usize) -> Vec2 {
        let (i, j) = self.ij(k);
        [self.origin[0] + self.h * i as f64, self.origin[1] + self.h * j as f64]
    }

    /// Neighbour at integer offset, if it lies on the grid.
    pub fn offset(&self, k: usize, di: isize, dj: isize) -> Option<usize> {
        let (i, j) = self.ij(k);
        let i = i as isize + di;
        let j = j as isize + dj;
        (i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny)
            .then(|| self.index(i as usize, j as usize))
    }

    pub fn neighbors4(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .into_iter()
            .filter_map(move |(di, dj)| self.offset(k, di, dj))
    }

    pub fn neighbors8(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
            .into_iter()
            .filter_map(move |(di, dj)| self.offset(k, di, dj))
    }

    /// Node nearest to a point (clamped to the grid).
    pub fn nearest(&self, x: Vec2) -> usize {
        let i = ((x[0] - self.origin[0]) / self.h).round().clamp(0.0, (self.nx - 1) as f64);
        let j = ((x[1] - self.origin[1]) / self.h).round().clamp(0.0, (self.ny - 1) as f64);
        self.index(i as usize, j as usize)
    }
}

/// One scalar per grid node, with a mask of defined nodes.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    pub values: Vec<f64>,
    pub defined: Vec<bool>,
}

impl ScalarField {
    pub fn undefined(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        ScalarField {
            grid,
            values: vec![f64::NAN; n],
            defined: vec![false; n],
        }
    }

    /// Field defined on every node.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(usize) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.len()).map(f).collect();
        let defined = vec![true; values.len()];
        ScalarField {
            grid,
            values,
            defined,
        }
    }

    /// Field defined only where `f` returns `Some`.
    pub fn from_partial(grid: Arc<Grid>, f: impl Fn(usize) -> Option<f64>) -> Self {
        let mut field = ScalarField::undefined(grid);
        for k in 0..field.values.len() {
            if let Some(v) = f(k) {
                field.set(k, v);
            }
        }
        field
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.defined[k].then(|| self.values[k])
    }

    pub fn set(&mut self, k: usize, v: f64) {
        self.values[k] = v;
        self.defined[k] = true;
    }

    /// Bilinear interpolation at `x`; `None` outside the grid or when a
    /// corner of the enclosing cell is undefined.
    pub fn sample(&self, x: Vec2) -> Option<f64> {
        let g = &self.grid;
        let s = (x[0] - g.origin[0]) / g.h;
        let t = (x[1] - g.origin[1]) / g.h;
        let tol = 1e-9;
        if s < -tol || t < -tol || s > (g.nx - 1) as f64 + tol || t > (g.ny - 1) as f64 + tol {
            return None;
        }
        let i = (s.floor().max(0.0) as usize).min(g.nx - 2);
        let j = (t.floor().max(0.0) as usize).min(g.ny - 2);
        let (a, b) = ((s - i as f64).clamp(0.0, 1.0), (t - j as f64).clamp(0.0, 1.0));
        let mut acc = 0.0;
        for (di, dj, w) in [(0, 0, (1.0 - a) * (1.0 - b)), (1, 0, a * (1.0 - b)), (0, 1, (1.0 - a) * b), (1, 1, a * b)] {
            if w == 0.0 {
                continue;
            }
            acc += w * self.get(g.index(i + di, j + dj))?;
        }
        Some(acc)
    }

    /// Iterator over `(node, value)` of defined nodes.
    pub fn iter_defined(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .zip(&self.defined)
            .enumerate()
            .filter_map(|(k, (&v, &d))| d.then_some((k, v)))
    }

    /// Every defined value is finite.
    pub fn is_finite(&self) -> bool {
        self.iter_defined().all(|(_, v)| v.is_finite())
    }

    /// CSV with header `x,y,value`, row-major node order; undefined nodes
    /// are written as `nan`.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        self.write_csv_with(w, &[])
    }

    pub(crate) fn write_csv_with(&self, w: &mut impl Write, extra: &[(&str, &ScalarField)]) -> Result<()> {
        write!(w, "x,y,value")?;
        for (name, _) in extra {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for k in 0..self.values.len() {
            let p = self.grid.point(k);
            write!(w, "{},{},{}", p[0], p[1], fmt_value(self.get(k)))?;
            for (_, f) in extra {
                write!(w, ",{}", fmt_value(f.get(k)))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut f)?;
        f.flush()?;
        Ok(())
    }
}

pub(crate) fn fmt_value(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{v}"),
        _ => "nan".to_string(),
    }
}
