//! Convex hulls of finite point sets in R^2..R^6.
//!
//! Origin containment is decided by linear programming; distances to the
//! hull boundary come from quickhull facet enumeration. A brute-force facet
//! enumerator serves as an independent oracle for both.

pub mod lp;
mod nearest;
mod oracle;
mod quickhull;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use lp::{LpOutcome, StandardLp};

pub use nearest::{min_norm_point, NearestPoint};
pub use oracle::{brute_force_oracle, OracleResult, ORACLE_MAX_POINTS};
pub use quickhull::{convex_hull, dedup, ConvexHull, COPLANAR_TOL};

/// Minimum inscribed radius (relative to the coordinate scale) for the
/// origin to count as strictly interior.
pub const STRICT_TOL: f64 = 1e-9;

/// Points of equal dimension stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl PointSet {
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.len())
            .ok_or(Error::DegenerateInput("empty point set"))?;
        if dim == 0 {
            return Err(Error::InvalidInput(
                "point dimension must be positive".into(),
            ));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { dim, coords })
    }

    /// One point per matrix column.
    pub fn from_columns(m: &DMatrix<f64>) -> Self {
        Self {
            dim: m.nrows(),
            coords: m.as_slice().to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.coords.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Largest absolute coordinate.
    pub fn scale(&self) -> f64 {
        self.coords.iter().fold(0.0, |a: f64, &v| a.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            coords: self.coords.iter().map(|v| v * s).collect(),
        }
    }

    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim);
        self.coords.extend_from_slice(p);
    }
}

/// A hull facet: `normal·x ≤ offset` for every hull point, with equality on
/// `vertex_ids`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub vertex_ids: Vec<usize>,
}

/// Dimension of the affine hull of the points.
pub fn affine_rank(ps: &PointSet) -> usize {
    if ps.len() < 2 {
        return 0;
    }
    let p0 = ps.point(0);
    let diffs = DMatrix::from_fn(ps.len() - 1, ps.dim, |i, j| ps.point(i + 1)[j] - p0[j]);
    let tol = 1e-10 * ps.scale().max(1e-300);
    diffs
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol)
        .count()
}

fn ensure_nonzero(ps: &PointSet) -> Result<()> {
    if ps.is_empty() {
        return Err(Error::DegenerateInput("empty point set"));
    }
    if ps.scale() == 0.0 {
        return Err(Error::DegenerateInput("all points are zero"));
    }
    Ok(())
}

/// `max t ≥ 0` such that `base + t·dir ∈ conv(ps)`; `None` when `base` is
/// itself outside the hull.
pub fn ray_extent(ps: &PointSet, base: &[f64], dir: &[f64]) -> Result<Option<f64>> {
    let d = ps.dim;
    let n = ps.len();
    let mut prob = StandardLp::new(d + 1, n + 1);
    for j in 0..n {
        let p = ps.point(j);
        for i in 0..d {
            prob.set(i, j, p[i]);
        }
        prob.set(d, j, 1.0);
    }
    for i in 0..d {
        prob.set(i, n, -dir[i]);
        prob.b[i] = base[i];
    }
    prob.b[d] = 1.0;
    prob.c[n] = 1.0;
    match prob.solve() {
        LpOutcome::Optimal { value, .. } => Ok(Some(value)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Numerical(
            "ray extent is unbounded for a bounded hull",
        )),
    }
}

/// Feasibility of `Σ α_j x_j = 0, Σ α_j = 1, α ≥ 0`.
fn origin_feasible(ps: &PointSet) -> bool {
    let d = ps.dim;
    let n = ps.len();
    let mut prob = StandardLp::new(d + 1, n);
    for j in 0..n {
        let p = ps.point(j);
        for i in 0..d {
            prob.set(i, j, p[i]);
        }
        prob.set(d, j, 1.0);
    }
    prob.b[d] = 1.0;
    !matches!(prob.solve(), LpOutcome::Infeasible)
}

/// Largest `ε` such that `±ε e_i` all lie in the hull: the radius of the
/// largest axis-aligned cross-polytope centered at the origin. Positive
/// exactly when the origin is interior; `None` if the origin is outside.
pub fn inscribed_cross_radius(ps: &PointSet) -> Result<Option<f64>> {
    let d = ps.dim;
    let origin = vec![0.0; d];
    let mut radius = f64::INFINITY;
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut dir = vec![0.0; d];
            dir[i] = s;
            match ray_extent(ps, &origin, &dir)? {
                Some(t) => radius = radius.min(t),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(radius))
}

/// Whether the origin lies in `conv(ps)`.
///
/// Non-strict: feasibility of `Σ α_j x_j = 0, Σ α_j = 1, α ≥ 0`. Strict:
/// the hull is full-dimensional and contains a ball around the origin of
/// radius above [`STRICT_TOL`] (measured by the inscribed cross-polytope).
pub fn contains_origin(ps: &PointSet, strict: bool) -> Result<bool> {
    ensure_nonzero(ps)?;
    if !strict {
        return Ok(origin_feasible(ps));
    }
    if affine_rank(ps) < ps.dim {
        return Ok(false);
    }
    Ok(inscribed_cross_radius(ps)?.is_some_and(|r| r > STRICT_TOL * ps.scale()))
}

/// Distance from the origin to the hull boundary: the smallest facet offset.
pub fn boundary_distance(ps: &PointSet) -> Result<f64> {
    ensure_nonzero(ps)?;
    let hull = match convex_hull(ps) {
        Ok(h) => h,
        Err(Error::DegenerateInput(_)) => return Err(Error::OriginOutside),
        Err(e) => return Err(e),
    };
    let d = hull.min_offset();
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::OriginOutside)
    }
}
