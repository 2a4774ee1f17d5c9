//! Quickhull in general dimension (2 to 6) producing simplicial facets.
//!
//! Points closer than `COPLANAR_TOL` (relative to the coordinate scale) to a
//! facet hyperplane are treated as lying on it and never become apexes.

use std::collections::HashMap;

use super::{Facet, PointSet};
use crate::error::{Error, Result};

/// Relative distance under which a point counts as coplanar with a facet.
pub const COPLANAR_TOL: f64 = 1e-10;
/// Relative tolerance used to merge simplicial facets sharing a hyperplane.
pub const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
struct QFacet {
    /// `neighbors[i]` is the facet across the ridge opposite `verts[i]`.
    verts: Vec<usize>,
    neighbors: Vec<usize>,
    normal: Vec<f64>,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

/// A full-dimensional convex hull with simplicial facets.
#[derive(Debug, Clone)]
pub struct ConvexHull {
    pub dim: usize,
    /// Deduplicated points the hull was built from.
    pub points: PointSet,
    /// Index into the caller's point set for each deduplicated point.
    pub source_ids: Vec<usize>,
    pub facets: Vec<Facet>,
    neighbors: Vec<Vec<usize>>,
    pub interior: Vec<f64>,
    eps: f64,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Removes points within `1e-12` (relative) of an earlier point.
pub fn dedup(ps: &PointSet) -> (PointSet, Vec<usize>) {
    let d = ps.dim;
    let tol = 1e-12 * ps.scale().max(1e-300);
    let mut order: Vec<usize> = (0..ps.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (ps.point(a), ps.point(b));
        for k in 0..d {
            match pa[k].partial_cmp(&pb[k]) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(o) => return o,
            }
        }
        a.cmp(&b)
    });
    let mut keep: Vec<usize> = Vec::with_capacity(ps.len());
    let mut last: Option<usize> = None;
    for &i in &order {
        if let Some(l) = last {
            let same = ps
                .point(i)
                .iter()
                .zip(ps.point(l))
                .all(|(a, b)| (a - b).abs() <= tol);
            if same {
                continue;
            }
        }
        keep.push(i);
        last = Some(i);
    }
    keep.sort_unstable();
    let mut coords = Vec::with_capacity(keep.len() * d);
    for &i in &keep {
        coords.extend_from_slice(ps.point(i));
    }
    (PointSet { dim: d, coords }, keep)
}

/// Orthonormal basis of the span of `vectors` by twice-applied modified
/// Gram-Schmidt; vectors with residual below `tol` are dropped.
fn orthonormal_basis(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let p = dot(&r, q);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= p * qi;
                }
            }
        }
        let n = dot(&r, &r).sqrt();
        if n > tol {
            basis.push(r.iter().map(|x| x / n).collect());
        }
    }
    basis
}

/// Unit normal to the hyperplane through `d` points, unoriented.
fn hyperplane_normal(pts: &[&[f64]]) -> Vec<f64> {
    let d = pts[0].len();
    let diffs: Vec<Vec<f64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect())
        .collect();
    let basis = orthonormal_basis(&diffs, 0.0);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for axis in 0..d {
        let mut r = vec![0.0; d];
        r[axis] = 1.0;
        for _ in 0..2 {
            for q in &basis {
                let p = dot(&r, q);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= p * qi;
                }
            }
        }
        let n = dot(&r, &r).sqrt();
        if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
            best = Some((n, r));
        }
    }
    let (n, r) = best.expect("dimension is at least 1");
    r.into_iter().map(|x| x / n).collect()
}

impl ConvexHull {
    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    /// Smallest facet offset, i.e. the distance from the origin to the
    /// nearest facet hyperplane (negative when the origin is outside).
    pub fn min_offset(&self) -> f64 {
        self.facets
            .iter()
            .map(|f| f.offset)
            .fold(f64::INFINITY, f64::min)
    }

    /// Caller indices of every point that is a vertex of some facet.
    pub fn vertex_source_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .facets
            .iter()
            .flat_map(|f| f.vertex_ids.iter().copied())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Largest value of `normal·x - offset` over all points and facets.
    pub fn max_violation(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for f in &self.facets {
            for p in self.points.iter() {
                worst = worst.max(dot(&f.normal, p) - f.offset);
            }
        }
        worst
    }

    /// Facets with simplicial pieces on a common hyperplane merged, and all
    /// points within the coplanarity tolerance attached as vertices.
    pub fn merged_facets(&self) -> Vec<Facet> {
        let nf = self.facets.len();
        let mut group = vec![usize::MAX; nf];
        let mut out: Vec<Facet> = Vec::new();
        let tol = MERGE_TOL * self.points.scale().max(1.0);
        for start in 0..nf {
            if group[start] != usize::MAX {
                continue;
            }
            let gid = out.len();
            group[start] = gid;
            let base = &self.facets[start];
            let mut stack = vec![start];
            while let Some(f) = stack.pop() {
                for &nb in &self.neighbors[f] {
                    if group[nb] != usize::MAX {
                        continue;
                    }
                    let g = &self.facets[nb];
                    let same = (g.offset - base.offset).abs() <= tol
                        && g.normal
                            .iter()
                            .zip(&base.normal)
                            .all(|(a, b)| (a - b).abs() <= MERGE_TOL);
                    if same {
                        group[nb] = gid;
                        stack.push(nb);
                    }
                }
            }
            let mut ids: Vec<usize> = (0..self.points.len())
                .filter(|&i| {
                    (dot(&base.normal, self.points.point(i)) - base.offset).abs() <= self.eps
                })
                .map(|i| self.source_ids[i])
                .collect();
            ids.sort_unstable();
            out.push(Facet {
                normal: base.normal.clone(),
                offset: base.offset,
                vertex_ids: ids,
            });
        }
        out
    }
}

/// Greedy choice of `d + 1` affinely independent points.
fn initial_simplex(ps: &PointSet, tol: f64) -> std::result::Result<Vec<usize>, usize> {
    let n = ps.len();
    let d = ps.dim;
    let mut first = 0;
    for i in 1..n {
        if ps.point(i)[0] < ps.point(first)[0] {
            first = i;
        }
    }
    let mut chosen = vec![first];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let origin = ps.point(first).to_vec();
    for _ in 0..d {
        let mut best = None;
        let mut best_norm = tol;
        let mut best_res = Vec::new();
        for i in 0..n {
            let mut r: Vec<f64> = ps
                .point(i)
                .iter()
                .zip(&origin)
                .map(|(a, b)| a - b)
                .collect();
            for _ in 0..2 {
                for q in &basis {
                    let p = dot(&r, q);
                    for (ri, qi) in r.iter_mut().zip(q) {
                        *ri -= p * qi;
                    }
                }
            }
            let nr = dot(&r, &r).sqrt();
            if nr > best_norm {
                best_norm = nr;
                best = Some(i);
                best_res = r;
            }
        }
        match best {
            Some(i) => {
                chosen.push(i);
                basis.push(best_res.iter().map(|x| x / best_norm).collect());
            }
            None => return Err(basis.len()),
        }
    }
    Ok(chosen)
}

struct Builder<'a> {
    ps: &'a PointSet,
    facets: Vec<QFacet>,
    interior: Vec<f64>,
    eps: f64,
}

impl Builder<'_> {
    fn make_facet(&self, verts: Vec<usize>) -> QFacet {
        let pts: Vec<&[f64]> = verts.iter().map(|&v| self.ps.point(v)).collect();
        let mut normal = hyperplane_normal(&pts);
        let mut offset = pts.iter().map(|p| dot(&normal, p)).sum::<f64>() / pts.len() as f64;
        if dot(&normal, &self.interior) > offset {
            for x in normal.iter_mut() {
                *x = -*x;
            }
            offset = -offset;
        }
        let d = verts.len();
        QFacet {
            verts,
            neighbors: vec![usize::MAX; d],
            normal,
            offset,
            outside: Vec::new(),
            alive: true,
        }
    }

    #[inline]
    fn dist(&self, f: usize, p: usize) -> f64 {
        let f = &self.facets[f];
        dot(&f.normal, self.ps.point(p)) - f.offset
    }

    fn assign(&mut self, candidates: &[usize], targets: &[usize]) {
        for &p in candidates {
            for &f in targets {
                if self.dist(f, p) > self.eps {
                    self.facets[f].outside.push(p);
                    break;
                }
            }
        }
    }
}

/// Builds the convex hull of a full-dimensional point set.
pub fn convex_hull(input: &PointSet) -> Result<ConvexHull> {
    let d = input.dim;
    if !(2..=6).contains(&d) {
        return Err(Error::InvalidInput(format!(
            "hull dimension {d} outside 2..=6"
        )));
    }
    if input.is_empty() {
        return Err(Error::DegenerateInput("empty point set"));
    }
    let (ps, source_ids) = dedup(input);
    let scale = ps.scale();
    if scale == 0.0 {
        return Err(Error::DegenerateInput("all points are zero"));
    }
    let eps = COPLANAR_TOL * scale;
    let simplex = initial_simplex(&ps, eps)
        .map_err(|_| Error::DegenerateInput("point set is not full-dimensional"))?;

    let mut interior = vec![0.0; d];
    for &v in &simplex {
        for (c, x) in interior.iter_mut().zip(ps.point(v)) {
            *c += x / (d + 1) as f64;
        }
    }
    let mut b = Builder {
        ps: &ps,
        facets: Vec::new(),
        interior,
        eps,
    };

    // Facet i is opposite simplex vertex i.
    for i in 0..=d {
        let verts: Vec<usize> = simplex
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        let mut f = b.make_facet(verts);
        f.neighbors = (0..=d).filter(|&j| j != i).collect();
        b.facets.push(f);
    }
    let in_simplex: Vec<bool> = {
        let mut m = vec![false; ps.len()];
        for &v in &simplex {
            m[v] = true;
        }
        m
    };
    let rest: Vec<usize> = (0..ps.len()).filter(|&i| !in_simplex[i]).collect();
    let all: Vec<usize> = (0..=d).collect();
    b.assign(&rest, &all);

    let mut stack: Vec<usize> = (0..=d)
        .filter(|&f| !b.facets[f].outside.is_empty())
        .collect();
    let mut mark: Vec<u32> = vec![0; b.facets.len()];
    let mut visible_flag: Vec<bool> = vec![false; b.facets.len()];
    let mut generation = 0u32;

    while let Some(f0) = stack.pop() {
        if !b.facets[f0].alive || b.facets[f0].outside.is_empty() {
            continue;
        }
        let apex = {
            let f = &b.facets[f0];
            let mut best = f.outside[0];
            let mut bd = f64::NEG_INFINITY;
            for &p in &f.outside {
                let dd = dot(&f.normal, ps.point(p)) - f.offset;
                if dd > bd {
                    bd = dd;
                    best = p;
                }
            }
            best
        };

        generation += 1;
        if mark.len() < b.facets.len() {
            mark.resize(b.facets.len(), 0);
            visible_flag.resize(b.facets.len(), false);
        }
        let mut visible = vec![f0];
        mark[f0] = generation;
        visible_flag[f0] = true;
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut qi = 0;
        while qi < visible.len() {
            let f = visible[qi];
            qi += 1;
            for k in 0..d {
                let nb = b.facets[f].neighbors[k];
                if mark[nb] != generation {
                    mark[nb] = generation;
                    let vis = b.dist(nb, apex) > eps;
                    visible_flag[nb] = vis;
                    if vis {
                        visible.push(nb);
                    }
                }
                if !visible_flag[nb] {
                    horizon.push((f, k));
                }
            }
        }

        let mut ridge_map: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        let mut created = Vec::with_capacity(horizon.len());
        for &(fv, k) in &horizon {
            let mut verts = b.facets[fv].verts.clone();
            verts[k] = apex;
            let nb = b.facets[fv].neighbors[k];
            let mut nf = b.make_facet(verts);
            let id = b.facets.len();
            nf.neighbors[k] = nb;
            if let Some(slot) = b.facets[nb].neighbors.iter().position(|&x| x == fv) {
                b.facets[nb].neighbors[slot] = id;
            }
            for s in 0..d {
                if s == k {
                    continue;
                }
                let mut key: Vec<usize> = nf
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != s)
                    .map(|(_, &v)| v)
                    .collect();
                key.sort_unstable();
                if let Some((other, oslot)) = ridge_map.remove(&key) {
                    nf.neighbors[s] = other;
                    b.facets[other].neighbors[oslot] = id;
                } else {
                    ridge_map.insert(key, (id, s));
                }
            }
            b.facets.push(nf);
            created.push(id);
        }
        if !ridge_map.is_empty() {
            return Err(Error::Numerical(
                "quickhull horizon is not a closed ridge cycle",
            ));
        }

        let mut orphans = Vec::new();
        for &f in &visible {
            b.facets[f].alive = false;
            orphans.append(&mut b.facets[f].outside);
        }
        orphans.retain(|&p| p != apex);
        b.assign(&orphans, &created);
        for &f in &created {
            if !b.facets[f].outside.is_empty() {
                stack.push(f);
            }
        }
    }

    let mut remap = vec![usize::MAX; b.facets.len()];
    let mut facets = Vec::new();
    let mut alive_ids = Vec::new();
    for (i, f) in b.facets.iter().enumerate() {
        if f.alive {
            remap[i] = facets.len();
            alive_ids.push(i);
            facets.push(Facet {
                normal: f.normal.clone(),
                offset: f.offset,
                vertex_ids: f.verts.iter().map(|&v| source_ids[v]).collect(),
            });
        }
    }
    let neighbors = alive_ids
        .iter()
        .map(|&i| b.facets[i].neighbors.iter().map(|&nb| remap[nb]).collect())
        .collect::<Vec<Vec<usize>>>();
    if neighbors.iter().flatten().any(|&nb| nb == usize::MAX) {
        return Err(Error::Numerical(
            "quickhull produced a dangling facet neighbor",
        ));
    }
    let interior = b.interior;
    Ok(ConvexHull {
        dim: d,
        points: ps,
        source_ids,
        facets,
        neighbors,
        interior,
        eps,
    })
}
