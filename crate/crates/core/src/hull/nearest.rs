//! Nearest point of a polytope `conv(P)` to the origin (Wolfe's algorithm).

use nalgebra::{DMatrix, DVector};

use super::PointSet;

#[derive(Debug, Clone, PartialEq)]
pub struct NearestPoint {
    pub point: Vec<f64>,
    pub distance: f64,
    /// Convex weights over the input points.
    pub weights: Vec<f64>,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Affinely constrained least norm over the corral `s`:
/// `min |Σ v_i p_i|` subject to `Σ v_i = 1`.
fn affine_minimizer(ps: &PointSet, s: &[usize]) -> Vec<f64> {
    let k = s.len();
    let mut m = DMatrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in a..k {
            let g = dot(ps.point(s[a]), ps.point(s[b]));
            m[(a, b)] = g;
            m[(b, a)] = g;
        }
        m[(a, k)] = 1.0;
        m[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = match m.clone().lu().solve(&rhs) {
        Some(x) if x.iter().all(|v| v.is_finite()) => x,
        _ => m.svd(true, true).solve(&rhs, 1e-14).unwrap_or_else(|_| {
            let mut x = DVector::zeros(k + 1);
            x[0] = 1.0;
            x
        }),
    };
    sol.iter().take(k).copied().collect()
}

/// Minimum-norm point of the convex hull of `ps`.
pub fn min_norm_point(ps: &PointSet) -> NearestPoint {
    let n = ps.len();
    let d = ps.dim;
    let max_sq = ps.iter().map(|p| dot(p, p)).fold(0.0, f64::max);
    let z1 = 1e-12 * max_sq.max(1e-300);
    let z2 = 1e-10;

    let mut start = 0;
    for i in 1..n {
        if dot(ps.point(i), ps.point(i)) < dot(ps.point(start), ps.point(start)) {
            start = i;
        }
    }
    let mut s = vec![start];
    let mut w = vec![1.0];
    let mut x = ps.point(start).to_vec();
    let combine = |s: &[usize], w: &[f64]| {
        let mut x = vec![0.0; d];
        for (&i, &wi) in s.iter().zip(w) {
            for (xk, pk) in x.iter_mut().zip(ps.point(i)) {
                *xk += wi * pk;
            }
        }
        x
    };

    for _ in 0..(50 * n + 100) {
        let xx = dot(&x, &x);
        if xx <= z1 {
            break;
        }
        let mut j = 0;
        let mut best = f64::INFINITY;
        for i in 0..n {
            let v = dot(&x, ps.point(i));
            if v < best {
                best = v;
                j = i;
            }
        }
        if xx - best <= z1 || s.contains(&j) {
            break;
        }
        s.push(j);
        w.push(0.0);
        loop {
            let v = affine_minimizer(ps, &s);
            if v.iter().all(|&vi| vi > z2) {
                w = v;
                break;
            }
            let mut theta = 1.0f64;
            for (wi, vi) in w.iter().zip(&v) {
                if *vi <= z2 && wi - vi > 0.0 {
                    theta = theta.min(wi / (wi - vi));
                }
            }
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi = theta * vi + (1.0 - theta) * *wi;
            }
            let mut keep_s = Vec::with_capacity(s.len());
            let mut keep_w = Vec::with_capacity(s.len());
            for (&i, &wi) in s.iter().zip(&w) {
                if wi > z2 {
                    keep_s.push(i);
                    keep_w.push(wi);
                }
            }
            if keep_s.is_empty() {
                keep_s.push(j);
                keep_w.push(1.0);
            }
            let total: f64 = keep_w.iter().sum();
            s = keep_s;
            w = keep_w.into_iter().map(|wi| wi / total).collect();
            if s.len() == 1 {
                break;
            }
        }
        x = combine(&s, &w);
    }
    let mut weights = vec![0.0; n];
    for (&i, &wi) in s.iter().zip(&w) {
        weights[i] += wi;
    }
    let distance = dot(&x, &x).sqrt();
    NearestPoint {
        point: x,
        distance,
        weights,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_nearest_point() {
        let ps = PointSet::from_points(&[vec![1.0, -1.0], vec![1.0, 1.0]]).unwrap();
        let r = min_norm_point(&ps);
        assert!((r.distance - 1.0).abs() < 1e-12);
        assert!((r.point[1]).abs() < 1e-12);
    }

    #[test]
    fn triangle_face_in_3d() {
        let ps = PointSet::from_points(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![2.0, 2.0, 2.0],
        ])
        .unwrap();
        let r = min_norm_point(&ps);
        assert!((r.distance - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn origin_inside_gives_zero() {
        let ps =
            PointSet::from_points(&[vec![1.0, 0.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]).unwrap();
        assert!(min_norm_point(&ps).distance < 1e-9);
    }

    #[test]
    fn vertex_nearest() {
        let ps = PointSet::from_points(&[vec![3.0, 4.0], vec![5.0, 4.0], vec![3.0, 9.0]]).unwrap();
        let r = min_norm_point(&ps);
        assert!((r.distance - 5.0).abs() < 1e-12);
    }
}
