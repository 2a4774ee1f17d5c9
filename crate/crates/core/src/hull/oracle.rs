//! Exhaustive facet enumeration, used to check the LP and quickhull paths.
//!
//! Every `d`-subset of points spans a candidate hyperplane; the supporting
//! ones are the facet hyperplanes. Exponential, and capped accordingly.

use super::{Facet, PointSet};
use crate::error::{Error, Result};

pub const ORACLE_MAX_POINTS: usize = 60;
pub const ORACLE_MAX_DIM: usize = 6;
const SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Origin strictly inside the hull.
    pub contains: bool,
    /// Distance from the origin to the nearest facet, when `contains`.
    pub distance: Option<f64>,
    pub facets: Vec<Facet>,
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}

/// Rank by Gaussian elimination with a relative pivot threshold.
fn rank(mut m: Vec<Vec<f64>>, tol: f64) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut piv = r;
        for i in r + 1..rows {
            if m[i][c].abs() > m[piv][c].abs() {
                piv = i;
            }
        }
        if m[piv][c].abs() <= tol {
            continue;
        }
        m.swap(piv, r);
        for i in r + 1..rows {
            let f = m[i][c] / m[r][c];
            for k in c..cols {
                m[i][k] -= f * m[r][k];
            }
        }
        r += 1;
    }
    r
}

/// Generalized cross product of `d - 1` vectors in R^d via cofactors.
fn cofactor_normal(rows: &[Vec<f64>]) -> Vec<f64> {
    let d = rows[0].len();
    (0..d)
        .map(|skip| {
            let minor: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != skip)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let sign = if skip % 2 == 0 { 1.0 } else { -1.0 };
            sign * if minor.is_empty() { 1.0 } else { det(minor) }
        })
        .collect()
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] != i + n - k {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Enumerates facets of `conv(ps)` by brute force and reports whether the
/// origin is strictly inside, with the distance to the nearest facet.
pub fn brute_force_oracle(ps: &PointSet) -> Result<OracleResult> {
    let d = ps.dim;
    let n = ps.len();
    if n > ORACLE_MAX_POINTS || d > ORACLE_MAX_DIM {
        return Err(Error::TooLarge { points: n, dim: d });
    }
    let scale = ps.scale();
    let none = OracleResult {
        contains: false,
        distance: None,
        facets: Vec::new(),
    };
    if scale == 0.0 || n < d + 1 {
        return Ok(none);
    }
    let tol = SUPPORT_TOL * scale;
    let p0 = ps.point(0);
    let diffs: Vec<Vec<f64>> = (1..n)
        .map(|i| ps.point(i).iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    if rank(diffs, 1e-10 * scale) < d {
        return Ok(none);
    }

    let mut facets: Vec<Facet> = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let base = ps.point(idx[0]);
        let rows: Vec<Vec<f64>> = idx[1..]
            .iter()
            .map(|&i| ps.point(i).iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let raw = cofactor_normal(&rows);
        let len = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-12 * scale.powi(d as i32 - 1) {
            let normal: Vec<f64> = raw.iter().map(|x| x / len).collect();
            let offset: f64 = normal.iter().zip(base).map(|(a, b)| a * b).sum();
            let side: Vec<f64> = (0..n)
                .map(|j| {
                    normal
                        .iter()
                        .zip(ps.point(j))
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
                        - offset
                })
                .collect();
            let below = side.iter().all(|&s| s <= tol);
            let above = side.iter().all(|&s| s >= -tol);
            let candidate = if below {
                Some((normal, offset))
            } else if above {
                Some((normal.iter().map(|x| -x).collect(), -offset))
            } else {
                None
            };
            if let Some((nrm, off)) = candidate {
                let on: Vec<usize> = (0..n)
                    .filter(|&j| {
                        (nrm.iter().zip(ps.point(j)).map(|(a, b)| a * b).sum::<f64>() - off).abs()
                            <= tol
                    })
                    .collect();
                let dup = facets.iter().any(|f| {
                    (f.offset - off).abs() <= tol
                        && f.normal
                            .iter()
                            .zip(&nrm)
                            .all(|(a, b)| (a - b).abs() <= 1e-9)
                });
                if !dup {
                    facets.push(Facet {
                        normal: nrm,
                        offset: off,
                        vertex_ids: on,
                    });
                }
            }
        }
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    let min = facets
        .iter()
        .map(|f| f.offset)
        .fold(f64::INFINITY, f64::min);
    let contains = !facets.is_empty() && min > tol;
    Ok(OracleResult {
        contains,
        distance: contains.then_some(min),
        facets,
    })
}
