//! Object surfaces with chart coordinates for contact placement.
//!
//! Spheres and ellipsoids are parametrized by latitude `θ ∈ [-π/2, π/2]`
//! and longitude `φ` of a unit direction `u`. Near the poles the point moves
//! to a second chart rotated 90° about the x-axis. Meshes use a triangle
//! index plus barycentric coordinates `(b1, b2)`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix3, Vector2};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::contact::{Contact, FrictionModel};
use crate::error::{Error, Result};
use crate::rigid::{tangent_frame, TangentFrame, Vec3};

/// Distance from a pole (radians) that triggers a re-chart.
pub const POLE_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SurfaceModel {
    Sphere {
        center: Vec3,
        radius: f64,
    },
    /// Axis-aligned ellipsoid with semi-axes `(a, b, c)`.
    Ellipsoid {
        center: Vec3,
        semi_axes: Vec3,
    },
    /// Closed triangle mesh, counter-clockwise seen from outside.
    Mesh {
        vertices: Vec<Vec3>,
        triangles: Vec<[usize; 3]>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "lowercase")]
pub enum SurfaceCoords {
    /// Latitude/longitude; `alternate` selects the chart rotated about x.
    Angles {
        theta: f64,
        phi: f64,
        alternate: bool,
    },
    Barycentric {
        triangle: usize,
        b1: f64,
        b2: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub coords: SurfaceCoords,
    pub position: Vec3,
    pub inward_normal: Vec3,
    /// First tangent of the contact frame.
    pub tangent: Vec3,
}

impl SurfacePoint {
    pub fn frame(&self) -> Result<TangentFrame> {
        TangentFrame::with_tangent(&self.inward_normal, &self.tangent)
    }

    pub fn contact(&self, model: FrictionModel) -> Result<Contact> {
        Contact::with_frame(self.position, self.frame()?, model)
    }

    /// Chart parameters as plain numbers, for traces.
    pub fn params(&self) -> Vec<f64> {
        match self.coords {
            SurfaceCoords::Angles { .. } => {
                let (t, p) = angles_of(&self.direction());
                vec![t, p]
            }
            SurfaceCoords::Barycentric { triangle, b1, b2 } => vec![triangle as f64, b1, b2],
        }
    }

    /// Unit direction of an angle-charted point.
    fn direction(&self) -> Vec3 {
        match self.coords {
            SurfaceCoords::Angles {
                theta,
                phi,
                alternate,
            } => chart_direction(theta, phi, alternate),
            SurfaceCoords::Barycentric { .. } => Vec3::zeros(),
        }
    }
}

/// 90° rotation about x taking the alternate chart to world coordinates.
fn alt_rotation() -> Matrix3<f64> {
    Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0)
}

fn local_direction(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(ct * cp, ct * sp, st)
}

fn chart_direction(theta: f64, phi: f64, alternate: bool) -> Vec3 {
    let u = local_direction(theta, phi);
    if alternate {
        alt_rotation() * u
    } else {
        u
    }
}

/// `∂u/∂φ` direction (east) in world coordinates.
fn chart_east(phi: f64, alternate: bool) -> Vec3 {
    let e = Vec3::new(-phi.sin(), phi.cos(), 0.0);
    if alternate {
        alt_rotation() * e
    } else {
        e
    }
}

fn angles_of(u: &Vec3) -> (f64, f64) {
    (u.z.clamp(-1.0, 1.0).asin(), u.y.atan2(u.x))
}

/// Chart coordinates of a unit direction, preferring the primary chart.
fn chart_coords(u: &Vec3) -> SurfaceCoords {
    let (theta, phi) = angles_of(u);
    if theta.abs() <= FRAC_PI_2 - POLE_MARGIN {
        SurfaceCoords::Angles {
            theta,
            phi,
            alternate: false,
        }
    } else {
        let (theta, phi) = angles_of(&(alt_rotation().transpose() * u));
        SurfaceCoords::Angles {
            theta,
            phi,
            alternate: true,
        }
    }
}

/// Wraps `φ` into `(-π, π]` and switches charts near a pole.
fn normalize_angles(theta: f64, phi: f64, alternate: bool) -> SurfaceCoords {
    if theta.abs() > FRAC_PI_2 - POLE_MARGIN {
        let u = chart_direction(theta, phi, alternate);
        let other = if alternate {
            u
        } else {
            alt_rotation().transpose() * u
        };
        let (t, p) = angles_of(&other);
        if t.abs() <= FRAC_PI_2 - POLE_MARGIN {
            return SurfaceCoords::Angles {
                theta: t,
                phi: p,
                alternate: !alternate,
            };
        }
        return chart_coords(&u);
    }
    let mut p = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if p == -PI {
        p = PI;
    }
    SurfaceCoords::Angles {
        theta,
        phi: p,
        alternate,
    }
}

/// Closest point on triangle `abc` to `p` as barycentric `(b1, b2)` for
/// vertices `b` and `c`.
/// Unclamped barycentric `(b1, b2)` of a point in the plane of `abc`.
fn barycentric(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> (f64, f64) {
    let (ab, ac, ap) = (b - a, c - a, p - a);
    let (d00, d01, d11) = (ab.dot(&ab), ab.dot(&ac), ac.dot(&ac));
    let (d20, d21) = (ap.dot(&ab), ap.dot(&ac));
    let den = d00 * d11 - d01 * d01;
    ((d11 * d20 - d01 * d21) / den, (d00 * d21 - d01 * d20) / den)
}

/// Straight-line walk of `delta` (barycentric units of the start triangle)
/// across a mesh, unfolding at every crossed edge. Stops on an open edge.
fn walk(
    vertices: &[Vec3],
    triangles: &[[usize; 3]],
    start: usize,
    b1: f64,
    b2: f64,
    delta: Vector2<f64>,
) -> (usize, f64, f64) {
    let corners = |t: usize| {
        let t = triangles[t];
        [vertices[t[0]], vertices[t[1]], vertices[t[2]]]
    };
    let mut tri = start;
    let [a, b, c] = corners(tri);
    let mut cur = [1.0 - b1 - b2, b1, b2];
    let mut p = a * cur[0] + b * cur[1] + c * cur[2];
    let mut v = (b - a) * delta.x + (c - a) * delta.y;
    for _ in 0..4 * triangles.len() + 8 {
        let [a, b, c] = corners(tri);
        let (e1, e2) = barycentric(&(p + v), &a, &b, &c);
        let end = [1.0 - e1 - e2, e1, e2];
        let exit = (0..3)
            .filter(|&i| end[i] < -1e-12)
            .map(|i| (i, (cur[i] / (cur[i] - end[i])).clamp(0.0, 1.0)))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        let Some((i, s)) = exit else {
            break;
        };
        let t = triangles[tri];
        let (u, w) = (t[(i + 1) % 3], t[(i + 2) % 3]);
        let Some(next) = (0..triangles.len())
            .find(|&j| j != tri && triangles[j].contains(&u) && triangles[j].contains(&w))
        else {
            v *= s;
            break;
        };
        p += v * s;
        v *= 1.0 - s;
        let e = (vertices[w] - vertices[u]).normalize();
        let along = v.dot(&e);
        let perp = (v - e * along).norm();
        let o = triangles[next]
            .iter()
            .copied()
            .find(|&k| k != u && k != w)
            .unwrap_or(u);
        let d = vertices[o] - vertices[u];
        let into = (d - e * d.dot(&e)).normalize();
        v = e * along + into * perp;
        tri = next;
        let [a, b, c] = corners(tri);
        let (n1, n2) = barycentric(&p, &a, &b, &c);
        cur = [1.0 - n1 - n2, n1, n2];
    }
    let [a, b, c] = corners(tri);
    let (b1, b2) = closest_on_triangle(&(p + v), &a, &b, &c);
    (tri, b1, b2)
}

fn closest_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> (f64, f64) {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (0.0, 0.0);
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (1.0, 0.0);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return (d1 / (d1 - d3), 0.0);
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (0.0, 1.0);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return (0.0, d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (1.0 - w, w);
    }
    let denom = 1.0 / (va + vb + vc);
    (vb * denom, vc * denom)
}

impl SurfaceModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            SurfaceModel::Sphere { radius, .. } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "sphere radius must be positive, got {radius}"
                    )));
                }
            }
            SurfaceModel::Ellipsoid { semi_axes, .. } => {
                if !semi_axes.iter().all(|&s| s > 0.0 && s.is_finite()) {
                    return Err(Error::InvalidInput(
                        "ellipsoid semi-axes must be positive".into(),
                    ));
                }
            }
            SurfaceModel::Mesh {
                vertices,
                triangles,
            } => {
                if triangles.is_empty() {
                    return Err(Error::InvalidInput("mesh has no triangles".into()));
                }
                for t in triangles {
                    if t.iter().any(|&i| i >= vertices.len()) {
                        return Err(Error::InvalidInput(format!(
                            "triangle {t:?} indexes a missing vertex"
                        )));
                    }
                    let n =
                        (vertices[t[1]] - vertices[t[0]]).cross(&(vertices[t[2]] - vertices[t[0]]));
                    if !(n.norm() > 0.0) {
                        return Err(Error::InvalidInput(format!("triangle {t:?} is degenerate")));
                    }
                }
                let vol = self.signed_volume();
                if !(vol > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "mesh signed volume is {vol}; triangles must be counter-clockwise seen from outside"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn signed_volume(&self) -> f64 {
        match self {
            SurfaceModel::Mesh {
                vertices,
                triangles,
            } => triangles
                .iter()
                .map(|t| vertices[t[0]].dot(&vertices[t[1]].cross(&vertices[t[2]])) / 6.0)
                .sum(),
            _ => 0.0,
        }
    }

    /// Default torque origin: the center, or the volume centroid of a mesh.
    pub fn torque_origin(&self) -> Vec3 {
        match self {
            SurfaceModel::Sphere { center, .. } | SurfaceModel::Ellipsoid { center, .. } => *center,
            SurfaceModel::Mesh {
                vertices,
                triangles,
            } => {
                let mut vol = 0.0;
                let mut acc = Vec3::zeros();
                for t in triangles {
                    let (a, b, c) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
                    let v = a.dot(&b.cross(&c)) / 6.0;
                    vol += v;
                    acc += (a + b + c) * (v / 4.0);
                }
                acc / vol
            }
        }
    }

    /// Column names of one contact's parameters in a trace.
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            SurfaceModel::Mesh { .. } => &["tri", "b1", "b2"],
            _ => &["theta", "phi"],
        }
    }

    /// Evaluates a surface point from chart coordinates.
    pub fn point_at(&self, coords: SurfaceCoords) -> Result<SurfacePoint> {
        match (self, coords) {
            (
                SurfaceModel::Sphere { center, radius },
                SurfaceCoords::Angles {
                    theta,
                    phi,
                    alternate,
                },
            ) => {
                let u = chart_direction(theta, phi, alternate);
                let east = chart_east(phi, alternate);
                Ok(SurfacePoint {
                    coords,
                    position: center + u * *radius,
                    inward_normal: -u,
                    tangent: east,
                })
            }
            (
                SurfaceModel::Ellipsoid { center, semi_axes },
                SurfaceCoords::Angles {
                    theta,
                    phi,
                    alternate,
                },
            ) => {
                let u = chart_direction(theta, phi, alternate);
                let outward = u.component_div(semi_axes).normalize();
                let east = chart_east(phi, alternate).component_mul(semi_axes);
                Ok(SurfacePoint {
                    coords,
                    position: center + u.component_mul(semi_axes),
                    inward_normal: -outward,
                    tangent: east,
                })
            }
            (
                SurfaceModel::Mesh {
                    vertices,
                    triangles,
                },
                SurfaceCoords::Barycentric { triangle, b1, b2 },
            ) => {
                let t = triangles.get(triangle).ok_or_else(|| {
                    Error::InvalidInput(format!("triangle {triangle} out of range"))
                })?;
                let (a, b, c) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
                let outward = (b - a).cross(&(c - a)).normalize();
                let frame = tangent_frame(&-outward)?;
                Ok(SurfacePoint {
                    coords,
                    position: a * (1.0 - b1 - b2) + b * b1 + c * b2,
                    inward_normal: -outward,
                    tangent: frame.t1,
                })
            }
            _ => Err(Error::InvalidInput(
                "chart coordinates do not match the surface kind".into(),
            )),
        }
    }

    /// Surface point along a unit direction from the center (sphere and
    /// ellipsoid only).
    pub fn point_toward(&self, direction: &Vec3) -> Result<SurfacePoint> {
        let n = direction.norm();
        if !(n > 1e-12) {
            return Err(Error::ZeroNormal);
        }
        match self {
            SurfaceModel::Mesh { .. } => {
                let p = self.torque_origin() + direction / n;
                self.nearest_point(&p)
            }
            _ => self.point_at(chart_coords(&(direction / n))),
        }
    }

    /// Nearest surface point of a mesh (first triangle on ties).
    pub fn nearest_point(&self, p: &Vec3) -> Result<SurfacePoint> {
        let SurfaceModel::Mesh {
            vertices,
            triangles,
        } = self
        else {
            return Err(Error::InvalidInput(
                "nearest-point projection needs a mesh".into(),
            ));
        };
        let mut best = (f64::INFINITY, 0, 0.0, 0.0);
        for (i, t) in triangles.iter().enumerate() {
            let (a, b, c) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            let (b1, b2) = closest_on_triangle(p, &a, &b, &c);
            let q = a * (1.0 - b1 - b2) + b * b1 + c * b2;
            let d = (q - p).norm_squared();
            if d < best.0 {
                best = (d, i, b1, b2);
            }
        }
        self.point_at(SurfaceCoords::Barycentric {
            triangle: best.1,
            b1: best.2,
            b2: best.3,
        })
    }

    /// Moves a point by `delta` in chart units. Angle charts re-chart near
    /// the poles. Mesh points move in their triangle's plane; a path leaving
    /// through an edge is unfolded onto the neighbouring triangle.
    pub fn displaced(&self, p: &SurfacePoint, delta: Vector2<f64>) -> Result<SurfacePoint> {
        match p.coords {
            SurfaceCoords::Angles {
                theta,
                phi,
                alternate,
            } => self.point_at(normalize_angles(theta + delta.x, phi + delta.y, alternate)),
            SurfaceCoords::Barycentric { triangle, b1, b2 } => {
                let SurfaceModel::Mesh {
                    vertices,
                    triangles,
                } = self
                else {
                    return Err(Error::InvalidInput(
                        "barycentric coordinates on a smooth surface".into(),
                    ));
                };
                let (triangle, b1, b2) = walk(vertices, triangles, triangle, b1, b2, delta);
                self.point_at(SurfaceCoords::Barycentric { triangle, b1, b2 })
            }
        }
    }

    /// Area-uniform random surface point.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Result<SurfacePoint> {
        match self {
            SurfaceModel::Sphere { .. } => self.point_at(chart_coords(&random_unit(rng))),
            SurfaceModel::Ellipsoid { semi_axes, .. } => {
                let (a, b, c) = (semi_axes.x, semi_axes.y, semi_axes.z);
                let gmax = (b * c).max(a * c).max(a * b);
                loop {
                    let u = random_unit(rng);
                    let g = ((b * c * u.x).powi(2) + (a * c * u.y).powi(2) + (a * b * u.z).powi(2))
                        .sqrt();
                    if rng.random::<f64>() * gmax <= g {
                        return self.point_at(chart_coords(&u));
                    }
                }
            }
            SurfaceModel::Mesh {
                vertices,
                triangles,
            } => {
                let areas: Vec<f64> = triangles
                    .iter()
                    .map(|t| {
                        (vertices[t[1]] - vertices[t[0]])
                            .cross(&(vertices[t[2]] - vertices[t[0]]))
                            .norm()
                    })
                    .collect();
                let pick = WeightedIndex::new(&areas)
                    .map_err(|e| Error::InvalidInput(format!("mesh areas: {e}")))?
                    .sample(rng);
                let (r1, r2): (f64, f64) = (rng.random(), rng.random());
                let s = r1.sqrt();
                self.point_at(SurfaceCoords::Barycentric {
                    triangle: pick,
                    b1: s * (1.0 - r2),
                    b2: s * r2,
                })
            }
        }
    }

    /// Distance from a position to the surface (0 for points on it).
    pub fn surface_residual(&self, x: &Vec3) -> f64 {
        match self {
            SurfaceModel::Sphere { center, radius } => ((x - center).norm() - radius).abs(),
            SurfaceModel::Ellipsoid { center, semi_axes } => {
                let y = (x - center).component_div(semi_axes);
                (y.norm() - 1.0).abs() * semi_axes.min()
            }
            SurfaceModel::Mesh { .. } => self
                .nearest_point(x)
                .map(|p| (p.position - x).norm())
                .unwrap_or(f64::INFINITY),
        }
    }
}

fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}
