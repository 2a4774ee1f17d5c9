//! Friction models, friction-cone discretization and per-contact wrenches.

use nalgebra::{DMatrix, DVector, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rigid::{tangent_frame, TangentFrame, Transform, Vec3};

pub type Wrench6 = Vector6<f64>;

/// Zero tolerance used by the cone membership test.
const CONE_TOL: f64 = 1e-12;

/// Contact friction model. `gamma` is the torsional friction coefficient
/// (meters), bounding the torsion about the normal by `gamma * f_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum FrictionModel {
    Frictionless,
    Hard { mu: f64 },
    Soft { mu: f64, gamma: f64 },
}

impl FrictionModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            FrictionModel::Frictionless => true,
            FrictionModel::Hard { mu } => mu >= 0.0 && mu.is_finite(),
            FrictionModel::Soft { mu, gamma } => {
                mu >= 0.0 && gamma >= 0.0 && mu.is_finite() && gamma.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "bad friction coefficients in {self:?}"
            )))
        }
    }

    pub fn mu(&self) -> f64 {
        match *self {
            FrictionModel::Frictionless => 0.0,
            FrictionModel::Hard { mu } | FrictionModel::Soft { mu, .. } => mu,
        }
    }

    /// Columns of the wrench basis: 1, 3 or 4.
    pub fn basis_size(&self) -> usize {
        match self {
            FrictionModel::Frictionless => 1,
            FrictionModel::Hard { .. } => 3,
            FrictionModel::Soft { .. } => 4,
        }
    }

    /// Same model with the friction coefficient replaced (no-op for frictionless).
    pub fn with_mu(&self, mu: f64) -> Self {
        match *self {
            FrictionModel::Frictionless => FrictionModel::Frictionless,
            FrictionModel::Hard { .. } => FrictionModel::Hard { mu },
            FrictionModel::Soft { gamma, .. } => FrictionModel::Soft { mu, gamma },
        }
    }
}

/// Pyramid approximation of the friction cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeDiscretization {
    pub edge_count: usize,
    /// Soft contacts emit torsion levels `{-γ, 0, +γ}` per edge when set.
    pub include_torsion: bool,
}

impl Default for ConeDiscretization {
    fn default() -> Self {
        Self {
            edge_count: 8,
            include_torsion: true,
        }
    }
}

impl ConeDiscretization {
    pub fn new(edge_count: usize) -> Result<Self> {
        let d = Self {
            edge_count,
            include_torsion: true,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.edge_count < 3 {
            return Err(Error::BadDiscretization(self.edge_count));
        }
        Ok(())
    }

    /// Number of elementary wrenches emitted for one contact of this model.
    pub fn wrench_count(&self, model: &FrictionModel) -> usize {
        match model {
            FrictionModel::Frictionless => 1,
            FrictionModel::Hard { .. } => self.edge_count,
            FrictionModel::Soft { .. } => self.edge_count * self.torsion_levels(),
        }
    }

    fn torsion_levels(&self) -> usize {
        if self.include_torsion {
            3
        } else {
            1
        }
    }
}

/// A point contact on the object surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub position: Vec3,
    pub frame: TangentFrame,
    pub model: FrictionModel,
}

impl Contact {
    /// Contact with the default tangent frame for `inward_normal`.
    pub fn new(position: Vec3, inward_normal: Vec3, model: FrictionModel) -> Result<Self> {
        model.validate()?;
        Ok(Self {
            position,
            frame: tangent_frame(&inward_normal)?,
            model,
        })
    }

    pub fn with_frame(position: Vec3, frame: TangentFrame, model: FrictionModel) -> Result<Self> {
        model.validate()?;
        Ok(Self {
            position,
            frame,
            model,
        })
    }

    pub fn normal(&self) -> Vec3 {
        self.frame.normal
    }

    pub fn transformed(&self, tf: &Transform) -> Self {
        Self {
            position: tf.apply_point(&self.position),
            frame: self.frame.transformed(tf),
            model: self.model,
        }
    }
}

/// Coulomb-cone membership of a contact-frame force `(f1, f2, f_n)` and a
/// torsion about the normal.
pub fn cone_contains(model: &FrictionModel, local_force: &Vec3, local_torsion: f64) -> bool {
    let (f1, f2, fnorm) = (local_force.x, local_force.y, local_force.z);
    let tol = CONE_TOL * (1.0 + local_force.amax() + local_torsion.abs());
    if fnorm < -tol {
        return false;
    }
    let tangential = f1.hypot(f2);
    match *model {
        FrictionModel::Frictionless => tangential <= tol && local_torsion.abs() <= tol,
        FrictionModel::Hard { mu } => tangential <= mu * fnorm + tol && local_torsion.abs() <= tol,
        FrictionModel::Soft { mu, gamma } => {
            tangential <= mu * fnorm + tol && local_torsion.abs() <= gamma * fnorm + tol
        }
    }
}

/// World-frame pyramid edges, each with unit normal component.
pub fn cone_edges(
    model: &FrictionModel,
    frame: &TangentFrame,
    disc: &ConeDiscretization,
) -> Result<Vec<Vec3>> {
    let mu = match *model {
        FrictionModel::Frictionless => return Ok(vec![frame.normal]),
        FrictionModel::Hard { mu } | FrictionModel::Soft { mu, .. } => mu,
    };
    disc.validate()?;
    let k = disc.edge_count;
    Ok((0..k)
        .map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / k as f64;
            let (s, c) = theta.sin_cos();
            frame.normal + (frame.t1 * c + frame.t2 * s) * mu
        })
        .collect())
}

fn force_column(dir: &Vec3, lever: &Vec3) -> Wrench6 {
    let m = lever.cross(dir);
    Wrench6::new(dir.x, dir.y, dir.z, m.x, m.y, m.z)
}

/// The 6×d wrench basis of a contact, moments about `origin`.
///
/// Column order: `t1, t2, n` for frictional contacts (just `n` when
/// frictionless), plus pure torsion `[0; n]` for soft contacts.
pub fn wrench_basis(contact: &Contact, origin: &Vec3) -> DMatrix<f64> {
    let lever = contact.position - origin;
    let f = &contact.frame;
    let mut cols: Vec<Wrench6> = match contact.model {
        FrictionModel::Frictionless => vec![force_column(&f.normal, &lever)],
        _ => vec![
            force_column(&f.t1, &lever),
            force_column(&f.t2, &lever),
            force_column(&f.normal, &lever),
        ],
    };
    if let FrictionModel::Soft { .. } = contact.model {
        let n = f.normal;
        cols.push(Wrench6::new(0.0, 0.0, 0.0, n.x, n.y, n.z));
    }
    DMatrix::from_iterator(6, cols.len(), cols.iter().flat_map(|c| c.iter().copied()))
}

/// Basis-coordinate intensity vectors of the elementary wrenches, in the
/// same order as [`elementary_wrenches`].
pub fn elementary_intensities(
    model: &FrictionModel,
    disc: &ConeDiscretization,
) -> Result<Vec<DVector<f64>>> {
    let (mu, gamma) = match *model {
        FrictionModel::Frictionless => return Ok(vec![DVector::from_element(1, 1.0)]),
        FrictionModel::Hard { mu } => (mu, None),
        FrictionModel::Soft { mu, gamma } => (mu, Some(gamma)),
    };
    disc.validate()?;
    let k = disc.edge_count;
    let mut out = Vec::with_capacity(disc.wrench_count(model));
    for j in 0..k {
        let theta = std::f64::consts::TAU * j as f64 / k as f64;
        let (s, c) = theta.sin_cos();
        match gamma {
            None => out.push(DVector::from_vec(vec![mu * c, mu * s, 1.0])),
            Some(g) => {
                let levels: &[f64] = if disc.include_torsion {
                    &[-1.0, 0.0, 1.0]
                } else {
                    &[0.0]
                };
                for &lvl in levels {
                    out.push(DVector::from_vec(vec![mu * c, mu * s, 1.0, lvl * g]));
                }
            }
        }
    }
    Ok(out)
}

/// Elementary wrenches `[e_j; (c - o) × e_j]` of one contact, plus the
/// torsion-augmented variants for soft contacts.
pub fn elementary_wrenches(
    contact: &Contact,
    origin: &Vec3,
    disc: &ConeDiscretization,
) -> Result<Vec<Wrench6>> {
    let lever = contact.position - origin;
    let edges = cone_edges(&contact.model, &contact.frame, disc)?;
    let n = contact.frame.normal;
    let mut out = Vec::with_capacity(disc.wrench_count(&contact.model));
    for e in &edges {
        let base = force_column(e, &lever);
        match contact.model {
            FrictionModel::Soft { gamma, .. } => {
                let levels: &[f64] = if disc.include_torsion {
                    &[-1.0, 0.0, 1.0]
                } else {
                    &[0.0]
                };
                for &lvl in levels {
                    let mut w = base;
                    let t = n * (lvl * gamma);
                    w[3] += t.x;
                    w[4] += t.y;
                    w[5] += t.z;
                    out.push(w);
                }
            }
            _ => out.push(base),
        }
    }
    Ok(out)
}
