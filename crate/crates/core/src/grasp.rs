//! Multi-contact grasp records, the grasp matrix and elementary-wrench sets.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::contact::{
    elementary_wrenches, wrench_basis, ConeDiscretization, Contact, FrictionModel, Wrench6,
};
use crate::error::{Error, Result};
use crate::hull::PointSet;
use crate::rigid::{Transform, Twist, Vec3};

/// Hand approach parametrization, stored with a grasp for database use.
/// Nothing in the toolkit interprets palm geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum ApproachParam {
    /// Approach direction, target point on the object, roll about the
    /// approach direction and the hand preshape.
    Berenson {
        approach_dir: Vec3,
        target_point: Vec3,
        roll: f64,
        preshape: Vec<f64>,
    },
    /// Surface coordinates of the approach point, roll and finger spread.
    Pelossof {
        eta: f64,
        zeta: f64,
        roll: f64,
        spread: f64,
    },
}

impl ApproachParam {
    pub fn berenson(
        approach_dir: Vec3,
        target_point: Vec3,
        roll: f64,
        preshape: Vec<f64>,
    ) -> Result<Self> {
        let n = approach_dir.norm();
        if !(n > 1e-12) {
            return Err(Error::ZeroNormal);
        }
        Ok(ApproachParam::Berenson {
            approach_dir: approach_dir / n,
            target_point,
            roll,
            preshape,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let ApproachParam::Berenson { approach_dir, .. } = self {
            if (approach_dir.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(
                    "approach direction is not a unit vector".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspRecord {
    pub contacts: Vec<Contact>,
    pub torque_origin: Vec3,
    /// `6·n_c × h` map from joint rates to fingertip twists.
    #[serde(default)]
    pub hand_jacobian: Option<DMatrix<f64>>,
    #[serde(default)]
    pub approach: Option<ApproachParam>,
}

impl GraspRecord {
    pub fn new(contacts: Vec<Contact>, torque_origin: Vec3) -> Result<Self> {
        let r = Self {
            contacts,
            torque_origin,
            hand_jacobian: None,
            approach: None,
        };
        r.validate()?;
        Ok(r)
    }

    /// Contacts on a sphere at the given outward directions, with inward
    /// normals and the torque origin at the center.
    pub fn on_sphere(
        center: Vec3,
        radius: f64,
        directions: &[Vec3],
        model: FrictionModel,
    ) -> Result<Self> {
        let contacts = directions
            .iter()
            .map(|d| {
                let n = d.norm();
                if !(n > 1e-12) {
                    return Err(Error::ZeroNormal);
                }
                Contact::new(center + d * (radius / n), -d, model)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(contacts, center)
    }

    pub fn with_jacobian(mut self, jacobian: DMatrix<f64>) -> Result<Self> {
        self.hand_jacobian = Some(jacobian);
        self.validate()?;
        Ok(self)
    }

    pub fn with_approach(mut self, approach: ApproachParam) -> Result<Self> {
        approach.validate()?;
        self.approach = Some(approach);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.contacts.is_empty() {
            return Err(Error::InvalidInput(
                "a grasp needs at least one contact".into(),
            ));
        }
        for c in &self.contacts {
            c.model.validate()?;
        }
        if let Some(j) = &self.hand_jacobian {
            if j.nrows() != 6 * self.contacts.len() {
                return Err(Error::DimensionMismatch {
                    expected: 6 * self.contacts.len(),
                    actual: j.nrows(),
                });
            }
        }
        if let Some(a) = &self.approach {
            a.validate()?;
        }
        Ok(())
    }

    pub fn contact_count(&self) -> usize {
        self.contacts.len()
    }

    /// Applies a rigid motion to every contact and to the torque origin.
    pub fn transformed(&self, tf: &Transform) -> Self {
        Self {
            contacts: self.contacts.iter().map(|c| c.transformed(tf)).collect(),
            torque_origin: tf.apply_point(&self.torque_origin),
            hand_jacobian: self.hand_jacobian.clone(),
            approach: self.approach.clone(),
        }
    }

    pub fn with_torque_origin(&self, origin: Vec3) -> Self {
        Self {
            torque_origin: origin,
            ..self.clone()
        }
    }
}

/// The grasp matrix `G`, `6 × (n_l + 3 n_f + 4 n_s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspMatrix {
    pub columns: DMatrix<f64>,
    pub contact_spans: Vec<Range<usize>>,
}

impl GraspMatrix {
    pub fn ncols(&self) -> usize {
        self.columns.ncols()
    }

    /// Net wrench `G l` for an intensity vector `l`.
    pub fn apply(&self, intensities: &DVector<f64>) -> Result<DVector<f64>> {
        if intensities.len() != self.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.ncols(),
                actual: intensities.len(),
            });
        }
        Ok(&self.columns * intensities)
    }

    /// Divides the moment rows by `rho` (a characteristic length).
    pub fn with_moment_scale(&self, rho: f64) -> Self {
        let mut m = self.columns.clone();
        m.rows_mut(3, 3).unscale_mut(rho);
        Self {
            columns: m,
            contact_spans: self.contact_spans.clone(),
        }
    }
}

pub fn build_grasp_matrix(record: &GraspRecord) -> GraspMatrix {
    let mut cols = Vec::new();
    let mut spans = Vec::with_capacity(record.contacts.len());
    for c in &record.contacts {
        let b = wrench_basis(c, &record.torque_origin);
        let start = cols.len();
        cols.extend(b.column_iter().map(|col| col.into_owned()));
        spans.push(start..cols.len());
    }
    GraspMatrix {
        columns: DMatrix::from_columns(&cols),
        contact_spans: spans,
    }
}

/// Elementary wrenches of every contact, plus the flat `6 × Σk_i` view.
#[derive(Debug, Clone, PartialEq)]
pub struct WrenchSet {
    pub per_contact: Vec<Vec<Wrench6>>,
    pub flat: DMatrix<f64>,
    pub origin: Vec3,
}

impl WrenchSet {
    pub fn from_per_contact(per_contact: Vec<Vec<Wrench6>>, origin: Vec3) -> Self {
        let cols: Vec<Wrench6> = per_contact.iter().flatten().copied().collect();
        let flat =
            DMatrix::from_iterator(6, cols.len(), cols.iter().flat_map(|c| c.iter().copied()));
        Self {
            per_contact,
            flat,
            origin,
        }
    }

    pub fn len(&self) -> usize {
        self.flat.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Divides every moment component by `rho`.
    pub fn with_moment_scale(&self, rho: f64) -> Self {
        let per: Vec<Vec<Wrench6>> = self
            .per_contact
            .iter()
            .map(|ws| {
                ws.iter()
                    .map(|w| {
                        let mut w = *w;
                        for i in 3..6 {
                            w[i] /= rho;
                        }
                        w
                    })
                    .collect()
            })
            .collect();
        Self::from_per_contact(per, self.origin)
    }

    /// The union of all elementary wrenches as a point set in R^6.
    pub fn union_points(&self) -> PointSet {
        PointSet::from_columns(&self.flat)
    }
}

pub fn build_wrench_set(record: &GraspRecord, disc: &ConeDiscretization) -> Result<WrenchSet> {
    let per = record
        .contacts
        .iter()
        .map(|c| elementary_wrenches(c, &record.torque_origin, disc))
        .collect::<Result<Vec<_>>>()?;
    Ok(WrenchSet::from_per_contact(per, record.torque_origin))
}

/// Fingertip twists `J q̇`, split into one twist per contact. Each twist is
/// referred to its contact point.
pub fn fingertip_velocities(
    record: &GraspRecord,
    joint_rates: &DVector<f64>,
) -> Result<Vec<Twist>> {
    let j = record
        .hand_jacobian
        .as_ref()
        .ok_or(Error::MissingJacobian)?;
    if j.ncols() != joint_rates.len() {
        return Err(Error::DimensionMismatch {
            expected: j.ncols(),
            actual: joint_rates.len(),
        });
    }
    if j.nrows() != 6 * record.contacts.len() {
        return Err(Error::DimensionMismatch {
            expected: 6 * record.contacts.len(),
            actual: j.nrows(),
        });
    }
    let v = j * joint_rates;
    Ok(record
        .contacts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let s = 6 * i;
            Twist::new(
                Vec3::new(v[s], v[s + 1], v[s + 2]),
                Vec3::new(v[s + 3], v[s + 4], v[s + 5]),
                c.position,
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigid::reref_wrench;
    use crate::rigid::Wrench;
    use rand::{Rng, SeedableRng};

    fn mixed_record() -> GraspRecord {
        GraspRecord::new(
            vec![
                Contact::new(
                    Vec3::new(1.0, 0.0, 0.0),
                    -Vec3::x(),
                    FrictionModel::Frictionless,
                )
                .unwrap(),
                Contact::new(
                    Vec3::new(0.0, 1.0, 0.0),
                    -Vec3::y(),
                    FrictionModel::Hard { mu: 0.5 },
                )
                .unwrap(),
                Contact::new(
                    Vec3::new(0.0, 0.0, 1.0),
                    -Vec3::z(),
                    FrictionModel::Soft {
                        mu: 0.5,
                        gamma: 0.1,
                    },
                )
                .unwrap(),
            ],
            Vec3::zeros(),
        )
        .unwrap()
    }

    #[test]
    fn column_tally() {
        let g = build_grasp_matrix(&mixed_record());
        assert_eq!(g.ncols(), 1 + 3 + 4);
        assert_eq!(g.contact_spans, vec![0..1, 1..4, 4..8]);
    }

    #[test]
    fn single_frictionless_at_origin() {
        let r = GraspRecord::new(
            vec![Contact::new(Vec3::zeros(), Vec3::z(), FrictionModel::Frictionless).unwrap()],
            Vec3::zeros(),
        )
        .unwrap();
        let g = build_grasp_matrix(&r);
        assert_eq!(g.columns.as_slice(), &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let ws = build_wrench_set(&r, &ConeDiscretization::default()).unwrap();
        assert_eq!(ws.flat, g.columns);
    }

    #[test]
    fn wrench_set_counts() {
        let hard = |p: Vec3| Contact::new(p, -p, FrictionModel::Hard { mu: 0.5 }).unwrap();
        let soft = |p: Vec3| {
            Contact::new(
                p,
                -p,
                FrictionModel::Soft {
                    mu: 0.5,
                    gamma: 0.1,
                },
            )
            .unwrap()
        };
        let d = ConeDiscretization::default();
        let r = GraspRecord::new(vec![hard(Vec3::x()), hard(-Vec3::x())], Vec3::zeros()).unwrap();
        assert_eq!(build_grasp_matrix(&r).ncols(), 6);
        assert_eq!(build_wrench_set(&r, &d).unwrap().len(), 16);
        let r = GraspRecord::new(vec![soft(Vec3::x()), soft(-Vec3::x())], Vec3::zeros()).unwrap();
        let ws = build_wrench_set(&r, &d).unwrap();
        assert_eq!(ws.len(), 48);
        let flat: Vec<Wrench6> = ws.per_contact.iter().flatten().copied().collect();
        for (j, w) in flat.iter().enumerate() {
            for i in 0..6 {
                assert_eq!(ws.flat[(i, j)], w[i]);
            }
        }
    }

    #[test]
    fn superposition_and_reref() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let r = mixed_record();
        let g = build_grasp_matrix(&r);
        for _ in 0..50 {
            let l1 = DVector::from_fn(8, |_, _| rng.random_range(-1.0..1.0));
            let l2 = DVector::from_fn(8, |_, _| rng.random_range(-1.0..1.0));
            let sum = g.apply(&(&l1 + &l2)).unwrap();
            let parts = g.apply(&l1).unwrap() + g.apply(&l2).unwrap();
            assert!((sum - parts).amax() < 1e-14);
        }
        let o2 = Vec3::new(0.4, -0.3, 0.9);
        let g2 = build_grasp_matrix(&r.with_torque_origin(o2));
        for j in 0..g.ncols() {
            let c = g.columns.column(j);
            let w = Wrench::new(
                Vec3::new(c[0], c[1], c[2]),
                Vec3::new(c[3], c[4], c[5]),
                Vec3::zeros(),
            );
            let moved = reref_wrench(&w, &o2).to_vector();
            for i in 0..6 {
                assert!((moved[i] - g2.columns[(i, j)]).abs() < 1e-12);
            }
        }
        assert!(g.apply(&DVector::zeros(3)).is_err());
    }

    #[test]
    fn jacobian_velocities() {
        let c = Contact::new(Vec3::zeros(), Vec3::z(), FrictionModel::Hard { mu: 0.5 }).unwrap();
        let r = GraspRecord::new(vec![c], Vec3::zeros())
            .unwrap()
            .with_jacobian(DMatrix::identity(6, 6))
            .unwrap();
        let mut qd = DVector::zeros(6);
        qd[2] = 1.0;
        let t = fingertip_velocities(&r, &qd).unwrap();
        assert_eq!(t[0].linear, Vec3::z());
        assert_eq!(t[0].angular, Vec3::zeros());
        let t = fingertip_velocities(&r, &DVector::zeros(6)).unwrap();
        assert_eq!(t[0].linear, Vec3::zeros());
        assert_eq!(
            fingertip_velocities(&r, &DVector::zeros(5)),
            Err(Error::DimensionMismatch {
                expected: 6,
                actual: 5
            })
        );
        let bare = GraspRecord::new(vec![c], Vec3::zeros()).unwrap();
        assert_eq!(
            fingertip_velocities(&bare, &qd),
            Err(Error::MissingJacobian)
        );
        assert!(bare.clone().with_jacobian(DMatrix::zeros(5, 2)).is_err());
    }

    #[test]
    fn random_jacobian_matches_row_dots() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let contacts = (0..3)
            .map(|i| {
                Contact::new(
                    Vec3::new(i as f64, 0.0, 0.0),
                    Vec3::z(),
                    FrictionModel::Frictionless,
                )
                .unwrap()
            })
            .collect();
        let j = DMatrix::from_fn(18, 7, |_, _| rng.random_range(-2.0..2.0));
        let qd = DVector::from_fn(7, |_, _| rng.random_range(-1.0..1.0));
        let r = GraspRecord::new(contacts, Vec3::zeros())
            .unwrap()
            .with_jacobian(j.clone())
            .unwrap();
        let twists = fingertip_velocities(&r, &qd).unwrap();
        for (i, t) in twists.iter().enumerate() {
            let v = t.to_vector();
            for k in 0..6 {
                let mut dot = 0.0;
                for c in 0..7 {
                    dot += j[(6 * i + k, c)] * qd[c];
                }
                assert!((dot - v[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn approach_records() {
        let a = ApproachParam::berenson(
            Vec3::new(0.0, 0.0, -2.0),
            Vec3::zeros(),
            0.3,
            vec![0.1, 0.2],
        )
        .unwrap();
        if let ApproachParam::Berenson { approach_dir, .. } = &a {
            assert!((approach_dir.norm() - 1.0).abs() < 1e-12);
        }
        let r = mixed_record().with_approach(a).unwrap();
        let json = serde_json::to_string(&r.approach).unwrap();
        let back: Option<ApproachParam> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r.approach);
        let p = ApproachParam::Pelossof {
            eta: 0.2,
            zeta: 1.1,
            roll: 0.0,
            spread: 0.4,
        };
        assert!(p.validate().is_ok());
        assert!(ApproachParam::berenson(Vec3::zeros(), Vec3::zeros(), 0.0, vec![]).is_err());
    }
}
