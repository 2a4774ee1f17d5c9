//! Scene and report files. JSON, SI units, inward normals. The schemas live
//! in `schemas/` at the repository root.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::closure::QualityReport;
use crate::contact::{Contact, FrictionModel};
use crate::error::{Error, Result};
use crate::grasp::GraspRecord;
use crate::rigid::{TangentFrame, Vec3};
use crate::synthesis::SurfaceModel;

/// The `"none"` keyword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoObject {
    #[serde(rename = "none")]
    None,
}

/// The grasped object: a surface descriptor, or `"none"` for contacts-only
/// scenes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SceneObject {
    None(NoObject),
    Surface(SurfaceModel),
}

impl SceneObject {
    pub fn none() -> Self {
        SceneObject::None(NoObject::None)
    }

    pub fn surface(&self) -> Option<&SurfaceModel> {
        match self {
            SceneObject::Surface(s) => Some(s),
            SceneObject::None(_) => None,
        }
    }
}

impl Default for SceneObject {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContactKind {
    Frictionless,
    Hard,
    Soft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneContact {
    pub position: Vec3,
    /// Inward unit normal (normalized on load).
    pub normal: Vec3,
    pub model: ContactKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// First tangent of the contact frame; chosen automatically when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<Vec3>,
}

impl SceneContact {
    pub fn from_contact(c: &Contact) -> Self {
        let (model, mu, gamma) = match c.model {
            FrictionModel::Frictionless => (ContactKind::Frictionless, None, None),
            FrictionModel::Hard { mu } => (ContactKind::Hard, Some(mu), None),
            FrictionModel::Soft { mu, gamma } => (ContactKind::Soft, Some(mu), Some(gamma)),
        };
        Self {
            position: c.position,
            normal: c.frame.normal,
            model,
            mu,
            gamma,
            t1: Some(c.frame.t1),
        }
    }

    pub fn friction_model(&self) -> Result<FrictionModel> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| {
                Error::InvalidInput(
                    format!("{:?} contact needs `{name}`", self.model).to_lowercase(),
                )
            })
        };
        let m = match self.model {
            ContactKind::Frictionless => FrictionModel::Frictionless,
            ContactKind::Hard => FrictionModel::Hard {
                mu: need(self.mu, "mu")?,
            },
            ContactKind::Soft => FrictionModel::Soft {
                mu: need(self.mu, "mu")?,
                gamma: need(self.gamma, "gamma")?,
            },
        };
        m.validate()?;
        Ok(m)
    }

    pub fn to_contact(&self) -> Result<Contact> {
        let model = self.friction_model()?;
        match &self.t1 {
            Some(t1) => Contact::with_frame(
                self.position,
                TangentFrame::with_tangent(&self.normal, t1)?,
                model,
            ),
            None => Contact::new(self.position, self.normal, model),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneGrasp {
    pub name: String,
    pub contacts: Vec<SceneContact>,
    /// Hand Jacobian rows (6 per contact).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jacobian: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneOptions {
    #[serde(default = "default_cone_edges")]
    pub cone_edges: usize,
    #[serde(default = "default_moment_scale")]
    pub moment_scale: f64,
}

fn default_cone_edges() -> usize {
    8
}

fn default_moment_scale() -> f64 {
    1.0
}

impl Default for SceneOptions {
    fn default() -> Self {
        Self {
            cone_edges: default_cone_edges(),
            moment_scale: default_moment_scale(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default)]
    pub object: SceneObject,
    pub torque_origin: Vec3,
    pub grasps: Vec<SceneGrasp>,
    #[serde(default)]
    pub options: SceneOptions,
}

impl SceneFile {
    /// Parses scene JSON; errors name the offending field and position.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." || path.is_empty() {
                Error::InvalidInput(inner.to_string())
            } else {
                Error::InvalidInput(format!("field `{path}`: {inner}"))
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    /// Grasp records in file order, with errors naming the grasp.
    pub fn records(&self) -> Result<Vec<GraspRecord>> {
        self.grasps
            .iter()
            .map(|g| {
                grasp_record(g, self.torque_origin)
                    .map_err(|e| Error::InvalidInput(format!("grasp `{}`: {e}", g.name)))
            })
            .collect()
    }
}

fn grasp_record(g: &SceneGrasp, torque_origin: Vec3) -> Result<GraspRecord> {
    let contacts = g
        .contacts
        .iter()
        .map(SceneContact::to_contact)
        .collect::<Result<Vec<_>>>()?;
    let record = GraspRecord::new(contacts, torque_origin)?;
    match &g.jacobian {
        None => Ok(record),
        Some(rows) => {
            let cols = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|r| r.len() != cols) {
                return Err(Error::InvalidInput("jacobian rows differ in length".into()));
            }
            let j = DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]);
            record.with_jacobian(j)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspReport {
    pub name: String,
    #[serde(flatten)]
    pub report: QualityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub toolkit: String,
    pub version: String,
    pub seed: u64,
    pub cone_edges: usize,
    pub moment_scale: f64,
    pub nu_samples: usize,
    pub mu_samples: usize,
    pub grasps: Vec<GraspReport>,
    /// Wall time in milliseconds; only present when requested, since it
    /// breaks byte-identical reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub metric: String,
    pub cone_edges: usize,
    pub moment_scale: f64,
    pub ranking: Vec<RankEntry>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENE: &str = r#"{
        "object": {"kind": "sphere", "center": [0, 0, 0], "radius": 1},
        "torque_origin": [0, 0, 0],
        "grasps": [{"name": "pinch", "contacts": [
            {"position": [1, 0, 0], "normal": [-1, 0, 0], "model": "soft", "mu": 0.5, "gamma": 0.1},
            {"position": [-1, 0, 0], "normal": [1, 0, 0], "model": "soft", "mu": 0.5, "gamma": 0.1}
        ]}]
    }"#;

    #[test]
    fn parses_with_defaults() {
        let s = SceneFile::from_json(SCENE).unwrap();
        assert_eq!(s.options, SceneOptions::default());
        assert!(s.object.surface().is_some());
        let r = s.records().unwrap();
        assert_eq!(r[0].contacts.len(), 2);
    }

    #[test]
    fn none_object_round_trips() {
        let text = SCENE.replace(
            r#"{"kind": "sphere", "center": [0, 0, 0], "radius": 1}"#,
            r#""none""#,
        );
        let s = SceneFile::from_json(&text).unwrap();
        assert_eq!(s.object, SceneObject::none());
        assert!(s.to_json().contains(r#""object": "none""#));
        assert_eq!(SceneFile::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = SCENE.replacen(r#""mu": 0.5"#, r#""mu": "high""#, 1);
        let e = SceneFile::from_json(&bad).unwrap_err().to_string();
        assert!(e.contains("grasps[0].contacts[0].mu"), "{e}");
        let missing = SCENE.replacen(r#", "gamma": 0.1"#, "", 1);
        let e = SceneFile::from_json(&missing)
            .unwrap()
            .records()
            .unwrap_err()
            .to_string();
        assert!(e.contains("pinch") && e.contains("gamma"), "{e}");
        let extra = SCENE.replacen(r#""model": "soft""#, r#""model": "soft", "colour": 1"#, 1);
        assert!(SceneFile::from_json(&extra).is_err());
    }

    #[test]
    fn contact_round_trip_keeps_the_frame() {
        let s = SceneFile::from_json(SCENE).unwrap();
        let c = s.records().unwrap()[0].contacts[0];
        let back = SceneContact::from_contact(&c).to_contact().unwrap();
        assert_eq!(back, c);
    }
}
