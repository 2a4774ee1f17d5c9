//! Physical hand benchmarks: graspable size range, holding force, and
//! grasp stiffness identification.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::io::Read;

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use crate::closure::matrix_rank;
use crate::error::{Error, Result};
use crate::rigid::Vec3;

/// Object deformation (m) counted as crushing.
pub const CRUSH_DEFORMATION: f64 = 0.010;
/// Object translation (m) counted as slip.
pub const SLIP_TRANSLATION: f64 = 0.005;
/// Object rotation (rad) counted as slip.
pub const SLIP_ROTATION: f64 = 10.0 * std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandGeometry {
    /// Proximal and distal phalanx lengths (m).
    pub l1: f64,
    pub l2: f64,
    /// Palm half-width (m).
    pub l0: f64,
    /// Actuation torque (N·m).
    pub torque: f64,
}

impl HandGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("l1", self.l1),
            ("l2", self.l2),
            ("l0", self.l0),
            ("torque", self.torque),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "hand {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn finger_length(&self) -> f64 {
        self.l1 + self.l2
    }
}

/// Volumetric score: the range of graspable object diameters over the hand
/// span, `(π/2 ΔD) / (2L + 2L0)`.
pub fn q_grasp(delta_d: f64, hand: &HandGeometry) -> Result<f64> {
    hand.validate()?;
    if !(delta_d >= 0.0 && delta_d.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "diameter range must be non-negative, got {delta_d}"
        )));
    }
    Ok(FRAC_PI_2 * delta_d / (2.0 * hand.finger_length() + 2.0 * hand.l0))
}

/// One pull-out experiment along direction `phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullTrial {
    pub phi: f64,
    /// `(displacement m, force N)`, displacement non-decreasing.
    pub samples: Vec<(f64, f64)>,
}

impl PullTrial {
    pub fn validate(&self, index: usize) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::EmptyTrial(index));
        }
        if self.samples.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(Error::InvalidInput(format!(
                "trial {index}: displacements must be non-decreasing"
            )));
        }
        Ok(())
    }

    pub fn peak_force(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.1)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldResult {
    pub q_hold: f64,
    /// Force used: the weakest direction's peak.
    pub force: f64,
    pub peak_forces: Vec<f64>,
}

/// Holding score `F L / T_a`, with `F` the smallest per-direction peak pull
/// force.
pub fn q_hold(trials: &[PullTrial], hand: &HandGeometry) -> Result<HoldResult> {
    hand.validate()?;
    if trials.is_empty() {
        return Err(Error::EmptyTrial(0));
    }
    for (i, t) in trials.iter().enumerate() {
        t.validate(i)?;
    }
    let peak_forces: Vec<f64> = trials.iter().map(PullTrial::peak_force).collect();
    let force = peak_forces.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(HoldResult {
        q_hold: force * hand.finger_length() / hand.torque,
        force,
        peak_forces,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraspLabel {
    OpposedPinch,
    SphericalPinch,
}

/// Paired `(displacement, force)` samples. Averaging loading and unloading
/// branches is left to whoever produces the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StiffnessDataset {
    pub records: Vec<(Vec3, Vec3)>,
    pub grasp_label: GraspLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StiffnessFit {
    pub k: Matrix3<f64>,
    pub residual_rms: f64,
}

fn symmetric(p: &[f64]) -> Matrix3<f64> {
    Matrix3::new(p[0], p[1], p[2], p[1], p[3], p[4], p[2], p[4], p[5])
}

/// Least-squares symmetric `K` with `f ≈ K d`.
pub fn fit_stiffness(data: &StiffnessDataset) -> Result<StiffnessFit> {
    let n = data.records.len();
    if n < 6 {
        return Err(Error::InvalidInput(format!(
            "need at least 6 records, got {n}"
        )));
    }
    let d = DMatrix::from_fn(3, n, |r, c| data.records[c].0[r]);
    let rank = matrix_rank(&d);
    if rank < 3 {
        return Err(Error::RankDeficient { rank });
    }
    // unknowns (kxx, kxy, kxz, kyy, kyz, kzz)
    let mut a = DMatrix::zeros(3 * n, 6);
    let mut b = DVector::zeros(3 * n);
    for (i, (dv, fv)) in data.records.iter().enumerate() {
        let (x, y, z) = (dv.x, dv.y, dv.z);
        let rows = [
            [x, y, z, 0.0, 0.0, 0.0],
            [0.0, x, 0.0, y, z, 0.0],
            [0.0, 0.0, x, 0.0, y, z],
        ];
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                a[(3 * i + r, c)] = *v;
            }
            b[3 * i + r] = fv[r];
        }
    }
    let p = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|_| Error::Numerical("stiffness least squares"))?;
    let k = symmetric(p.as_slice());
    let sq: f64 = data
        .records
        .iter()
        .map(|(dv, fv)| (fv - k * dv).norm_squared())
        .sum();
    Ok(StiffnessFit {
        k,
        residual_rms: (sq / (3 * n) as f64).sqrt(),
    })
}

fn csv_error(what: &str, e: csv::Error) -> Error {
    let line = e
        .position()
        .map(|p| format!(" (line {})", p.line()))
        .unwrap_or_default();
    Error::InvalidInput(format!("{what} CSV{line}: {e}"))
}

#[derive(Deserialize)]
struct StiffnessRow {
    dx: f64,
    dy: f64,
    dz: f64,
    fx: f64,
    fy: f64,
    fz: f64,
}

/// Reads `dx,dy,dz,fx,fy,fz` rows.
pub fn read_stiffness_csv<R: Read>(input: R, grasp_label: GraspLabel) -> Result<StiffnessDataset> {
    let mut records = Vec::new();
    for row in csv::Reader::from_reader(input).deserialize::<StiffnessRow>() {
        let r = row.map_err(|e| csv_error("stiffness", e))?;
        records.push((Vec3::new(r.dx, r.dy, r.dz), Vec3::new(r.fx, r.fy, r.fz)));
    }
    Ok(StiffnessDataset {
        records,
        grasp_label,
    })
}

#[derive(Deserialize)]
struct PullRow {
    phi: f64,
    disp: f64,
    force: f64,
}

/// Reads `phi,disp,force` rows into one trial per distinct `phi`, in order
/// of first appearance.
pub fn read_pull_csv<R: Read>(input: R) -> Result<Vec<PullTrial>> {
    let mut trials: Vec<PullTrial> = Vec::new();
    let mut index: HashMap<u64, usize> = HashMap::new();
    for row in csv::Reader::from_reader(input).deserialize::<PullRow>() {
        let r = row.map_err(|e| csv_error("pull trial", e))?;
        let slot = *index.entry(r.phi.to_bits()).or_insert_with(|| {
            trials.push(PullTrial {
                phi: r.phi,
                samples: Vec::new(),
            });
            trials.len() - 1
        });
        trials[slot].samples.push((r.disp, r.force));
    }
    Ok(trials)
}
