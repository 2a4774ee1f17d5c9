//! Contact synthesis by descent on a signed closure measure.
//!
//! The measure is the distance from the origin to the elementary-wrench
//! hull while the origin is outside, and `-Q1` once it is strictly inside,
//! so it is negative exactly for force-closure grasps. Free contacts move in
//! chart coordinates a distance `λ` along the normalized central
//! finite-difference gradient, halving `λ` whenever a step fails to lower
//! the measure.

mod surface;

use std::io::Write;

use nalgebra::Vector2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closure::{force_closure, force_closure_of, matrix_rank, ClosureBackend};
use crate::contact::{ConeDiscretization, FrictionModel};
use crate::error::{Error, Result};
use crate::grasp::{build_grasp_matrix, build_wrench_set, GraspRecord};
use crate::hull::{boundary_distance, min_norm_point, STRICT_TOL};
use crate::rigid::Vec3;

pub use surface::{SurfaceCoords, SurfaceModel, SurfacePoint, POLE_MARGIN};

/// Number of step halvings tried before declaring a point stationary.
pub const MAX_HALVINGS: usize = 20;
/// `LocalOptimum` stops once an accepted step improves less than this.
pub const LOCAL_OPTIMUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthesisMode {
    /// Stop at the first iterate with a negative measure.
    StopAtClosure,
    /// Keep descending until the improvement stalls.
    LocalOptimum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisConfig {
    pub finger_count: usize,
    pub model: FrictionModel,
    pub disc: ConeDiscretization,
    /// Initial step length `λ` of each iteration, in chart units.
    pub step: f64,
    /// Finite-difference step in chart units.
    pub fd_epsilon: f64,
    pub max_iters: usize,
    pub mode: SynthesisMode,
    /// Contacts that never move; they come first in the result.
    pub fixed_contacts: Vec<SurfacePoint>,
    /// Starting points of the free contacts; random when `None`.
    pub initial_contacts: Option<Vec<SurfacePoint>>,
    pub seed: u64,
}

impl SynthesisConfig {
    pub fn new(finger_count: usize, model: FrictionModel) -> Self {
        Self {
            finger_count,
            model,
            disc: ConeDiscretization::default(),
            step: 0.05,
            fd_epsilon: 1e-4,
            max_iters: 500,
            mode: SynthesisMode::StopAtClosure,
            fixed_contacts: Vec::new(),
            initial_contacts: None,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.finger_count < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 fingers, got {}",
                self.finger_count
            )));
        }
        if !(self.step > 0.0) || !(self.fd_epsilon > 0.0) {
            return Err(Error::InvalidInput(
                "step and finite-difference epsilon must be positive".into(),
            ));
        }
        if self.fixed_contacts.len() >= self.finger_count {
            return Err(Error::InvalidInput(
                "every contact is fixed; nothing to optimize".into(),
            ));
        }
        if let Some(init) = &self.initial_contacts {
            if init.len() != self.free_count() {
                return Err(Error::DimensionMismatch {
                    expected: self.free_count(),
                    actual: init.len(),
                });
            }
        }
        self.model.validate()?;
        self.disc.validate()
    }

    pub fn free_count(&self) -> usize {
        self.finger_count - self.fixed_contacts.len().min(self.finger_count)
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub measure: f64,
    /// Chart parameters of every contact, fixed ones first.
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub record: GraspRecord,
    pub points: Vec<SurfacePoint>,
    pub trace: Vec<TraceRow>,
    pub final_measure: f64,
    /// Re-verified by the closure module.
    pub force_closure: bool,
    pub iterations: usize,
}

fn record_from(
    points: &[SurfacePoint],
    model: FrictionModel,
    torque_origin: Vec3,
) -> Result<GraspRecord> {
    let contacts = points
        .iter()
        .map(|p| p.contact(model))
        .collect::<Result<Vec<_>>>()?;
    GraspRecord::new(contacts, torque_origin)
}

/// Signed closure measure of contacts placed at `points`: the distance from
/// the origin to the elementary-wrench hull when outside, `-Q1` when
/// strictly inside, 0 on the boundary or for rank-deficient grasps.
pub fn signed_measure(
    points: &[SurfacePoint],
    model: FrictionModel,
    disc: &ConeDiscretization,
    torque_origin: Vec3,
) -> Result<f64> {
    let record = record_from(points, model, torque_origin)?;
    let ws = build_wrench_set(&record, disc)?;
    let ps = ws.union_points();
    let scale = ps.scale();
    let near = min_norm_point(&ps);
    if near.distance > STRICT_TOL * scale {
        return Ok(near.distance);
    }
    let rank = matrix_rank(&build_grasp_matrix(&record).columns);
    if !force_closure_of(&ws, rank, ClosureBackend::Lp)? {
        return Ok(0.0);
    }
    match boundary_distance(&ps) {
        Ok(q1) => Ok(-q1),
        Err(Error::OriginOutside) => Ok(0.0),
        Err(e) => Err(e),
    }
}

struct Problem<'a> {
    surface: &'a SurfaceModel,
    cfg: &'a SynthesisConfig,
    origin: Vec3,
}

impl Problem<'_> {
    fn measure(&self, points: &[SurfacePoint]) -> Result<f64> {
        signed_measure(points, self.cfg.model, &self.cfg.disc, self.origin)
    }

    fn gradient(&self, points: &[SurfacePoint], fixed: usize) -> Result<Vec<Vector2<f64>>> {
        let eps = self.cfg.fd_epsilon;
        let mut grad = Vec::with_capacity(points.len() - fixed);
        let mut probe = points.to_vec();
        for i in fixed..points.len() {
            let mut g = Vector2::zeros();
            for k in 0..2 {
                let mut d = Vector2::zeros();
                d[k] = eps;
                probe[i] = self.surface.displaced(&points[i], d)?;
                let plus = self.measure(&probe)?;
                probe[i] = self.surface.displaced(&points[i], -d)?;
                let minus = self.measure(&probe)?;
                g[k] = (plus - minus) / (2.0 * eps);
            }
            probe[i] = points[i];
            grad.push(g);
        }
        Ok(grad)
    }

    fn stepped(
        &self,
        points: &[SurfacePoint],
        fixed: usize,
        grad: &[Vector2<f64>],
        step: f64,
    ) -> Result<Vec<SurfacePoint>> {
        let mut out = points.to_vec();
        for (i, g) in grad.iter().enumerate() {
            out[fixed + i] = self.surface.displaced(&points[fixed + i], -g * step)?;
        }
        Ok(out)
    }
}

fn trace_row(iter: usize, measure: f64, points: &[SurfacePoint]) -> TraceRow {
    TraceRow {
        iter,
        measure,
        params: points.iter().flat_map(|p| p.params()).collect(),
    }
}

/// Places `cfg.finger_count` contacts on `surface` by descent on the signed
/// closure measure. Fails with [`Error::NoConvergence`], carrying the best
/// iterate, when no force-closure grasp is reached.
pub fn synthesize(surface: &SurfaceModel, cfg: &SynthesisConfig) -> Result<SynthesisResult> {
    surface.validate()?;
    cfg.validate()?;
    let problem = Problem {
        surface,
        cfg,
        origin: surface.torque_origin(),
    };
    let fixed = cfg.fixed_contacts.len();
    let mut points = cfg.fixed_contacts.clone();
    match &cfg.initial_contacts {
        Some(init) => points.extend(init.iter().copied()),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for _ in 0..cfg.free_count() {
                points.push(surface.sample_point(&mut rng)?);
            }
        }
    }

    let mut measure = problem.measure(&points)?;
    let mut trace = vec![trace_row(0, measure, &points)];
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        if cfg.mode == SynthesisMode::StopAtClosure && measure < 0.0 {
            break;
        }
        let grad = problem.gradient(&points, fixed)?;
        if grad.iter().all(|g| g.norm() == 0.0) {
            break;
        }
        let gnorm = grad.iter().map(|g| g.norm_squared()).sum::<f64>().sqrt();
        let mut step = cfg.step / gnorm;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let cand = problem.stepped(&points, fixed, &grad, step)?;
            let m = problem.measure(&cand)?;
            if m < measure {
                accepted = Some((cand, m));
                break;
            }
            step /= 2.0;
        }
        let Some((cand, m)) = accepted else {
            break;
        };
        let improvement = measure - m;
        points = cand;
        measure = m;
        iterations += 1;
        trace.push(trace_row(iterations, measure, &points));
        if cfg.mode == SynthesisMode::LocalOptimum && improvement < LOCAL_OPTIMUM_TOL {
            break;
        }
    }

    let record = record_from(&points, cfg.model, problem.origin)?;
    let closed = force_closure(&record, &cfg.disc)?;
    let result = SynthesisResult {
        record,
        points,
        trace,
        final_measure: measure,
        force_closure: closed,
        iterations,
    };
    if measure < 0.0 && closed {
        Ok(result)
    } else {
        Err(Error::NoConvergence(Box::new(result)))
    }
}

/// Independent runs for several seeds, in parallel, returned in seed order.
pub fn synthesize_seeds(
    surface: &SurfaceModel,
    cfg: &SynthesisConfig,
    seeds: &[u64],
) -> Vec<Result<SynthesisResult>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let mut c = cfg.clone();
            c.seed = seed;
            synthesize(surface, &c)
        })
        .collect()
}

/// CSV header for a trace: `iter,measure` then per-contact parameters.
pub fn trace_header(surface: &SurfaceModel, contacts: usize) -> Vec<String> {
    let mut h = vec!["iter".to_string(), "measure".to_string()];
    for c in 0..contacts {
        for name in surface.param_names() {
            h.push(format!("c{c}_{name}"));
        }
    }
    h
}

pub fn write_trace_csv<W: Write>(
    surface: &SurfaceModel,
    result: &SynthesisResult,
    out: W,
) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidInput(format!("trace output: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trace_header(surface, result.points.len()))
        .map_err(io)?;
    for row in &result.trace {
        let mut rec = vec![row.iter.to_string(), row.measure.to_string()];
        rec.extend(row.params.iter().map(|p| p.to_string()));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidInput(format!("trace output: {e}")))?;
    Ok(())
}
