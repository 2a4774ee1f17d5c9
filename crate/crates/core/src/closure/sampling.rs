//! Monte Carlo metrics: the wrench-space volume proxy `ν` and the
//! task-ellipsoid measure `μ`.

use nalgebra::{DMatrix, DVector, Matrix6, SymmetricEigen, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::report::Estimate;
use super::{force_closure_of, matrix_rank, ClosureBackend};
use crate::contact::{elementary_intensities, ConeDiscretization, FrictionModel};
use crate::error::{Error, Result};
use crate::grasp::{build_grasp_matrix, build_wrench_set, GraspMatrix, GraspRecord};
use crate::hull::{ray_extent, PointSet};

pub const DEFAULT_NU_SAMPLES: usize = 4096;
pub const DEFAULT_MU_SAMPLES: usize = 512;
const MIN_NU_SAMPLES: usize = 1000;
const NU_BATCHES: usize = 10;
const MU_BATCHES: usize = 8;
const MAX_TORSION_TRIES: usize = 1_000_000;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard Gaussian in R^3 conditioned on the circular cone of
/// half-angle `atan(mu)` about `+z`: chi-3 radius times a direction
/// uniform on the spherical cap.
fn cone_gaussian(mu: f64, rng: &mut ChaCha8Rng) -> [f64; 3] {
    let r = (0..3).map(|_| gaussian(rng).powi(2)).sum::<f64>().sqrt();
    let cos_a = 1.0 / (1.0 + mu * mu).sqrt();
    let cos_t = cos_a + (1.0 - cos_a) * rng.random::<f64>();
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    [r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t]
}

/// Standard Gaussian on one contact's intensity block conditioned on its
/// friction cone.
fn block_sample(model: &FrictionModel, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) -> Result<()> {
    match *model {
        FrictionModel::Frictionless => out.push(gaussian(rng).abs()),
        FrictionModel::Hard { mu } => out.extend(cone_gaussian(mu, rng)),
        FrictionModel::Soft { mu, gamma } => {
            for _ in 0..MAX_TORSION_TRIES {
                let f = cone_gaussian(mu, rng);
                let tau = if gamma == 0.0 { 0.0 } else { gaussian(rng) };
                if tau.abs() <= gamma * f[2] {
                    out.extend(f);
                    out.push(tau);
                    return Ok(());
                }
            }
            return Err(Error::Numerical(
                "torsion rejection sampling did not accept",
            ));
        }
    }
    Ok(())
}

/// Intensity vector uniform in `B^n ∩ FC`.
fn ball_cone_sample(
    models: &[FrictionModel],
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<DVector<f64>> {
    let mut v = Vec::with_capacity(n);
    for m in models {
        block_sample(m, rng, &mut v)?;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let radius = rng.random::<f64>().powf(1.0 / n as f64);
    Ok(DVector::from_vec(v) * (radius / norm))
}

/// `√det` of the sample covariance of 6-vectors stored as matrix columns.
fn covariance_volume(w: &DMatrix<f64>) -> f64 {
    let n = w.ncols() as f64;
    let mean = w.column_mean();
    let mut cov = Matrix6::zeros();
    for col in w.column_iter() {
        let d = Vector6::from_iterator(col.iter().zip(mean.iter()).map(|(a, b)| a - b));
        cov += d * d.transpose();
    }
    cov /= n - 1.0;
    cov.determinant().max(0.0).sqrt()
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// `ν` proxy for a grasp matrix with the given contact models.
pub(super) fn nu_of(
    g: &GraspMatrix,
    models: &[FrictionModel],
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    if samples < MIN_NU_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "nu needs at least {MIN_NU_SAMPLES} samples, got {samples}"
        )));
    }
    if matrix_rank(&g.columns) < 6 {
        return Ok(Estimate::zero());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.ncols();
    let mut image = DMatrix::zeros(6, samples);
    for s in 0..samples {
        let l = ball_cone_sample(models, n, &mut rng)?;
        image.set_column(s, &(&g.columns * l));
    }
    let value = covariance_volume(&image);
    let per = samples / NU_BATCHES;
    let batches: Vec<f64> = (0..NU_BATCHES)
        .map(|b| covariance_volume(&image.columns(b * per, per).into_owned()))
        .collect();
    Ok(Estimate {
        value,
        stderr: mean_and_stderr(&batches).1,
    })
}

/// Volume proxy for `G(B^n ∩ FC)`: `√det` of the covariance of `G l` for
/// `l` uniform in the unit ball intersected with the friction cones.
///
/// Only comparable between grasps under the same sample budget.
pub fn quality_nu(record: &GraspRecord, samples: usize, seed: u64) -> Result<Estimate> {
    record.validate()?;
    let models: Vec<FrictionModel> = record.contacts.iter().map(|c| c.model).collect();
    nu_of(&build_grasp_matrix(record), &models, samples, seed)
}

/// Task ellipsoid `{w : wᵀ Q w + wᵀ a ≤ β²}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskEllipsoid {
    pub q: Matrix6<f64>,
    pub a: Vector6<f64>,
}

impl TaskEllipsoid {
    pub fn new(q: Matrix6<f64>, a: Vector6<f64>) -> Result<Self> {
        let t = Self { q, a };
        t.validate()?;
        Ok(t)
    }

    /// The unit ball: `Q = I`, `a = 0`.
    pub fn ball() -> Self {
        Self {
            q: Matrix6::identity(),
            a: Vector6::zeros(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let scale = self.q.amax();
        let asym = (self.q - self.q.transpose()).amax();
        if !(scale > 0.0) || asym > 1e-12 * scale || !self.q.iter().all(|v| v.is_finite()) {
            return Err(Error::NotPositiveDefinite);
        }
        let eig = SymmetricEigen::new(self.q);
        if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(())
    }
}

fn unit(v: Vector6<f64>) -> Vector6<f64> {
    v / v.norm()
}

/// Largest `β` with the task ellipsoid inside `conv(points)`, estimated by
/// exact ray extents from the ellipsoid center along `Q^{-1/2} s` for the
/// principal axes and `samples` random unit directions `s`.
pub fn task_fit_points(
    points: &PointSet,
    task: &TaskEllipsoid,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    task.validate()?;
    if points.dim != 6 {
        return Err(Error::DimensionMismatch {
            expected: 6,
            actual: points.dim,
        });
    }
    let eig = SymmetricEigen::new(task.q);
    let inv_sqrt = eig.eigenvectors
        * Matrix6::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
        * eig.eigenvectors.transpose();
    let q_inv = inv_sqrt * inv_sqrt;
    let center = -(q_inv * task.a) / 2.0;
    let rho0_sq = task.a.dot(&(q_inv * task.a)) / 4.0;
    let c: Vec<f64> = center.iter().copied().collect();

    let extent = |s: Vector6<f64>| -> Result<Option<f64>> {
        let v = inv_sqrt * s;
        ray_extent(points, &c, v.as_slice())
    };
    let beta = |t: f64| (t * t - rho0_sq).max(0.0).sqrt();

    let mut axis_min = f64::INFINITY;
    for k in 0..6 {
        let e: Vector6<f64> = eig.eigenvectors.column(k).into_owned();
        for s in [e, -e] {
            match extent(s)? {
                Some(t) => axis_min = axis_min.min(t),
                None => return Ok(Estimate::zero()),
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let batches = MU_BATCHES.min(samples.max(1));
    let mut batch_min = vec![axis_min; batches];
    for i in 0..samples {
        let s = unit(Vector6::from_fn(|_, _| gaussian(&mut rng)));
        match extent(s)? {
            Some(t) => {
                let b = i % batches;
                batch_min[b] = batch_min[b].min(t);
            }
            None => return Ok(Estimate::zero()),
        }
    }
    let t_min = batch_min.iter().cloned().fold(f64::INFINITY, f64::min);
    let per_batch: Vec<f64> = batch_min.iter().map(|&t| beta(t)).collect();
    let stderr = if per_batch.len() > 1 {
        mean_and_stderr(&per_batch).1
    } else {
        0.0
    };
    Ok(Estimate {
        value: beta(t_min),
        stderr,
    })
}

/// Inner approximation of the reachable wrench set: the origin together with
/// every elementary wrench of unit intensity norm.
pub(super) fn reachable_points(
    g: &GraspMatrix,
    record: &GraspRecord,
    disc: &ConeDiscretization,
) -> Result<PointSet> {
    let mut ps = PointSet {
        dim: 6,
        coords: vec![0.0; 6],
    };
    for (c, span) in record.contacts.iter().zip(&g.contact_spans) {
        let block = g.columns.columns(span.start, span.len());
        for e in elementary_intensities(&c.model, disc)? {
            let w = &block * &e / e.norm();
            ps.push(w.as_slice());
        }
    }
    Ok(ps)
}

pub(super) fn mu_of(
    g: &GraspMatrix,
    record: &GraspRecord,
    disc: &ConeDiscretization,
    closed: bool,
    task: &TaskEllipsoid,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    task.validate()?;
    if matrix_rank(&g.columns) < 6 || (!closed && task.a.iter().all(|&v| v == 0.0)) {
        return Ok(Estimate::zero());
    }
    task_fit_points(&reachable_points(g, record, disc)?, task, samples, seed)
}

/// Task-oriented measure `μ`: the largest `β` for which the task ellipsoid
/// fits inside `G(B^n ∩ FC)`, with the reachable set approximated from the
/// inside by the discretized cones.
pub fn quality_mu_task(
    record: &GraspRecord,
    disc: &ConeDiscretization,
    task: &TaskEllipsoid,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    record.validate()?;
    let g = build_grasp_matrix(record);
    let ws = build_wrench_set(record, disc)?;
    let closed = force_closure_of(&ws, matrix_rank(&g.columns), ClosureBackend::Lp)?;
    mu_of(&g, record, disc, closed, task, samples, seed)
}
