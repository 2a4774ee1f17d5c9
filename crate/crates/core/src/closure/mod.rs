//! Form and force closure decisions and the grasp quality metrics.
//!
//! Every metric is computed on the elementary-wrench model of the grasp.
//! Moments may be divided by a characteristic length `rho` to balance the
//! mixed force/moment units; `rho = 1` leaves wrenches untouched.

mod report;
mod sampling;

use nalgebra::DMatrix;

use crate::contact::{ConeDiscretization, Wrench6};
use crate::error::{Error, Result};
use crate::grasp::{build_grasp_matrix, build_wrench_set, GraspMatrix, GraspRecord, WrenchSet};
use crate::hull::lp::{LpOutcome, StandardLp};
use crate::hull::{boundary_distance, contains_origin, convex_hull, dedup, PointSet, STRICT_TOL};

pub use report::{analyze, AnalysisOptions, Estimate, GraspProperty, QualityReport};
pub use sampling::{
    quality_mu_task, quality_nu, task_fit_points, TaskEllipsoid, DEFAULT_MU_SAMPLES,
    DEFAULT_NU_SAMPLES,
};

/// Default cap on the number of Minkowski-sum points enumerated for `Q∞`.
pub const DEFAULT_MINKOWSKI_CAP: u128 = 1_000_000;
/// Fewest contacts that can achieve form closure of a generic 3-D object.
pub const SOMOV_MIN_CONTACTS: usize = 7;
/// Relative singular-value threshold used for matrix ranks.
const RANK_TOL: f64 = 1e-9;
/// Running Minkowski sums larger than this are reduced to hull vertices.
const MINKOWSKI_PRUNE: usize = 4096;

/// Which containment backend decides force closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureBackend {
    /// Strict containment by linear programming.
    Lp,
    /// Facet enumeration by quickhull: every facet offset positive.
    Facets,
}

/// Necessary condition for form closure: at least seven contacts.
pub fn somov_precheck(record: &GraspRecord) -> bool {
    record.contact_count() >= SOMOV_MIN_CONTACTS
}

/// First-order linearization of the gap functions: one normal wrench per
/// contact, about the record's torque origin.
#[derive(Debug, Clone, PartialEq)]
pub struct GapLinearization {
    pub normal_wrenches: DMatrix<f64>,
}

impl GapLinearization {
    pub fn new(record: &GraspRecord) -> Self {
        let n = record.contacts.len();
        let mut m = DMatrix::zeros(6, n);
        for (j, c) in record.contacts.iter().enumerate() {
            let nrm = c.normal();
            let mo = (c.position - record.torque_origin).cross(&nrm);
            for i in 0..3 {
                m[(i, j)] = nrm[i];
                m[(i + 3, j)] = mo[i];
            }
        }
        Self { normal_wrenches: m }
    }
}

/// Numerical rank of a `6 × n` matrix.
pub fn matrix_rank(m: &DMatrix<f64>) -> usize {
    if m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// First-order form closure.
///
/// Solves `max d` subject to `W_n λ = 0`, `λ_i ≥ d`, `Σ λ_i = n_c` and
/// requires `rank(W_n) = 6` together with a positive optimum. Returns the
/// verdict and the optimum (`None` when the program is infeasible).
pub fn form_closure_first_order(record: &GraspRecord) -> (bool, Option<f64>) {
    let w = GapLinearization::new(record).normal_wrenches;
    let measure = form_closure_lp(&w);
    let closed = matrix_rank(&w) == 6 && measure.is_some_and(|d| d > STRICT_TOL);
    (closed, measure)
}

/// Optimum of the form-closure program with `λ = d·1 + s`, `s ≥ 0`, and
/// `d = d⁺ - d⁻`.
fn form_closure_lp(w: &DMatrix<f64>) -> Option<f64> {
    let n = w.ncols();
    if n == 0 {
        return None;
    }
    let mut lp = StandardLp::new(7, n + 2);
    for i in 0..6 {
        let row_sum: f64 = w.row(i).iter().sum();
        lp.set(i, 0, row_sum);
        lp.set(i, 1, -row_sum);
        for j in 0..n {
            lp.set(i, j + 2, w[(i, j)]);
        }
    }
    lp.set(6, 0, n as f64);
    lp.set(6, 1, -(n as f64));
    for j in 0..n {
        lp.set(6, j + 2, 1.0);
    }
    lp.b[6] = n as f64;
    lp.c[0] = 1.0;
    lp.c[1] = -1.0;
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Some(value),
        _ => None,
    }
}

pub(crate) fn scaled_grasp_matrix(record: &GraspRecord, rho: f64) -> GraspMatrix {
    let g = build_grasp_matrix(record);
    if rho == 1.0 {
        g
    } else {
        g.with_moment_scale(rho)
    }
}

pub(crate) fn scaled_wrench_set(
    record: &GraspRecord,
    disc: &ConeDiscretization,
    rho: f64,
) -> Result<WrenchSet> {
    let ws = build_wrench_set(record, disc)?;
    Ok(if rho == 1.0 {
        ws
    } else {
        ws.with_moment_scale(rho)
    })
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "moment scale must be positive, got {rho}"
        )))
    }
}

/// Rank of the grasp matrix.
pub fn grasp_rank(record: &GraspRecord) -> usize {
    matrix_rank(&build_grasp_matrix(record).columns)
}

/// Force closure of a prepared wrench set, given the grasp-matrix rank.
pub fn force_closure_of(ws: &WrenchSet, rank_g: usize, backend: ClosureBackend) -> Result<bool> {
    if rank_g < 6 || ws.is_empty() {
        return Ok(false);
    }
    let ps = ws.union_points();
    if ps.scale() == 0.0 {
        return Ok(false);
    }
    match backend {
        ClosureBackend::Lp => contains_origin(&ps, true),
        ClosureBackend::Facets => match convex_hull(&ps) {
            Ok(h) => Ok(h.min_offset() > STRICT_TOL * ps.scale()),
            Err(Error::DegenerateInput(_)) => Ok(false),
            Err(e) => Err(e),
        },
    }
}

/// Force closure: `rank(G) = 6` and the origin strictly inside the hull of
/// the elementary wrenches.
pub fn force_closure(record: &GraspRecord, disc: &ConeDiscretization) -> Result<bool> {
    force_closure_with(record, disc, ClosureBackend::Lp)
}

pub fn force_closure_with(
    record: &GraspRecord,
    disc: &ConeDiscretization,
    backend: ClosureBackend,
) -> Result<bool> {
    record.validate()?;
    let ws = build_wrench_set(record, disc)?;
    force_closure_of(&ws, grasp_rank(record), backend)
}

/// `Q1` of a prepared wrench set: distance from the origin to the boundary
/// of the union hull, 0 without force closure.
pub fn q1_of(ws: &WrenchSet, closed: bool) -> Result<f64> {
    if !closed {
        return Ok(0.0);
    }
    boundary_distance(&ws.union_points())
}

/// Ferrari-Canny `Q1` (bounded sum of contact forces).
pub fn quality_q1(record: &GraspRecord, disc: &ConeDiscretization) -> Result<f64> {
    quality_q1_scaled(record, disc, 1.0)
}

pub fn quality_q1_scaled(record: &GraspRecord, disc: &ConeDiscretization, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    record.validate()?;
    let ws = scaled_wrench_set(record, disc, rho)?;
    let closed = force_closure_of(&ws, grasp_rank(record), ClosureBackend::Lp)?;
    q1_of(&ws, closed)
}

/// Number of points in the `Q∞` Minkowski enumeration: `Π (k_i + 1)`.
pub fn minkowski_count(ws: &WrenchSet) -> u128 {
    ws.per_contact
        .iter()
        .fold(1u128, |acc, w| acc.saturating_mul(w.len() as u128 + 1))
}

fn sum_sets(acc: &[Wrench6], set: &[Wrench6]) -> Vec<Wrench6> {
    let mut out = Vec::with_capacity(acc.len() * (set.len() + 1));
    for a in acc {
        out.push(*a);
        for w in set {
            out.push(a + w);
        }
    }
    out
}

fn to_point_set(ws: &[Wrench6]) -> PointSet {
    PointSet {
        dim: 6,
        coords: ws.iter().flat_map(|w| w.iter().copied()).collect(),
    }
}

/// Every selection `Σ_i s_i` with `s_i` either zero or an elementary wrench
/// of contact `i`, i.e. per-contact force magnitudes bounded by one.
pub fn minkowski_points(ws: &WrenchSet, cap: u128) -> Result<PointSet> {
    let count = minkowski_count(ws);
    if count > cap {
        return Err(Error::CombinatorialCap { count, cap });
    }
    let mut acc = vec![Wrench6::zeros()];
    for set in &ws.per_contact {
        acc = sum_sets(&acc, set);
        if acc.len() > MINKOWSKI_PRUNE {
            acc = prune_to_vertices(acc);
        }
    }
    Ok(to_point_set(&acc))
}

/// Keeps hull vertices of a running sum. Lower-dimensional or tiny sets are
/// only deduplicated.
fn prune_to_vertices(acc: Vec<Wrench6>) -> Vec<Wrench6> {
    let ps = to_point_set(&acc);
    let (unique, ids) = dedup(&ps);
    let keep: Vec<usize> = match convex_hull(&ps) {
        Ok(h) => h.vertex_source_ids(),
        Err(_) => (0..unique.len()).map(|i| ids[i]).collect(),
    };
    keep.into_iter().map(|i| acc[i]).collect()
}

/// `Q∞` of a prepared wrench set (bounded largest contact force).
pub fn qinf_of(ws: &WrenchSet, closed: bool, cap: u128) -> Result<f64> {
    if !closed {
        return Ok(0.0);
    }
    boundary_distance(&minkowski_points(ws, cap)?)
}

/// Ferrari-Canny `Q∞` with the default enumeration cap.
pub fn quality_qinf(record: &GraspRecord, disc: &ConeDiscretization) -> Result<f64> {
    quality_qinf_scaled(record, disc, 1.0, DEFAULT_MINKOWSKI_CAP)
}

pub fn quality_qinf_scaled(
    record: &GraspRecord,
    disc: &ConeDiscretization,
    rho: f64,
    cap: u128,
) -> Result<f64> {
    check_rho(rho)?;
    record.validate()?;
    let ws = scaled_wrench_set(record, disc, rho)?;
    let closed = force_closure_of(&ws, grasp_rank(record), ClosureBackend::Lp)?;
    qinf_of(&ws, closed, cap)
}

/// Smallest singular value of `G`; 0 when `rank(G) < 6`.
pub fn delta_of(g: &GraspMatrix) -> f64 {
    if matrix_rank(&g.columns) < 6 {
        return 0.0;
    }
    g.columns
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn quality_delta(record: &GraspRecord) -> f64 {
    delta_of(&build_grasp_matrix(record))
}

pub fn quality_delta_scaled(record: &GraspRecord, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(delta_of(&scaled_grasp_matrix(record, rho)))
}
