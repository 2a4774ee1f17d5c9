//! The aggregated per-grasp quality report.

use serde::{Deserialize, Serialize};

use super::sampling::{mu_of, nu_of, TaskEllipsoid, DEFAULT_MU_SAMPLES, DEFAULT_NU_SAMPLES};
use super::{
    check_rho, delta_of, force_closure_of, form_closure_first_order, matrix_rank, q1_of, qinf_of,
    scaled_grasp_matrix, scaled_wrench_set, somov_precheck, ClosureBackend, DEFAULT_MINKOWSKI_CAP,
};
use crate::contact::{ConeDiscretization, FrictionModel};
use crate::error::Result;
use crate::grasp::GraspRecord;
use crate::hull::contains_origin;

/// Grasp property vocabulary used for report diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GraspProperty {
    #[serde(rename = "Form Closure")]
    FormClosure,
    #[serde(rename = "Force Closure")]
    ForceClosure,
    #[serde(rename = "Dexterity/Manipulability")]
    Dexterity,
    #[serde(rename = "Equilibrium")]
    Equilibrium,
    #[serde(rename = "Stability")]
    Stability,
    #[serde(rename = "Dynamic Behavior")]
    DynamicBehavior,
    #[serde(rename = "Internal Forces")]
    InternalForces,
    #[serde(rename = "Slip Resistance")]
    SlipResistance,
    #[serde(rename = "Compliance")]
    Compliance,
    #[serde(rename = "Connectivity")]
    Connectivity,
    #[serde(rename = "Sensitivity")]
    Sensitivity,
}

impl GraspProperty {
    pub const ALL: [GraspProperty; 11] = [
        GraspProperty::FormClosure,
        GraspProperty::ForceClosure,
        GraspProperty::Dexterity,
        GraspProperty::Equilibrium,
        GraspProperty::Stability,
        GraspProperty::DynamicBehavior,
        GraspProperty::InternalForces,
        GraspProperty::SlipResistance,
        GraspProperty::Compliance,
        GraspProperty::Connectivity,
        GraspProperty::Sensitivity,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            GraspProperty::FormClosure => "Form Closure",
            GraspProperty::ForceClosure => "Force Closure",
            GraspProperty::Dexterity => "Dexterity/Manipulability",
            GraspProperty::Equilibrium => "Equilibrium",
            GraspProperty::Stability => "Stability",
            GraspProperty::DynamicBehavior => "Dynamic Behavior",
            GraspProperty::InternalForces => "Internal Forces",
            GraspProperty::SlipResistance => "Slip Resistance",
            GraspProperty::Compliance => "Compliance",
            GraspProperty::Connectivity => "Connectivity",
            GraspProperty::Sensitivity => "Sensitivity",
        }
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            stderr: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub disc: ConeDiscretization,
    /// Characteristic length dividing every moment component.
    pub moment_scale: f64,
    pub nu_samples: usize,
    pub mu_samples: usize,
    pub seed: u64,
    pub task: TaskEllipsoid,
    pub minkowski_cap: u128,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            disc: ConeDiscretization::default(),
            moment_scale: 1.0,
            nu_samples: DEFAULT_NU_SAMPLES,
            mu_samples: DEFAULT_MU_SAMPLES,
            seed: 0,
            task: TaskEllipsoid::ball(),
            minkowski_cap: DEFAULT_MINKOWSKI_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub force_closure: bool,
    pub form_closure_first_order: bool,
    pub somov_possible: bool,
    pub q1: f64,
    pub q_inf: f64,
    pub delta: f64,
    pub nu_hat: Estimate,
    pub mu_hat: Estimate,
    /// Optimum of the form-closure program, `None` when infeasible.
    pub form_measure: Option<f64>,
    pub rank_g: usize,
    pub diagnostics: Vec<GraspProperty>,
}

/// Runs every closure test and metric on one grasp.
pub fn analyze(record: &GraspRecord, opts: &AnalysisOptions) -> Result<QualityReport> {
    record.validate()?;
    opts.disc.validate()?;
    check_rho(opts.moment_scale)?;
    let rho = opts.moment_scale;
    let g = scaled_grasp_matrix(record, rho);
    let ws = scaled_wrench_set(record, &opts.disc, rho)?;
    let rank_g = matrix_rank(&g.columns);

    let force_closure = force_closure_of(&ws, rank_g, ClosureBackend::Lp)?;
    let q1 = q1_of(&ws, force_closure)?;
    let q_inf = qinf_of(&ws, force_closure, opts.minkowski_cap)?;
    let (form_closed, form_measure) = form_closure_first_order(record);
    let equilibrium = !ws.is_empty()
        && ws.union_points().scale() > 0.0
        && contains_origin(&ws.union_points(), false)?;

    let models: Vec<FrictionModel> = record.contacts.iter().map(|c| c.model).collect();
    let nu_hat = nu_of(&g, &models, opts.nu_samples, opts.seed)?;
    let mu_hat = mu_of(
        &g,
        record,
        &opts.disc,
        force_closure,
        &opts.task,
        opts.mu_samples,
        opts.seed.wrapping_add(1),
    )?;

    let mut diagnostics = Vec::new();
    if form_closed {
        diagnostics.push(GraspProperty::FormClosure);
    }
    if force_closure {
        diagnostics.push(GraspProperty::ForceClosure);
    }
    if equilibrium {
        diagnostics.push(GraspProperty::Equilibrium);
    }
    Ok(QualityReport {
        force_closure,
        form_closure_first_order: form_closed,
        somov_possible: somov_precheck(record),
        q1,
        q_inf,
        delta: delta_of(&g),
        nu_hat,
        mu_hat,
        form_measure,
        rank_g,
        diagnostics,
    })
}
