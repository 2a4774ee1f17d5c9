//! Command implementations behind the `graspkit` binary. Each command is a
//! plain function so it can be driven from tests and examples too.

pub mod off;
pub mod scene;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bench::{
    fit_stiffness, q_grasp, q_hold, read_pull_csv, read_stiffness_csv, GraspLabel, HandGeometry,
};
use crate::closure::{
    analyze, quality_delta_scaled, quality_q1_scaled, quality_qinf_scaled, AnalysisOptions,
    DEFAULT_MINKOWSKI_CAP,
};
use crate::contact::{ConeDiscretization, FrictionModel};
use crate::error::Error;
use crate::rigid::Vec3;
use crate::synthesis::{
    synthesize, write_trace_csv, SurfaceModel, SynthesisConfig, SynthesisMode, SynthesisResult,
};

pub use off::parse_off;
pub use scene::{
    GraspReport, RankEntry, RankReport, ReportFile, SceneContact, SceneFile, SceneGrasp,
    SceneObject, SceneOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_NO_CONVERGENCE: i32 = 4;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_)
        | Error::ZeroNormal
        | Error::BadDiscretization(_)
        | Error::DimensionMismatch { .. }
        | Error::MissingJacobian
        | Error::EmptyTrial(_)
        | Error::NotPositiveDefinite => EXIT_INPUT,
        Error::NoConvergence(_) => EXIT_NO_CONVERGENCE,
        _ => EXIT_NUMERIC,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn context(e: Error, what: &str) -> Self {
        Self {
            code: exit_code(&e),
            message: format!("{what}: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load_scene(path: &Path) -> CliResult<SceneFile> {
    let text = read_text(path)?;
    SceneFile::from_json(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Formats with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        return format!("{x:.5e}");
    }
    let s = format!("{:.*}", (5 - exp).max(0) as usize, x);
    // rounding may carry into a new leading digit
    let digits = s
        .chars()
        .filter(char::is_ascii_digit)
        .skip_while(|&c| c == '0')
        .count();
    if digits > 6 && exp + 1 < 6 {
        format!("{:.*}", (4 - exp).max(0) as usize, x)
    } else {
        s
    }
}

#[derive(Debug, Clone, Default)]
pub struct CommonFlags {
    pub cone_edges: Option<usize>,
    pub moment_scale: Option<f64>,
    pub seed: u64,
}

impl CommonFlags {
    fn resolve(&self, scene: &SceneFile) -> CliResult<(ConeDiscretization, f64)> {
        let edges = self.cone_edges.unwrap_or(scene.options.cone_edges);
        let disc = ConeDiscretization::new(edges)?;
        Ok((
            disc,
            self.moment_scale.unwrap_or(scene.options.moment_scale),
        ))
    }
}

/// Full quality report for every grasp in a scene, in input order.
pub fn cmd_analyze(scene: &SceneFile, flags: &CommonFlags, timing: bool) -> CliResult<ReportFile> {
    let start = Instant::now();
    let (disc, moment_scale) = flags.resolve(scene)?;
    let records = scene.records()?;
    let opts = AnalysisOptions {
        disc,
        moment_scale,
        seed: flags.seed,
        ..AnalysisOptions::default()
    };
    let reports: Vec<_> = records.par_iter().map(|r| analyze(r, &opts)).collect();
    let mut grasps = Vec::with_capacity(reports.len());
    for (g, rep) in scene.grasps.iter().zip(reports) {
        let report = rep.map_err(|e| CliError::context(e, &format!("grasp `{}`", g.name)))?;
        grasps.push(GraspReport {
            name: g.name.clone(),
            report,
        });
    }
    Ok(ReportFile {
        toolkit: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: flags.seed,
        cone_edges: disc.edge_count,
        moment_scale,
        nu_samples: opts.nu_samples,
        mu_samples: opts.mu_samples,
        grasps,
        timing_ms: timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Metric {
    Q1,
    Qinf,
    Delta,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Q1 => "q1",
            Metric::Qinf => "qinf",
            Metric::Delta => "delta",
        }
    }
}

/// Grasps sorted by `metric`, best first. Ties, including the zeros of
/// non-closure grasps, go by name.
pub fn cmd_rank(scene: &SceneFile, flags: &CommonFlags, metric: Metric) -> CliResult<RankReport> {
    let (disc, rho) = flags.resolve(scene)?;
    let records = scene.records()?;
    let values: Vec<_> = records
        .par_iter()
        .map(|r| match metric {
            Metric::Q1 => quality_q1_scaled(r, &disc, rho),
            Metric::Qinf => quality_qinf_scaled(r, &disc, rho, DEFAULT_MINKOWSKI_CAP),
            Metric::Delta => quality_delta_scaled(r, rho),
        })
        .collect();
    let mut ranking = Vec::with_capacity(values.len());
    for (g, v) in scene.grasps.iter().zip(values) {
        let value = v.map_err(|e| CliError::context(e, &format!("grasp `{}`", g.name)))?;
        ranking.push(RankEntry {
            name: g.name.clone(),
            value,
        });
    }
    ranking.sort_by(|a, b| {
        b.value
            .total_cmp(&a.value)
            .then_with(|| a.name.cmp(&b.name))
    });
    Ok(RankReport {
        metric: metric.name().into(),
        cone_edges: disc.edge_count,
        moment_scale: rho,
        ranking,
    })
}

pub fn rank_text(r: &RankReport) -> String {
    let mut s = String::new();
    for (i, e) in r.ranking.iter().enumerate() {
        s.push_str(&format!("{:>3}  {:<24} {}\n", i + 1, e.name, sig6(e.value)));
    }
    s
}

/// Parses `sphere:R`, `ellipsoid:A,B,C` or `off:PATH` (a bare `.off` path
/// also works).
pub fn parse_object(spec: &str, center: Vec3) -> CliResult<SurfaceModel> {
    let bad = || CliError::input(format!("cannot parse object `{spec}`"));
    let nums = |s: &str| -> CliResult<Vec<f64>> {
        s.split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect()
    };
    let (kind, arg) = match spec.split_once(':') {
        Some(parts) => parts,
        None if spec.ends_with(".off") => ("off", spec),
        None => return Err(bad()),
    };
    let model = match kind {
        "sphere" => match nums(arg)?[..] {
            [radius] => SurfaceModel::Sphere { center, radius },
            _ => return Err(bad()),
        },
        "ellipsoid" => match nums(arg)?[..] {
            [a, b, c] => SurfaceModel::Ellipsoid {
                center,
                semi_axes: Vec3::new(a, b, c),
            },
            _ => return Err(bad()),
        },
        "off" => {
            let path = Path::new(arg);
            parse_off(&read_text(path)?)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
        }
        _ => return Err(bad()),
    };
    model.validate()?;
    Ok(model)
}

#[derive(Debug, Clone)]
pub struct SynthesizeFlags {
    pub fingers: usize,
    pub model: FrictionModel,
    pub cone_edges: usize,
    pub seed: u64,
    pub mode: SynthesisMode,
    pub max_iters: usize,
}

pub struct SynthesisOutput {
    /// Scene holding the best grasp found, converged or not.
    pub scene: SceneFile,
    pub result: SynthesisResult,
    pub converged: bool,
}

pub fn cmd_synthesize(
    surface: &SurfaceModel,
    flags: &SynthesizeFlags,
) -> CliResult<SynthesisOutput> {
    let mut cfg = SynthesisConfig::new(flags.fingers, flags.model);
    cfg.disc = ConeDiscretization::new(flags.cone_edges)?;
    cfg.seed = flags.seed;
    cfg.mode = flags.mode;
    cfg.max_iters = flags.max_iters;
    let (result, converged) = match synthesize(surface, &cfg) {
        Ok(r) => (r, true),
        Err(Error::NoConvergence(best)) => (*best, false),
        Err(e) => return Err(e.into()),
    };
    let scene = SceneFile {
        object: SceneObject::Surface(surface.clone()),
        torque_origin: result.record.torque_origin,
        grasps: vec![SceneGrasp {
            name: format!("synthesized-seed-{}", flags.seed),
            contacts: result
                .record
                .contacts
                .iter()
                .map(SceneContact::from_contact)
                .collect(),
            jacobian: None,
        }],
        options: SceneOptions {
            cone_edges: flags.cone_edges,
            moment_scale: 1.0,
        },
    };
    Ok(SynthesisOutput {
        scene,
        result,
        converged,
    })
}

pub fn write_trace(surface: &SurfaceModel, out: &SynthesisOutput, path: &Path) -> CliResult<()> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(write_trace_csv(
        surface,
        &out.result,
        std::io::BufWriter::new(file),
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum BenchOutput {
    QGrasp {
        q_grasp: f64,
    },
    QHold {
        q_hold: f64,
        force: f64,
        peak_forces: Vec<f64>,
        phis: Vec<f64>,
        /// How `force` was chosen from the trials.
        force_rule: String,
    },
    Stiffness {
        k: [[f64; 3]; 3],
        residual_rms: f64,
        grasp_label: GraspLabel,
    },
}

impl BenchOutput {
    pub fn to_text(&self) -> String {
        match self {
            BenchOutput::QGrasp { q_grasp } => format!("q_grasp {}\n", sig6(*q_grasp)),
            BenchOutput::QHold {
                q_hold,
                force,
                peak_forces,
                phis,
                force_rule,
            } => {
                let mut s = format!(
                    "q_hold {}\nforce {} N ({force_rule})\n",
                    sig6(*q_hold),
                    sig6(*force)
                );
                for (phi, f) in phis.iter().zip(peak_forces) {
                    s.push_str(&format!("peak phi={} {} N\n", sig6(*phi), sig6(*f)));
                }
                s
            }
            BenchOutput::Stiffness {
                k, residual_rms, ..
            } => {
                let mut s = String::from("K (N/m)\n");
                for row in k {
                    s.push_str(
                        &row.iter()
                            .map(|v| format!("{:>14}", sig6(*v)))
                            .collect::<String>(),
                    );
                    s.push('\n');
                }
                s.push_str(&format!("residual_rms {} N\n", sig6(*residual_rms)));
                s
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bench output serializes")
    }
}

/// Hand dimensions for the bench commands; unused ones may be absent.
#[derive(Debug, Clone, Copy, Default)]
pub struct HandFlags {
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub l0: Option<f64>,
    pub torque: Option<f64>,
}

impl HandFlags {
    fn hand(&self, need_l0: bool, need_torque: bool) -> CliResult<HandGeometry> {
        let get = |v: Option<f64>, flag: &str, needed: bool| match (v, needed) {
            (Some(v), _) => Ok(v),
            (None, false) => Ok(1.0),
            (None, true) => Err(CliError::input(format!("missing --{flag}"))),
        };
        Ok(HandGeometry {
            l1: get(self.l1, "l1", true)?,
            l2: get(self.l2, "l2", true)?,
            l0: get(self.l0, "l0", need_l0)?,
            torque: get(self.torque, "torque", need_torque)?,
        })
    }
}

pub fn bench_qgrasp(delta_d: f64, hand: &HandFlags) -> CliResult<BenchOutput> {
    Ok(BenchOutput::QGrasp {
        q_grasp: q_grasp(delta_d, &hand.hand(true, false)?)?,
    })
}

pub fn bench_qhold(csv: &Path, hand: &HandFlags) -> CliResult<BenchOutput> {
    let trials = read_pull_csv(read_text(csv)?.as_bytes())
        .map_err(|e| CliError::context(e, &csv.display().to_string()))?;
    let r = q_hold(&trials, &hand.hand(false, true)?)?;
    Ok(BenchOutput::QHold {
        q_hold: r.q_hold,
        force: r.force,
        peak_forces: r.peak_forces,
        phis: trials.iter().map(|t| t.phi).collect(),
        force_rule: "minimum over pull directions of each direction's peak force".into(),
    })
}

pub fn bench_stiffness(csv: &Path, label: GraspLabel) -> CliResult<BenchOutput> {
    let data = read_stiffness_csv(read_text(csv)?.as_bytes(), label)
        .map_err(|e| CliError::context(e, &csv.display().to_string()))?;
    let fit = fit_stiffness(&data)?;
    Ok(BenchOutput::Stiffness {
        k: std::array::from_fn(|r| std::array::from_fn(|c| fit.k[(r, c)])),
        residual_rms: fit.residual_rms,
        grasp_label: label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.502_654_824_574_366_9), "0.502655");
        assert_eq!(sig6(2.0), "2.00000");
        assert_eq!(sig6(300.0), "300.000");
        assert_eq!(sig6(-12.345678), "-12.3457");
        assert_eq!(sig6(9.999_999_7), "10.0000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.5e-7), "1.50000e-7");
        assert_eq!(sig6(123_456_789.0), "1.23457e8");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidInput("x".into())), EXIT_INPUT);
        assert_eq!(exit_code(&Error::Numerical("lp")), EXIT_NUMERIC);
        assert_eq!(exit_code(&Error::RankDeficient { rank: 2 }), EXIT_NUMERIC);
    }

    #[test]
    fn object_specs() {
        assert!(
            matches!(parse_object("sphere:1.5", Vec3::zeros()).unwrap(), SurfaceModel::Sphere { radius, .. } if radius == 1.5)
        );
        assert!(parse_object("ellipsoid:1,0.5,0.25", Vec3::zeros()).is_ok());
        assert_eq!(
            parse_object("sphere:-1", Vec3::zeros()).unwrap_err().code,
            EXIT_INPUT
        );
        assert_eq!(
            parse_object("cone:1", Vec3::zeros()).unwrap_err().code,
            EXIT_INPUT
        );
        assert_eq!(
            parse_object("missing.off", Vec3::zeros()).unwrap_err().code,
            EXIT_INPUT
        );
    }

    #[test]
    fn hand_flags_require_what_each_metric_uses() {
        let h = HandFlags {
            l1: Some(0.06),
            l2: Some(0.04),
            l0: Some(0.025),
            torque: None,
        };
        assert!(bench_qgrasp(0.08, &h).is_ok());
        let no_l0 = HandFlags { l0: None, ..h };
        assert_eq!(bench_qgrasp(0.08, &no_l0).unwrap_err().code, EXIT_INPUT);
    }
}
