use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graspkit::bench::GraspLabel;
use graspkit::cli::{self, CliError, CliResult, CommonFlags, HandFlags, Metric, SynthesizeFlags};
use graspkit::contact::FrictionModel;
use graspkit::rigid::Vec3;
use graspkit::synthesis::SynthesisMode;

#[derive(Parser)]
#[command(
    name = "graspkit",
    version,
    about = "Grasp closure tests, quality metrics and contact synthesis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Friction-cone edges (overrides the scene)
    #[arg(long)]
    cone_edges: Option<usize>,
    /// Characteristic length dividing moments (overrides the scene)
    #[arg(long)]
    moment_scale: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Common {
    fn flags(&self) -> CommonFlags {
        CommonFlags {
            cone_edges: self.cone_edges,
            moment_scale: self.moment_scale,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    StopAtClosure,
    LocalOptimum,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Frictionless,
    Hard,
    Soft,
}

#[derive(Clone, Copy, ValueEnum)]
enum Label {
    OpposedPinch,
    SphericalPinch,
}

#[derive(Subcommand)]
enum Command {
    /// Closure tests and every quality metric for each grasp in a scene
    Analyze {
        scene: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Add wall time to the report (makes it non-reproducible)
        #[arg(long)]
        timing: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Order the grasps of a scene by one metric
    Rank {
        scene: PathBuf,
        #[arg(long, value_enum)]
        metric: Metric,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        json: bool,
    },
    /// Place contacts on an object surface until the grasp is force closed
    Synthesize {
        /// sphere:R, ellipsoid:A,B,C or off:PATH
        #[arg(long)]
        object: String,
        /// Object center as x,y,z (spheres and ellipsoids)
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, 0.0, 0.0])]
        center: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        fingers: usize,
        #[arg(long, value_enum, default_value = "hard")]
        model: Model,
        #[arg(long, default_value_t = 0.5)]
        mu: f64,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value_t = 8)]
        cone_edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "stop-at-closure")]
        mode: Mode,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        /// Iteration trace CSV
        #[arg(long, default_value = "trace.csv")]
        trace: PathBuf,
        /// Scene file for the result (stdout when absent)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Physical hand benchmark metrics
    Bench {
        #[command(subcommand)]
        metric: BenchCommand,
        #[arg(long, global = true)]
        json: bool,
    },
}

#[derive(Args)]
struct Hand {
    /// Proximal phalanx length (m)
    #[arg(long)]
    l1: Option<f64>,
    /// Distal phalanx length (m)
    #[arg(long)]
    l2: Option<f64>,
    /// Palm half-width (m)
    #[arg(long)]
    l0: Option<f64>,
    /// Actuation torque (N·m)
    #[arg(long)]
    torque: Option<f64>,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Graspable diameter range over hand span
    Qgrasp {
        /// Largest minus smallest graspable diameter (m)
        #[arg(long)]
        delta_d: f64,
        #[command(flatten)]
        hand: Hand,
    },
    /// Holding force score from pull-out trials (CSV phi,disp,force)
    Qhold {
        #[arg(long)]
        csv: PathBuf,
        #[command(flatten)]
        hand: Hand,
    },
    /// Symmetric stiffness fit (CSV dx,dy,dz,fx,fy,fz)
    Stiffness {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_enum, default_value = "opposed-pinch")]
        label: Label,
    },
}

fn emit(text: &str, output: Option<&PathBuf>) -> CliResult<()> {
    match output {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Analyze {
            scene,
            common,
            timing,
            output,
        } => {
            let report = cli::cmd_analyze(&cli::load_scene(&scene)?, &common.flags(), timing)?;
            emit(&json(&report), output.as_ref())?;
        }
        Command::Rank {
            scene,
            metric,
            common,
            json: as_json,
        } => {
            let r = cli::cmd_rank(&cli::load_scene(&scene)?, &common.flags(), metric)?;
            emit(
                &if as_json {
                    json(&r)
                } else {
                    cli::rank_text(&r)
                },
                None,
            )?;
        }
        Command::Synthesize {
            object,
            center,
            fingers,
            model,
            mu,
            gamma,
            cone_edges,
            seed,
            mode,
            max_iters,
            trace,
            output,
        } => {
            let surface = cli::parse_object(&object, Vec3::new(center[0], center[1], center[2]))?;
            let flags = SynthesizeFlags {
                fingers,
                model: match model {
                    Model::Frictionless => FrictionModel::Frictionless,
                    Model::Hard => FrictionModel::Hard { mu },
                    Model::Soft => FrictionModel::Soft { mu, gamma },
                },
                cone_edges,
                seed,
                mode: match mode {
                    Mode::StopAtClosure => SynthesisMode::StopAtClosure,
                    Mode::LocalOptimum => SynthesisMode::LocalOptimum,
                },
                max_iters,
            };
            let out = cli::cmd_synthesize(&surface, &flags)?;
            cli::write_trace(&surface, &out, &trace)?;
            emit(&(out.scene.to_json() + "\n"), output.as_ref())?;
            eprintln!(
                "final measure {}  force closure {}  iterations {}",
                cli::sig6(out.result.final_measure),
                if out.result.force_closure {
                    "yes"
                } else {
                    "no"
                },
                out.result.iterations
            );
            if !out.converged {
                eprintln!("no force-closure grasp found; the best iterate was written");
                return Ok(cli::EXIT_NO_CONVERGENCE);
            }
        }
        Command::Bench {
            metric,
            json: as_json,
        } => {
            let hand = |h: &Hand| HandFlags {
                l1: h.l1,
                l2: h.l2,
                l0: h.l0,
                torque: h.torque,
            };
            let out = match metric {
                BenchCommand::Qgrasp { delta_d, hand: h } => cli::bench_qgrasp(delta_d, &hand(&h))?,
                BenchCommand::Qhold { csv, hand: h } => cli::bench_qhold(&csv, &hand(&h))?,
                BenchCommand::Stiffness { csv, label } => cli::bench_stiffness(
                    &csv,
                    match label {
                        Label::OpposedPinch => GraspLabel::OpposedPinch,
                        Label::SphericalPinch => GraspLabel::SphericalPinch,
                    },
                )?,
            };
            emit(
                &if as_json {
                    out.to_json() + "\n"
                } else {
                    out.to_text()
                },
                None,
            )?;
        }
    }
    Ok(cli::EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                cli::EXIT_INPUT
            } else {
                cli::EXIT_OK
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
