//! Gradient-based contact synthesis on a sphere, with the iteration trace.

use graspkit::contact::FrictionModel;
use graspkit::rigid::Vec3;
use graspkit::synthesis::{
    synthesize, write_trace_csv, SurfaceModel, SynthesisConfig, SynthesisMode,
};

fn main() -> graspkit::Result<()> {
    let sphere = SurfaceModel::Sphere {
        center: Vec3::zeros(),
        radius: 1.0,
    };
    // Start with every finger on the upper cap so the descent has work to do.
    let start = [
        Vec3::new(0.3, 0.0, 1.0),
        Vec3::new(-0.2, 0.3, 1.0),
        Vec3::new(-0.2, -0.3, 1.0),
    ]
    .iter()
    .map(|d| sphere.point_toward(d))
    .collect::<graspkit::Result<Vec<_>>>()?;
    for mode in [SynthesisMode::StopAtClosure, SynthesisMode::LocalOptimum] {
        let cfg = SynthesisConfig {
            mode,
            initial_contacts: Some(start.clone()),
            ..SynthesisConfig::new(3, FrictionModel::Hard { mu: 0.5 })
        };
        let res = synthesize(&sphere, &cfg)?;
        println!(
            "{mode:?}: closed {} after {} iterations, measure {:.5}",
            res.force_closure, res.iterations, res.final_measure
        );
        for p in &res.points {
            let x = p.position;
            println!("  contact ({:+.3}, {:+.3}, {:+.3})", x.x, x.y, x.z);
        }
        if mode == SynthesisMode::StopAtClosure {
            let mut csv = Vec::new();
            write_trace_csv(&sphere, &res, &mut csv)?;
            let text = String::from_utf8_lossy(&csv);
            let lines: Vec<&str> = text.lines().collect();
            println!("trace, {} rows; header, first and last row:", lines.len() - 1);
            for l in [lines[0], lines[1], lines[lines.len() - 1]] {
                println!("  {l}");
            }
        }
    }
    Ok(())
}
