//! Every quality metric for a three-finger grasp, and how the moment scale
//! changes the wrench-space metrics.

use graspkit::closure::{analyze, AnalysisOptions};
use graspkit::contact::FrictionModel;
use graspkit::grasp::GraspRecord;
use graspkit::rigid::Vec3;

fn main() -> graspkit::Result<()> {
    let dirs = [
        Vec3::new(1.0, 0.0, 0.2),
        Vec3::new(-0.6, 0.8, 0.0),
        Vec3::new(-0.4, -0.9, -0.1),
    ];
    let record =
        GraspRecord::on_sphere(Vec3::zeros(), 0.04, &dirs, FrictionModel::Hard { mu: 0.6 })?;

    for rho in [1.0, 0.04] {
        let opts = AnalysisOptions {
            moment_scale: rho,
            ..AnalysisOptions::default()
        };
        let r = analyze(&record, &opts)?;
        println!("moment scale {rho}");
        println!("  force closure {}  rank G {}", r.force_closure, r.rank_g);
        println!(
            "  Q1 {:.5}  Qinf {:.5}  delta {:.5}",
            r.q1, r.q_inf, r.delta
        );
        println!("  nu {:.4e} ± {:.1e}", r.nu_hat.value, r.nu_hat.stderr);
        println!("  mu {:.4e} ± {:.1e}", r.mu_hat.value, r.mu_hat.stderr);
        let labels: Vec<_> = r.diagnostics.iter().map(|d| d.label()).collect();
        println!("  properties {}", labels.join(", "));
    }
    Ok(())
}
