//! Physical hand benchmarks: graspable range, holding force and grasp
//! stiffness from measured data.

use graspkit::bench::{
    fit_stiffness, q_grasp, q_hold, GraspLabel, HandGeometry, PullTrial, StiffnessDataset,
};
use graspkit::rigid::Vec3;
use nalgebra::Matrix3;

fn main() -> graspkit::Result<()> {
    let hand = HandGeometry {
        l1: 0.06,
        l2: 0.04,
        l0: 0.03,
        torque: 0.5,
    };
    println!("Q_grasp {:.4}", q_grasp(0.07, &hand)?);

    // Pull-out trials at three angles; each sample is (displacement m, force N).
    let trials: Vec<PullTrial> = [(0.0, 14.0), (0.5, 11.5), (1.0, 9.0)]
        .iter()
        .map(|&(phi, peak)| PullTrial {
            phi,
            samples: (0..20)
                .map(|i| {
                    let d = i as f64 * 1e-3;
                    (d, peak * (1.0 - ((d - 0.01) / 0.01).powi(2)).max(0.0))
                })
                .collect(),
        })
        .collect();
    let hold = q_hold(&trials, &hand)?;
    println!(
        "Q_hold {:.4} at F = {:.3} N (per-trial peaks {:?})",
        hold.q_hold, hold.force, hold.peak_forces
    );

    let k = Matrix3::new(800.0, 50.0, 0.0, 50.0, 600.0, -20.0, 0.0, -20.0, 300.0);
    let records = (0..12)
        .map(|i| {
            let t = i as f64;
            let d = Vec3::new((t * 0.7).sin(), (t * 1.3).cos(), (t * 0.4).sin()) * 1e-3;
            (d, k * d)
        })
        .collect();
    let fit = fit_stiffness(&StiffnessDataset {
        records,
        grasp_label: GraspLabel::OpposedPinch,
    })?;
    println!("fitted K (N/m), residual {:.2e}", fit.residual_rms);
    for r in 0..3 {
        println!(
            "  {:>9.2} {:>9.2} {:>9.2}",
            fit.k[(r, 0)],
            fit.k[(r, 1)],
            fit.k[(r, 2)]
        );
    }
    Ok(())
}
