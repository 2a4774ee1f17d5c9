//! Task-oriented fit: how far a task ellipsoid scales before it leaves the
//! wrenches a grasp can resist.

use graspkit::closure::{quality_mu_task, TaskEllipsoid};
use graspkit::contact::{ConeDiscretization, FrictionModel};
use graspkit::grasp::GraspRecord;
use graspkit::rigid::Vec3;
use nalgebra::{Matrix6, Vector6};

fn main() -> graspkit::Result<()> {
    let dirs = [Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y()];
    let record = GraspRecord::on_sphere(
        Vec3::zeros(),
        1.0,
        &dirs,
        FrictionModel::Soft {
            mu: 0.8,
            gamma: 0.2,
        },
    )?;
    let disc = ConeDiscretization::default();

    // Lifting mostly along z, little demand on torques.
    let lift = Matrix6::from_diagonal(&Vector6::new(0.3, 0.3, 1.0, 0.1, 0.1, 0.1));
    let tasks = [
        ("unit ball", TaskEllipsoid::ball()),
        ("lift", TaskEllipsoid::new(lift, Vector6::zeros())?),
        (
            "lift, offset",
            TaskEllipsoid::new(lift, Vector6::new(0.0, 0.0, 0.2, 0.0, 0.0, 0.0))?,
        ),
    ];
    for (name, task) in &tasks {
        let est = quality_mu_task(&record, &disc, task, 2000, 7)?;
        println!("{name:<14} mu {:.4} ± {:.4}", est.value, est.stderr);
    }
    Ok(())
}
