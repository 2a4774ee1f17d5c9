//! Force closure under both containment backends and first-order form
//! closure, for a few textbook grasps of the unit sphere.

use graspkit::closure::{force_closure_with, form_closure_first_order, grasp_rank, ClosureBackend};
use graspkit::contact::{ConeDiscretization, Contact, FrictionModel};
use graspkit::grasp::GraspRecord;
use graspkit::rigid::Vec3;

fn main() -> graspkit::Result<()> {
    let disc = ConeDiscretization::default();
    let hard = FrictionModel::Hard { mu: 0.5 };
    let soft = FrictionModel::Soft {
        mu: 0.5,
        gamma: 0.1,
    };
    let tri = [
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(-0.5, 0.75f64.sqrt(), 0.0),
        Vec3::new(-0.5, -(0.75f64.sqrt()), 0.0),
    ];
    let cases = [
        (
            "two hard, antipodal",
            GraspRecord::on_sphere(Vec3::zeros(), 1.0, &[Vec3::x(), -Vec3::x()], hard)?,
        ),
        (
            "two soft, antipodal",
            GraspRecord::on_sphere(Vec3::zeros(), 1.0, &[Vec3::x(), -Vec3::x()], soft)?,
        ),
        (
            "three hard, equatorial",
            GraspRecord::on_sphere(Vec3::zeros(), 1.0, &tri, hard)?,
        ),
        (
            "two hard, same side",
            GraspRecord::on_sphere(
                Vec3::zeros(),
                1.0,
                &[Vec3::x(), Vec3::new(1.0, 1.0, 0.0)],
                hard,
            )?,
        ),
    ];
    println!(
        "{:<24} {:>6} {:>8} {:>8} {:>6}",
        "grasp", "rank", "lp", "facets", "form"
    );
    for (name, r) in &cases {
        println!(
            "{:<24} {:>6} {:>8} {:>8} {:>6}",
            name,
            grasp_rank(r),
            force_closure_with(r, &disc, ClosureBackend::Lp)?,
            force_closure_with(r, &disc, ClosureBackend::Facets)?,
            form_closure_first_order(r).0,
        );
    }

    // Twelve frictionless contacts, two per face of the cube [-1, 1]^3,
    // cage it.
    let mut contacts = Vec::new();
    for axis in 0..3 {
        for side in [1.0, -1.0] {
            for off in [0.5, -0.5] {
                let mut p = Vec3::zeros();
                p[axis] = side;
                p[(axis + 1) % 3] = off;
                let mut n = Vec3::zeros();
                n[axis] = -side;
                contacts.push(Contact::new(p, n, FrictionModel::Frictionless)?);
            }
        }
    }
    let cage = GraspRecord::new(contacts, Vec3::zeros())?;
    let (closed, measure) = form_closure_first_order(&cage);
    println!("cube cage: form closure {closed}, measure {measure:?}");
    Ok(())
}
