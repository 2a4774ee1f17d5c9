//! Rigid transforms, wrenches and twists: re-referencing a wrench leaves the
//! power it develops on a twist unchanged.

use graspkit::rigid::{pose_to_transform, reref_wrench, tangent_frame, Twist, Vec3, Wrench};

fn main() -> graspkit::Result<()> {
    let tf = pose_to_transform(&[0.1, -0.2, 0.3, 0.4, 0.0, 1.2]);
    let back = tf.compose(&tf.inverse());
    println!("pose {:?}", tf.pose().map(|v| (v * 1e6).round() / 1e6));
    println!(
        "T * T^-1 orthonormality error {:.2e}",
        back.orthonormality_error()
    );

    // A 2 N push along -z applied at (0.05, 0, 0.1), moments about the origin.
    let w = Wrench::from_force_at(
        Vec3::new(0.0, 0.0, -2.0),
        &Vec3::new(0.05, 0.0, 0.1),
        Vec3::zeros(),
    );
    let twist = Twist::new(
        Vec3::new(0.01, 0.0, 0.0),
        Vec3::new(0.0, 0.3, 0.0),
        Vec3::zeros(),
    );
    println!("wrench at origin   {:?}", w.to_vector().as_slice());
    println!("power {:.6}", w.power(&twist)?);

    let c = Vec3::new(0.2, 0.2, 0.0);
    let moved = reref_wrench(&w, &c);
    println!("wrench at (0.2, 0.2, 0) {:?}", moved.to_vector().as_slice());

    let frame = tangent_frame(&Vec3::new(0.0, 1.0, 1.0))?;
    println!("tangent frame triad error {:.2e}", frame.triad_error());
    Ok(())
}
