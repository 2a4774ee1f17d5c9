//! Rigid transforms, twists, wrenches and contact tangent frames.
//!
//! Poses use a six-parameter vector `(x, y, z, yaw, pitch, roll)` with the
//! intrinsic Z-Y-X Euler convention: `R = Rz(yaw) * Ry(pitch) * Rx(roll)`.

use nalgebra::{Matrix3, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Norm below which a normal is rejected.
pub const MIN_NORMAL_NORM: f64 = 1e-12;

/// A proper rigid motion `x -> R x + p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub rotation: Matrix3<f64>,
    pub translation: Vec3,
}

impl Default for Transform {
    fn default() -> Self {
        Self::identity()
    }
}

impl Transform {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vec3::zeros(),
        }
    }

    /// Builds a transform, re-orthonormalizing nothing: the caller owns the
    /// rotation invariant.
    pub fn new(rotation: Matrix3<f64>, translation: Vec3) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn from_translation(translation: Vec3) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation,
        }
    }

    pub fn apply_point(&self, x: &Vec3) -> Vec3 {
        self.rotation * x + self.translation
    }

    pub fn apply_vector(&self, v: &Vec3) -> Vec3 {
        self.rotation * v
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Transform) -> Transform {
        Transform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Transform {
        let rt = self.rotation.transpose();
        Transform {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// Max-norm deviation of `RᵀR` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        (self.rotation.transpose() * self.rotation - Matrix3::identity()).amax()
    }

    /// Pose vector `(x, y, z, yaw, pitch, roll)` of this transform.
    ///
    /// Round-trips with [`pose_to_transform`] away from `pitch = ±π/2`.
    pub fn pose(&self) -> [f64; 6] {
        let r = &self.rotation;
        let pitch = (-r[(2, 0)]).clamp(-1.0, 1.0).asin();
        let yaw = r[(1, 0)].atan2(r[(0, 0)]);
        let roll = r[(2, 1)].atan2(r[(2, 2)]);
        let p = self.translation;
        [p.x, p.y, p.z, yaw, pitch, roll]
    }
}

fn rot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Converts `(x, y, z, yaw, pitch, roll)` into a transform.
pub fn pose_to_transform(u: &[f64; 6]) -> Transform {
    Transform {
        rotation: rot_z(u[3]) * rot_y(u[4]) * rot_x(u[5]),
        translation: Vec3::new(u[0], u[1], u[2]),
    }
}

/// Rigid-body velocity. `linear` is the velocity of the body point that
/// currently coincides with `origin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Twist {
    pub linear: Vec3,
    pub angular: Vec3,
    pub origin: Vec3,
}

impl Twist {
    pub fn new(linear: Vec3, angular: Vec3, origin: Vec3) -> Self {
        Self {
            linear,
            angular,
            origin,
        }
    }

    pub fn zero(origin: Vec3) -> Self {
        Self::new(Vec3::zeros(), Vec3::zeros(), origin)
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.linear.x,
            self.linear.y,
            self.linear.z,
            self.angular.x,
            self.angular.y,
            self.angular.z,
        )
    }
}

/// Force and moment acting on a body, the moment taken about `origin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wrench {
    pub force: Vec3,
    pub moment: Vec3,
    pub origin: Vec3,
}

impl Wrench {
    pub fn new(force: Vec3, moment: Vec3, origin: Vec3) -> Self {
        Self {
            force,
            moment,
            origin,
        }
    }

    /// Wrench of a pure force `force` applied at `point`, moments about `origin`.
    pub fn from_force_at(force: Vec3, point: &Vec3, origin: Vec3) -> Self {
        Self {
            force,
            moment: (point - origin).cross(&force),
            origin,
        }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.force.x,
            self.force.y,
            self.force.z,
            self.moment.x,
            self.moment.y,
            self.moment.z,
        )
    }

    /// Instantaneous power `f·v + m·ω`. Both must refer to the same point.
    pub fn power(&self, twist: &Twist) -> Result<f64> {
        if self.origin != twist.origin {
            return Err(Error::InvalidInput(
                "wrench and twist are referred to different points".into(),
            ));
        }
        Ok(self.force.dot(&twist.linear) + self.moment.dot(&twist.angular))
    }
}

/// Moves the reference point of a wrench: `m' = m + (o - o') × f`.
pub fn reref_wrench(w: &Wrench, new_origin: &Vec3) -> Wrench {
    Wrench {
        force: w.force,
        moment: w.moment + (w.origin - new_origin).cross(&w.force),
        origin: *new_origin,
    }
}

/// Right-handed orthonormal frame at a contact, `normal` pointing into the object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentFrame {
    pub normal: Vec3,
    pub t1: Vec3,
    pub t2: Vec3,
}

impl TangentFrame {
    /// Frame with a prescribed first tangent. `t1` is orthogonalized against
    /// the normal.
    pub fn with_tangent(normal: &Vec3, t1: &Vec3) -> Result<Self> {
        let n = normalize(normal)?;
        let t = t1 - n * n.dot(t1);
        let t = normalize(&t)?;
        Ok(Self {
            normal: n,
            t1: t,
            t2: n.cross(&t),
        })
    }

    /// Re-expresses the frame after a rigid motion.
    pub fn transformed(&self, tf: &Transform) -> Self {
        Self {
            normal: tf.apply_vector(&self.normal),
            t1: tf.apply_vector(&self.t1),
            t2: tf.apply_vector(&self.t2),
        }
    }

    /// Largest violation of the right-handed orthonormal triad conditions.
    pub fn triad_error(&self) -> f64 {
        let dots = [
            self.normal.dot(&self.t1).abs(),
            self.normal.dot(&self.t2).abs(),
            self.t1.dot(&self.t2).abs(),
            (self.normal.norm() - 1.0).abs(),
            (self.t1.norm() - 1.0).abs(),
            (self.t2.norm() - 1.0).abs(),
            (self.t1.cross(&self.t2) - self.normal).amax(),
        ];
        dots.into_iter().fold(0.0, f64::max)
    }
}

fn normalize(v: &Vec3) -> Result<Vec3> {
    let n = v.norm();
    if !(n > MIN_NORMAL_NORM) {
        return Err(Error::ZeroNormal);
    }
    Ok(v / n)
}

/// Deterministic tangent frame for a normal: `t1` is the projection of the
/// world axis least aligned with the normal, `t2 = normal × t1`.
pub fn tangent_frame(normal: &Vec3) -> Result<TangentFrame> {
    let n = normalize(normal)?;
    let mut axis = 0;
    for i in 1..3 {
        if n[i].abs() < n[axis].abs() {
            axis = i;
        }
    }
    let mut e = Vec3::zeros();
    e[axis] = 1.0;
    let t1 = (e - n * n[axis]).normalize();
    Ok(TangentFrame {
        normal: n,
        t1,
        t2: n.cross(&t1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_pose_is_identity() {
        let t = pose_to_transform(&[0.0; 6]);
        assert_eq!(t.rotation, Matrix3::identity());
        assert_eq!(t.translation, Vec3::zeros());
    }

    #[test]
    fn pure_translation_pose() {
        let t = pose_to_transform(&[1.0, 2.0, 3.0, 0.0, 0.0, 0.0]);
        assert_eq!(t.rotation, Matrix3::identity());
        assert_eq!(t.translation, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn yaw_quarter_turn_maps_x_to_y() {
        let t = pose_to_transform(&[0.0, 0.0, 0.0, FRAC_PI_2, 0.0, 0.0]);
        let y = t.apply_point(&Vec3::x());
        assert!((y - Vec3::y()).amax() < 1e-15);
    }

    #[test]
    fn pose_round_trip() {
        let u = [0.3, -1.0, 2.0, 0.4, -0.7, 1.2];
        let back = pose_to_transform(&u).pose();
        for i in 0..6 {
            assert!((u[i] - back[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn reref_single_cross_product() {
        let w = Wrench::new(Vec3::z(), Vec3::zeros(), Vec3::zeros());
        let r = reref_wrench(&w, &Vec3::x());
        assert_eq!(r.force, Vec3::z());
        assert_eq!(r.moment, Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(r.origin, Vec3::x());
    }

    #[test]
    fn reref_matches_superposition() {
        // A force f at point c has moment (c - o) × f about any o.
        let c = Vec3::new(0.5, -0.2, 0.9);
        let f = Vec3::new(0.1, 2.0, -1.0);
        let a = Wrench::from_force_at(f, &c, Vec3::zeros());
        let o2 = Vec3::new(-1.0, 3.0, 0.25);
        let direct = Wrench::from_force_at(f, &c, o2);
        let moved = reref_wrench(&a, &o2);
        assert!((direct.moment - moved.moment).amax() < 1e-14);
    }

    #[test]
    fn reref_identity_and_pure_moment() {
        let w = Wrench::new(
            Vec3::new(1.0, 2.0, 3.0),
            Vec3::new(-1.0, 0.5, 2.0),
            Vec3::x(),
        );
        assert_eq!(reref_wrench(&w, &Vec3::x()), w);
        let m = Wrench::new(Vec3::zeros(), Vec3::new(1.0, 2.0, 3.0), Vec3::zeros());
        assert_eq!(reref_wrench(&m, &Vec3::new(4.0, 5.0, 6.0)).moment, m.moment);
    }

    #[test]
    fn canonical_tangent_frame() {
        let f = tangent_frame(&Vec3::z()).unwrap();
        assert_eq!(f.t1, Vec3::x());
        assert_eq!(f.t2, Vec3::y());
        assert_eq!(tangent_frame(&Vec3::new(0.0, 0.0, 2.0)).unwrap(), f);
    }

    #[test]
    fn diagonal_normal_frame_is_valid() {
        let n = Vec3::new(1.0, 1.0, 1.0) / 3f64.sqrt();
        let f = tangent_frame(&n).unwrap();
        assert!(f.triad_error() < 1e-12);
    }

    #[test]
    fn zero_normal_rejected() {
        assert_eq!(tangent_frame(&Vec3::zeros()), Err(Error::ZeroNormal));
        assert_eq!(
            tangent_frame(&Vec3::new(1e-13, 0.0, 0.0)),
            Err(Error::ZeroNormal)
        );
    }

    #[test]
    fn power_needs_common_point() {
        let w = Wrench::new(Vec3::x(), Vec3::zeros(), Vec3::zeros());
        let t = Twist::new(Vec3::x(), Vec3::zeros(), Vec3::y());
        assert!(w.power(&t).is_err());
        let t = Twist::new(Vec3::x() * 2.0, Vec3::zeros(), Vec3::zeros());
        assert_eq!(w.power(&t).unwrap(), 2.0);
    }

    fn vec3() -> impl Strategy<Value = Vec3> {
        (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    fn transform() -> impl Strategy<Value = Transform> {
        prop::array::uniform6(-3.0..3.0f64).prop_map(|u| pose_to_transform(&u))
    }

    proptest! {
        #[test]
        fn composition_acts_sequentially(a in transform(), b in transform(), x in vec3()) {
            let lhs = a.compose(&b).apply_point(&x);
            let rhs = a.apply_point(&b.apply_point(&x));
            prop_assert!((lhs - rhs).amax() < 1e-9);
            prop_assert!(a.orthonormality_error() < 1e-9);
            prop_assert!((a.rotation.determinant() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn inverse_composes_to_identity(a in transform(), x in vec3()) {
            let id = a.compose(&a.inverse());
            prop_assert!((id.apply_point(&x) - x).amax() < 1e-9);
        }

        #[test]
        fn reref_is_path_independent(f in vec3(), m in vec3(), o in vec3(), a in vec3(), b in vec3()) {
            let w = Wrench::new(f, m, o);
            let two = reref_wrench(&reref_wrench(&w, &a), &b);
            let one = reref_wrench(&w, &b);
            prop_assert!((two.moment - one.moment).amax() < 1e-12 * (1.0 + f.amax() * 20.0 + m.amax()));
            let back = reref_wrench(&reref_wrench(&w, &a), &o);
            prop_assert!((back.moment - w.moment).amax() < 1e-12 * (1.0 + f.amax() * 20.0 + m.amax()));
        }

        #[test]
        fn reref_is_linear(f1 in vec3(), m1 in vec3(), f2 in vec3(), m2 in vec3(), o in vec3(), n in vec3()) {
            let s = reref_wrench(&Wrench::new(f1 + f2, m1 + m2, o), &n);
            let a = reref_wrench(&Wrench::new(f1, m1, o), &n);
            let b = reref_wrench(&Wrench::new(f2, m2, o), &n);
            prop_assert!((s.moment - (a.moment + b.moment)).amax() < 1e-12 * 200.0);
        }
    }

    #[test]
    fn random_tangent_frames_are_orthonormal() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let v = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            if v.norm() < 1e-6 {
                continue;
            }
            let f = tangent_frame(&v).unwrap();
            assert!(f.normal.dot(&f.t1).abs() <= 1e-12);
            assert!(f.normal.dot(&f.t2).abs() <= 1e-12);
            assert!(f.t1.dot(&f.t2).abs() <= 1e-12);
            assert!((f.t1.cross(&f.t2) - f.normal).amax() <= 1e-9);
        }
    }
}
