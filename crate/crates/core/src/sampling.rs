//! Uniform samplers for the admissible regions of each space.

use rand::Rng;

use crate::error::{Error, Result};
use crate::glued;
use crate::model_spaces::{Point, Space, SpaceKind};
use crate::vec3::{self, Vec3};

/// Half-width of the square used for unrestricted planar sampling.
pub const PLANE_HALF_WIDTH: f64 = 2.0;

/// Angular radius used for spheres without a region.
pub const DEFAULT_CAP_RADIUS: f64 = 0.7;

/// Uniform point of the cap of angular radius `radius` about `center`.
///
/// The height above the cap's base plane is uniform in `[cos r, 1]`
/// (Archimedes), so no rejection loop is needed.
pub fn sample_cap<R: Rng + ?Sized>(rng: &mut R, center: &Vec3, radius: f64) -> Vec3 {
    let z = 1.0 - rng.random::<f64>() * (1.0 - radius.cos());
    let phi = rng.random::<f64>() * std::f64::consts::TAU;
    let rho = (1.0 - z * z).max(0.0).sqrt();
    let (s, c) = phi.sin_cos();
    let v = [rho * c, rho * s, z];
    rotate_pole_to(&v, center)
}

/// Applies the rotation taking the north pole to `center` along their great circle.
pub fn rotate_pole_to(v: &Vec3, center: &Vec3) -> Vec3 {
    let pole = [0.0, 0.0, 1.0];
    let axis = vec3::cross(&pole, center);
    match vec3::normalize(&axis) {
        Some(axis) => vec3::rotate(v, &axis, vec3::angle(&pole, center)),
        None if center[2] > 0.0 => *v,
        None => [v[0], -v[1], -v[2]],
    }
}

/// Uniform point of the disk of radius `radius` about `center`.
pub fn sample_disk<R: Rng + ?Sized>(rng: &mut R, center: [f64; 2], radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let (s, c) = (rng.random::<f64>() * std::f64::consts::TAU).sin_cos();
    Point::planar(center[0] + r * c, center[1] + r * s)
}

/// Uniform point of the space's region, or of a default bounded piece of it.
pub fn sample_point<R: Rng + ?Sized>(space: &Space, rng: &mut R) -> Result<Point> {
    match (space.kind, &space.region) {
        (SpaceKind::Plane, Some(r)) => {
            let c = r.center.as_planar().ok_or_else(|| Error::domain("planar region center"))?;
            Ok(sample_disk(rng, c, r.radius))
        }
        (SpaceKind::Plane, None) => {
            let w = PLANE_HALF_WIDTH;
            Ok(Point::planar(
                rng.random_range(-w..=w),
                rng.random_range(-w..=w),
            ))
        }
        (SpaceKind::Sphere | SpaceKind::ScaledSphere, region) => {
            let (center, radius) = match region {
                Some(r) => (
                    r.center.as_unit().ok_or_else(|| Error::domain("spherical region center"))?,
                    r.radius * space.kappa.sqrt(),
                ),
                None => ([0.0, 0.0, 1.0], DEFAULT_CAP_RADIUS),
            };
            Ok(Point::Spherical { v: sample_cap(rng, &center, radius) })
        }
        (SpaceKind::GluedExample, _) => Ok(glued::standard().sample(rng)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::trial_rng;

    #[test]
    fn cap_samples_stay_in_cap() {
        let center = vec3::normalize(&[0.3, -0.2, 0.5]).unwrap();
        let mut rng = trial_rng(3, 0);
        for _ in 0..10_000 {
            let v = sample_cap(&mut rng, &center, 0.7);
            assert!((vec3::norm(&v) - 1.0).abs() < 1e-12);
            assert!(vec3::angle(&v, &center) <= 0.7 + 1e-12);
        }
    }

    #[test]
    fn cap_height_is_uniform() {
        // Mean of cos(distance to center) is the midpoint of [cos r, 1].
        let mut rng = trial_rng(5, 0);
        let n = 200_000;
        let r: f64 = 0.7;
        let mean: f64 = (0..n)
            .map(|_| sample_cap(&mut rng, &[0.0, 0.0, 1.0], r)[2])
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5 * (1.0 + r.cos())).abs() < 1e-3);
    }

    #[test]
    fn south_pole_center() {
        let v = rotate_pole_to(&[0.0, 0.0, 1.0], &[0.0, 0.0, -1.0]);
        assert_eq!(v, [0.0, 0.0, -1.0]);
    }
}
