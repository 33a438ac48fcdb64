//! Built-in nonexpansive maps and contractions with known fixed-point sets.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, trial_rng, Execution};
use crate::model_spaces::{GeodesicSegment, Point, Space};
use crate::projections::{project_segment, FixSet};
use crate::sampling::sample_point;
use crate::vec3::{self, Vec3};

/// Slack allowed when checking that a map's input lies in its region.
pub const ADMISSIBLE_SLACK: f64 = 1e-9;

/// Pairs closer than this are skipped by [`MapSpec::empirical_lipschitz`].
const MIN_PAIR_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapKind {
    Identity,
    Rotation { axis: Vec3, angle: f64 },
    SegmentProjection { segment: GeodesicSegment },
    /// `x ↦` the point of `[anchor, x]` at distance `k ρ(anchor, x)` from the anchor.
    Homothety { anchor: Point, k: f64 },
    Constant { point: Point },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub kind: MapKind,
    pub space: Space,
}

/// Upper bound on the contraction constant allowed by the convergence
/// theorem on a CAT(1) space of diameter `m`: `2 sin²(m/2) cos(m) / m²`.
pub fn theorem_k_bound(m: f64) -> Result<f64> {
    if !(m > 0.0 && m < FRAC_PI_2) {
        return Err(Error::domain(format!("M = {m} must lie in (0, pi/2)")));
    }
    let s = (0.5 * m).sin();
    Ok(2.0 * s * s * m.cos() / (m * m))
}

impl MapSpec {
    /// Validates that `kind` is admissible on `space`.
    pub fn new(space: Space, kind: MapKind) -> Result<Self> {
        let in_region = |p: &Point, what: &str| -> Result<()> {
            space.check_point(p)?;
            if space.contains_with_slack(p, ADMISSIBLE_SLACK) {
                Ok(())
            } else {
                Err(Error::domain(format!("{what} lies outside the admissible region")))
            }
        };
        match &kind {
            MapKind::Identity => {}
            MapKind::Rotation { axis, angle } => {
                if !space.is_spherical() {
                    return Err(Error::domain("rotations are only defined on spheres"));
                }
                if (vec3::norm(axis) - 1.0).abs() > 1e-12 || !angle.is_finite() {
                    return Err(Error::domain("rotation axis must be a unit vector"));
                }
                if let Some(r) = &space.region {
                    let c = r.center.as_unit().expect("spherical region");
                    if vec3::norm(&vec3::cross(&c, axis)) > 1e-12 {
                        return Err(Error::domain("rotation axis must pass through the cap center"));
                    }
                }
            }
            MapKind::SegmentProjection { segment } => {
                // On a sphere the feet of perpendiculars spread by 1/cos r at
                // distance r from the arc, so the projection expands distances.
                if space.is_spherical() {
                    return Err(Error::domain(
                        "segment projection is not nonexpansive on a sphere; use the plane or the glued complex",
                    ));
                }
                GeodesicSegment::new(&space, segment.a, segment.b)?;
                in_region(&segment.a, "segment endpoint")?;
                in_region(&segment.b, "segment endpoint")?;
            }
            MapKind::Homothety { anchor, k } => {
                if !(*k > 0.0 && *k < 1.0) {
                    return Err(Error::domain(format!("homothety ratio k = {k} must lie in (0, 1)")));
                }
                in_region(anchor, "homothety anchor")?;
            }
            MapKind::Constant { point } => in_region(point, "constant value")?,
        }
        Ok(MapSpec { kind, space })
    }

    pub fn identity(space: Space) -> Self {
        MapSpec { kind: MapKind::Identity, space }
    }

    pub fn homothety(space: Space, anchor: Point, k: f64) -> Result<Self> {
        Self::new(space, MapKind::Homothety { anchor, k })
    }

    pub fn rotation(space: Space, axis: Vec3, angle: f64) -> Result<Self> {
        Self::new(space, MapKind::Rotation { axis, angle })
    }

    pub fn segment_projection(space: Space, a: Point, b: Point) -> Result<Self> {
        Self::new(space, MapKind::SegmentProjection { segment: GeodesicSegment { a, b } })
    }

    pub fn constant(space: Space, point: Point) -> Result<Self> {
        Self::new(space, MapKind::Constant { point })
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        self.space.check_point(x)?;
        if !self.space.contains_with_slack(x, ADMISSIBLE_SLACK) {
            return Err(Error::domain("map input lies outside the admissible region"));
        }
        match &self.kind {
            MapKind::Identity => Ok(*x),
            MapKind::Rotation { axis, angle } => {
                let v = x.as_unit().expect("checked spherical point");
                Ok(Point::Spherical { v: vec3::rotate(&v, axis, *angle) })
            }
            MapKind::SegmentProjection { segment } => {
                Ok(project_segment(&self.space, segment, x)?.point)
            }
            MapKind::Homothety { anchor, k } => self.space.combine(1.0 - k, anchor, x),
            MapKind::Constant { point } => Ok(*point),
        }
    }

    pub fn fix_set(&self) -> FixSet {
        match &self.kind {
            MapKind::Identity => FixSet::WholeSpace,
            MapKind::Rotation { axis, angle } => {
                if angle.rem_euclid(std::f64::consts::TAU) == 0.0 {
                    return FixSet::WholeSpace;
                }
                let pole = match &self.space.region {
                    Some(r) if vec3::dot(&r.center.as_unit().expect("spherical region"), axis) < 0.0 => {
                        vec3::scale(axis, -1.0)
                    }
                    _ => *axis,
                };
                FixSet::Singleton { point: Point::Spherical { v: pole } }
            }
            MapKind::SegmentProjection { segment } => FixSet::Segment { segment: *segment },
            MapKind::Homothety { anchor, .. } => FixSet::Singleton { point: *anchor },
            MapKind::Constant { point } => FixSet::Singleton { point: *point },
        }
    }

    /// Diameter of the space in unit-curvature scale, used for the
    /// spherical contraction bounds.
    pub fn unit_scale_diameter(&self) -> f64 {
        let d = self.space.diameter_cap * self.space.kappa.sqrt();
        if self.space.is_spherical() {
            d.min(FRAC_PI_2)
        } else {
            d
        }
    }

    /// A proven upper bound on the Lipschitz constant.
    ///
    /// A homothety with ratio `k` is `k`-Lipschitz on a CAT(0) space, but on
    /// a CAT(1) space of diameter `M` only `sin(kM)/sin(M)`-Lipschitz.
    pub fn lipschitz_bound(&self) -> f64 {
        match &self.kind {
            MapKind::Constant { .. } => 0.0,
            MapKind::Homothety { k, .. } if self.space.is_spherical() => {
                let m = self.unit_scale_diameter();
                (k * m).sin() / m.sin()
            }
            MapKind::Homothety { k, .. } => *k,
            _ => 1.0,
        }
    }

    /// Largest observed ratio `ρ(f x, f y) / ρ(x, y)` over `trials` sampled pairs.
    pub fn empirical_lipschitz(&self, trials: u64, seed: u64) -> Result<f64> {
        if trials == 0 {
            return Err(Error::domain("empirical Lipschitz estimate needs at least one trial"));
        }
        let ratios = map_indexed(Execution::default(), trials, |i| -> Result<Option<f64>> {
            let mut rng = trial_rng(seed, i);
            let x = sample_point(&self.space, &mut rng)?;
            let y = sample_point(&self.space, &mut rng)?;
            let d = self.space.dist(&x, &y)?;
            if d < MIN_PAIR_DISTANCE {
                return Ok(None);
            }
            Ok(Some(self.space.dist(&self.apply(&x)?, &self.apply(&y)?)? / d))
        });
        let mut worst = 0.0f64;
        for r in ratios {
            if let Some(r) = r? {
                worst = worst.max(r);
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn k_bound_values() {
        assert!((theorem_k_bound(PI / 3.0).unwrap() - 0.227_972).abs() < 1e-6);
        assert!((theorem_k_bound(1e-4).unwrap() - 0.5).abs() < 1e-8);
        assert!(theorem_k_bound(FRAC_PI_2).is_err());
        assert!(theorem_k_bound(0.0).is_err());
        let mut prev = 0.5;
        for i in 1..100 {
            let b = theorem_k_bound(i as f64 * 0.0157).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn apply_examples() {
        let p = Space::plane();
        let x = Point::planar(1.5, -2.0);
        assert_eq!(MapSpec::identity(p).apply(&x).unwrap(), x);
        let c = Point::planar(0.4, 0.8);
        assert_eq!(MapSpec::homothety(p, c, 0.3).unwrap().apply(&c).unwrap(), c);

        let s = Space::sphere();
        let r = MapSpec::rotation(s, [0.0, 0.0, 1.0], FRAC_PI_2).unwrap();
        let v = r.apply(&Point::spherical([1.0, 0.0, 0.0]).unwrap()).unwrap().as_unit().unwrap();
        assert!(v[0].abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15 && v[2] == 0.0);
    }

    #[test]
    fn homothety_distance_ratio() {
        let p = Space::plane();
        let c = Point::planar(0.4, 0.8);
        let f = MapSpec::homothety(p, c, 0.3).unwrap();
        let x = Point::planar(-1.0, 2.0);
        let fx = f.apply(&x).unwrap();
        assert!((p.dist(&c, &fx).unwrap() - 0.3 * p.dist(&c, &x).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn fix_sets() {
        let cap = Space::sphere_cap([0.0, 0.0, 1.0], 0.5).unwrap();
        let r = MapSpec::rotation(cap, [0.0, 0.0, 1.0], 1.0).unwrap();
        assert_eq!(
            r.fix_set(),
            FixSet::Singleton { point: Point::Spherical { v: [0.0, 0.0, 1.0] } }
        );
        assert_eq!(MapSpec::identity(Space::plane()).fix_set(), FixSet::WholeSpace);
        let (a, b) = (Point::planar(-1.0, 0.0), Point::planar(1.0, 0.0));
        let t = MapSpec::segment_projection(Space::plane(), a, b).unwrap();
        assert_eq!(t.fix_set(), FixSet::Segment { segment: GeodesicSegment { a, b } });
    }

    #[test]
    fn admissibility() {
        assert!(MapSpec::rotation(Space::plane(), [0.0, 0.0, 1.0], 1.0).is_err());
        let a = Point::from_polar(0.1, 0.0);
        let b = Point::from_polar(0.1, 2.0);
        assert!(MapSpec::segment_projection(Space::sphere(), a, b).is_err());
        let narrow = Space::sphere_cap([0.0, 0.0, 1.0], 0.7).unwrap();
        assert!(MapSpec::segment_projection(narrow, a, b).is_err());
        assert!(MapSpec::homothety(Space::plane(), Point::planar(0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn empirical_lipschitz_examples() {
        let p = Space::plane();
        assert!((MapSpec::identity(p).empirical_lipschitz(200, 1).unwrap() - 1.0).abs() < 1e-12);
        let f = MapSpec::homothety(p, Point::planar(0.4, 0.8), 0.3).unwrap();
        assert!(f.empirical_lipschitz(1000, 1).unwrap() <= 0.3 + 1e-9);

        let cap = Space::sphere_cap([0.0, 0.0, 1.0], 0.5).unwrap();
        let f = MapSpec::homothety(cap, Point::from_polar(0.3, 0.0), 0.3).unwrap();
        let bound = 0.3f64.sin() / 1f64.sin();
        assert!((bound - 0.351_195).abs() < 1e-6);
        assert_eq!(f.lipschitz_bound(), bound);
        let l = f.empirical_lipschitz(20_000, 2).unwrap();
        assert!(l <= bound + 1e-9, "{l} > {bound}");
        assert!(l > 0.3);
    }
}
