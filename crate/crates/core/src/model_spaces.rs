//! Points, spaces, geodesics and comparison triangles for the Euclidean
//! plane, the unit sphere, the sphere rescaled to curvature `kappa > 0`, and
//! the two-triangle glued complex.
//!
//! Geodesic combinations follow the convention
//! `rho(x, combine(alpha, x, y)) = (1 - alpha) * rho(x, y)`, so
//! `combine(1, x, y) = x` and `combine(0, x, y) = y`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glued::{self, Face};
use crate::vec3::{self, Vec3};

/// Tolerance on `|v| = 1` for spherical points.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Spherical inputs this close to antipodal have no unique geodesic.
pub const ANTIPODAL_SLACK: f64 = 1e-9;

/// Relative slack on the triangle inequality for comparison triangles.
pub const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Point {
    Planar { x: f64, y: f64 },
    Spherical { v: Vec3 },
    /// Chart coordinates `(u, w)` on one face of the glued complex.
    Glued { face: Face, u: f64, w: f64 },
}

impl Point {
    pub fn planar(x: f64, y: f64) -> Self {
        Point::Planar { x, y }
    }

    /// A spherical point from a vector that must already be unit length.
    pub fn spherical(v: Vec3) -> Result<Self> {
        let n = vec3::norm(&v);
        if (n - 1.0).abs() > UNIT_NORM_TOL || !n.is_finite() {
            return Err(Error::domain(format!(
                "spherical point must be a unit vector, |v| = {n}"
            )));
        }
        Ok(Point::Spherical { v })
    }

    /// A spherical point in the direction of a nonzero vector.
    pub fn direction(v: Vec3) -> Result<Self> {
        vec3::normalize(&v)
            .map(|v| Point::Spherical { v })
            .ok_or_else(|| Error::domain("zero vector has no direction"))
    }

    /// The point at colatitude `theta` and longitude `phi`.
    pub fn from_polar(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Point::Spherical {
            v: [st * cp, st * sp, ct],
        }
    }

    pub fn as_planar(&self) -> Option<[f64; 2]> {
        match *self {
            Point::Planar { x, y } => Some([x, y]),
            _ => None,
        }
    }

    pub fn as_unit(&self) -> Option<Vec3> {
        match *self {
            Point::Spherical { v } => Some(v),
            _ => None,
        }
    }

    /// Flat coordinate list (planar: 2, spherical: 3, glued: face index, u, w).
    pub fn coords(&self) -> Vec<f64> {
        match *self {
            Point::Planar { x, y } => vec![x, y],
            Point::Spherical { v } => v.to_vec(),
            Point::Glued { face, u, w } => vec![face.index() as f64, u, w],
        }
    }

    fn variant_name(&self) -> &'static str {
        match self {
            Point::Planar { .. } => "planar",
            Point::Spherical { .. } => "spherical",
            Point::Glued { .. } => "glued",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    Plane,
    Sphere,
    ScaledSphere,
    GluedExample,
}

/// A closed ball restricting where points of an experiment may live.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub center: Point,
    pub radius: f64,
}

/// A model space together with its curvature tag and the diameter bound
/// enforced on iteration arenas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Space {
    pub kind: SpaceKind,
    pub kappa: f64,
    pub diameter_cap: f64,
    pub region: Option<Region>,
}

/// Model-space diameter: `pi / sqrt(kappa)` for positive curvature, infinite otherwise.
pub fn d_kappa(kappa: f64) -> f64 {
    if kappa > 0.0 {
        PI / kappa.sqrt()
    } else {
        f64::INFINITY
    }
}

impl Space {
    pub fn plane() -> Self {
        Space {
            kind: SpaceKind::Plane,
            kappa: 0.0,
            diameter_cap: f64::INFINITY,
            region: None,
        }
    }

    pub fn plane_disk(center: [f64; 2], radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Space {
            kind: SpaceKind::Plane,
            kappa: 0.0,
            diameter_cap: 2.0 * radius,
            region: Some(Region {
                center: Point::planar(center[0], center[1]),
                radius,
            }),
        })
    }

    /// The whole unit sphere. Its diameter cap is the open bound `pi/2`.
    pub fn sphere() -> Self {
        Space {
            kind: SpaceKind::Sphere,
            kappa: 1.0,
            diameter_cap: PI / 2.0,
            region: None,
        }
    }

    /// A closed cap of the unit sphere. The cap diameter `2 * radius` must stay below `pi/2`.
    pub fn sphere_cap(center: Vec3, radius: f64) -> Result<Self> {
        Self::scaled_sphere_cap(1.0, center, radius).map(|mut s| {
            s.kind = SpaceKind::Sphere;
            s
        })
    }

    /// The sphere with distances multiplied by `1/sqrt(kappa)`.
    pub fn scaled_sphere(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::domain(format!("scaled sphere needs kappa > 0, got {kappa}")));
        }
        Ok(Space {
            kind: SpaceKind::ScaledSphere,
            kappa,
            diameter_cap: d_kappa(kappa) / 2.0,
            region: None,
        })
    }

    /// A cap of the scaled sphere; `radius` is measured in the scaled metric.
    pub fn scaled_sphere_cap(kappa: f64, center: Vec3, radius: f64) -> Result<Self> {
        let mut s = Self::scaled_sphere(kappa)?;
        let center = Point::direction(center)?;
        if !(radius > 0.0 && 2.0 * radius < d_kappa(kappa) / 2.0) {
            return Err(Error::domain(format!(
                "cap radius {radius} must satisfy 0 < 2r < D_kappa/2 = {}",
                d_kappa(kappa) / 2.0
            )));
        }
        s.diameter_cap = 2.0 * radius;
        s.region = Some(Region { center, radius });
        Ok(s)
    }

    /// The flat two-triangle complex.
    pub fn glued() -> Self {
        Space {
            kind: SpaceKind::GluedExample,
            kappa: 0.0,
            diameter_cap: f64::INFINITY,
            region: None,
        }
    }

    pub fn d_kappa(&self) -> f64 {
        d_kappa(self.kappa)
    }

    pub fn is_spherical(&self) -> bool {
        matches!(self.kind, SpaceKind::Sphere | SpaceKind::ScaledSphere)
    }

    /// Checks the point's variant and its invariant, ignoring any region restriction.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        match (self.kind, p) {
            (SpaceKind::Plane, Point::Planar { x, y }) if x.is_finite() && y.is_finite() => Ok(()),
            (SpaceKind::Sphere | SpaceKind::ScaledSphere, Point::Spherical { v }) => {
                Point::spherical(*v).map(|_| ())
            }
            (SpaceKind::GluedExample, Point::Glued { face, u, w }) => {
                if glued::standard().contains(*face, *u, *w) {
                    Ok(())
                } else {
                    Err(Error::domain(format!(
                        "({u}, {w}) lies outside face {face:?} of the glued complex"
                    )))
                }
            }
            _ => Err(Error::domain(format!(
                "{} point does not belong to a {:?} space",
                p.variant_name(),
                self.kind
            ))),
        }
    }

    /// Membership including the region restriction, with absolute slack `slack`.
    pub fn contains_with_slack(&self, p: &Point, slack: f64) -> bool {
        if self.check_point(p).is_err() {
            return false;
        }
        match &self.region {
            None => true,
            Some(r) => self
                .dist(&r.center, p)
                .map(|d| d <= r.radius + slack)
                .unwrap_or(false),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.contains_with_slack(p, 1e-12)
    }

    /// Distance between two points of this space.
    pub fn dist(&self, p: &Point, q: &Point) -> Result<f64> {
        match (self.kind, p, q) {
            (SpaceKind::Plane, Point::Planar { x: px, y: py }, Point::Planar { x: qx, y: qy }) => {
                Ok((px - qx).hypot(py - qy))
            }
            (SpaceKind::Sphere, Point::Spherical { v: a }, Point::Spherical { v: b }) => {
                Ok(vec3::angle(a, b))
            }
            (SpaceKind::ScaledSphere, Point::Spherical { v: a }, Point::Spherical { v: b }) => {
                Ok(vec3::angle(a, b) / self.kappa.sqrt())
            }
            (SpaceKind::GluedExample, Point::Glued { .. }, Point::Glued { .. }) => {
                glued::standard().dist(p, q)
            }
            _ => Err(Error::domain(format!(
                "cannot measure {} and {} points in a {:?} space",
                p.variant_name(),
                q.variant_name(),
                self.kind
            ))),
        }
    }

    /// The geodesic combination `alpha x + (1 - alpha) y`.
    pub fn combine(&self, alpha: f64, x: &Point, y: &Point) -> Result<Point> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::domain(format!("combination weight {alpha} outside [0, 1]")));
        }
        match (self.kind, x, y) {
            (SpaceKind::Plane, Point::Planar { x: x0, y: x1 }, Point::Planar { x: y0, y: y1 }) => {
                if alpha == 1.0 {
                    return Ok(*x);
                }
                if alpha == 0.0 {
                    return Ok(*y);
                }
                let s = 1.0 - alpha;
                Ok(Point::planar(x0 + s * (y0 - x0), x1 + s * (y1 - x1)))
            }
            (
                SpaceKind::Sphere | SpaceKind::ScaledSphere,
                Point::Spherical { v: a },
                Point::Spherical { v: b },
            ) => slerp(alpha, a, b)
                .map(|v| Point::Spherical { v })
                .map_err(|theta| Error::NonUniqueGeodesic {
                    distance: theta / self.kappa.sqrt(),
                }),
            (SpaceKind::GluedExample, Point::Glued { .. }, Point::Glued { .. }) => {
                glued::standard().combine(alpha, x, y)
            }
            _ => Err(Error::domain(format!(
                "cannot combine {} and {} points in a {:?} space",
                x.variant_name(),
                y.variant_name(),
                self.kind
            ))),
        }
    }

    /// The point on `[x, y]` at distance `s` from `x` (clamped to the segment).
    pub fn point_at_distance(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        let d = self.dist(x, y)?;
        if d == 0.0 {
            return Ok(*x);
        }
        let frac = (s / d).clamp(0.0, 1.0);
        self.combine(1.0 - frac, x, y)
    }

    /// A point of the space used as a default starting location.
    pub fn base_point(&self) -> Point {
        if let Some(r) = &self.region {
            return r.center;
        }
        match self.kind {
            SpaceKind::Plane => Point::planar(0.0, 0.0),
            SpaceKind::Sphere | SpaceKind::ScaledSphere => Point::Spherical { v: [0.0, 0.0, 1.0] },
            SpaceKind::GluedExample => glued::standard().vertex(glued::Vertex::C),
        }
    }
}

/// Arc-length parameterized great-circle interpolation. `Err` carries the
/// angular distance when the endpoints are (nearly) antipodal.
fn slerp(alpha: f64, a: &Vec3, b: &Vec3) -> std::result::Result<Vec3, f64> {
    let theta = vec3::angle(a, b);
    if theta >= PI - ANTIPODAL_SLACK {
        return Err(theta);
    }
    if alpha == 1.0 || theta == 0.0 {
        return Ok(*a);
    }
    if alpha == 0.0 {
        return Ok(*b);
    }
    let st = theta.sin();
    let wa = (alpha * theta).sin() / st;
    let wb = ((1.0 - alpha) * theta).sin() / st;
    let v = vec3::add(&vec3::scale(a, wa), &vec3::scale(b, wb));
    Ok(vec3::normalize(&v).unwrap_or(*a))
}

/// Angle at `x` between the great-circle arcs `[x, y]` and `[x, z]`.
///
/// Solves the spherical law of cosines for the vertex angle. With
/// `cos d = <., .>` and `sin d = |. x .|`, the numerator
/// `cos d(y,z) - cos d(x,y) cos d(x,z)` equals `(x × y)·(x × z)`, so the
/// angle is the one between the two arc normals. It is evaluated with
/// `atan2` to stay accurate near 0 and pi.
pub fn spherical_angle(x: &Point, y: &Point, z: &Point) -> Result<f64> {
    let (x, y, z) = match (x.as_unit(), y.as_unit(), z.as_unit()) {
        (Some(x), Some(y), Some(z)) => (x, y, z),
        _ => return Err(Error::domain("spherical_angle needs spherical points")),
    };
    let nxy = vec3::cross(&x, &y);
    let nxz = vec3::cross(&x, &z);
    let sxy = vec3::norm(&nxy);
    let sxz = vec3::norm(&nxz);
    let dxy = sxy.atan2(vec3::dot(&x, &y));
    let dxz = sxz.atan2(vec3::dot(&x, &z));
    // sin d vanishes at both 0 and pi; either way the vertex angle is undefined.
    if sxy <= f64::EPSILON || sxz <= f64::EPSILON || dxy >= PI || dxz >= PI {
        return Err(Error::domain("degenerate vertex: y or z coincides with x (or its antipode)"));
    }
    Ok(vec3::angle(&nxy, &nxz))
}

/// Canonical comparison triangle in the model space `M^2_kappa`.
///
/// Vertex 1 sits at the origin (plane) or the north pole (sphere), vertex 2
/// along the first axis, and vertex 3 in the upper half. For `kappa > 0` the
/// vertices are unit vectors read in the rescaled metric of
/// [`Space::scaled_sphere`].
pub fn comparison_triangle(d12: f64, d23: f64, d31: f64, kappa: f64) -> Result<[Point; 3]> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::Infeasible(format!("unsupported curvature {kappa}")));
    }
    for d in [d12, d23, d31] {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::Infeasible(format!("side length {d} is not a finite nonnegative number")));
        }
    }
    let perimeter = d12 + d23 + d31;
    if perimeter >= 2.0 * d_kappa(kappa) {
        return Err(Error::Infeasible(format!(
            "perimeter {perimeter} reaches 2 D_kappa = {}",
            2.0 * d_kappa(kappa)
        )));
    }
    let slack = ROUNDING_SLACK * perimeter.max(1.0);
    if d12 > d23 + d31 + slack || d23 > d12 + d31 + slack || d31 > d12 + d23 + slack {
        return Err(Error::Infeasible(format!(
            "sides ({d12}, {d23}, {d31}) violate the triangle inequality"
        )));
    }

    let scale = kappa.sqrt();
    let (a, b, c) = if kappa > 0.0 {
        (d12 * scale, d23 * scale, d31 * scale)
    } else {
        (d12, d23, d31)
    };
    let theta = vertex_angle(a, b, c, kappa > 0.0);

    if kappa == 0.0 {
        let (s, co) = theta.sin_cos();
        Ok([
            Point::planar(0.0, 0.0),
            Point::planar(a, 0.0),
            Point::planar(c * co, c * s),
        ])
    } else {
        let (st, ct) = theta.sin_cos();
        let (sa, ca) = a.sin_cos();
        let (sc, cc) = c.sin_cos();
        Ok([
            Point::Spherical { v: [0.0, 0.0, 1.0] },
            Point::Spherical { v: [sa, 0.0, ca] },
            Point::Spherical { v: [sc * ct, sc * st, cc] },
        ])
    }
}

/// Angle between the sides of lengths `a` and `c`, opposite the side `b`,
/// by the half-angle formula (planar or unit-sphere).
fn vertex_angle(a: f64, b: f64, c: f64, spherical: bool) -> f64 {
    if a == 0.0 || c == 0.0 {
        return 0.0;
    }
    let s = 0.5 * (a + b + c);
    let (sa, sc) = ((s - a).max(0.0), (s - c).max(0.0));
    let ratio = if spherical {
        (sa.sin() * sc.sin()) / (a.sin() * c.sin())
    } else {
        (sa * sc) / (a * c)
    };
    2.0 * ratio.clamp(0.0, 1.0).sqrt().asin()
}

/// The model space of curvature `kappa` (plane or rescaled sphere).
pub fn model_space(kappa: f64) -> Result<Space> {
    if kappa == 0.0 {
        Ok(Space::plane())
    } else if kappa == 1.0 {
        Ok(Space::sphere())
    } else {
        Space::scaled_sphere(kappa)
    }
}

/// Signed margin `d(ȳ1, ȳ2) - rho(y1, y2)` of the CAT(kappa) inequality for
/// `y1` on `[x1, x2]` at arc fraction `s` and `y2` on `[x1, x3]` at arc fraction `t`.
pub fn cat_comparison_check(
    space: &Space,
    x1: &Point,
    x2: &Point,
    x3: &Point,
    s: f64,
    t: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
        return Err(Error::domain("arc fractions must lie in [0, 1]"));
    }
    let d12 = space.dist(x1, x2)?;
    let d23 = space.dist(x2, x3)?;
    let d31 = space.dist(x3, x1)?;
    let [v1, v2, v3] = comparison_triangle(d12, d23, d31, space.kappa)?;
    let model = model_space(space.kappa)?;

    let y1 = space.combine(1.0 - s, x1, x2)?;
    let y2 = space.combine(1.0 - t, x1, x3)?;
    let y1_bar = model.combine(1.0 - s, &v1, &v2)?;
    let y2_bar = model.combine(1.0 - t, &v1, &v3)?;
    Ok(model.dist(&y1_bar, &y2_bar)? - space.dist(&y1, &y2)?)
}

/// The geodesic `[a, b]`, traversed from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSegment {
    pub a: Point,
    pub b: Point,
}

impl GeodesicSegment {
    /// Validates both endpoints and that the geodesic between them is unique.
    pub fn new(space: &Space, a: Point, b: Point) -> Result<Self> {
        space.check_point(&a)?;
        space.check_point(&b)?;
        let d = space.dist(&a, &b)?;
        if d >= space.d_kappa() - ANTIPODAL_SLACK / space.kappa.max(1e-300).sqrt() {
            return Err(Error::NonUniqueGeodesic { distance: d });
        }
        Ok(GeodesicSegment { a, b })
    }

    /// The point at arc fraction `lambda` from `a`.
    pub fn point_at(&self, space: &Space, lambda: f64) -> Result<Point> {
        space.combine(1.0 - lambda, &self.a, &self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn sp(x: f64, y: f64, z: f64) -> Point {
        Point::spherical([x, y, z]).unwrap()
    }

    #[test]
    fn dist_examples() {
        let s = Space::sphere();
        assert_eq!(s.dist(&sp(1.0, 0.0, 0.0), &sp(0.0, 1.0, 0.0)).unwrap(), FRAC_PI_2);
        let p = Space::plane();
        assert_eq!(p.dist(&Point::planar(0.0, 0.0), &Point::planar(3.0, 4.0)).unwrap(), 5.0);
        let k4 = Space::scaled_sphere(4.0).unwrap();
        let d = k4.dist(&sp(1.0, 0.0, 0.0), &sp(0.0, 1.0, 0.0)).unwrap();
        assert!((d - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_distance_matches_numerical_arc_length() {
        // Polyline length of the quarter great circle, then rescaled by 1/sqrt(kappa).
        let n = 200_000;
        let mut len = 0.0;
        let mut prev = [1.0, 0.0, 0.0];
        for i in 1..=n {
            let a = FRAC_PI_2 * i as f64 / n as f64;
            let cur = [a.cos(), a.sin(), 0.0];
            len += vec3::norm(&vec3::sub(&cur, &prev));
            prev = cur;
        }
        let k4 = Space::scaled_sphere(4.0).unwrap();
        let d = k4.dist(&sp(1.0, 0.0, 0.0), &sp(0.0, 1.0, 0.0)).unwrap();
        assert!((d - len / 2.0).abs() < 1e-9);
    }

    #[test]
    fn mismatched_kinds_are_rejected() {
        let s = Space::sphere();
        assert!(matches!(
            s.dist(&Point::planar(0.0, 0.0), &sp(1.0, 0.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(s.check_point(&Point::Spherical { v: [1.0, 1.0, 0.0] }).is_err());
    }

    #[test]
    fn combine_examples() {
        let s = Space::sphere();
        let m = s.combine(0.5, &sp(1.0, 0.0, 0.0), &sp(0.0, 1.0, 0.0)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = m.as_unit().unwrap();
        assert!((v[0] - h).abs() < 1e-15 && (v[1] - h).abs() < 1e-15 && v[2].abs() < 1e-15);

        let p = Space::plane();
        let z = p.combine(0.25, &Point::planar(0.0, 0.0), &Point::planar(4.0, 0.0)).unwrap();
        assert_eq!(z, Point::planar(3.0, 0.0));

        // Arc-length oracle: the point (2/3)(pi/2) along the equator.
        let z = s.combine(1.0 / 3.0, &sp(1.0, 0.0, 0.0), &sp(0.0, 1.0, 0.0)).unwrap();
        let oracle = [(PI / 3.0).cos(), (PI / 3.0).sin(), 0.0];
        let v = z.as_unit().unwrap();
        for i in 0..3 {
            assert!((v[i] - oracle[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn combine_endpoints_are_exact() {
        let s = Space::sphere();
        let (x, y) = (sp(0.6, 0.0, 0.8), sp(0.0, 0.6, 0.8));
        assert_eq!(s.combine(1.0, &x, &y).unwrap(), x);
        assert_eq!(s.combine(0.0, &x, &y).unwrap(), y);
    }

    #[test]
    fn antipodal_combination_fails() {
        let s = Space::sphere();
        let r = s.combine(0.5, &sp(1.0, 0.0, 0.0), &sp(-1.0, 0.0, 0.0));
        assert!(matches!(r, Err(Error::NonUniqueGeodesic { .. })));
    }

    #[test]
    fn spherical_angle_examples() {
        let (x, y, z) = (sp(1.0, 0.0, 0.0), sp(0.0, 1.0, 0.0), sp(0.0, 0.0, 1.0));
        assert!((spherical_angle(&x, &y, &z).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(spherical_angle(&x, &y, &y).unwrap(), 0.0);
        let a = spherical_angle(&x, &y, &sp(0.0, -1.0, 0.0)).unwrap();
        assert!((a - PI).abs() < 1e-12);
        assert!(spherical_angle(&x, &x, &y).is_err());
    }

    #[test]
    fn opposite_directions_agree_with_euclidean_tangent_oracle() {
        // Tangents at x toward y and z computed in R^3, angle measured there.
        let x = [1.0, 0.0, 0.0];
        let y = [0.0, 1.0, 0.0];
        let z = [0.0, -1.0, 0.0];
        let ty = vec3::sub(&y, &vec3::scale(&x, vec3::dot(&x, &y)));
        let tz = vec3::sub(&z, &vec3::scale(&x, vec3::dot(&x, &z)));
        let oracle = (vec3::dot(&ty, &tz) / (vec3::norm(&ty) * vec3::norm(&tz))).acos();
        let got = spherical_angle(&sp(1.0, 0.0, 0.0), &sp(0.0, 1.0, 0.0), &sp(0.0, -1.0, 0.0)).unwrap();
        assert!((got - oracle).abs() < 1e-12);
    }

    #[test]
    fn comparison_triangle_examples() {
        let [a, b, c] = comparison_triangle(1.0, 1.0, 1.0, 0.0).unwrap();
        let p = Space::plane();
        for (u, v) in [(a, b), (b, c), (c, a)] {
            assert!((p.dist(&u, &v).unwrap() - 1.0).abs() < 1e-12);
        }
        let [a, b, c] = comparison_triangle(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, 1.0).unwrap();
        let s = Space::sphere();
        let (va, vb, vc) = (a.as_unit().unwrap(), b.as_unit().unwrap(), c.as_unit().unwrap());
        assert!(vec3::dot(&va, &vb).abs() < 1e-15);
        assert!(vec3::dot(&vb, &vc).abs() < 1e-15);
        assert!(vec3::dot(&vc, &va).abs() < 1e-15);
        assert!((spherical_angle(&a, &b, &c).unwrap() - FRAC_PI_2).abs() < 1e-12);

        let [a, b, c] = comparison_triangle(0.5, 0.6, 0.7, 1.0).unwrap();
        assert!((s.dist(&a, &b).unwrap() - 0.5).abs() < 1e-10);
        assert!((s.dist(&b, &c).unwrap() - 0.6).abs() < 1e-10);
        assert!((s.dist(&c, &a).unwrap() - 0.7).abs() < 1e-10);
    }

    #[test]
    fn comparison_triangle_rescaled_sphere() {
        let [a, b, c] = comparison_triangle(0.2, 0.3, 0.4, 4.0).unwrap();
        let s = Space::scaled_sphere(4.0).unwrap();
        assert!((s.dist(&a, &b).unwrap() - 0.2).abs() < 1e-12);
        assert!((s.dist(&b, &c).unwrap() - 0.3).abs() < 1e-12);
        assert!((s.dist(&c, &a).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn comparison_triangle_infeasible() {
        assert!(matches!(comparison_triangle(1.0, 1.0, 3.0, 0.0), Err(Error::Infeasible(_))));
        assert!(matches!(comparison_triangle(2.0, 2.0, 2.5, 1.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn self_comparison_margins_vanish() {
        let p = Space::plane();
        let m = cat_comparison_check(
            &p,
            &Point::planar(0.3, -1.0),
            &Point::planar(2.0, 0.5),
            &Point::planar(-1.0, 2.0),
            0.3,
            0.8,
        )
        .unwrap();
        assert!(m.abs() < 1e-12);
        let s = Space::sphere();
        let m = cat_comparison_check(
            &s,
            &Point::from_polar(0.2, 0.0),
            &Point::from_polar(0.6, 1.0),
            &Point::from_polar(0.5, -2.0),
            0.4,
            0.7,
        )
        .unwrap();
        assert!(m.abs() < 1e-10);
    }

    #[test]
    fn cap_constructor_enforces_diameter_bound() {
        assert!(Space::sphere_cap([0.0, 0.0, 1.0], 0.5).is_ok());
        assert!(Space::sphere_cap([0.0, 0.0, 1.0], 0.8).is_err());
        let s = Space::sphere_cap([0.0, 0.0, 1.0], 0.5).unwrap();
        assert!(s.contains(&Point::from_polar(0.49, 2.0)));
        assert!(!s.contains(&Point::from_polar(0.51, 2.0)));
    }
}
