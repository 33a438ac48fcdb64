//! Metric projection onto geodesic segments and fixed-point sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glued;
use crate::minimize::minimize_unimodal;
use crate::model_spaces::{spherical_angle, GeodesicSegment, Point, Space, SpaceKind};

/// Bracket width on the segment parameter for the golden-section search.
pub const PARAMETER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub point: Point,
    /// Arc fraction from the segment's first endpoint.
    pub parameter: f64,
    pub distance: f64,
}

/// A closed convex set that can serve as `Fix T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FixSet {
    Singleton { point: Point },
    Segment { segment: GeodesicSegment },
    WholeSpace,
}

/// Clamped orthogonal projection of `x` onto the planar segment `[a, b]`.
/// Returns `(parameter, foot, distance)`.
pub fn planar_segment_projection(a: [f64; 2], b: [f64; 2], x: [f64; 2]) -> (f64, [f64; 2], f64) {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let lambda = if len2 == 0.0 {
        0.0
    } else {
        (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    };
    let foot = if lambda == 0.0 {
        a
    } else if lambda == 1.0 {
        b
    } else {
        [a[0] + lambda * ab[0], a[1] + lambda * ab[1]]
    };
    (lambda, foot, (x[0] - foot[0]).hypot(x[1] - foot[1]))
}

/// Golden-section projection along a parameterized segment. `point_at(0)`
/// must be `a` and `point_at(1)` must be `b`; endpoint minimizers are
/// reported as the endpoints themselves.
pub fn project_by_search<P, D>(
    point_at: P,
    dist_to: D,
    a: &Point,
    b: &Point,
) -> Result<ProjectionResult>
where
    P: Fn(f64) -> Result<Point>,
    D: Fn(&Point) -> Result<f64>,
{
    let mut failure = None;
    let (lambda, _) = minimize_unimodal(
        |lambda| match point_at(lambda).and_then(|p| dist_to(&p)) {
            Ok(d) => d,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        0.0,
        1.0,
        PARAMETER_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let point = if lambda == 0.0 {
        *a
    } else if lambda == 1.0 {
        *b
    } else {
        point_at(lambda)?
    };
    Ok(ProjectionResult {
        point,
        parameter: lambda,
        distance: dist_to(&point)?,
    })
}

/// Nearest point of `seg` to `x`.
pub fn project_segment(space: &Space, seg: &GeodesicSegment, x: &Point) -> Result<ProjectionResult> {
    space.check_point(x)?;
    let result = match space.kind {
        SpaceKind::Plane => {
            let (a, b, p) = match (seg.a.as_planar(), seg.b.as_planar(), x.as_planar()) {
                (Some(a), Some(b), Some(p)) => (a, b, p),
                _ => return Err(Error::domain("planar projection needs planar points")),
            };
            let (lambda, foot, distance) = planar_segment_projection(a, b, p);
            let point = if lambda == 0.0 {
                seg.a
            } else if lambda == 1.0 {
                seg.b
            } else {
                Point::planar(foot[0], foot[1])
            };
            ProjectionResult { point, parameter: lambda, distance }
        }
        SpaceKind::Sphere | SpaceKind::ScaledSphere => project_by_search(
            |lambda| seg.point_at(space, lambda),
            |p| space.dist(x, p),
            &seg.a,
            &seg.b,
        )?,
        SpaceKind::GluedExample => glued::standard().project_segment(&seg.a, &seg.b, x)?,
    };
    let limit = space.d_kappa() / 2.0;
    if result.distance >= limit {
        return Err(Error::OutOfRange(format!(
            "distance {} to the segment is not below D_kappa/2 = {limit}",
            result.distance
        )));
    }
    Ok(result)
}

/// Nearest point of `fs` to `x`.
pub fn project_fixset(space: &Space, fs: &FixSet, x: &Point) -> Result<Point> {
    match fs {
        FixSet::Singleton { point } => {
            let d = space.dist(point, x)?;
            if d >= space.d_kappa() / 2.0 {
                return Err(Error::OutOfRange(format!(
                    "distance {d} to the fixed point is not below D_kappa/2"
                )));
            }
            Ok(*point)
        }
        FixSet::Segment { segment } => Ok(project_segment(space, segment, x)?.point),
        FixSet::WholeSpace => {
            space.check_point(x)?;
            Ok(*x)
        }
    }
}

/// Angle at the vertex opposite side `c` in a planar triangle with sides `a`, `b`, `c`.
pub fn euclidean_comparison_angle(a: f64, b: f64, c: f64) -> f64 {
    let cos = (a * a + b * b - c * c) / (2.0 * a * b);
    cos.clamp(-1.0, 1.0).acos()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleCheck {
    Angle(f64),
    NotApplicable,
}

/// The angle at `q = P(x)` between the directions to `x` and to another
/// point of the fixed set. For a projection this is at least `pi/2`.
pub fn projection_angle_check(space: &Space, fs: &FixSet, x: &Point) -> Result<AngleCheck> {
    let FixSet::Segment { segment } = fs else {
        return Ok(AngleCheck::NotApplicable);
    };
    let q = project_fixset(space, fs, x)?;
    if space.dist(&q, x)? == 0.0 {
        return Ok(AngleCheck::NotApplicable);
    }
    let other = if space.dist(&q, &segment.b)? > 0.0 {
        segment.b
    } else {
        segment.a
    };
    if space.dist(&q, &other)? == 0.0 {
        return Ok(AngleCheck::NotApplicable);
    }
    let angle = match space.kind {
        SpaceKind::Sphere | SpaceKind::ScaledSphere => spherical_angle(&q, x, &other)?,
        SpaceKind::Plane => euclidean_comparison_angle(
            space.dist(&q, x)?,
            space.dist(&q, &other)?,
            space.dist(x, &other)?,
        ),
        SpaceKind::GluedExample => glued::standard().angle_at(&q, x, &other)?,
    };
    Ok(AngleCheck::Angle(angle))
}
