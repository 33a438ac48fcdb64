//! The four-point function
//!
//! ```text
//! h(A,B;C,D) = (cos ρ(A,C) + cos ρ(B,D) − cos ρ(A,D) − cos ρ(B,C)) / (ρ(A,B) ρ(C,D))
//! ```
//!
//! and its partition identities, bounds and small-segment limit.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_spaces::{spherical_angle, Point, Space, SpaceKind};
use crate::vec3;

/// Quadruples with `ρ(A,B) ρ(C,D)` below this are rejected.
pub const MIN_DENOMINATOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadruple {
    pub a: Point,
    pub b: Point,
    pub c: Point,
    pub d: Point,
}

impl Quadruple {
    pub fn new(a: Point, b: Point, c: Point, d: Point) -> Self {
        Quadruple { a, b, c, d }
    }

    /// `h(C,D;A,B)`.
    pub fn swapped(&self) -> Self {
        Quadruple { a: self.c, b: self.d, c: self.a, d: self.b }
    }
}

/// The six pairwise distances of a quadruple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distances {
    pub ab: f64,
    pub cd: f64,
    pub ac: f64,
    pub bd: f64,
    pub ad: f64,
    pub bc: f64,
}

impl Distances {
    pub fn of(space: &Space, q: &Quadruple) -> Result<Self> {
        Ok(Distances {
            ab: space.dist(&q.a, &q.b)?,
            cd: space.dist(&q.c, &q.d)?,
            ac: space.dist(&q.a, &q.c)?,
            bd: space.dist(&q.b, &q.d)?,
            ad: space.dist(&q.a, &q.d)?,
            bc: space.dist(&q.b, &q.c)?,
        })
    }

    pub fn max(&self) -> f64 {
        [self.ab, self.cd, self.ac, self.bd, self.ad, self.bc]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Distances {
            ab: self.ab * s,
            cd: self.cd * s,
            ac: self.ac * s,
            bd: self.bd * s,
            ad: self.ad * s,
            bc: self.bc * s,
        }
    }
}

fn half_sin2(d: f64) -> f64 {
    let s = (0.5 * d).sin();
    s * s
}

/// `h` from the six distances, with `1 − cos d` written as `2 sin²(d/2)` to
/// avoid cancellation. Paired terms are summed first so that exchanging the
/// pairs `(A,B)` and `(C,D)` gives the same value bit for bit.
pub fn h_from_distances(d: &Distances) -> f64 {
    let num = 2.0 * ((half_sin2(d.ad) + half_sin2(d.bc)) - (half_sin2(d.ac) + half_sin2(d.bd)));
    num / (d.ab * d.cd)
}

fn check_regime(space: &Space, d: &Distances) -> Result<()> {
    if d.ab == 0.0 || d.cd == 0.0 || d.ab * d.cd < MIN_DENOMINATOR {
        return Err(Error::DegenerateQuadruple(format!(
            "ρ(A,B) ρ(C,D) = {} below {MIN_DENOMINATOR}",
            d.ab * d.cd
        )));
    }
    let m = d.max() * space.kappa.max(1.0).sqrt();
    if m >= FRAC_PI_2 {
        return Err(Error::OutOfRegime { max_distance: m });
    }
    Ok(())
}

/// `h` on unit-scale spherical points without any degeneracy check. On the
/// sphere `cos ρ(U,V) = ⟨U,V⟩`, so the numerator is `⟨A − B, C − D⟩`.
fn h_sphere_raw(q: &Quadruple) -> Result<f64> {
    let unit = |p: &Point| p.as_unit().ok_or_else(|| Error::domain("h on a sphere needs spherical points"));
    let (a, b, c, d) = (unit(&q.a)?, unit(&q.b)?, unit(&q.c)?, unit(&q.d)?);
    let num = vec3::dot(&vec3::sub(&a, &b), &vec3::sub(&c, &d));
    Ok(num / (vec3::angle(&a, &b) * vec3::angle(&c, &d)))
}

/// `h(A,B;C,D)` measured in unit curvature scale.
pub fn h(space: &Space, q: &Quadruple) -> Result<f64> {
    let d = Distances::of(space, q)?;
    check_regime(space, &d)?;
    match space.kind {
        SpaceKind::Sphere | SpaceKind::ScaledSphere => h_sphere_raw(q),
        SpaceKind::Plane | SpaceKind::GluedExample => Ok(h_from_distances(&d)),
    }
}

/// `h` after multiplying all distances by the factor that puts the largest
/// pairwise distance at 1. Returns `(h, factor)`.
pub fn h_rescaled(space: &Space, q: &Quadruple) -> Result<(f64, f64)> {
    let d = Distances::of(space, q)?;
    let m = d.max();
    if m == 0.0 {
        return Err(Error::DegenerateQuadruple("all four points coincide".into()));
    }
    let factor = 1.0 / m;
    let ds = d.scaled(factor);
    if ds.ab * ds.cd < MIN_DENOMINATOR {
        return Err(Error::DegenerateQuadruple(format!(
            "rescaled ρ(A,B) ρ(C,D) = {} below {MIN_DENOMINATOR}",
            ds.ab * ds.cd
        )));
    }
    Ok((h_from_distances(&ds), factor))
}

/// `|h(A,B;C,D) − (ρ(A,X) h(A,X;C,D) + ρ(X,B) h(X,B;C,D)) / ρ(A,B)|` for `X` on `[A,B]`.
pub fn h_decompose_margin(space: &Space, q: &Quadruple, x: &Point) -> Result<f64> {
    let ab = space.dist(&q.a, &q.b)?;
    let (ax, xb) = (space.dist(&q.a, x)?, space.dist(x, &q.b)?);
    if ax == 0.0 || xb == 0.0 {
        return Err(Error::DegenerateQuadruple("split point coincides with an endpoint".into()));
    }
    let whole = h(space, q)?;
    let left = h(space, &Quadruple { b: *x, ..*q })?;
    let right = h(space, &Quadruple { a: *x, ..*q })?;
    Ok((whole - (ax / ab * left + xb / ab * right)).abs())
}

/// Points splitting `[p, q]` into `n` pieces of equal length.
fn partition(space: &Space, p: &Point, q: &Point, n: u32) -> Result<Vec<Point>> {
    (0..=n)
        .map(|i| match i {
            0 => Ok(*p),
            i if i == n => Ok(*q),
            i => space.combine(1.0 - f64::from(i) / f64::from(n), p, q),
        })
        .collect()
}

/// `(1/nm) Σ_i Σ_j h(A_{i−1},A_i;C_{j−1},C_j)` over equal partitions of `[A,B]` and `[C,D]`.
pub fn h_partition_average(space: &Space, q: &Quadruple, n: u32, m: u32) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::domain("partition counts must be positive"));
    }
    let pa = partition(space, &q.a, &q.b, n)?;
    let pc = partition(space, &q.c, &q.d, m)?;
    let mut sum = 0.0;
    for i in 1..pa.len() {
        for j in 1..pc.len() {
            sum += h(space, &Quadruple::new(pa[i - 1], pa[i], pc[j - 1], pc[j]))?;
        }
    }
    Ok(sum / f64::from(n * m))
}

/// `|h(A,B;C,D) − (1/nm) Σ_i Σ_j h(A_{i−1},A_i;C_{j−1},C_j)|` for equal partitions.
pub fn h_additivity_margin(space: &Space, q: &Quadruple, n: u32, m: u32) -> Result<f64> {
    let avg = h_partition_average(space, q, n, m)?;
    Ok((h(space, q)? - avg).abs())
}

/// `V − V_s` for the point `V_s` at arc length `s` from `V` toward `W`,
/// written as `2 sin²(s/2) V − sin(s) e` with `e` the unit tangent at `V`
/// toward `W`. Forming the difference of two nearby unit vectors directly
/// would lose about `log10(1/s)` digits.
fn short_chord(v: &vec3::Vec3, w: &vec3::Vec3, s: f64) -> Result<vec3::Vec3> {
    let tangent = vec3::sub(w, &vec3::scale(v, vec3::dot(v, w)));
    let e = vec3::normalize(&tangent).ok_or_else(|| Error::domain("direction is parallel to the base point"))?;
    let half = (0.5 * s).sin();
    Ok(vec3::sub(&vec3::scale(v, 2.0 * half * half), &vec3::scale(&e, s.sin())))
}

/// The pair `(h(P, P_x; Q, Q_y), sin ξx sin ξy + cos ξx cos ξy cos d(P,Q))`
/// on the unit sphere, with `ξx = ∠_P(Q,X)` and `ξy = π − ∠_Q(Y,P)`.
///
/// `h` is evaluated in its inner-product form `⟨P − P_x, Q − Q_y⟩ / (x y)`
/// with both chords computed by [`short_chord`], and without the degeneracy
/// threshold, since the limit is taken exactly where that threshold bites.
/// The closed form assumes `X` and `Y` lie on the same side of the great
/// circle through `P` and `Q`.
pub fn h_limit_check(p: &Point, x_dir: &Point, q: &Point, y_dir: &Point, x: f64, y: f64) -> Result<(f64, f64)> {
    let sphere = Space::sphere();
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::domain("limit arc lengths must be positive"));
    }
    let unit = |p: &Point| p.as_unit().ok_or_else(|| Error::domain("limit check needs spherical points"));
    let xi_x = spherical_angle(p, q, x_dir)?;
    let xi_y = std::f64::consts::PI - spherical_angle(q, y_dir, p)?;
    let dpq = sphere.dist(p, q)?;
    let chord_p = short_chord(&unit(p)?, &unit(x_dir)?, x)?;
    let chord_q = short_chord(&unit(q)?, &unit(y_dir)?, y)?;
    let hval = vec3::dot(&chord_p, &chord_q) / (x * y);
    let formula = xi_x.sin() * xi_y.sin() + xi_x.cos() * xi_y.cos() * dpq.cos();
    Ok((hval, formula))
}
