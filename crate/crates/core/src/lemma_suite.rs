//! Seeded randomized checks of the spherical inequalities and of the
//! properties of `h`. Every check reports a signed margin that must stay at
//! or above `-tolerance`.

use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, trial_rng, Execution};
use crate::glued;
use crate::model_spaces::{Point, Space};
use crate::quadrilateral::{
    h, h_additivity_margin, h_decompose_margin, h_limit_check, h_partition_average, h_rescaled, Quadruple,
};
use crate::sampling::sample_cap;
use crate::vec3::{self, Vec3};

/// Angular radius of the sampling cap about the north pole.
pub const CAP_RADIUS: f64 = 0.7;

/// Largest `M` drawn for the constant-dependent inequalities (the cap diameter).
pub const MAX_M: f64 = 2.0 * CAP_RADIUS;

/// Failures kept verbatim in a report.
pub const MAX_LISTED_FAILURES: usize = 100;

pub const LEMMA_TOL: f64 = 1e-10;
pub const H_BOUND_TOL: f64 = 1e-9;
pub const H_DECOMPOSE_TOL: f64 = 1e-9;
pub const H_ADDITIVITY_TOL: f64 = 1e-8;

/// Partition counts used by the additivity check.
pub const PARTITIONS: [u32; 5] = [1, 2, 4, 8, 16];

/// Segment lengths for the small-segment limit, halving from about 1e-2 to 1e-5.
pub fn limit_lengths() -> Vec<f64> {
    (0..=10).rev().map(|k| 1e-5 * f64::from(1u32 << k)).collect()
}

/// Largest admissible limit error at the shortest length.
pub const LIMIT_FINAL_TOL: f64 = 1e-4;

/// Allowed relative growth of the limit error from one length to the next.
pub const LIMIT_MONOTONE_SLACK: f64 = 0.1;

/// Quadruples closer to degenerate than this (`ρ(A,B) ρ(C,D)`) are resampled.
const MIN_SAMPLED_PRODUCT: f64 = 1e-4;

/// Names accepted by [`run_suite`].
pub const SUITE_NAMES: [&str; 4] = ["lemma-3-1", "lemma-3-2", "lemma-3-3", "h"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub trials: u64,
    pub seed: u64,
    pub execution: Execution,
    /// Break each checked inequality on purpose, to show the check can fail.
    pub mutate: bool,
}

impl SuiteOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        SuiteOptions {
            trials,
            seed,
            execution: Execution::default(),
            mutate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: u64,
    pub margin: f64,
    pub inputs: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub worst_margin: f64,
    pub failure_count: u64,
    /// The first [`MAX_LISTED_FAILURES`] failures in trial order.
    pub failures: Vec<Failure>,
    /// Wall-clock time; not serialized so reports stay byte-identical across runs.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

struct Trial {
    margin: f64,
    inputs: Vec<Point>,
}

fn run_trials<F>(name: &str, tolerance: f64, trials: u64, opts: &SuiteOptions, f: F) -> Result<SuiteReport>
where
    F: Fn(u64, &mut ChaCha8Rng) -> Result<Trial> + Sync + Send,
{
    if trials == 0 {
        return Err(Error::domain("a suite needs at least one trial"));
    }
    let start = Instant::now();
    let results = map_indexed(opts.execution, trials, |i| f(i, &mut trial_rng(opts.seed, i)));
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    let mut failure_count = 0;
    for (i, r) in results.into_iter().enumerate() {
        let t = r?;
        // NaN margins count as failures.
        let failed = !(t.margin >= -tolerance);
        worst = if t.margin.is_nan() { f64::NAN } else { worst.min(t.margin) };
        if failed {
            failure_count += 1;
            if failures.len() < MAX_LISTED_FAILURES {
                failures.push(Failure { trial: i as u64, margin: t.margin, inputs: t.inputs });
            }
        }
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        trials,
        seed: opts.seed,
        tolerance,
        worst_margin: worst,
        failure_count,
        failures,
        elapsed: start.elapsed(),
    })
}

fn cap_point(rng: &mut ChaCha8Rng) -> Point {
    Point::Spherical { v: sample_cap(rng, &[0.0, 0.0, 1.0], CAP_RADIUS) }
}

/// Draws points until every pair is at least `min_gap` apart.
fn distinct_cap_points<const N: usize>(rng: &mut ChaCha8Rng, min_gap: f64) -> [Point; N] {
    let s = Space::sphere();
    loop {
        let pts: [Point; N] = std::array::from_fn(|_| cap_point(rng));
        let ok = (0..N).all(|i| (i + 1..N).all(|j| s.dist(&pts[i], &pts[j]).expect("sphere") >= min_gap));
        if ok {
            return pts;
        }
    }
}

fn half_sin2(d: f64) -> f64 {
    let s = (0.5 * d).sin();
    s * s
}

/// Draws `M` uniformly between the largest side and the cap diameter.
fn draw_m(rng: &mut ChaCha8Rng, largest: f64) -> f64 {
    largest + rng.random::<f64>() * (MAX_M - largest).max(0.0)
}

/// `sin²(ρ(x1,x3)/2) ≤ ρ(x2,x3)/ρ(x2,x4) sin²(ρ(x1,x4)/2) + ρ(x3,x4)/ρ(x2,x4) sin²(ρ(x1,x2)/2)`
/// for `x3` on `[x2, x4]`.
pub fn check_lemma_3_1(opts: &SuiteOptions) -> Result<SuiteReport> {
    let s = Space::sphere();
    run_trials("lemma-3-1", LEMMA_TOL, opts.trials, opts, |_, rng| {
        let [x1, x2, x4] = distinct_cap_points(rng, 1e-6);
        let x3 = s.combine(rng.random::<f64>(), &x2, &x4)?;
        let d24 = s.dist(&x2, &x4)?;
        let lhs = half_sin2(s.dist(&x1, &x3)?);
        let second = s.dist(&x3, &x4)? / d24 * half_sin2(s.dist(&x1, &x2)?);
        let first = s.dist(&x2, &x3)? / d24 * half_sin2(s.dist(&x1, &x4)?);
        let rhs = if opts.mutate { first - second } else { first + second };
        Ok(Trial { margin: rhs - lhs, inputs: vec![x1, x2, x3, x4] })
    })
}

/// `ρ(D,E) ≤ sin((1−t)M)/sin(M) ρ(A,B)` for `D ∈ [A,C]`, `E ∈ [B,C]` with
/// `ρ(D,C) = (1−t)ρ(A,C)` and `ρ(E,C) = (1−t)ρ(B,C)`.
pub fn check_lemma_3_2(opts: &SuiteOptions) -> Result<SuiteReport> {
    let s = Space::sphere();
    run_trials("lemma-3-2", LEMMA_TOL, opts.trials, opts, |_, rng| {
        let [a, b, c] = distinct_cap_points(rng, 1e-6);
        let t = rng.random::<f64>();
        let largest = s.dist(&a, &b)?.max(s.dist(&b, &c)?).max(s.dist(&a, &c)?);
        let m = draw_m(rng, largest);
        let d = s.combine(1.0 - t, &a, &c)?;
        let e = if opts.mutate { s.combine(t, &b, &c)? } else { s.combine(1.0 - t, &b, &c)? };
        let bound = ((1.0 - t) * m).sin() / m.sin() * s.dist(&a, &b)?;
        Ok(Trial { margin: bound - s.dist(&d, &e)?, inputs: vec![a, b, c, d, e] })
    })
}

/// `sin²(ρ(x1,x3)/2) ≤ sin((1−t)M)/sin M · sin²(ρ(x1,x4)/2)
///   + sin(tM)/sin M · max{cos ρ(x2,x4) − cos ρ(x2,x1), 0}/2 + sin²(tM/2)`
/// for `x3 ∈ [x2, x4]` with `ρ(x3,x4) = t ρ(x2,x4)`.
pub fn check_lemma_3_3(opts: &SuiteOptions) -> Result<SuiteReport> {
    let s = Space::sphere();
    run_trials("lemma-3-3", LEMMA_TOL, opts.trials, opts, |_, rng| {
        let [x1, x2, x4] = distinct_cap_points(rng, 1e-6);
        let t = rng.random::<f64>();
        let x3 = s.combine(t, &x2, &x4)?;
        let pts = [x1, x2, x3, x4];
        let mut largest = 0.0f64;
        for i in 0..4 {
            for j in i + 1..4 {
                largest = largest.max(s.dist(&pts[i], &pts[j])?);
            }
        }
        let m = draw_m(rng, largest);
        let (d24, d21) = (s.dist(&x2, &x4)?, s.dist(&x2, &x1)?);
        let max_term = (d24.cos() - d21.cos()).max(0.0) / 2.0;
        let signed = if opts.mutate { -max_term } else { max_term };
        let rhs = ((1.0 - t) * m).sin() / m.sin() * half_sin2(s.dist(&x1, &x4)?)
            + (t * m).sin() / m.sin() * signed
            + half_sin2(t * m);
        let lhs = half_sin2(s.dist(&x1, &x3)?);
        Ok(Trial { margin: rhs - lhs, inputs: pts.to_vec() })
    })
}

fn sphere_quadruple(rng: &mut ChaCha8Rng) -> Quadruple {
    let s = Space::sphere();
    loop {
        let [a, b, c, d] = [(); 4].map(|_| cap_point(rng));
        let prod = s.dist(&a, &b).expect("sphere") * s.dist(&c, &d).expect("sphere");
        if prod >= MIN_SAMPLED_PRODUCT {
            return Quadruple::new(a, b, c, d);
        }
    }
}

/// `h` with one cosine term's sign flipped, for mutation runs.
fn h_mutated(space: &Space, q: &Quadruple) -> Result<f64> {
    let d = |p: &Point, r: &Point| space.dist(p, r);
    let num = d(&q.a, &q.c)?.cos() + d(&q.b, &q.d)?.cos() + d(&q.a, &q.d)?.cos() - d(&q.b, &q.c)?.cos();
    Ok(num / (d(&q.a, &q.b)? * d(&q.c, &q.d)?))
}

/// `|h| ≤ 1` on sphere-cap quadruples.
pub fn check_h_bound_sphere(opts: &SuiteOptions) -> Result<SuiteReport> {
    let s = Space::sphere();
    run_trials("h-bound-sphere", H_BOUND_TOL, opts.trials, opts, |_, rng| {
        let q = sphere_quadruple(rng);
        let v = if opts.mutate { h_mutated(&s, &q)? } else { h(&s, &q)? };
        Ok(Trial { margin: 1.0 - v.abs(), inputs: vec![q.a, q.b, q.c, q.d] })
    })
}

/// `|h| ≤ 1` on glued-complex quadruples rescaled to unit largest distance.
pub fn check_h_bound_glued(opts: &SuiteOptions) -> Result<SuiteReport> {
    let g = glued::standard();
    let space = Space::glued();
    run_trials("h-bound-glued", H_BOUND_TOL, opts.trials, opts, |_, rng| {
        loop {
            let [a, b, c, d] = [(); 4].map(|_| g.sample(rng));
            let q = Quadruple::new(a, b, c, d);
            let (v, factor) = match h_rescaled(&space, &q) {
                Ok(r) => r,
                Err(Error::DegenerateQuadruple(_)) => continue,
                Err(e) => return Err(e),
            };
            let v = if opts.mutate {
                let dist = |p: &Point, r: &Point| space.dist(p, r).map(|x| (x * factor).cos());
                let num = dist(&a, &c)? + dist(&b, &d)? + dist(&a, &d)? - dist(&b, &c)?;
                num / (space.dist(&a, &b)? * factor * space.dist(&c, &d)? * factor)
            } else {
                v
            };
            if space.dist(&a, &b)? * space.dist(&c, &d)? * factor * factor < MIN_SAMPLED_PRODUCT {
                continue;
            }
            return Ok(Trial { margin: 1.0 - v.abs(), inputs: vec![a, b, c, d] });
        }
    })
}

/// Splitting `[A, B]` at an interior point leaves `h` unchanged as a weighted sum.
pub fn check_h_decompose(opts: &SuiteOptions) -> Result<SuiteReport> {
    let s = Space::sphere();
    run_trials("h-decompose", H_DECOMPOSE_TOL, opts.trials, opts, |_, rng| {
        let q = sphere_quadruple(rng);
        let lambda = 0.05 + 0.9 * rng.random::<f64>();
        let x = s.combine(1.0 - lambda, &q.a, &q.b)?;
        let margin = if opts.mutate {
            // Unweighted halves in place of the length-weighted sum.
            let whole = h(&s, &q)?;
            let left = h(&s, &Quadruple { b: x, ..q })?;
            let right = h(&s, &Quadruple { a: x, ..q })?;
            -(whole - 0.5 * (left + right)).abs()
        } else {
            -h_decompose_margin(&s, &q, &x)?
        };
        Ok(Trial { margin, inputs: vec![q.a, q.b, q.c, q.d, x] })
    })
}

/// The double-sum partition identity for every `(n, m)` in [`PARTITIONS`]²,
/// on `trials / 100` quadruples.
pub fn check_h_additivity(opts: &SuiteOptions) -> Result<SuiteReport> {
    let s = Space::sphere();
    let quads = (opts.trials / 100).max(1);
    let pairs = (PARTITIONS.len() * PARTITIONS.len()) as u64;
    run_trials("h-additivity", H_ADDITIVITY_TOL, quads * pairs, opts, |i, _| {
        let mut rng = trial_rng(opts.seed, i / pairs);
        let q = sphere_quadruple(&mut rng);
        let (n, m) = (
            PARTITIONS[(i % pairs) as usize / PARTITIONS.len()],
            PARTITIONS[(i % pairs) as usize % PARTITIONS.len()],
        );
        let margin = if opts.mutate {
            // Dropping the 1/(nm) normalization.
            let sum = h_partition_average(&s, &q, n, m)? * f64::from(n * m);
            -(h(&s, &q)? - sum).abs()
        } else {
            -h_additivity_margin(&s, &q, n, m)?
        };
        Ok(Trial { margin, inputs: vec![q.a, q.b, q.c, q.d] })
    })
}

/// A spherical configuration for the small-segment limit of `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitConfig {
    pub p: Point,
    pub x: Point,
    pub q: Point,
    pub y: Point,
    /// `ξx`, the angle at `P` between `Q` and `X`.
    pub xi_x: f64,
    /// `ξy`, `π` minus the angle at `Q` between `Y` and `P`.
    pub xi_y: f64,
}

fn tangent_step(base: &Vec3, dir: &Vec3, s: f64) -> Point {
    let v = vec3::add(&vec3::scale(base, s.cos()), &vec3::scale(dir, s.sin()));
    Point::direction(v).expect("nonzero")
}

/// `P` and `Q` on the equator `d` apart; `X` leaves `P` at angle `ξx` from
/// the direction to `Q`, `Y` leaves `Q` at angle `ξy` from the direction
/// away from `P`, both toward the north.
pub fn limit_config(d: f64, xi_x: f64, xi_y: f64) -> LimitConfig {
    const STEP: f64 = 0.2;
    let p = [1.0, 0.0, 0.0];
    let q = [d.cos(), d.sin(), 0.0];
    let north = [0.0, 0.0, 1.0];
    let toward_q = [0.0, 1.0, 0.0];
    let away_from_p = [-d.sin(), d.cos(), 0.0];
    let dir_x = vec3::add(&vec3::scale(&toward_q, xi_x.cos()), &vec3::scale(&north, xi_x.sin()));
    let dir_y = vec3::add(&vec3::scale(&away_from_p, xi_y.cos()), &vec3::scale(&north, xi_y.sin()));
    LimitConfig {
        p: Point::Spherical { v: p },
        x: tangent_step(&p, &dir_x, STEP),
        q: Point::Spherical { v: q },
        y: tangent_step(&q, &dir_y, STEP),
        xi_x,
        xi_y,
    }
}

/// Twenty configurations: six with both directions along meridians, six
/// with a meridian at `P` and the equator at `Q`, six along the equator at
/// both ends, and two oblique ones.
pub fn limit_configurations() -> Vec<LimitConfig> {
    let ds = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2];
    let mut out = Vec::new();
    for (xi_x, xi_y) in [(FRAC_PI_2, FRAC_PI_2), (FRAC_PI_2, 0.0), (0.0, 0.0)] {
        out.extend(ds.iter().map(|&d| limit_config(d, xi_x, xi_y)));
    }
    out.push(limit_config(0.5, 0.7, 1.1));
    out.push(limit_config(0.9, 2.0, 0.4));
    out
}

/// Errors `|h(P,P_x;Q,Q_y) − formula|` at each length of [`limit_lengths`].
pub fn limit_errors(cfg: &LimitConfig, mutate: bool) -> Result<Vec<f64>> {
    limit_lengths()
        .into_iter()
        .map(|x| {
            let (hv, formula) = h_limit_check(&cfg.p, &cfg.x, &cfg.q, &cfg.y, x, x)?;
            let formula = if mutate {
                formula - 2.0 * cfg.xi_x.sin() * cfg.xi_y.sin()
            } else {
                formula
            };
            Ok((hv - formula).abs())
        })
        .collect()
}

/// Margin of one limit configuration: the error must shrink as the length
/// halves (up to [`LIMIT_MONOTONE_SLACK`]) and end below [`LIMIT_FINAL_TOL`].
pub fn limit_margin(errors: &[f64]) -> f64 {
    let last = *errors.last().expect("nonempty");
    let monotone = errors
        .windows(2)
        .map(|w| (1.0 + LIMIT_MONOTONE_SLACK) * w[0] - w[1])
        .fold(f64::INFINITY, f64::min);
    (LIMIT_FINAL_TOL - last).min(monotone)
}

/// The small-segment limit over [`limit_configurations`].
pub fn check_h_limit(opts: &SuiteOptions) -> Result<SuiteReport> {
    let configs = limit_configurations();
    run_trials("h-limit", 0.0, configs.len() as u64, opts, |i, _| {
        let cfg = &configs[i as usize];
        let errors = limit_errors(cfg, opts.mutate)?;
        Ok(Trial { margin: limit_margin(&errors), inputs: vec![cfg.p, cfg.x, cfg.q, cfg.y] })
    })
}

/// All checks on `h`.
pub fn check_h_suite(opts: &SuiteOptions) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        check_h_bound_sphere(opts)?,
        check_h_bound_glued(opts)?,
        check_h_decompose(opts)?,
        check_h_additivity(opts)?,
        check_h_limit(opts)?,
    ])
}

/// Runs the named suite, or every suite for `"all"`.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<Vec<SuiteReport>> {
    match name {
        "lemma-3-1" => Ok(vec![check_lemma_3_1(opts)?]),
        "lemma-3-2" => Ok(vec![check_lemma_3_2(opts)?]),
        "lemma-3-3" => Ok(vec![check_lemma_3_3(opts)?]),
        "h" => check_h_suite(opts),
        "all" => {
            let mut out = vec![check_lemma_3_1(opts)?, check_lemma_3_2(opts)?, check_lemma_3_3(opts)?];
            out.extend(check_h_suite(opts)?);
            Ok(out)
        }
        other => Err(Error::domain(format!(
            "unknown suite {other:?}; expected one of {SUITE_NAMES:?} or \"all\""
        ))),
    }
}
