//! The two-step viscosity iteration
//!
//! ```text
//! y_n     = t_n f(x_n) + (1 − t_n) T(x_n)
//! x_{n+1} = b_n x_n + (1 − b_n) y_n
//! ```
//!
//! with geodesic combinations, its hypotheses, the limit oracle, and the
//! scalar recursion used to control it.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::trial_rng;
use crate::maps::{theorem_k_bound, MapKind, MapSpec};
use crate::model_spaces::{Point, Space, SpaceKind};
use crate::projections::{project_fixset, FixSet};
use crate::sampling::sample_point;
use crate::sequences::{Condition, SequencePair, XuSequences};

/// Tolerance used for the limit oracle before every run.
pub const ORACLE_TOL: f64 = 1e-12;

/// Number of points of a segment fixed set on which `ρ(p, f(p)) ≤ M/4` is checked.
pub const BALL_SAMPLES: usize = 1000;

/// Slack on the containment radius and the region check during a run.
pub const CONTAINMENT_SLACK: f64 = 1e-9;

/// Fraction of the run treated as the tail by the residual summaries.
pub const TAIL_FRACTION: f64 = 0.1;

const ORACLE_MAX_STEPS: usize = 100_000;
const ORACLE_WINDOW: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct IterationConfig {
    pub space: Space,
    pub t_map: MapSpec,
    pub f_map: MapSpec,
    pub u: Point,
    pub sequences: SequencePair,
    pub max_iter: usize,
    pub report_every: usize,
    /// The constant `M` of the CAT(1) hypotheses in unit-curvature scale;
    /// defaults to the space's diameter cap.
    pub m: Option<f64>,
    /// Permit the glued complex, which lacks the N-property.
    pub allow_no_n_property: bool,
    /// Seed for the sampled check of `ρ(p, f(p))` over a whole-space `Fix T`.
    pub seed: u64,
}

impl IterationConfig {
    pub fn new(space: Space, t_map: MapSpec, f_map: MapSpec, u: Point) -> Self {
        IterationConfig {
            space,
            t_map,
            f_map,
            u,
            sequences: SequencePair::standard(),
            max_iter: 100_000,
            report_every: 1000,
            m: None,
            allow_no_n_property: false,
            seed: 0,
        }
    }

    /// The same experiment with `f ≡ u`.
    pub fn halpern(&self) -> Result<Self> {
        Ok(IterationConfig {
            f_map: MapSpec::constant(self.space, self.u)?,
            ..self.clone()
        })
    }

    /// Checks every hypothesis of the convergence theorem and computes the limit `q`.
    pub fn validate(&self) -> Result<HypothesisReport> {
        if self.max_iter == 0 || self.report_every == 0 {
            return Err(Error::config("run length", "max_iter and report_every must be positive"));
        }
        if self.space.kind == SpaceKind::GluedExample && !self.allow_no_n_property {
            return Err(Error::config(
                "N-property",
                "the glued complex fails the N-property; pass the exploratory opt-in to run anyway",
            ));
        }
        if self.t_map.space != self.space || self.f_map.space != self.space {
            return Err(Error::config("maps", "T and f must act on the configured space"));
        }
        if !self.space.contains(&self.u) {
            return Err(Error::config("u in C", "the starting point lies outside the space"));
        }
        if !matches!(self.f_map.kind, MapKind::Homothety { .. } | MapKind::Constant { .. }) {
            return Err(Error::config("f contraction", "f must be a homothety or a constant map"));
        }
        let sequences = self.sequences.validate(self.max_iter)?;

        let kappa = self.space.kappa;
        let k_effective = self.f_map.lipschitz_bound();
        let m = if self.space.is_spherical() {
            let cap = self.f_map.unit_scale_diameter();
            let m = self.m.map_or(cap, |m| m.min(cap));
            if !(m > 0.0 && m < FRAC_PI_2) {
                return Err(Error::config("M in (0, pi/2)", format!("M = {m}")));
            }
            Some(m)
        } else {
            None
        };
        let k_bound = match m {
            Some(m) => theorem_k_bound(m)?,
            None => 0.5,
        };
        if !(k_effective < k_bound) {
            let what = if m.is_some() { "k-bound 2 sin^2(M/2) cos M / M^2" } else { "k < 1/2" };
            return Err(Error::config(
                what,
                format!("effective contraction constant {k_effective} is not below {k_bound}"),
            ));
        }

        let fs = self.t_map.fix_set();
        let q = solve_q_oracle(&self.space, &fs, &self.f_map, ORACLE_TOL)?;
        let fq = self.f_map.apply(&q)?;
        let eq41_residual = self.space.dist(&q, &project_fixset(&self.space, &fs, &fq)?)?;
        if !(eq41_residual < 10.0 * ORACLE_TOL) {
            return Err(Error::Divergence(format!(
                "limit residual ρ(q, P(f(q))) = {eq41_residual} exceeds {}",
                10.0 * ORACLE_TOL
            )));
        }

        let d_uq = self.space.dist(&self.u, &q)?;
        let d_qfq = self.space.dist(&q, &fq)?;
        let (mut ball_p_fp, mut ball_samples) = (None, 0);
        if let Some(m) = m {
            let limit = m / (4.0 * kappa.sqrt());
            let (worst, samples) = self.max_displacement_on_fixset(&fs)?;
            ball_p_fp = Some(worst);
            ball_samples = samples;
            if worst > limit {
                return Err(Error::config(
                    "rho(p, f(p)) <= M/4 on Fix T",
                    format!("max displacement {worst} exceeds {limit}"),
                ));
            }
            if d_uq > limit {
                return Err(Error::config(
                    "rho(u, q) <= M/4",
                    format!("rho(u, q) = {d_uq} exceeds {limit}"),
                ));
            }
        }

        Ok(HypothesisReport {
            kappa,
            m,
            k_effective,
            k_bound,
            fix_set: fs,
            q,
            eq41_residual,
            rho_u_q: d_uq,
            rho_q_fq: d_qfq,
            max_rho_p_fp: ball_p_fp,
            ball_samples,
            containment_radius: d_uq.max(d_qfq) / (1.0 - k_effective),
            sequences,
            n_property: self.space.kind != SpaceKind::GluedExample,
        })
    }

    fn max_displacement_on_fixset(&self, fs: &FixSet) -> Result<(f64, usize)> {
        let disp = |p: &Point| -> Result<f64> { self.space.dist(p, &self.f_map.apply(p)?) };
        match fs {
            FixSet::Singleton { point } => Ok((disp(point)?, 1)),
            FixSet::Segment { segment } => {
                let mut worst = 0.0f64;
                for i in 0..BALL_SAMPLES {
                    let lambda = i as f64 / (BALL_SAMPLES - 1) as f64;
                    worst = worst.max(disp(&segment.point_at(&self.space, lambda)?)?);
                }
                Ok((worst, BALL_SAMPLES))
            }
            FixSet::WholeSpace => {
                let mut worst = 0.0f64;
                for i in 0..BALL_SAMPLES {
                    let p = sample_point(&self.space, &mut trial_rng(self.seed, i as u64))?;
                    worst = worst.max(disp(&p)?);
                }
                Ok((worst, BALL_SAMPLES))
            }
        }
    }
}

/// What was checked before a run, and the limit it should reach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub kappa: f64,
    /// `M` in unit-curvature scale (positive curvature only).
    pub m: Option<f64>,
    /// Proven Lipschitz constant of `f` on the space.
    pub k_effective: f64,
    pub k_bound: f64,
    pub fix_set: FixSet,
    pub q: Point,
    /// `ρ(q, P_{Fix T}(f(q)))`.
    pub eq41_residual: f64,
    pub rho_u_q: f64,
    pub rho_q_fq: f64,
    /// Largest `ρ(p, f(p))` over the checked points of `Fix T`.
    pub max_rho_p_fp: Option<f64>,
    pub ball_samples: usize,
    /// Every `x_n` and `y_n` must stay within this distance of `q`.
    pub containment_radius: f64,
    pub sequences: Vec<Condition>,
    pub n_property: bool,
}

/// The fixed point of `p ↦ P_{fs}(f(p))`, computed from three starts.
pub fn solve_q_oracle(space: &Space, fs: &FixSet, f: &MapSpec, tol: f64) -> Result<Point> {
    let starts: Vec<Point> = match fs {
        FixSet::Singleton { point } => vec![*point],
        FixSet::Segment { segment } => vec![
            segment.a,
            segment.b,
            segment.point_at(space, 0.5)?,
        ],
        FixSet::WholeSpace => {
            let mut v = vec![space.base_point()];
            for i in 0..2 {
                v.push(sample_point(space, &mut trial_rng(0, i))?);
            }
            v
        }
    };
    let limits = starts
        .iter()
        .map(|p| oracle_from(space, fs, f, *p, tol))
        .collect::<Result<Vec<_>>>()?;
    for other in &limits[1..] {
        let gap = space.dist(&limits[0], other)?;
        if gap > 10.0 * tol {
            return Err(Error::Divergence(format!(
                "oracle limits from different starts differ by {gap}"
            )));
        }
    }
    Ok(limits[0])
}

fn oracle_from(space: &Space, fs: &FixSet, f: &MapSpec, start: Point, tol: f64) -> Result<Point> {
    let step = |p: &Point| -> Result<Point> { project_fixset(space, fs, &f.apply(p)?) };
    let mut p = start;
    let mut window_start = f64::INFINITY;
    for m in 0..ORACLE_MAX_STEPS {
        let next = step(&p)?;
        let d = space.dist(&p, &next)?;
        p = next;
        if d < tol {
            return Ok(p);
        }
        if m % ORACLE_WINDOW == 0 {
            if d >= window_start {
                return Err(Error::Divergence(format!(
                    "step length {d} did not shrink over {ORACLE_WINDOW} oracle steps"
                )));
            }
            window_start = d;
        }
    }
    Err(Error::Divergence(format!("no convergence within {ORACLE_MAX_STEPS} oracle steps")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub n: usize,
    pub x: Point,
    pub y: Point,
    pub t: f64,
    pub b: f64,
    /// `ρ(x_n, T x_n)`.
    pub r_fix: f64,
    /// `ρ(x_n, y_n)`.
    pub r_xy: f64,
    /// `ρ(x_n, q)`.
    pub d_q: f64,
}

/// Maxima over the last [`TAIL_FRACTION`] of the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSummary {
    pub from: usize,
    pub max_r_fix: f64,
    pub max_r_xy: f64,
    /// `max ρ(y_{n+1}, y_n) − ρ(x_{n+1}, x_n)`.
    pub max_suzuki_gap: f64,
    /// `max ρ(f(q), q) − ρ(f(q), T x_n)`; the cosine form of this limit
    /// inequality is equivalent since cos is decreasing on `[0, π]`.
    pub max_limit_gap: f64,
}

/// Largest `ρ(x_n, q)` for `n` in `[start, end)`, one block per power of two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicBlock {
    pub start: usize,
    pub end: usize,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub final_record: TraceRecord,
    pub q: Point,
    pub report: HypothesisReport,
    pub tail: TailSummary,
    pub dyadic_d_q: Vec<DyadicBlock>,
}

/// Runs the iteration for `cfg.max_iter` steps.
pub fn run_viscosity(cfg: &IterationConfig) -> Result<Trace> {
    let report = cfg.validate()?;
    let (space, q) = (&cfg.space, report.q);
    let fq = cfg.f_map.apply(&q)?;
    let d_fq_q = space.dist(&fq, &q)?;
    let radius = report.containment_radius + CONTAINMENT_SLACK;
    let tail_from = cfg.max_iter - ((cfg.max_iter as f64 * TAIL_FRACTION) as usize).max(1) + 1;

    let mut records = Vec::new();
    let mut tail = TailSummary {
        from: tail_from,
        max_r_fix: 0.0,
        max_r_xy: 0.0,
        max_suzuki_gap: f64::NEG_INFINITY,
        max_limit_gap: f64::NEG_INFINITY,
    };
    let mut blocks: Vec<DyadicBlock> = Vec::new();
    let mut prev: Option<(Point, Point)> = None;
    let mut x = cfg.u;
    let mut last = None;

    for n in 1..=cfg.max_iter {
        let t = cfg.sequences.t.get(n).expect("validated length");
        let b = cfg.sequences.b.get(n).expect("validated length");
        let escaped = |p: &Point, name: &str| -> Result<()> {
            let d = space.dist(p, &q)?;
            if d > radius || !space.contains_with_slack(p, CONTAINMENT_SLACK) {
                return Err(Error::RuntimeInvariant {
                    step: n,
                    detail: format!("{name} at distance {d} from q left the ball of radius {radius}"),
                });
            }
            Ok(())
        };
        escaped(&x, "x_n")?;
        let fx = cfg.f_map.apply(&x)?;
        let tx = cfg.t_map.apply(&x)?;
        let y = space.combine(t, &fx, &tx)?;
        escaped(&y, "y_n")?;

        let r_fix = space.dist(&x, &tx)?;
        let r_xy = space.dist(&x, &y)?;
        let d_q = space.dist(&x, &q)?;
        let record = TraceRecord { n, x, y, t, b, r_fix, r_xy, d_q };

        if n.is_power_of_two() {
            blocks.push(DyadicBlock { start: n, end: 2 * n, max: d_q });
        } else if let Some(block) = blocks.last_mut() {
            block.max = block.max.max(d_q);
        }
        if n >= tail_from {
            tail.max_r_fix = tail.max_r_fix.max(r_fix);
            tail.max_r_xy = tail.max_r_xy.max(r_xy);
            tail.max_limit_gap = tail.max_limit_gap.max(d_fq_q - space.dist(&fq, &tx)?);
            if let Some((px, py)) = &prev {
                let gap = space.dist(&y, py)? - space.dist(&x, px)?;
                tail.max_suzuki_gap = tail.max_suzuki_gap.max(gap);
            }
        }
        if n == 1 || n % cfg.report_every == 0 || n == cfg.max_iter {
            records.push(record.clone());
        }

        prev = Some((x, y));
        x = space.combine(b, &x, &y)?;
        last = Some(record);
    }
    if let Some(block) = blocks.last_mut() {
        block.end = block.end.min(cfg.max_iter + 1);
    }

    Ok(Trace {
        records,
        final_record: last.expect("at least one step"),
        q,
        report,
        tail,
        dyadic_d_q: blocks,
    })
}

/// The iteration with `f ≡ u`.
pub fn run_halpern(cfg: &IterationConfig) -> Result<Trace> {
    run_viscosity(&cfg.halpern()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuzukiMargins {
    pub max_r_xy: f64,
    pub max_gap: f64,
}

/// Tail maxima of `ρ(x_n, y_n)` and of `ρ(y_{n+1}, y_n) − ρ(x_{n+1}, x_n)`.
pub fn suzuki_check(trace: &Trace) -> SuzukiMargins {
    SuzukiMargins {
        max_r_xy: trace.tail.max_r_xy,
        max_gap: trace.tail.max_suzuki_gap,
    }
}

/// Whether the dyadic block maxima of `ρ(x_n, q)` are nonincreasing once
/// blocks start after `burn_in`.
pub fn dyadic_envelope_nonincreasing(trace: &Trace, burn_in: usize) -> bool {
    let tail: Vec<f64> = trace
        .dyadic_d_q
        .iter()
        .filter(|b| b.start >= burn_in)
        .map(|b| b.max)
        .collect();
    tail.windows(2).all(|w| w[1] <= w[0])
}

/// Result of iterating `s_{n+1} = (1 − α_n) s_n + α_n β_n + γ_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XuResult {
    pub s_final: f64,
    /// `max s_n` over `n` in `[N/2, N]`.
    pub tail_max: f64,
    /// `max s_n` over each block `[2^j, 2^{j+1})`.
    pub blocks: Vec<DyadicBlock>,
    /// A negative iterate was clamped to 0.
    pub clamped: bool,
    pub conditions: Vec<Condition>,
}

/// Simulates the scalar recursion up to `s_N`.
pub fn xu_simulate(s1: f64, seqs: &XuSequences, n_final: usize) -> Result<XuResult> {
    if !(s1 >= 0.0) || n_final == 0 {
        return Err(Error::domain("need s_1 >= 0 and N >= 1"));
    }
    let conditions = seqs.validate(n_final)?;
    let mut s = s1;
    let mut clamped = false;
    let mut tail_max = 0.0f64;
    let mut blocks: Vec<DyadicBlock> = Vec::new();
    for n in 1..=n_final {
        if n.is_power_of_two() {
            blocks.push(DyadicBlock { start: n, end: 2 * n, max: s });
        } else if let Some(b) = blocks.last_mut() {
            b.max = b.max.max(s);
        }
        if 2 * n >= n_final {
            tail_max = tail_max.max(s);
        }
        if n == n_final {
            break;
        }
        let (a, b, g) = (
            seqs.alpha.get(n).expect("validated length"),
            seqs.beta.get(n).expect("validated length"),
            seqs.gamma.get(n).expect("validated length"),
        );
        s = (1.0 - a) * s + a * b + g;
        if s < 0.0 {
            s = 0.0;
            clamped = true;
        }
    }
    if let Some(b) = blocks.last_mut() {
        b.end = b.end.min(n_final + 1);
    }
    Ok(XuResult { s_final: s, tail_max, blocks, clamped, conditions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::Sequence;

    fn planar_cfg(t_map: MapSpec) -> IterationConfig {
        let p = Space::plane();
        let f = MapSpec::homothety(p, Point::planar(0.4, 0.8), 0.3).unwrap();
        let mut cfg = IterationConfig::new(p, t_map, f, Point::planar(0.5, 0.5));
        cfg.max_iter = 2000;
        cfg.report_every = 100;
        cfg
    }

    #[test]
    fn combination_orientation() {
        // With t_1 = 1/2 and b_1 = 1/2 the first step is computable by hand:
        // f(u) = c + 0.3 (u - c), T(u) = u, y_1 = midpoint, x_2 = midpoint of u and y_1.
        let mut cfg = planar_cfg(MapSpec::identity(Space::plane()));
        cfg.max_iter = 2;
        cfg.report_every = 1;
        let trace = run_viscosity(&cfg).unwrap();
        let r1 = &trace.records[0];
        let [ux, uy] = [0.5, 0.5];
        let fx = [0.4 + 0.3 * (ux - 0.4), 0.8 + 0.3 * (uy - 0.8)];
        let y = [0.5 * fx[0] + 0.5 * ux, 0.5 * fx[1] + 0.5 * uy];
        let s = Space::plane();
        assert!(s.dist(&r1.y, &Point::planar(y[0], y[1])).unwrap() < 1e-15);
        // t_n weights f: with t_2 = 1/3 the second y sits 2/3 of the way from f(x_2) to T(x_2).
        let r2 = &trace.records[1];
        let fx2 = cfg.f_map.apply(&r2.x).unwrap();
        let d_total = s.dist(&fx2, &r2.x).unwrap();
        assert!((s.dist(&fx2, &r2.y).unwrap() - (2.0 / 3.0) * d_total).abs() < 1e-15);
        let x2 = [0.5 * ux + 0.5 * y[0], 0.5 * uy + 0.5 * y[1]];
        assert!(s.dist(&r2.x, &Point::planar(x2[0], x2[1])).unwrap() < 1e-15);
    }

    #[test]
    fn identity_converges_to_anchor() {
        let trace = run_viscosity(&planar_cfg(MapSpec::identity(Space::plane()))).unwrap();
        assert!(Space::plane().dist(&trace.q, &Point::planar(0.4, 0.8)).unwrap() < 1e-11);
        // ρ(x_{n+1}, c) = (1 − (1 − k) t_n / 2) ρ(x_n, c) when T is the identity.
        let d1 = Space::plane().dist(&Point::planar(0.5, 0.5), &Point::planar(0.4, 0.8)).unwrap();
        let expected = (1..2000).fold(d1, |d, n| d * (1.0 - 0.35 / (n + 1) as f64));
        assert!((trace.final_record.d_q - expected).abs() < 1e-12);
        assert!(trace.final_record.d_q < 0.03);
    }

    #[test]
    fn oracle_on_planar_segment() {
        let p = Space::plane();
        let t = MapSpec::segment_projection(p, Point::planar(-1.0, 0.0), Point::planar(1.0, 0.0)).unwrap();
        let f = MapSpec::homothety(p, Point::planar(0.4, 0.8), 0.3).unwrap();
        let q = solve_q_oracle(&p, &t.fix_set(), &f, 1e-12).unwrap();
        assert!(p.dist(&q, &Point::planar(0.4, 0.0)).unwrap() < 1e-11);
    }

    #[test]
    fn oracle_trivial_cases() {
        let p = Space::plane();
        let c = Point::planar(0.1, -0.2);
        let f = MapSpec::homothety(p, c, 0.3).unwrap();
        let q = solve_q_oracle(&p, &FixSet::WholeSpace, &f, 1e-12).unwrap();
        assert!(p.dist(&q, &c).unwrap() < 1e-11);
        let s = Point::planar(3.0, 3.0);
        assert_eq!(solve_q_oracle(&p, &FixSet::Singleton { point: s }, &f, 1e-12).unwrap(), s);
    }

    #[test]
    fn k_bound_violation_is_a_config_error() {
        let p = Space::plane();
        let f = MapSpec::homothety(p, Point::planar(0.4, 0.8), 0.6).unwrap();
        let cfg = IterationConfig::new(p, MapSpec::identity(p), f, Point::planar(0.0, 0.0));
        assert!(matches!(cfg.validate(), Err(Error::Config { hypothesis, .. }) if hypothesis == "k < 1/2"));

        let cap = Space::sphere_cap([0.0, 0.0, 1.0], 0.5).unwrap();
        let t = MapSpec::rotation(cap, [0.0, 0.0, 1.0], 1.0).unwrap();
        let f = MapSpec::homothety(cap, Point::from_polar(0.3, 0.0), 0.3).unwrap();
        let cfg = IterationConfig::new(cap, t, f, Point::from_polar(0.25, 1.0));
        assert!(matches!(cfg.validate(), Err(Error::Config { hypothesis, .. }) if hypothesis.starts_with("k-bound")));
    }

    #[test]
    fn glued_needs_opt_in() {
        let g = Space::glued();
        let c = crate::glued::standard().vertex(crate::glued::Vertex::C);
        let f = MapSpec::homothety(g, c, 0.3).unwrap();
        let mut cfg = IterationConfig::new(g, MapSpec::identity(g), f, c);
        cfg.max_iter = 10;
        assert!(matches!(cfg.validate(), Err(Error::Config { hypothesis, .. }) if hypothesis == "N-property"));
        cfg.allow_no_n_property = true;
        assert!(run_viscosity(&cfg).is_ok());
    }

    #[test]
    fn halpern_identity_converges_to_u() {
        let cfg = planar_cfg(MapSpec::identity(Space::plane()));
        let trace = run_halpern(&cfg).unwrap();
        assert_eq!(trace.q, cfg.u);
        assert_eq!(trace.final_record.d_q, 0.0);
    }

    #[test]
    fn xu_geometric_case() {
        let seqs = XuSequences {
            alpha: Sequence::constant(0.5),
            beta: Sequence::constant(0.0),
            gamma: Sequence::constant(0.0),
        };
        for n in [1, 2, 10, 100, 1000] {
            let r = xu_simulate(1.0, &seqs, n).unwrap();
            assert_eq!(r.s_final, 2f64.powi(1 - n as i32));
        }
    }
}
