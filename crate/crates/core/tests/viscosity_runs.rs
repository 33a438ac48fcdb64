//! End-to-end runs of the iteration against independently known limits.

use catvisc::exec::trial_rng;
use catvisc::projections::planar_segment_projection;
use catvisc::sampling::sample_point;
use catvisc::sequences::{Sequence, SequencePair};
use catvisc::viscosity::{self, IterationConfig, TAIL_FRACTION};
use catvisc::{Error, MapSpec, Point, Space};
use proptest::prelude::*;

const POLE: [f64; 3] = [0.0, 0.0, 1.0];

fn segment_run(u: Point, max_iter: usize) -> IterationConfig {
    let p = Space::plane();
    let t = MapSpec::segment_projection(p, Point::planar(-1.0, 0.0), Point::planar(1.0, 0.0)).unwrap();
    let f = MapSpec::homothety(p, Point::planar(0.4, 0.8), 0.3).unwrap();
    let mut cfg = IterationConfig::new(p, t, f, u);
    cfg.max_iter = max_iter;
    cfg
}

fn rotation_run(max_iter: usize) -> IterationConfig {
    let cap = Space::sphere_cap(POLE, 0.5).unwrap();
    let t = MapSpec::rotation(cap, POLE, 1.0).unwrap();
    let f = MapSpec::homothety(cap, Point::from_polar(0.3, 0.0), 0.2).unwrap();
    let mut cfg = IterationConfig::new(cap, t, f, Point::from_polar(0.25, 2.0));
    cfg.max_iter = max_iter;
    cfg
}

#[test]
fn halpern_on_segment_reaches_projection_of_u() {
    let u = [0.5, 0.5];
    let trace = viscosity::run_halpern(&segment_run(Point::planar(u[0], u[1]), 20_000)).unwrap();
    let (_, expected, _) = planar_segment_projection([-1.0, 0.0], [1.0, 0.0], u);
    let q = trace.q.as_planar().unwrap();
    assert!((q[0] - expected[0]).abs() < 1e-12 && q[1] == expected[1]);
    assert!(trace.final_record.d_q < 1e-2, "d_q {}", trace.final_record.d_q);
}

#[test]
fn halpern_on_cap_reaches_pole() {
    let trace = viscosity::run_halpern(&rotation_run(20_000)).unwrap();
    assert_eq!(trace.q, Point::spherical(POLE).unwrap());
    assert!(trace.final_record.d_q < 1e-3, "d_q {}", trace.final_record.d_q);
}

#[test]
fn planar_run_residuals_and_envelope() {
    let cfg = segment_run(Point::planar(0.5, 0.5), 50_000);
    let trace = viscosity::run_viscosity(&cfg).unwrap();
    assert!(trace.report.eq41_residual < 10.0 * viscosity::ORACLE_TOL);
    let burn_in = (cfg.max_iter as f64 * TAIL_FRACTION) as usize;
    assert!(viscosity::dyadic_envelope_nonincreasing(&trace, burn_in));
    let m = viscosity::suzuki_check(&trace);
    assert!(m.max_r_xy < 1e-3 && m.max_gap < 1e-3, "{m:?}");
    assert!(trace.tail.max_limit_gap <= 1e-3);
    assert!(trace.records.iter().all(|r| r.r_fix.is_finite() && r.d_q <= trace.report.containment_radius + 1e-9));
}

#[test]
fn cap_run_stays_in_containment_ball() {
    let trace = viscosity::run_viscosity(&rotation_run(5_000)).unwrap();
    let r = trace.report.containment_radius;
    assert!(trace.records.iter().all(|rec| rec.d_q <= r + 1e-9));
    assert!(trace.report.k_effective < trace.report.k_bound);
}

#[test]
fn each_step_follows_the_combination_convention() {
    let cfg = segment_run(Point::planar(-0.3, 1.2), 50);
    let mut short = cfg.clone();
    short.report_every = 1;
    let trace = viscosity::run_viscosity(&short).unwrap();
    let s = cfg.space;
    for w in trace.records.windows(2) {
        let (r, next) = (&w[0], &w[1]);
        let fx = cfg.f_map.apply(&r.x).unwrap();
        let tx = cfg.t_map.apply(&r.x).unwrap();
        let d = |a: &Point, b: &Point| s.dist(a, b).unwrap();
        assert!((d(&fx, &r.y) - (1.0 - r.t) * d(&fx, &tx)).abs() < 1e-12);
        assert!((d(&r.x, &next.x) - (1.0 - r.b) * d(&r.x, &r.y)).abs() < 1e-12);
    }
}

#[test]
fn ball_hypotheses_are_enforced() {
    let cap = Space::sphere_cap(POLE, 0.5).unwrap();
    let t = MapSpec::rotation(cap, POLE, 1.0).unwrap();
    let far_anchor = MapSpec::homothety(cap, Point::from_polar(0.45, 0.0), 0.2).unwrap();
    let cfg = IterationConfig::new(cap, t, far_anchor, Point::from_polar(0.1, 0.0));
    assert!(matches!(cfg.validate(), Err(Error::Config { hypothesis, .. }) if hypothesis.starts_with("rho(p, f(p))")));

    let f = MapSpec::homothety(cap, Point::from_polar(0.3, 0.0), 0.2).unwrap();
    let cfg = IterationConfig::new(cap, t, f, Point::from_polar(0.4, 1.0));
    assert!(matches!(cfg.validate(), Err(Error::Config { hypothesis, .. }) if hypothesis == "rho(u, q) <= M/4"));
}

#[test]
fn summable_t_is_rejected() {
    let mut cfg = segment_run(Point::planar(0.5, 0.5), 100);
    cfg.sequences = SequencePair { t: Sequence::harmonic(1.0, 1.5), b: Sequence::constant(0.5) };
    assert!(matches!(cfg.validate(), Err(Error::Config { hypothesis, .. }) if hypothesis.starts_with("(iv)")));
}

#[test]
fn glued_exploration_runs_when_opted_in() {
    let g = Space::glued();
    let gg = catvisc::glued::standard();
    let (c, e) = (gg.vertex(catvisc::glued::Vertex::C), gg.vertex(catvisc::glued::Vertex::E));
    let t = MapSpec::segment_projection(g, c, e).unwrap();
    let f = MapSpec::homothety(g, gg.vertex(catvisc::glued::Vertex::D), 0.3).unwrap();
    let mut cfg = IterationConfig::new(g, t, f, gg.vertex(catvisc::glued::Vertex::A));
    cfg.max_iter = 2_000;
    assert!(viscosity::run_viscosity(&cfg).is_err());
    cfg.allow_no_n_property = true;
    let trace = viscosity::run_viscosity(&cfg).unwrap();
    assert!(!trace.report.n_property);
    assert!(trace.final_record.d_q.is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The limit does not depend on the starting point.
    #[test]
    fn planar_limit_is_independent_of_u(seed in any::<u64>()) {
        let u = sample_point(&Space::plane(), &mut trial_rng(seed, 0)).unwrap();
        let trace = viscosity::run_viscosity(&segment_run(u, 20_000)).unwrap();
        let q = trace.q.as_planar().unwrap();
        prop_assert!((q[0] - 0.4).abs() < 1e-11 && q[1] == 0.0);
        let r = trace.report.containment_radius;
        prop_assert!(trace.final_record.d_q < 0.05 * r, "d_q {} vs radius {}", trace.final_record.d_q, r);
    }
}
