//! Trace CSV, JSON summaries and human-readable reports.

use std::fmt::Write as _;

use catvisc::glued::NPropertyReport;
use catvisc::lemma_suite::SuiteReport;
use catvisc::viscosity::{self, DyadicBlock, HypothesisReport, SuzukiMargins, TailSummary, Trace, TraceRecord};
use catvisc::Point;
use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;

/// One row per recorded step: `n,t_n,b_n,x_1..x_k,r_fix,r_xy,d_q`.
pub fn trace_csv(trace: &Trace) -> String {
    let k = trace.final_record.x.coords().len();
    let mut out = String::from("n,t_n,b_n");
    for i in 1..=k {
        write!(out, ",x_{i}").unwrap();
    }
    out.push_str(",r_fix,r_xy,d_q\n");
    for r in &trace.records {
        write!(out, "{},{},{}", r.n, r.t, r.b).unwrap();
        for c in r.x.coords() {
            write!(out, ",{c}").unwrap();
        }
        writeln!(out, ",{},{},{}", r.r_fix, r.r_xy, r.d_q).unwrap();
    }
    out
}

/// The JSON summary of a run. `config` re-parses as an experiment file.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub mode: &'static str,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub q: Point,
    #[serde(rename = "final")]
    pub final_record: TraceRecord,
    pub tail: TailSummary,
    pub suzuki: SuzukiMargins,
    pub dyadic_d_q: Vec<DyadicBlock>,
    pub hypotheses: HypothesisReport,
    /// Set when the space lacks the N-property; no convergence is claimed.
    pub exploratory: bool,
}

impl Summary {
    pub fn new(mode: &'static str, config: ExperimentConfig, seed: u64, trace: &Trace) -> Self {
        Summary {
            mode,
            config,
            seed,
            q: trace.q,
            final_record: trace.final_record.clone(),
            tail: trace.tail,
            suzuki: viscosity::suzuki_check(trace),
            dyadic_d_q: trace.dyadic_d_q.clone(),
            hypotheses: trace.report.clone(),
            exploratory: !trace.report.n_property,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub trials: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl LemmaReport {
    pub fn new(seed: u64, trials: u64, suites: Vec<SuiteReport>) -> Self {
        let passed = suites.iter().all(SuiteReport::passed);
        LemmaReport { seed, trials, passed, suites }
    }
}

pub fn lemma_text(report: &LemmaReport) -> String {
    let mut out = String::new();
    for s in &report.suites {
        writeln!(
            out,
            "{:<6} {:<16} trials {:>7}  worst margin {:+.3e}  tolerance {:.0e}  failures {}",
            if s.passed() { "PASS" } else { "FAIL" },
            s.suite,
            s.trials,
            s.worst_margin,
            s.tolerance,
            s.failure_count
        )
        .unwrap();
    }
    write!(out, "seed {}: {}", report.seed, if report.passed { "all suites passed" } else { "some suites FAILED" }).unwrap();
    out
}

fn radical_af() -> f64 {
    ((134.0 + 3.0 * 7f64.sqrt()) / 8.0).sqrt()
}

pub fn counterexample_text(r: &NPropertyReport) -> String {
    let v = |p: &[f64; 3]| format!("({:.15}, {:.15}, {:.15})", p[0], p[1], p[2]);
    let mut out = String::from("Two Euclidean triangles Abc and Cde glued along [C, D]\n");
    for (name, p) in [("A", &r.a), ("B", &r.b), ("C", &r.c), ("D", &r.d), ("E", &r.e), ("F", &r.f)] {
        writeln!(out, "  {name} = {}", v(p)).unwrap();
    }
    writeln!(out, "Projections onto [C, E]:").unwrap();
    for (name, p) in [("A", &r.proj_a), ("B", &r.proj_b), ("D = (A+B)/2", &r.proj_midpoint)] {
        writeln!(out, "  P({name}) = {}  parameter {:.15}  distance {:.15}", v(&p.point), p.parameter, p.distance).unwrap();
    }
    writeln!(out, "d(A, C) = {:.15}  (sqrt 17 = {:.15})", r.d_ac, 17f64.sqrt()).unwrap();
    writeln!(out, "d(A, F) = {:.15}  (sqrt((134 + 3 sqrt 7)/8) = {:.15})", r.d_af, radical_af()).unwrap();
    writeln!(out, "P(A) = P(B): {}", r.proj_a_eq_proj_b).unwrap();
    writeln!(out, "P(D) = F: {}", r.proj_midpoint_is_f).unwrap();
    writeln!(out, "P(D) outside [P(A), P(B)]: {}", r.midpoint_projection_outside).unwrap();
    write!(out, "N-property: {}", if r.violated { "VIOLATED" } else { "HOLDS" }).unwrap();
    out
}

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.14e}").parse().unwrap()
    } else {
        x
    }
}

fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round15(x))) {
                *n = x;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_numbers),
        Value::Object(o) => o.values_mut().for_each(round_numbers),
        _ => {}
    }
}

pub fn counterexample_json(r: &NPropertyReport) -> String {
    let mut v = serde_json::to_value(r).expect("report serializes");
    let obj = v.as_object_mut().unwrap();
    obj.insert("d_af_radical".into(), serde_json::json!(radical_af()));
    obj.insert("verdict".into(), Value::String(if r.violated { "VIOLATED" } else { "HOLDS" }.into()));
    round_numbers(&mut v);
    serde_json::to_string_pretty(&v).expect("value serializes")
}
