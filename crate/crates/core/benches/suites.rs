//! Sequential versus data-parallel execution of the randomized suites.

use std::hint::black_box;

use catvisc::exec::Execution;
use catvisc::lemma_suite::{self, SuiteOptions};
use catvisc::MapSpec;
use catvisc::Space;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const TRIALS: u64 = 20_000;

fn schedules() -> Vec<(&'static str, Execution)> {
    let mut out = vec![("sequential", Execution::Sequential)];
    if cfg!(feature = "parallel") {
        out.push(("parallel", Execution::Parallel));
    }
    out
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    for name in ["lemma-3-1", "lemma-3-2", "lemma-3-3", "h"] {
        for (label, execution) in schedules() {
            let mut opts = SuiteOptions::new(TRIALS, 0);
            opts.execution = execution;
            group.bench_with_input(BenchmarkId::new(name, label), &opts, |b, opts| {
                b.iter(|| black_box(lemma_suite::run_suite(name, opts).unwrap()))
            });
        }
    }
    group.finish();
}

fn lipschitz_estimate(c: &mut Criterion) {
    let cap = Space::sphere_cap([0.0, 0.0, 1.0], 0.5).unwrap();
    let f = MapSpec::homothety(cap, catvisc::Point::from_polar(0.3, 0.0), 0.2).unwrap();
    c.bench_function("empirical_lipschitz", |b| b.iter(|| black_box(f.empirical_lipschitz(TRIALS, 0).unwrap())));
}

criterion_group!(benches, suites, lipschitz_estimate);
criterion_main!(benches);
