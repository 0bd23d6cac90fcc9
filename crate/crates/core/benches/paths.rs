use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gou_ruin::fixtures;
use gou_ruin::simulator::{estimate_ruin, Execution, SimConfig};

fn ruin_estimate(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_ruin");
    group.sample_size(10);
    for name in ["remark-2-3", "example-4.7"] {
        let model = fixtures::find(name).expect("fixture").model;
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            let cfg = SimConfig::new(0.3).with_horizon(50.0).with_paths(4_000).with_seed(1).with_execution(exec);
            group.bench_with_input(BenchmarkId::new(label, name), &cfg, |b, cfg| {
                b.iter(|| estimate_ruin(black_box(&model), cfg).expect("simulation"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, ruin_estimate);
criterion_main!(benches);
