//! Parallel against sequential execution of a few acceptance batteries.
//! Without the `parallel` feature both modes run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polycalc::suite::{run_battery, Mode, SuiteConfig};

fn batteries(c: &mut Criterion) {
    let mut group = c.benchmark_group("batteries");
    group.sample_size(10);
    for id in [2u8, 3, 9] {
        for mode in [Mode::Sequential, Mode::Parallel] {
            let cfg = SuiteConfig {
                count: Some(24),
                mode,
                ..SuiteConfig::default()
            };
            group.bench_with_input(
                BenchmarkId::new(format!("criterion-{id}"), format!("{mode:?}")),
                &cfg,
                |b, cfg| b.iter(|| black_box(run_battery(id, cfg))),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, batteries);
criterion_main!(benches);
