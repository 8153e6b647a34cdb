//! Compares the default sweep (rayon when the `parallel` feature is on)
//! against the always-sequential baseline on the same workload. With
//! `--no-default-features` both arms run sequentially and should coincide.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use parherm::battery::{sweep, sweep_sequential, SweepConfig};
use parherm::rmatrix::ParaKind;

fn workload(instances: usize) -> SweepConfig {
    SweepConfig {
        instances,
        max_state: 6,
        max_io: 3,
        base_seed: 2024,
        alpha: Complex64::new(1.0, 0.0),
        kinds: vec![ParaKind::Hermitian, ParaKind::Skew],
        ..SweepConfig::default()
    }
}

fn bench_sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("certification_sweep");
    group.sample_size(10);
    for &instances in &[16usize, 48] {
        let cfg = workload(instances);
        group.bench_with_input(
            BenchmarkId::new("default", instances),
            &cfg,
            |b, cfg| b.iter(|| sweep(cfg)),
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", instances),
            &cfg,
            |b, cfg| b.iter(|| sweep_sequential(cfg)),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_sweeps);
criterion_main!(benches);
