use std::hint::black_box;

use airfusion_core::{
    cost_matrix, generate_channels, generate_sparsity, greedy_pairing, optimal_pairing, CostMatrix, RicianParams,
    SparsityPattern,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn instance(m: usize, seed: u64) -> (SparsityPattern, CostMatrix) {
    let h = generate_channels(4, m, RicianParams::default(), seed).unwrap();
    let s = generate_sparsity(4, m, 1.0 / 3.0, seed + 1).unwrap();
    (s, cost_matrix(&h, 1e-7).unwrap())
}

fn greedy(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy");
    for m in [8, 16, 26, 32] {
        let (s, costs) = instance(m, 11);
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| greedy_pairing(black_box(&s), black_box(&costs)).unwrap())
        });
    }
    group.finish();
}

fn optimal(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimal");
    group.sample_size(20);
    for m in [8, 16, 26] {
        let (s, costs) = instance(m, 11);
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| optimal_pairing(black_box(&s), black_box(&costs)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, greedy, optimal);
criterion_main!(benches);
