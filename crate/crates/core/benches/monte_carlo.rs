use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rsft::graph::{n_block_graph, Graph, DEFAULT_PATH_CAP};
use rsft::harness::simulate_cell;
use rsft::random::exact_enumerate_many;
use rsft::Execution;

const MODES: [(&str, Execution); 2] = [("serial", Execution::Serial), ("parallel", Execution::Parallel)];

fn trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("trials");
    group.sample_size(10);
    for (name, n, alpha) in [("golden_n8_a0.5", 8, 0.5), ("full2_n8_a0.9", 8, 0.9)] {
        let base = if name.starts_with("golden") { Graph::golden() } else { Graph::full(2) };
        let g = n_block_graph(&base, n, DEFAULT_PATH_CAP).unwrap();
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, mode), &exec, |b, &exec| {
                b.iter(|| simulate_cell(black_box(&g), alpha, 7, 2_000, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_oracle");
    group.sample_size(10);
    let g = n_block_graph(&Graph::full(2), 3, DEFAULT_PATH_CAP).unwrap();
    for (mode, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("full2_n3", mode), &exec, |b, &exec| {
            b.iter(|| exact_enumerate_many(black_box(&g), &[0.2, 0.5, 0.8], exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, trials, oracle);
criterion_main!(benches);
