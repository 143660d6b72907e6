use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fsw_core::sweep::{
    codim_sweep, consistency_failures, interpolation_sweep, rank_identity_failures, switch_grid,
    Execution,
};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_switch_grid(c: &mut Criterion) {
    let grid = switch_grid(12, 6, 6);
    let mut group = c.benchmark_group("switch_rank_grid");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(rank_identity_failures(&grid, exec)))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("switch_consistency");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(consistency_failures(12, 6, 6, exec)))
        });
    }
    group.finish();
}

fn bench_graphs(c: &mut Criterion) {
    let mut group = c.benchmark_group("graph_interpolation");
    group.sample_size(10);
    for n in [3usize, 4] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| black_box(interpolation_sweep(n, 3, exec).unwrap()))
            });
        }
    }
    group.finish();

    let mut group = c.benchmark_group("graph_codim");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(codim_sweep(6, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_switch_grid, bench_graphs);
criterion_main!(benches);
