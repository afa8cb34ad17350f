use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use submax::baselines::{double_greedy, local_search, DoubleGreedyMode};
use submax::instances::GraphFamily;
use submax::polytope::{enumerate_dk, PseudoMarginal};
use submax::saddle::oracle::tree_oracle;
use submax::saddle::{mobius_on_index, p_eval};
use submax::{solve, SolverConfig};
use submax_bench::cut;

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for (name, family) in [
        ("tree_20", GraphFamily::Tree { n: 20 }),
        ("grid_4x4", GraphFamily::Grid { rows: 4, cols: 4 }),
        ("random_16", GraphFamily::Random { n: 16, p: 0.5 }),
    ] {
        let f = cut(family, 1);
        let config = SolverConfig::default();
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| solve(black_box(&f), &config).unwrap())
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("tree_oracle");
    for n in [16usize, 64] {
        let f = cut(GraphFamily::Random { n, p: 0.5 }, 2);
        let idx = enumerate_dk(n, 1).unwrap();
        let mob = mobius_on_index(&f, &idx);
        let y: Vec<f64> = (0..idx.len())
            .map(|i| 0.25 + 0.5 * ((i * 7919) % 97) as f64 / 97.0)
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| tree_oracle(&idx, &mob, black_box(&y)))
        });
    }
    group.finish();
}

fn bench_p_eval(c: &mut Criterion) {
    let f = cut(GraphFamily::Grid { rows: 4, cols: 4 }, 3);
    let idx = enumerate_dk(16, 1).unwrap();
    let mob = mobius_on_index(&f, &idx);
    let y = PseudoMarginal::from_set(&idx, (0..16).filter(|i| i % 3 == 0).collect());
    let (nu, _) = tree_oracle(&idx, &mob, &y.y);
    c.bench_function("p_eval_grid_4x4", |b| {
        b.iter(|| p_eval(&f, &idx, &nu, black_box(&y)).unwrap())
    });
}

fn bench_baselines(c: &mut Criterion) {
    let f = cut(GraphFamily::Random { n: 64, p: 0.3 }, 4);
    let mut group = c.benchmark_group("baselines_random_64");
    group.bench_function("double_greedy", |b| {
        b.iter(|| double_greedy(black_box(&f), DoubleGreedyMode::Randomized, 7).unwrap())
    });
    group.sample_size(10);
    group.bench_function("local_search", |b| {
        b.iter(|| local_search(black_box(&f), 0.01, 7).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_solve,
    bench_oracle,
    bench_p_eval,
    bench_baselines
);
criterion_main!(benches);
