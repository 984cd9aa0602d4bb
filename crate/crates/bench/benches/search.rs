use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use mpnnv_bench::{random_mpnn, random_net, rng, unit_box};
use mpnnv_core::rational::int;
use mpnnv_core::reach::{lp_feasible, solve, LinearConstraint, ReachQuery};
use mpnnv_core::verify::{enumerate_trees, verify_orp, BoundedInputSpec};
use mpnnv_core::Polytope;

fn lp(c: &mut Criterion) {
    let mut group = c.benchmark_group("lp_feasible");
    for dim in [2, 4, 8] {
        let p = unit_box(dim);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &p, |b, p| b.iter(|| lp_feasible(black_box(p))));
    }
    group.finish();
}

fn reach(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for relus in [4, 8, 12] {
        let net = random_net(&mut rng(relus as u64), 2, &[relus / 2, relus / 2], 1);
        let output = Polytope { dim: 1, constraints: vec![LinearConstraint::le(vec![int(-1)], int(-100))] };
        let q = ReachQuery { net, input: unit_box(2), output };
        group.bench_with_input(BenchmarkId::from_parameter(relus), &q, |b, q| b.iter(|| solve(black_box(q)).unwrap()));
    }
    group.finish();
}

fn trees(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_trees");
    for (d, k) in [(2, 3), (3, 2), (3, 3)] {
        group.bench_function(format!("d{d}_k{k}"), |b| b.iter(|| enumerate_trees(black_box(d), black_box(k))));
    }
    group.finish();
}

fn verify(c: &mut Criterion) {
    let n = random_mpnn(&mut rng(5), 1, 1, 2);
    let spec = BoundedInputSpec::uniform(2, 1, unit_box(1));
    let out = [Polytope { dim: 1, constraints: vec![LinearConstraint::le(vec![int(-1)], int(-100))] }];
    let mut group = c.benchmark_group("verify_orp");
    group.sample_size(10);
    group.bench_function("d2_k1_unreachable", |b| b.iter(|| verify_orp(black_box(&n), &spec, &out).unwrap()));
    group.finish();
}

criterion_group!(benches, lp, reach, trees, verify);
criterion_main!(benches);
