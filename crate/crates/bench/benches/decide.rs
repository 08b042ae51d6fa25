use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use tolrep::decide::{find_representation, Budget};
use tolrep::ClosureMode;
use tolrep_bench::fixture;

fn representation(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_representation");
    for name in ["five_set", "s7_semilattice", "l7_majority"] {
        let (algebra, theta) = fixture(name);
        group.bench_function(name, |b| {
            b.iter(|| find_representation(black_box(&algebra), black_box(&theta), Budget::default()))
        });
    }
    group.finish();
}

fn closure(c: &mut Criterion) {
    let (algebra, _) = fixture("l7_majority");
    c.bench_function("closure/l7_majority", |b| {
        b.iter(|| algebra.closure(black_box([(0, 1)]), ClosureMode::Reflexive))
    });
    let (plus, _) = fixture("expand_five");
    c.bench_function("closure/expand_five", |b| {
        b.iter(|| plus.closure(black_box([(0, 4)]), ClosureMode::Reflexive))
    });
}

criterion_group!(benches, representation, closure);
criterion_main!(benches);
