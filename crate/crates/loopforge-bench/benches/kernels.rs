use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use loopforge::construct_even::construct_even_loop;
use loopforge::construct_odd::{construct_odd_loop, TargetGroup};
use loopforge::loopcore::{canonical_form, multiplication_group, CayleyTable};
use loopforge::permgroup::sgs_from_generators;
use loopforge::search::{census, SearchOptions};
use loopforge_bench::symmetric_generators;

fn bench_schreier_sims(c: &mut Criterion) {
    let mut group = c.benchmark_group("schreier_sims");
    for n in [16usize, 32, 61] {
        let gens = symmetric_generators(n);
        group.bench_with_input(BenchmarkId::new("symmetric_order", n), &gens, |b, gens| {
            b.iter(|| sgs_from_generators(n, gens).unwrap().order().clone());
        });
    }
    group.finish();
}

fn bench_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("construct");
    group.sample_size(10);
    group.bench_function("odd_sym_21", |b| {
        b.iter(|| construct_odd_loop(21, TargetGroup::Symmetric).unwrap())
    });
    group.bench_function("even_sym_20", |b| b.iter(|| construct_even_loop(20).unwrap()));
    group.finish();
}

fn bench_verification(c: &mut Criterion) {
    let table = construct_odd_loop(21, TargetGroup::Symmetric).unwrap();
    c.bench_function("multiplication_group_21", |b| {
        b.iter(|| multiplication_group(&table).order().clone())
    });
    let z6 = CayleyTable::cyclic(6);
    c.bench_function("canonical_form_6", |b| b.iter(|| canonical_form(&z6)));
}

fn bench_census(c: &mut Criterion) {
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    group.bench_function("order_5", |b| {
        b.iter(|| census(5, &SearchOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_schreier_sims,
    bench_construction,
    bench_verification,
    bench_census
);
criterion_main!(benches);
