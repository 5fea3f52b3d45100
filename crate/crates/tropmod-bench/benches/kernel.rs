use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tropmod_core::cones::{fiber_product, Cone, ConeMorphism, DualElement};
use tropmod_core::curves::TropicalCurve;
use tropmod_core::graphs::{enumerate_stable, MarkedGraph};
use tropmod_core::stacks::{build_moduli_stack, groupoid_presentation};
use tropmod_core::universal::{cone_over, universal_fiber_check};

fn face_lattices(c: &mut Criterion) {
    let mut group = c.benchmark_group("face_lattice");
    for n in [3, 5, 7] {
        let cone = Cone::orthant(n);
        group.bench_with_input(BenchmarkId::new("orthant", n), &cone, |b, cone| b.iter(|| cone.face_lattice().len()));
    }
    group.finish();
}

fn fiber_products(c: &mut Criterion) {
    let f = ConeMorphism::new(Cone::orthant(3), Cone::orthant(2), vec![vec![1, 1, 0], vec![0, 1, 2]]).unwrap();
    let g = ConeMorphism::new(Cone::orthant(2), Cone::orthant(2), vec![vec![2, 1], vec![1, 3]]).unwrap();
    c.bench_function("fiber_product/3x2 over 2", |b| b.iter(|| fiber_product(black_box(&f), black_box(&g)).unwrap()));
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_stable");
    for (g, n) in [(1, 3), (2, 1), (3, 0)] {
        group.bench_function(BenchmarkId::from_parameter(format!("{g},{n}")), |b| b.iter(|| enumerate_stable(g, n).unwrap().len()));
    }
    group.finish();
}

fn moduli(c: &mut Criterion) {
    let mut group = c.benchmark_group("moduli");
    group.sample_size(20);
    for (g, n) in [(1, 2), (2, 0)] {
        group.bench_function(BenchmarkId::new("stack", format!("{g},{n}")), |b| b.iter(|| build_moduli_stack(g, n).unwrap()));
    }
    group.bench_function("presentation/1,2", |b| b.iter(|| groupoid_presentation(1, 2).unwrap()));
    group.finish();
}

fn universal(c: &mut Criterion) {
    let loop1 = MarkedGraph::new(vec![0], vec![(0, 0)], vec![(1, 0)]).unwrap();
    let curve = TropicalCurve::new(Cone::ray(), loop1, vec![DualElement::from(vec![1])]).unwrap();
    let theta = TropicalCurve::tautological(&MarkedGraph::new(vec![0, 0], vec![(0, 1), (0, 1), (0, 1)], vec![]).unwrap());
    let mut group = c.benchmark_group("universal");
    group.sample_size(10);
    group.bench_function("cone_over/loop", |b| b.iter(|| cone_over(&curve).unwrap()));
    group.bench_function("cone_over/theta", |b| b.iter(|| cone_over(&theta).unwrap()));
    group.bench_function("fiber_check/loop", |b| b.iter(|| universal_fiber_check(&curve, 3, 1_000_000).unwrap()));
    group.finish();
}

criterion_group!(benches, face_lattices, fiber_products, enumeration, moduli, universal);
criterion_main!(benches);
