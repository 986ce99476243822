//! Benchmarks for the hot kernels: the change-of-basis action, orbit
//! enumeration, variety sweeps, and the symbolic cover suite.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use lieclosure::atlas::{Atlas, BaseVector, SystemName};
use lieclosure::structure::act;
use lieclosure::verify::pointset::PointSet;
use lieclosure::verify::{cover, SuiteConfig};
use lieclosure::{FieldDescriptor, Scalar, SquareMatrix};

fn action_bench(c: &mut Criterion) {
    let q = FieldDescriptor::RATIONAL;
    let eta_q = Atlas::new(q).base_vector(BaseVector::Heisenberg);
    let g_q = SquareMatrix::from_int_rows(&q, &[&[2, 1, 0], &[1, 3, 1], &[0, 5, 7]]).unwrap();
    c.bench_function("act_rational", |b| {
        b.iter(|| act(black_box(&eta_q), black_box(&g_q)).unwrap())
    });

    let f3 = FieldDescriptor::prime(3).unwrap();
    let eta_3 = Atlas::new(f3).base_vector(BaseVector::Heisenberg);
    let g_3 = SquareMatrix::from_int_rows(&f3, &[&[2, 1, 0], &[1, 0, 1], &[0, 2, 1]]).unwrap();
    assert!(!g_3.det().is_zero());
    c.bench_function("act_f3", |b| {
        b.iter(|| act(black_box(&eta_3), black_box(&g_3)).unwrap())
    });
}

fn orbit_bench(c: &mut Criterion) {
    let f3 = FieldDescriptor::prime(3).unwrap();
    let eta = Atlas::new(f3).base_vector(BaseVector::Heisenberg);
    c.bench_function("orbit_eta_f3", |b| {
        b.iter(|| PointSet::from_orbit(black_box(&eta), 1_000_000).unwrap())
    });
}

fn sweep_bench(c: &mut Criterion) {
    let f2 = FieldDescriptor::prime(2).unwrap();
    let sys = Atlas::new(f2).system(SystemName::HeisenbergSystem);
    c.bench_function("enumerate_heisenberg_variety_f2", |b| {
        b.iter(|| PointSet::enumerate_varieties(&[black_box(&sys)], &f2, 1_000_000).unwrap())
    });
}

fn cover_bench(c: &mut Criterion) {
    let cfg = SuiteConfig::default();
    c.bench_function("cover_suite_symbolic", |b| {
        b.iter(|| {
            let rep = cover::run(black_box(&cfg));
            assert!(rep.passed());
            rep
        })
    });
}

fn poly_eval_bench(c: &mut Criterion) {
    let f3 = FieldDescriptor::prime(3).unwrap();
    let atlas = Atlas::new(f3);
    let sys = atlas.system(SystemName::Jacobi);
    let rho = atlas.base_vector(BaseVector::Affine);
    let coords: Vec<Scalar> = rho.coords().to_vec();
    c.bench_function("jacobi_system_membership_f3", |b| {
        b.iter(|| black_box(&sys).vanishes_at(black_box(&coords)))
    });
}

criterion_group!(
    benches,
    action_bench,
    orbit_bench,
    sweep_bench,
    cover_bench,
    poly_eval_bench
);
criterion_main!(benches);
