//! Dense-evolution benchmarks: matrix exponential, schedule composition
//! and the operator-norm distance at working sizes.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use trapspin_core::compile::compile;
use trapspin_core::hamiltonian::{coupling_sum, transverse_drive};
use trapspin_core::operator::spectral_distance;
use trapspin_core::pauli::Axis;
use trapspin_core::physics::CouplingMatrix;
use trapspin_core::schedule::{schedule_unitary, TargetKind, TargetSpec};
use trapspin_core::verify::evaluation_drive;

fn bench_expm(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm");
    for n in [6usize, 8] {
        let couplings = CouplingMatrix::uniform_chain(n, 1.0, 0.0);
        let h = &transverse_drive(n, 0.5) + &coupling_sum(&couplings, Axis::Z);
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| {
            b.iter(|| black_box(h.expm(0.1)));
        });
    }
    group.finish();
}

fn bench_schedule_composition(c: &mut Criterion) {
    let mut group = c.benchmark_group("schedule_unitary");
    for n in [6usize, 8] {
        let couplings = CouplingMatrix::uniform_chain(n, 1.0, 0.0);
        let target = TargetSpec::new(TargetKind::Suppress2to6, 1, 0.1, 4);
        let schedule = compile(&target, &couplings).unwrap();
        let drive = evaluation_drive(&couplings, 0.0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &schedule, |b, s| {
            b.iter(|| black_box(schedule_unitary(s, &couplings, &drive).unwrap()));
        });
    }
    group.finish();
}

fn bench_spectral_distance(c: &mut Criterion) {
    let n = 8usize;
    let couplings = CouplingMatrix::uniform_chain(n, 1.0, 0.0);
    let h = &transverse_drive(n, 0.5) + &coupling_sum(&couplings, Axis::Z);
    let u = h.expm(0.1);
    let v = h.expm(0.100001);
    c.bench_function("spectral_distance_8", |b| {
        b.iter(|| black_box(spectral_distance(&u, &v, true).unwrap()));
    });
}

criterion_group!(
    benches,
    bench_expm,
    bench_schedule_composition,
    bench_spectral_distance
);
criterion_main!(benches);
