use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mzi_dm::oracle::oracle_labels_with;
use mzi_dm::quadrature::PanelQuadrature;
use mzi_dm::{
    oracle_phase, phase_breakdown, signal_amplitude_analytic, signal_amplitude_numeric, timescale,
    timescale_quadrature, Diffraction, PerturbationTerm, PhiSMode, TimescaleKind,
};
use mzi_dm_bench::strontium;

fn timescales(c: &mut Criterion) {
    let mut g = c.benchmark_group("timescale");
    for x in [0.1, 3.0, 300.0] {
        g.bench_with_input(BenchmarkId::new("closed_form", x), &x, |b, &w| {
            b.iter(|| timescale(TimescaleKind::TauSSq, black_box(0.3), 1.0, w, 0.4, 0.7))
        });
        g.bench_with_input(BenchmarkId::new("quadrature", x), &x, |b, &w| {
            b.iter(|| timescale_quadrature(TimescaleKind::TauSSq, black_box(0.3), 1.0, w, 0.4, 0.7))
        });
    }
    g.finish();
}

fn phases(c: &mut Criterion) {
    let s = strontium(Diffraction::SinglePhoton);
    c.bench_function("phase_breakdown", |b| {
        b.iter(|| phase_breakdown(black_box(&s.grad.geom), &s.species, &s.dilaton, &s.pert))
    });
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    for d in [Diffraction::SinglePhoton, Diffraction::Bragg] {
        let s = strontium(d);
        g.bench_function(BenchmarkId::new("phase", d), |b| {
            b.iter(|| {
                oracle_phase(PerturbationTerm::KinTransition, black_box(&s.grad.geom), &s.species, &s.dilaton, &s.pert)
            })
        });
        g.bench_function(BenchmarkId::new("labels", d), |b| {
            b.iter(|| {
                oracle_labels_with(PanelQuadrature::shared(), black_box(&s.grad.geom), &s.species, &s.dilaton, &s.pert)
            })
        });
    }
    g.finish();
}

fn signal(c: &mut Criterion) {
    let s = strontium(Diffraction::SinglePhoton);
    let mut g = c.benchmark_group("signal");
    g.sample_size(20);
    g.bench_function("analytic", |b| {
        b.iter(|| signal_amplitude_analytic(black_box(&s.grad), &s.species, &s.dilaton, &s.pert))
    });
    for mode in [PhiSMode::Coherent, PhiSMode::IndependentPhiS] {
        g.bench_function(BenchmarkId::new("numeric", format!("{mode:?}")), |b| {
            b.iter(|| signal_amplitude_numeric(black_box(&s.grad), &s.species, &s.dilaton, &s.pert, mode))
        });
    }
    g.finish();
}

criterion_group!(benches, timescales, phases, oracle, signal);
criterion_main!(benches);
