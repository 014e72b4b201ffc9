use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spinorbit_bench::FIG1_BENCH;
use spinorbit_core::{
    bell_s, bell_s_for_state, coherent_mns, compile, measure_intensities, parse, prepare_mns,
    render_field, sample_separable_bound, simulate_intensities, BellSettings, Bindings, Complex64,
    Grid, MeasurementSetting,
};

fn bell(c: &mut Criterion) {
    let settings = BellSettings::canonical();
    c.bench_function("bell_s closed form", |b| {
        b.iter(|| bell_s(black_box(0.3), black_box(0.1), &settings))
    });
    let state = prepare_mns(0.3);
    c.bench_function("bell_s element pipeline", |b| {
        b.iter(|| bell_s_for_state(black_box(&state), black_box(0.1), &settings).unwrap())
    });
}

fn intensities(c: &mut Criterion) {
    let setting = MeasurementSetting::new(PI / 16.0, PI / 8.0);
    c.bench_function("measure_intensities", |b| {
        b.iter(|| measure_intensities(black_box(0.4), &setting, black_box(0.2)))
    });
    c.bench_function("simulate_intensities", |b| {
        b.iter(|| simulate_intensities(black_box(0.4), &setting, black_box(0.2)))
    });
}

fn separable(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_separable_bound");
    group.sample_size(10);
    for n in [1_000usize, 10_000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| sample_separable_bound(n, 1).unwrap())
        });
    }
    group.finish();
}

fn quantum(c: &mut Criterion) {
    let mut group = c.benchmark_group("coherent_mns");
    for cutoff in [10usize, 30, 60] {
        group.bench_with_input(
            BenchmarkId::from_parameter(cutoff),
            &cutoff,
            |b, &cutoff| b.iter(|| coherent_mns(black_box(Complex64::new(1.5, 0.5)), cutoff)),
        );
    }
    group.finish();
}

fn dsl(c: &mut Criterion) {
    c.bench_function("parse fig1", |b| {
        b.iter(|| parse(black_box(FIG1_BENCH)).unwrap())
    });
    let ast = parse(FIG1_BENCH).unwrap();
    let bindings: Bindings = [("phi", 0.2), ("chi", 0.1), ("alpha", 0.3), ("beta", 0.4)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    c.bench_function("compile fig1", |b| {
        b.iter(|| compile(&ast, &bindings).unwrap())
    });
    let pipeline = compile(&ast, &bindings).unwrap();
    c.bench_function("run fig1", |b| b.iter(|| pipeline.run().unwrap()));
}

fn render(c: &mut Criterion) {
    let state = prepare_mns(0.0);
    let grid = Grid::new(128, 128, 3.0).unwrap();
    c.bench_function("render_field 128x128", |b| {
        b.iter(|| render_field(&state, &grid).unwrap())
    });
}

criterion_group!(benches, bell, intensities, separable, quantum, dsl, render);
criterion_main!(benches);
