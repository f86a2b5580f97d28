use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dopinv_bench::{coefficient, matrix, model};
use dopinv_core::elliptic::solve_diffusion;
use dopinv_core::forward::MeasurementKind;
use dopinv_core::regtools::svd;
use dopinv_core::{DirichletData, ScalarField, SolverOptions};

fn diffusion(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_diffusion");
    for n in [41, 81] {
        let gamma = coefficient(n);
        let grid = gamma.grid();
        let bc = DirichletData::constant(&grid, 1.0, 0.0);
        let source = ScalarField::zeros(grid);
        let opts = SolverOptions::default();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| solve_diffusion(&gamma, &bc, &source, &opts).unwrap())
        });
    }
    group.finish();
}

fn forward(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward_map");
    let gamma = coefficient(41);
    for (label, kind, count) in [
        (
            "pointwise_unipolar_n1",
            MeasurementKind::PointwiseUnipolar,
            1,
        ),
        ("pointwise_bipolar_n1", MeasurementKind::PointwiseBipolar, 1),
        (
            "averaged_unipolar_n25",
            MeasurementKind::AveragedUnipolar,
            25,
        ),
    ] {
        let m = model(41, kind, count);
        group.bench_function(label, |b| b.iter(|| m.apply(&gamma).unwrap()));
    }
    group.finish();
}

fn dense_svd(c: &mut Criterion) {
    let mut group = c.benchmark_group("svd");
    for (rows, cols) in [(10, 6), (60, 40)] {
        let a = matrix(rows, cols);
        group.bench_function(format!("{rows}x{cols}"), |b| b.iter(|| svd(&a).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, diffusion, forward, dense_svd);
criterion_main!(benches);
