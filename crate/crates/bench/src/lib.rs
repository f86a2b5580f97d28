//! Shared fixtures for the criterion benches.

use dopinv_core::forward::{make_voltage_profiles, ForwardModel, MeasurementKind, ModelParams};
use dopinv_core::regtools::DenseMatrix;
use dopinv_core::{Grid, ScalarField, SolverOptions};

/// Smooth positive coefficient with an inclusion-like bump.
pub fn coefficient(n: usize) -> ScalarField {
    let grid = Grid::new(n).expect("valid grid size");
    ScalarField::from_fn(grid, |x, y| {
        let r2 = (x - 0.4).powi(2) + (y - 0.6).powi(2);
        1.0 + 0.6 * (-r2 / 0.02).exp()
    })
}

/// Forward model with `count` equally spaced contact windows.
pub fn model(n: usize, kind: MeasurementKind, count: usize) -> ForwardModel {
    let grid = Grid::new(n).expect("valid grid size");
    let hw = dopinv_core::forward::default_half_width(count);
    let profiles = make_voltage_profiles(count, hw, &grid).expect("profiles fit the grid");
    ForwardModel::new(
        grid,
        kind,
        profiles,
        ModelParams::default(),
        SolverOptions::default(),
    )
    .expect("consistent model")
}

/// Deterministic dense matrix with decaying columns.
pub fn matrix(rows: usize, cols: usize) -> DenseMatrix {
    let entries = (0..rows * cols)
        .map(|k| {
            let (i, j) = (k / cols, k % cols);
            ((i * 7 + j * 13) as f64).sin() / (1.0 + j as f64)
        })
        .collect();
    DenseMatrix::new(rows, cols, entries).expect("nonempty matrix")
}
