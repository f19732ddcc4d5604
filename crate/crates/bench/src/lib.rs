//! Shared fixtures for the kernel benchmarks.

use blowup_core::{
    build_hermite_basis, build_quadrature, frame_from_fns, HermiteBasis, PdeState,
    SelfSimilarFrame, SolverConfig, SpatialGrid, WeightedQuadrature,
};

/// The odd-imaginary blow-up data on its acceptance grid.
pub fn blowup_state(n_points: usize) -> (PdeState, SolverConfig) {
    let grid = SpatialGrid::new(8.0, n_points).expect("valid grid");
    let state = PdeState::from_fns(
        grid.clone(),
        |x| (3.0 - 4.0 * x * x) * (-x * x).exp(),
        |x| 2.0 * x * (-x * x).exp(),
    )
    .expect("finite data");
    (state, SolverConfig::new(grid, 4.0))
}

/// A perturbed constant profile in rescaled variables, plus its basis.
pub fn rescaled_fixture(n_points: usize) -> (SelfSimilarFrame, HermiteBasis, WeightedQuadrature) {
    let grid = SpatialGrid::new(20.0, n_points).expect("valid grid");
    let quad = build_quadrature(20.0, n_points).expect("valid quadrature");
    let basis = build_hermite_basis(4, &quad).expect("consistent basis");
    let mut frame = frame_from_fns(&grid, |_| 1.0, |_| 0.0);
    let phi1 = basis.values(1).to_vec();
    for (v, p) in frame.v.iter_mut().zip(&phi1) {
        *v = 1e-6 * p;
    }
    (frame, basis, quad)
}

/// An oscillatory field with many sign changes for the zero finder.
pub fn oscillatory_field(n_points: usize) -> (Vec<f64>, SpatialGrid) {
    let grid = SpatialGrid::new(8.0, n_points).expect("valid grid");
    let b = grid
        .nodes()
        .iter()
        .map(|&x| (3.0 * x).sin() * (-0.05 * x * x).exp() + 0.01)
        .collect();
    (b, grid)
}
