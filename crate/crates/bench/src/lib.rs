//! Fixtures shared by the criterion benches.

use shearspec_core::harness::{generate_data, DataShape, DataSpec};
use shearspec_core::shear::state_from_physical;
use shearspec_core::{FlowState, FrequencyGrid, ProfileShape, ProfileSpectrum, C64};

/// Gaussian near-Couette profile at `eps` on a `k_max`/`n_eta` lattice spanning `[−16, 16]`.
pub fn profile(k_max: usize, n_eta: usize, eps: f64) -> (FrequencyGrid, ProfileSpectrum) {
    let grid = FrequencyGrid::new(k_max, 16.0, n_eta).expect("grid");
    let p = ProfileSpectrum::with_eps(&grid, ProfileShape::Gaussian { sigma: 1.0 }, eps, 1.0).expect("profile");
    (grid, p)
}

/// A smooth slice on the profile lattice.
pub fn slice(grid: &FrequencyGrid) -> Vec<C64> {
    grid.etas().iter().map(|e| C64::new((-e * e / 8.0).exp(), 0.25 * (e / 3.0).sin())).collect()
}

/// Random `(R, A, Ξ)` state with seed 1.
pub fn xi_state(grid: FrequencyGrid, p: &ProfileSpectrum) -> FlowState {
    let d = generate_data(grid, &DataSpec { seed: 1, s_d: 4.0, shape: DataShape::Random }, Some(p), 1.0).expect("data");
    state_from_physical(&d.r, &d.a, &d.w, p, 1.0).expect("state")
}
