//! Fixed inputs shared by the benchmarks.

use qi_core::{GaussianState, IlluminationModel, IlluminationScenario};

/// The three-mode working point used throughout: weak signal, bright background.
pub fn three_mode_pair() -> (GaussianState, GaussianState) {
    let scn =
        IlluminationScenario::three_mode(0.01, 100.0, 0.01, 1_000_000).expect("valid scenario");
    IlluminationModel::ThreeMode
        .states(&scn)
        .expect("physical states")
}

/// Log-spaced signal strengths on `[0.01, 1]`.
pub fn ns_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 10f64.powf(-2.0 + 2.0 * i as f64 / (count - 1) as f64))
        .collect()
}
