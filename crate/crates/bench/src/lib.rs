//! Seeded inputs shared by the benchmarks.

use std::f64::consts::PI;

use enf_core::{make_window, random_covariance, ToeplitzCovariance, WindowKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn covariances(count: usize, order: usize, seed: u64) -> Vec<ToeplitzCovariance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_covariance(order, &mut rng).expect("order >= 1"))
        .collect()
}

/// One second of a noisy third-harmonic tone at 441 Hz, Parzen-windowed.
pub fn harmonic_frame(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = 180.0 + rng.random_range(-0.06..0.06);
    let raw: Vec<f64> = (0..441)
        .map(|t| (2.0 * PI * f * t as f64 / 441.0).cos() + 0.1 * rng.random_range(-1.0..1.0))
        .collect();
    make_window(WindowKind::Parzen, 441, None)
        .and_then(|w| w.apply(&raw))
        .expect("matching lengths")
}
