//! Shared helpers for the integration suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ringflow_core::CoefficientVector;

/// Deterministic random normalized state with n_max modes.
pub fn random_state(n_max: usize, alpha: f64, seed: u64) -> CoefficientVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let raw: Vec<f64> = (0..=n_max).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if let Ok(state) = CoefficientVector::normalize(&raw, alpha) {
            return state;
        }
    }
}

/// Σ_{j=0}^{30} b^(−jH)·cos(b^j t) with b = 2, sampled uniformly on [0, t_end]:
/// a graph of known fractal dimension 2 − H.
pub fn weierstrass(count: usize, hurst: f64, t_end: f64) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64 * t_end;
            (0..=30)
                .map(|j| 2f64.powf(-(j as f64) * hurst) * (2f64.powi(j) * t).cos())
                .sum()
        })
        .collect()
}
