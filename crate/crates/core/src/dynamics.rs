//! Time dependence of the dimensionless probability current j(t) for a given
//! state, and uniform sampling of it into a [`TimeSeries`].

use crate::error::{Error, Result};
use crate::numeric::mode_phase;
use crate::state::CoefficientVector;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// The two mode sums h₀(t) = Σ c_m e^(-i m² t) and h₁(t) = Σ m c_m e^(-i m² t).
///
/// Summation runs left to right over m, so the result is independent of any
/// parallelism in the callers.
pub(crate) fn mode_sums(coeffs: &[f64], t: f64) -> (Complex64, Complex64) {
    let mut h0 = Complex64::new(0.0, 0.0);
    let mut h1 = Complex64::new(0.0, 0.0);
    for (m, &c) in coeffs.iter().enumerate() {
        let p = mode_phase(m, t);
        h0 += c * p;
        h1 += m as f64 * c * p;
    }
    (h0, h1)
}

/// Current at dimensionless time t, via the O(N) factorization
/// j = (1/π)·Re{h₀*(t) h₁(t)}.
pub fn current_at(state: &CoefficientVector, t: f64) -> f64 {
    let (h0, h1) = mode_sums(state.coeffs(), t);
    (h0.conj() * h1).re / PI
}

/// O(N²) double-sum evaluation (1/2π)·ΣΣ c_m c_n (m+n) cos((m²−n²)t).
///
/// Cross-check oracle only; gated to n_max ≤ 500 because of the quadratic
/// cost.
pub fn current_at_double_sum(state: &CoefficientVector, t: f64) -> f64 {
    assert!(
        state.n_max() <= 500,
        "double-sum evaluation is a cross-check gated to n_max <= 500"
    );
    let c = state.coeffs();
    let mut total = 0.0;
    for m in 0..c.len() {
        for n in 0..c.len() {
            let d = (m * m) as i64 - (n * n) as i64;
            let phi = d as f64 * t;
            let cos = (phi.abs() % std::f64::consts::TAU).cos();
            total += c[m] * c[n] * (m + n) as f64 * cos;
        }
    }
    total / (2.0 * PI)
}

/// Uniformly sampled current values on [t_start, t_end], endpoints inclusive.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    samples: Vec<f64>,
    t_start: f64,
    t_end: f64,
    state_digest: String,
}

impl TimeSeries {
    /// Wraps raw samples (synthetic signals, CSV input). `digest` identifies
    /// the generator; sampled currents use the state digest.
    pub fn from_samples(
        samples: Vec<f64>,
        t_start: f64,
        t_end: f64,
        digest: impl Into<String>,
    ) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidGrid(samples.len()));
        }
        if !(t_start < t_end) {
            return Err(Error::InvalidArgument(format!(
                "need t_start < t_end, got [{t_start}, {t_end}]"
            )));
        }
        Ok(Self {
            samples,
            t_start,
            t_end,
            state_digest: digest.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn state_digest(&self) -> &str {
        &self.state_digest
    }

    /// Time of sample i (0-based): t_start + i/(count−1)·(t_end − t_start),
    /// with the last grid point pinned to t_end exactly.
    pub fn time_at(&self, i: usize) -> f64 {
        grid_point(self.t_start, self.t_end, self.samples.len(), i)
    }
}

fn grid_point(t_start: f64, t_end: f64, count: usize, i: usize) -> f64 {
    if i == count - 1 {
        t_end
    } else {
        t_start + i as f64 / (count - 1) as f64 * (t_end - t_start)
    }
}

/// Samples the current on a uniform inclusive grid. Deterministic: the same
/// inputs yield bit-identical output at any thread count.
pub fn sample_current(
    state: &CoefficientVector,
    t_start: f64,
    t_end: f64,
    count: usize,
) -> Result<TimeSeries> {
    if count < 2 {
        return Err(Error::InvalidGrid(count));
    }
    if !(t_start < t_end) {
        return Err(Error::InvalidArgument(format!(
            "need t_start < t_end, got [{t_start}, {t_end}]"
        )));
    }
    let samples: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| current_at(state, grid_point(t_start, t_end, count, i)))
        .collect();
    debug_assert!(
        {
            let (lo, hi) = crate::spectral::instantaneous_bounds(state.n_max()).unwrap();
            samples.iter().all(|&j| j >= lo - 1e-9 && j <= hi + 1e-9)
        },
        "sampled current escapes [λ₋, λ₊]"
    );
    TimeSeries::from_samples(samples, t_start, t_end, state.digest())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral;
    use crate::OPTIMAL_ALPHA;

    #[test]
    fn ground_state_carries_no_current() {
        let s = CoefficientVector::basis_state(0, 3, OPTIMAL_ALPHA).unwrap();
        for &t in &[0.0, 0.5, 1.0, -2.0] {
            assert_eq!(current_at(&s, t), 0.0);
        }
    }

    #[test]
    fn single_mode_current_is_m_over_pi() {
        for m in 1..5 {
            let s = CoefficientVector::basis_state(m, 6, OPTIMAL_ALPHA).unwrap();
            for &t in &[0.0, 0.9, 3.3] {
                assert!((current_at(&s, t) - m as f64 / PI).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn two_mode_hand_value_at_zero() {
        // (|0⟩+|1⟩)/√2 at t = 0: (1/2π)(0+1+1+2)/2 = 1/π.
        let r = 1.0 / 2.0f64.sqrt();
        let s = CoefficientVector::new(vec![r, r], OPTIMAL_ALPHA).unwrap();
        assert!((current_at(&s, 0.0) - 1.0 / PI).abs() < 1e-14);
        assert!((current_at_double_sum(&s, 0.0) - 1.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn factorized_matches_double_sum() {
        let raw: Vec<f64> = (0..=40).map(|m| ((m * 37 % 19) as f64 - 9.0) / 10.0).collect();
        let s = CoefficientVector::normalize(&raw, OPTIMAL_ALPHA).unwrap();
        let (_, hi) = spectral::instantaneous_bounds(40).unwrap();
        for &t in &[0.0, 0.1, 0.7, 1.163635, 2.9, -1.3] {
            let a = current_at(&s, t);
            let b = current_at_double_sum(&s, t);
            assert!((a - b).abs() <= 1e-10 * hi, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn time_reversal_symmetry_is_exact() {
        let raw: Vec<f64> = (0..=30).map(|m| (m as f64 * 0.37).sin() + 0.2).collect();
        let s = CoefficientVector::normalize(&raw, OPTIMAL_ALPHA).unwrap();
        for &t in &[0.17, 0.9, 2.5] {
            assert_eq!(current_at(&s, t), current_at(&s, -t));
        }
    }

    #[test]
    fn periodicity_in_2pi() {
        let raw: Vec<f64> = (0..=25).map(|m| 1.0 / (1.0 + m as f64)).collect();
        let s = CoefficientVector::normalize(&raw, OPTIMAL_ALPHA).unwrap();
        for &t in &[0.0, 0.4, 1.1] {
            let a = current_at(&s, t);
            let b = current_at(&s, t + std::f64::consts::TAU);
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_grid_endpoints_exact() {
        let s = CoefficientVector::basis_state(1, 2, OPTIMAL_ALPHA).unwrap();
        let ts = sample_current(&s, 0.25, 1.75, 11).unwrap();
        assert_eq!(ts.time_at(0), 0.25);
        assert_eq!(ts.time_at(10), 1.75);
        assert_eq!(ts.count(), 11);
        // stationary single mode: constant series 1/π
        for &j in ts.samples() {
            assert!((j - 1.0 / PI).abs() < 1e-14);
        }
    }

    #[test]
    fn sampling_rejects_degenerate_grid() {
        let s = CoefficientVector::basis_state(1, 2, OPTIMAL_ALPHA).unwrap();
        assert!(matches!(
            sample_current(&s, 0.0, 1.0, 1),
            Err(Error::InvalidGrid(1))
        ));
        assert!(sample_current(&s, 1.0, 1.0, 4).is_err());
    }

    #[test]
    fn series_digest_tracks_state() {
        let s = CoefficientVector::normalize(&[1.0, 1.0, 0.5], OPTIMAL_ALPHA).unwrap();
        let ts = sample_current(&s, 0.0, 1.0, 16).unwrap();
        assert_eq!(ts.state_digest(), s.digest());
    }
}
