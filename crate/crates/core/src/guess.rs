//! The analytical trial family that approximates the transfer-minimizing
//! state: c₀ = C_N and c_m = −(C_N/2)·sinc(αm²), with C_N fixing unit norm.

use crate::error::{Error, Result};
use crate::numeric::{dot, sinc};
use crate::state::CoefficientVector;
use crate::transfer::transfer_double_sum;

/// A member of the analytical trial family, with its normalization constant.
#[derive(Debug, Clone)]
pub struct GuessState {
    pub n_max: usize,
    pub alpha: f64,
    /// C_N = (1 + ¼·Σ_{m≥1} sinc²(αm²))^(−1/2).
    pub normalization: f64,
    pub state: CoefficientVector,
}

/// Builds the trial state for the given cutoff and window.
pub fn build_guess(n_max: usize, alpha: f64) -> Result<GuessState> {
    if n_max < 1 {
        return Err(Error::InvalidArgument(format!(
            "n_max must be >= 1, got {n_max}"
        )));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    let sincs: Vec<f64> = (1..=n_max)
        .map(|m| sinc(alpha * (m * m) as f64))
        .collect();
    let c_n = (1.0 + 0.25 * sincs.iter().map(|s| s * s).sum::<f64>()).sqrt().recip();
    let mut coeffs = Vec::with_capacity(n_max + 1);
    coeffs.push(c_n);
    coeffs.extend(sincs.iter().map(|s| -c_n / 2.0 * s));
    Ok(GuessState {
        n_max,
        alpha,
        normalization: c_n,
        state: CoefficientVector::new(coeffs, alpha)?,
    })
}

/// Squared overlap (Σ a_m b_m)² of two states with equal cutoff.
pub fn fidelity(a: &CoefficientVector, b: &CoefficientVector) -> Result<f64> {
    if a.n_max() != b.n_max() {
        return Err(Error::DimensionMismatch {
            left: a.n_max(),
            right: b.n_max(),
        });
    }
    let overlap = dot(a.coeffs(), b.coeffs());
    Ok(overlap * overlap)
}

/// Probability transfer of the trial state, via the closed double sum.
pub fn guess_transfer(n_max: usize, alpha: f64) -> Result<f64> {
    Ok(transfer_double_sum(&build_guess(n_max, alpha)?.state))
}
