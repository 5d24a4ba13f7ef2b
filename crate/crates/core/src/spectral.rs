//! Closed-form eigenstructure of the current operator on the span of the
//! modes 0…N: the two nonzero eigenvalues λ±, their eigenvectors χ±, and the
//! rank-2 decomposition that reconstructs the full operator matrix.

use crate::error::{Error, Result};
use crate::state::CoefficientVector;
use crate::OPTIMAL_ALPHA;
use ndarray::Array2;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Positive root a₊ = √(N(2N+1)/6) of the eigenvector ansatz; a₋ = −a₊.
pub(crate) fn a_plus(n_max: usize) -> f64 {
    let n = n_max as f64;
    (n * (2.0 * n + 1.0) / 6.0).sqrt()
}

/// The two nonzero eigenvalues λ± of the current operator, closed form.
fn lambdas(n_max: usize) -> (f64, f64) {
    let n = n_max as f64;
    let root = ((4.0 * n + 2.0) / (3.0 * n)).sqrt();
    let scale = n * (n + 1.0) / (4.0 * PI);
    (scale * (1.0 - root), scale * (1.0 + root))
}

/// Closed-form spectral data of the current operator for a given mode cutoff.
///
/// `chi_plus` / `chi_minus` are unit norm with positive last component; all
/// other eigenvalues of the operator are zero.
#[derive(Debug, Clone)]
pub struct SpectralPair {
    pub n_max: usize,
    pub a_plus: f64,
    pub a_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Normalization constants of χ₊ and χ₋.
    pub norm_plus: f64,
    pub norm_minus: f64,
    pub chi_plus: CoefficientVector,
    pub chi_minus: CoefficientVector,
}

/// Matrix of the current operator: entry (m, n) = (m+n)/2π, indices 0…N.
pub fn current_operator_matrix(n_max: usize) -> Result<Array2<f64>> {
    if n_max == 0 {
        return Err(Error::DegenerateOperator);
    }
    if n_max > 10_000 {
        return Err(Error::InvalidArgument(format!(
            "n_max = {n_max} exceeds the supported dense range 1..=10^4"
        )));
    }
    let dim = n_max + 1;
    Ok(Array2::from_shape_fn((dim, dim), |(m, n)| {
        (m + n) as f64 / (2.0 * PI)
    }))
}

/// λ±, a±, A±, χ± in closed form.
pub fn closed_form_spectrum(n_max: usize) -> Result<SpectralPair> {
    if n_max == 0 {
        return Err(Error::DegenerateOperator);
    }
    let n = n_max as f64;
    let a = a_plus(n_max);
    let (lambda_minus, lambda_plus) = lambdas(n_max);
    let base = n * (n + 1.0) * (2.0 * n + 1.0) / 3.0;
    let norm_plus = (base + n * (n + 1.0) * a).sqrt().recip();
    let norm_minus = (base - n * (n + 1.0) * a).sqrt().recip();
    let chi = |amp: f64, offset: f64| -> Result<CoefficientVector> {
        let coeffs = (0..=n_max).map(|m| amp * (m as f64 + offset)).collect();
        CoefficientVector::new(coeffs, OPTIMAL_ALPHA)
    };
    Ok(SpectralPair {
        n_max,
        a_plus: a,
        a_minus: -a,
        lambda_plus,
        lambda_minus,
        norm_plus,
        norm_minus,
        chi_plus: chi(norm_plus, a)?,
        chi_minus: chi(norm_minus, -a)?,
    })
}

/// Max-abs residual of λ₊χ₊χ₊ᵀ + λ₋χ₋χ₋ᵀ against the operator entries
/// (m+n)/2π, taken over all (m, n).
pub fn verify_rank2_decomposition(n_max: usize) -> Result<f64> {
    let pair = closed_form_spectrum(n_max)?;
    let cp = pair.chi_plus.coeffs();
    let cm = pair.chi_minus.coeffs();
    let (lp, lm) = (pair.lambda_plus, pair.lambda_minus);
    let residual = (0..=n_max)
        .into_par_iter()
        .map(|m| {
            let mut worst = 0.0f64;
            for n in 0..=n_max {
                let rebuilt = lp * cp[m] * cp[n] + lm * cm[m] * cm[n];
                let direct = (m + n) as f64 / (2.0 * PI);
                worst = worst.max((rebuilt - direct).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    Ok(residual)
}

/// The extreme instantaneous currents (λ₋, λ₊) reachable at mode cutoff N.
pub fn instantaneous_bounds(n_max: usize) -> Result<(f64, f64)> {
    if n_max == 0 {
        return Err(Error::DegenerateOperator);
    }
    Ok(lambdas(n_max))
}
