//! Fractal-dimension estimators for sampled current signals: the Higuchi
//! curve-length method and, independently, the power-spectrum slope rule
//! D = (5 − β)/2 applied to the mode expansion with l = m².

use crate::error::{Error, Result};
use crate::numeric::ols_fit;
use crate::state::CoefficientVector;
use crate::dynamics::TimeSeries;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;

/// Strides and optional fit window for the Higuchi estimator.
#[derive(Debug, Clone)]
pub struct HiguchiConfig {
    k_values: Vec<usize>,
    fit_range: Option<(usize, usize)>,
}

impl HiguchiConfig {
    /// `k_values` must be distinct, ascending, and ≥ 1. `fit_range` (inclusive
    /// bounds on k) restricts which strides enter the regression; all lengths
    /// are still computed and reported.
    pub fn new(k_values: Vec<usize>, fit_range: Option<(usize, usize)>) -> Result<Self> {
        if k_values.is_empty() || k_values[0] < 1 {
            return Err(Error::InvalidArgument("strides must be >= 1".into()));
        }
        if k_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "strides must be strictly increasing".into(),
            ));
        }
        if let Some((lo, hi)) = fit_range {
            if lo > hi {
                return Err(Error::InvalidArgument(format!(
                    "empty fit range [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self {
            k_values,
            fit_range,
        })
    }

    /// The default 47-stride geometric ladder up to `k_max` (≤ 8192).
    pub fn geometric(k_max: usize) -> Self {
        Self {
            k_values: stride_schedule(k_max),
            fit_range: None,
        }
    }

    pub fn k_values(&self) -> &[usize] {
        &self.k_values
    }
}

/// Geometric stride ladder: {1, 2, 3, 4} plus round(2^(j/4)) for j = 10…52,
/// deduplicated and clipped to `k_max`. The full ladder holds 47 strides
/// ending at 8192.
pub fn stride_schedule(k_max: usize) -> Vec<usize> {
    let mut ks: BTreeSet<usize> = [1, 2, 3, 4].into();
    for j in 10..=52 {
        ks.insert(2f64.powf(j as f64 / 4.0).round() as usize);
    }
    ks.into_iter().filter(|&k| k <= k_max).collect()
}

/// A log-log regression with the derived dimension estimate.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// (log₂ x, log₂ y) pairs behind the fit: (log₂ k, log₂ L_k) for Higuchi,
    /// (log₂ l, log₂ power) for spectra.
    pub points: Vec<(f64, f64)>,
    /// −slope for Higuchi; (5 − β)/2 for spectra.
    pub dimension: f64,
    /// Set when the estimate leaves its validity window (dimension outside
    /// (0.5, 2.5), or β outside (1, 3] for spectra).
    pub flagged: bool,
}

/// Average Higuchi curve length L_k at one stride.
///
/// L_k = (1/k)·Σ_s L_k^(s) with
/// L_k^(s) = (S−1)/(⌊(S−s)/k⌋·k²)·Σ_r |J(s+rk) − J(s+(r−1)k)|,
/// indices 1-based, r up to ⌊(S−s)/k⌋.
pub fn higuchi_lengths(series: &TimeSeries, k: usize) -> Result<f64> {
    let s_len = series.count();
    let j = series.samples();
    if k < 1 || k > s_len - 1 || s_len < 2 * k {
        return Err(Error::StrideTooLarge { k, len: s_len });
    }
    let mut total = 0.0;
    for s in 1..=k {
        let segments = (s_len - s) / k;
        debug_assert!(segments >= 1);
        let mut sum = 0.0;
        let mut prev = j[s - 1];
        for r in 1..=segments {
            let cur = j[s - 1 + r * k];
            sum += (cur - prev).abs();
            prev = cur;
        }
        total += (s_len - 1) as f64 / (segments * k * k) as f64 * sum;
    }
    Ok(total / k as f64)
}

/// Higuchi dimension: OLS of log₂ L_k on log₂ k, dimension = −slope.
pub fn higuchi_dimension(series: &TimeSeries, config: &HiguchiConfig) -> Result<FitReport> {
    if config.k_values.len() < 5 {
        return Err(Error::InvalidArgument(format!(
            "need at least 5 strides, got {}",
            config.k_values.len()
        )));
    }
    let lengths: Vec<f64> = config
        .k_values
        .par_iter()
        .map(|&k| higuchi_lengths(series, k))
        .collect::<Result<_>>()?;
    for (&k, &l) in config.k_values.iter().zip(&lengths) {
        if l == 0.0 {
            return Err(Error::DegenerateSeries { k });
        }
    }
    let points: Vec<(f64, f64)> = config
        .k_values
        .iter()
        .zip(&lengths)
        .map(|(&k, &l)| ((k as f64).log2(), l.log2()))
        .collect();
    let fit_points: Vec<(f64, f64)> = match config.fit_range {
        None => points.clone(),
        Some((lo, hi)) => config
            .k_values
            .iter()
            .zip(&points)
            .filter(|(&k, _)| k >= lo && k <= hi)
            .map(|(_, &p)| p)
            .collect(),
    };
    if fit_points.len() < 3 {
        return Err(Error::InsufficientRange {
            got: fit_points.len(),
            need: 3,
        });
    }
    let (slope, intercept, stderr) = ols_fit(&fit_points);
    let dimension = -slope;
    Ok(FitReport {
        slope,
        intercept,
        slope_stderr: stderr,
        points,
        dimension,
        flagged: !(0.5..2.5).contains(&dimension),
    })
}

/// Spectral weighting of the mode amplitudes before the power-law fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumWeight {
    /// Fit |c_m|², the bare mode sum.
    None,
    /// Fit |m·c_m|², the current-weighted mode sum.
    Mode,
}

/// Power-spectrum slope of the mode expansion read as Fourier data at l = m².
///
/// The spectral density |c_m|²·dm/dl = |c_m|²/(2m) (weighted by m² first for
/// [`SpectrumWeight::Mode`]) is averaged over logarithmic l-bins, 16 per
/// decade, bins with fewer than two modes merged forward. The fit runs over
/// l ∈ [N^0.5, N^1.8]; β = −slope and dimension (5 − β)/2.
pub fn spectrum_slope(state: &CoefficientVector, weight: SpectrumWeight) -> Result<FitReport> {
    let n_max = state.n_max();
    if n_max < 100 {
        return Err(Error::InvalidArgument(format!(
            "spectrum fit needs n_max >= 100, got {n_max}"
        )));
    }
    let coeffs = state.coeffs();
    let n_bins = (16.0 * ((n_max * n_max) as f64).log10()).ceil() as usize + 1;
    let mut members: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n_bins];
    for m in 1..=n_max {
        let l = (m * m) as f64;
        let w = match weight {
            SpectrumWeight::None => 1.0,
            SpectrumWeight::Mode => m as f64,
        };
        let amp = w * coeffs[m];
        let density = amp * amp / (2.0 * m as f64);
        let bin = ((16.0 * l.log10()) as usize).min(n_bins - 1);
        members[bin].push((l, density));
    }

    // merge underfilled bins into the next one
    let mut bins: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut carry: Vec<(f64, f64)> = Vec::new();
    for cell in members {
        carry.extend(cell);
        if carry.len() >= 2 {
            bins.push(std::mem::take(&mut carry));
        }
    }
    if !carry.is_empty() {
        if let Some(last) = bins.last_mut() {
            last.extend(carry);
        } else {
            bins.push(carry);
        }
    }

    let points: Vec<(f64, f64)> = bins
        .iter()
        .filter_map(|bin| {
            let mean = bin.iter().map(|p| p.1).sum::<f64>() / bin.len() as f64;
            if mean > 0.0 {
                let x = bin.iter().map(|p| p.0.log2()).sum::<f64>() / bin.len() as f64;
                Some((x, mean.log2()))
            } else {
                None
            }
        })
        .collect();

    let log2_n = (n_max as f64).log2();
    let (lo, hi) = (0.5 * log2_n, 1.8 * log2_n);
    let fit_points: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(x, _)| x >= lo && x <= hi)
        .collect();
    if fit_points.len() < 8 {
        return Err(Error::InsufficientRange {
            got: fit_points.len(),
            need: 8,
        });
    }
    let (slope, intercept, stderr) = ols_fit(&fit_points);
    let beta = -slope;
    let dimension = (5.0 - beta) / 2.0;
    let flagged = !(beta > 1.0 && beta <= 3.0) || !(0.5..2.5).contains(&dimension);
    Ok(FitReport {
        slope,
        intercept,
        slope_stderr: stderr,
        points,
        dimension,
        flagged,
    })
}
