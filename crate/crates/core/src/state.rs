//! States built from non-negative angular-momentum modes: real expansion
//! coefficients c₀…c_N with unit Euclidean norm, plus the dimensional
//! parameters needed to convert between lab units and dimensionless ones.

use crate::error::{Error, Result};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

/// Constructor-side normalization tolerance on |Σ c² − 1|.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Looser tolerance applied when loading a state from disk.
pub const LOAD_NORM_TOLERANCE: f64 = 1e-9;

/// Real expansion coefficients of a state over the modes m = 0…N, together
/// with the dimensionless half-window α the state is analyzed on.
///
/// Immutable once constructed; Σ c_m² = 1 within [`NORM_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    n_max: usize,
    alpha: f64,
    coeffs: Vec<f64>,
}

impl CoefficientVector {
    /// Wraps an already-normalized coefficient list.
    pub fn new(coeffs: Vec<f64>, alpha: f64) -> Result<Self> {
        Self::with_tolerance(coeffs, alpha, NORM_TOLERANCE)
    }

    fn with_tolerance(coeffs: Vec<f64>, alpha: f64, tol: f64) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::TooFewCoefficients(coeffs.len()));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidValue { index });
        }
        let deviation = (coeffs.iter().map(|c| c * c).sum::<f64>() - 1.0).abs();
        if deviation > tol {
            return Err(Error::InvalidState { deviation });
        }
        Ok(Self {
            n_max: coeffs.len() - 1,
            alpha,
            coeffs,
        })
    }

    /// Scales an arbitrary real vector to unit norm, fixing the global sign
    /// so that c₀ > 0. Idempotent up to floating-point roundoff.
    pub fn normalize(raw: &[f64], alpha: f64) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::TooFewCoefficients(raw.len()));
        }
        if let Some(index) = raw.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidValue { index });
        }
        let norm = raw.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let flip = if raw[0] < 0.0 { -1.0 } else { 1.0 };
        let coeffs: Vec<f64> = raw.iter().map(|c| flip * c / norm).collect();
        Self::with_tolerance(coeffs, alpha, NORM_TOLERANCE)
    }

    /// The basis state |m⟩ embedded in the mode range 0…n_max.
    pub fn basis_state(m: usize, n_max: usize, alpha: f64) -> Result<Self> {
        if n_max < 1 || m > n_max {
            return Err(Error::InvalidArgument(format!(
                "basis index m = {m} outside 0..={n_max}"
            )));
        }
        let mut coeffs = vec![0.0; n_max + 1];
        coeffs[m] = 1.0;
        Self::new(coeffs, alpha)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Canonical text form: header line `N=<n> alpha=<alpha>`, then one
    /// coefficient per line in shortest round-trip scientific notation.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 * (self.n_max + 2));
        writeln!(out, "N={} alpha={:e}", self.n_max, self.alpha).unwrap();
        for c in &self.coeffs {
            writeln!(out, "{c:e}").unwrap();
        }
        out
    }

    /// SHA-256 of the canonical text form, in hex.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_text().as_bytes());
        hash.iter().fold(String::new(), |mut s, b| {
            write!(s, "{b:02x}").unwrap();
            s
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text, path)
    }

    /// Parses the canonical text form; `path` is used only for error context.
    pub fn from_text(text: &str, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty file".into()))?;
        let mut fields = header.split_whitespace();
        let n_max: usize = fields
            .next()
            .and_then(|f| f.strip_prefix("N="))
            .ok_or_else(|| parse_err(1, format!("expected `N=<int>`, got `{header}`")))?
            .parse()
            .map_err(|e| parse_err(1, format!("bad mode count: {e}")))?;
        let alpha: f64 = fields
            .next()
            .and_then(|f| f.strip_prefix("alpha="))
            .ok_or_else(|| parse_err(1, format!("expected `alpha=<real>`, got `{header}`")))?
            .parse()
            .map_err(|e| parse_err(1, format!("bad alpha: {e}")))?;
        if fields.next().is_some() {
            return Err(parse_err(1, "trailing fields in header".into()));
        }
        if n_max < 1 {
            return Err(parse_err(1, format!("n_max must be >= 1, got {n_max}")));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(parse_err(1, format!("alpha must be positive, got {alpha}")));
        }

        let mut coeffs = Vec::with_capacity(n_max + 1);
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            if coeffs.len() == n_max + 1 {
                return Err(parse_err(
                    line_no,
                    format!("expected {} coefficients, found more", n_max + 1),
                ));
            }
            let c: f64 = line
                .trim()
                .parse()
                .map_err(|e| parse_err(line_no, format!("bad coefficient: {e}")))?;
            if !c.is_finite() {
                return Err(parse_err(line_no, "non-finite coefficient".into()));
            }
            coeffs.push(c);
        }
        if coeffs.len() != n_max + 1 {
            return Err(parse_err(
                text.lines().count(),
                format!("expected {} coefficients, found {}", n_max + 1, coeffs.len()),
            ));
        }
        Self::with_tolerance(coeffs, alpha, LOAD_NORM_TOLERANCE)
    }
}

/// Particle mass, ring radius, and ħ; all strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionalParams {
    mass: f64,
    radius: f64,
    hbar: f64,
}

impl DimensionalParams {
    pub fn new(mass: f64, radius: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("radius", radius), ("hbar", hbar)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { mass, radius, hbar })
    }

    /// Natural units M = R = ħ = 1.
    pub fn natural() -> Self {
        Self {
            mass: 1.0,
            radius: 1.0,
            hbar: 1.0,
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// 2MR²/ħ, the time scale linking lab time T to dimensionless t.
    fn time_scale(&self) -> f64 {
        2.0 * self.mass * self.radius * self.radius / self.hbar
    }

    /// t = ħT / (2MR²).
    pub fn to_dimensionless_time(&self, seconds: f64) -> f64 {
        seconds / self.time_scale()
    }

    /// T = 2MR²t / ħ.
    pub fn from_dimensionless_time(&self, t: f64) -> f64 {
        t * self.time_scale()
    }

    /// j = (2MR²/ħ)·J.
    pub fn to_dimensionless_current(&self, current: f64) -> f64 {
        current * self.time_scale()
    }

    /// J = ħj / (2MR²).
    pub fn from_dimensionless_current(&self, j: f64) -> f64 {
        j / self.time_scale()
    }
}

/// Mean energy (ħ²/2MR²)·Σ m² c_m².
pub fn mean_energy(state: &CoefficientVector, params: &DimensionalParams) -> f64 {
    let sum: f64 = state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, c)| (m * m) as f64 * c * c)
        .sum();
    params.hbar() * params.hbar() / (2.0 * params.mass() * params.radius() * params.radius()) * sum
}
