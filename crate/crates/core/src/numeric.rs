//! Shared numerical kernels: sinc, unit phase factors, kernel entries.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// sin(z)/z with the removable singularity handled by a series branch.
///
/// For |z| < 1e-8 the truncation error of `1 - z²/6` is below 1e-16, so the
/// branch is seamless. Arguments reach ~1e8 in the kernel entries; the
/// argument is reduced modulo 2π before calling libm so evaluation stays on
/// the fast path. `sinc` is even in `z` bit-for-bit.
pub fn sinc(z: f64) -> f64 {
    let a = z.abs();
    if a < 1e-8 {
        1.0 - z * z / 6.0
    } else {
        (a % TAU).sin() / a
    }
}

/// e^(-i m² t). m² is formed in integer arithmetic (exact for m ≤ 94906265)
/// and the phase m²·t is reduced modulo 2π before the trig evaluation. The
/// sign of t is applied after reduction, so conjugation symmetry in t is
/// bit-exact: phase(m, -t) == conj(phase(m, t)).
#[inline]
pub(crate) fn mode_phase(m: usize, t: f64) -> Complex64 {
    let m2 = (m as u64 * m as u64) as f64;
    let phi = m2 * t;
    let (s, c) = (phi.abs() % TAU).sin_cos();
    if phi.is_sign_negative() {
        Complex64::new(c, s)
    } else {
        Complex64::new(c, -s)
    }
}

/// Entry (m, n) of the windowed-transfer kernel: (α/π)(m+n)·sinc[α(m²−n²)].
///
/// The diagonal reduces to 2αm/π exactly (sinc(0) = 1 on the series branch),
/// and the entry is symmetric in (m, n) bit-for-bit because `sinc` is even.
#[inline]
pub(crate) fn kernel_entry(m: usize, n: usize, alpha: f64) -> f64 {
    let d = (m * m) as i64 - (n * n) as i64;
    alpha / PI * (m + n) as f64 * sinc(alpha * d as f64)
}

/// Ordinary least squares y = intercept + slope·x.
///
/// Returns (slope, intercept, slope standard error). Needs at least 3 points
/// for a finite standard error; with exactly 2 the stderr is reported as 0.
pub(crate) fn ols_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let x_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - x_mean).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - x_mean) * (p.1 - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = if points.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, stderr)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_small_and_zero() {
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sinc(1e-9), 1.0 - 1e-18 / 6.0);
        assert!((sinc(1.0) - 1.0f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn sinc_is_even() {
        for &z in &[0.3, 1.7, 12.0, 9.5e7, 1e-9] {
            assert_eq!(sinc(z), sinc(-z));
        }
    }

    #[test]
    fn sinc_zeros_at_multiples_of_pi() {
        for k in 1..6 {
            let z = k as f64 * PI;
            assert!(sinc(z).abs() < 1e-15, "sinc({z}) = {}", sinc(z));
        }
    }

    #[test]
    fn mode_phase_conjugate_in_time() {
        for m in [0usize, 1, 7, 313, 9999] {
            for &t in &[0.0, 0.37, 1.163635, 2.9] {
                let p = mode_phase(m, t);
                let q = mode_phase(m, -t);
                assert_eq!(p.re, q.re);
                assert_eq!(p.im, -q.im);
                assert!((p.norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mode_phase_matches_direct_for_small_m() {
        for m in [0usize, 1, 2, 5] {
            let t = 0.8123;
            let phi = (m * m) as f64 * t;
            let p = mode_phase(m, t);
            assert!((p.re - phi.cos()).abs() < 1e-14);
            assert!((p.im + phi.sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn kernel_entry_symmetric_and_diagonal() {
        let alpha = 1.163635;
        for m in 0..20 {
            for n in 0..20 {
                assert_eq!(kernel_entry(m, n, alpha), kernel_entry(n, m, alpha));
            }
            assert_eq!(
                kernel_entry(m, m, alpha),
                alpha / PI * (2 * m) as f64
            );
        }
    }

    #[test]
    fn ols_exact_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        let (slope, intercept, stderr) = ols_fit(&pts);
        assert!((slope + 2.0).abs() < 1e-12);
        assert!((intercept - 3.0).abs() < 1e-12);
        assert!(stderr < 1e-12);
    }
}
