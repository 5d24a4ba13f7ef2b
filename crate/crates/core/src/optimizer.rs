//! Minimization of the probability transfer over normalized states: the
//! smallest eigenpair of the symmetric sinc kernel
//! K_{mn} = (α/π)(m+n)·sinc[α(m²−n²)], plus a scan over the window size α.
//!
//! The solver first runs shifted power iteration on σI − K (σ from a
//! Gershgorin row bound, so the bottom of K's spectrum dominates). The shift
//! grows like N while the eigenvalue gap at the bottom stays O(1), so the
//! power stage converges only for small kernels; a stall projector watches
//! the residual contraction and hands over to Lanczos with full
//! reorthogonalization, restarted from the best Ritz vector, for everything
//! else.

use crate::error::{Error, Result};
use crate::guess::build_guess;
use crate::numeric::{dot, kernel_entry, norm};
use crate::state::CoefficientVector;
use ndarray::Array2;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Dense-kernel size cap; beyond this the builder refuses and the minimizer
/// switches to matrix-free products.
pub const MAX_DENSE_N: usize = 10_000;
/// Mode cutoff above which the minimizer goes matrix-free.
pub const MATRIX_FREE_THRESHOLD: usize = 4_000;

const POWER_BUDGET_DENSE: usize = 15_000;
const POWER_BUDGET_FREE: usize = 20;
const LANCZOS_STEPS_PER_ROUND: usize = 500;
const LANCZOS_MAX_ROUNDS: usize = 8;

/// Dense transfer kernel.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    n_max: usize,
    alpha: f64,
    entries: Array2<f64>,
}

impl KernelMatrix {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    /// cᵀKc; equals the probability transfer of the state with those
    /// coefficients.
    pub fn quadratic_form(&self, coeffs: &[f64]) -> f64 {
        assert_eq!(coeffs.len(), self.n_max + 1);
        let mut acc = 0.0;
        for m in 0..coeffs.len() {
            let row = self.entries.row(m);
            let row = row.as_slice().unwrap();
            acc += coeffs[m] * dot(row, coeffs);
        }
        acc
    }
}

/// Builds the dense kernel; symmetric by construction (upper triangle
/// computed, lower mirrored).
pub fn build_kernel(n_max: usize, alpha: f64) -> Result<KernelMatrix> {
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
    if n_max > MAX_DENSE_N {
        let dim = n_max + 1;
        return Err(Error::KernelTooLarge {
            n_max,
            required_mib: dim * dim * 8 >> 20,
            cap_mib: (MAX_DENSE_N + 1) * (MAX_DENSE_N + 1) * 8 >> 20,
        });
    }
    let dim = n_max + 1;
    let mut entries = Array2::zeros((dim, dim));
    let slice = entries.as_slice_mut().unwrap();
    slice
        .par_chunks_mut(dim)
        .enumerate()
        .for_each(|(m, row)| {
            for n in m..dim {
                row[n] = kernel_entry(m, n, alpha);
            }
        });
    for m in 1..dim {
        for n in 0..m {
            entries[(m, n)] = entries[(n, m)];
        }
    }
    Ok(KernelMatrix {
        n_max,
        alpha,
        entries,
    })
}

/// Smallest eigenpair of the kernel.
#[derive(Debug, Clone)]
pub struct MinimizationResult {
    /// Smallest eigenvalue: the minimal probability transfer at this (N, α).
    pub p_min: f64,
    /// The minimizing state, sign-fixed to c₀ > 0.
    pub state: CoefficientVector,
    /// Matrix-vector products spent (power stage + Lanczos).
    pub iterations: usize,
    /// ‖K·c − p_min·c‖₂ of the returned pair.
    pub residual_norm: f64,
    /// Set when the two smallest eigenvalues are numerically inseparable; the
    /// eigenvector with the larger |c₀| is returned in that case.
    pub degenerate: bool,
}

enum KernelOp {
    Dense(KernelMatrix),
    Free { n_max: usize, alpha: f64 },
}

impl KernelOp {
    fn dim(&self) -> usize {
        match self {
            KernelOp::Dense(k) => k.n_max + 1,
            KernelOp::Free { n_max, .. } => n_max + 1,
        }
    }

    /// Gershgorin-style scale bound σ = 2αN/π + 1.
    fn sigma(&self) -> f64 {
        let (n, alpha) = match self {
            KernelOp::Dense(k) => (k.n_max, k.alpha),
            KernelOp::Free { n_max, alpha } => (*n_max, *alpha),
        };
        2.0 * alpha * n as f64 / PI + 1.0
    }

    /// out = K·v, rows in parallel, each row summed left to right. Dense and
    /// matrix-free paths use the same entry values, so they produce
    /// bit-identical products.
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        match self {
            KernelOp::Dense(k) => {
                let entries = &k.entries;
                out.par_iter_mut().enumerate().for_each(|(m, o)| {
                    let row = entries.row(m);
                    *o = dot(row.as_slice().unwrap(), v);
                });
            }
            KernelOp::Free { alpha, .. } => {
                let alpha = *alpha;
                out.par_iter_mut().enumerate().for_each(|(m, o)| {
                    let mut acc = 0.0;
                    for (n, &x) in v.iter().enumerate() {
                        acc += kernel_entry(m, n, alpha) * x;
                    }
                    *o = acc;
                });
            }
        }
    }
}

struct Candidate {
    theta: f64,
    vector: Vec<f64>,
    residual: f64,
    matvecs: usize,
}

/// Shifted power iteration on σI − K. Returns the best iterate and whether it
/// reached the residual target; a contraction-rate projection bails out early
/// when the remaining work would blow the budget.
fn shifted_power(op: &KernelOp, start: &[f64], target: f64, budget: usize) -> (Candidate, bool) {
    let dim = op.dim();
    let sigma = op.sigma();
    let mut x = start.to_vec();
    let nrm = norm(&x);
    x.iter_mut().for_each(|v| *v /= nrm);
    let mut kx = vec![0.0; dim];
    let mut thetas: Vec<f64> = Vec::new();
    let mut checkpoint_residual = f64::INFINITY;
    let mut best = Candidate {
        theta: f64::INFINITY,
        vector: x.clone(),
        residual: f64::INFINITY,
        matvecs: 0,
    };

    for iter in 1..=budget {
        op.apply(&x, &mut kx);
        let theta = dot(&x, &kx);
        let residual = x
            .iter()
            .zip(&kx)
            .map(|(xi, ki)| (ki - theta * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        thetas.push(theta);
        if residual < best.residual {
            best = Candidate {
                theta,
                vector: x.clone(),
                residual,
                matvecs: iter,
            };
        }
        let stable = thetas.len() > 10 && {
            let prev = thetas[thetas.len() - 11];
            (theta - prev).abs() <= 1e-13 * theta.abs().max(1.0)
        };
        if residual <= target && stable {
            best.matvecs = iter;
            return (best, true);
        }
        // projected matvecs to target, from the contraction over the last 25
        if iter % 25 == 0 {
            if checkpoint_residual.is_finite() {
                let rho = (residual / checkpoint_residual).powf(1.0 / 25.0);
                let hopeless = rho >= 1.0 - 1e-9;
                let projected = if hopeless {
                    usize::MAX
                } else {
                    ((target / residual).ln() / rho.ln()).ceil() as usize
                };
                if hopeless || iter + projected > budget {
                    best.matvecs = iter;
                    return (best, false);
                }
            }
            checkpoint_residual = residual;
        }
        for i in 0..dim {
            x[i] = sigma * x[i] - kx[i];
        }
        let nrm = norm(&x);
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    best.matvecs = budget;
    (best, false)
}

/// Number of eigenvalues of the tridiagonal (alphas, betas) below x, by Sturm
/// sequence.
fn sturm_count(alphas: &[f64], betas: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = alphas[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..alphas.len() {
        let denom = if q == 0.0 { f64::MIN_POSITIVE } else { q };
        q = alphas[i] - x - betas[i - 1] * betas[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// k-th smallest eigenvalue (k = 1 is the smallest) by bisection.
fn tridiag_kth_smallest(alphas: &[f64], betas: &[f64], k: usize) -> f64 {
    let n = alphas.len();
    let radius = |i: usize| -> f64 {
        let left = if i > 0 { betas[i - 1].abs() } else { 0.0 };
        let right = if i < n - 1 { betas[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        lo = lo.min(alphas[i] - radius(i));
        hi = hi.max(alphas[i] + radius(i));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alphas, betas, mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvector of the tridiagonal for an eigenvalue approximation, by two
/// rounds of inverse iteration with a partially pivoted banded solve.
fn tridiag_eigvec(alphas: &[f64], betas: &[f64], theta: f64) -> Vec<f64> {
    let n = alphas.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale = alphas.iter().fold(0.0f64, |a, x| a.max(x.abs()))
        + betas.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let shift = theta + scale * 1e-14;
    let mut y = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..2 {
        // band LU with partial pivoting; fill-in limited to one extra
        // superdiagonal
        let mut d: Vec<f64> = alphas.iter().map(|a| a - shift).collect();
        let mut e: Vec<f64> = betas.to_vec(); // superdiag
        let mut f = vec![0.0; n]; // second superdiag fill
        let mut sub: Vec<f64> = betas.to_vec(); // subdiag
        let mut rhs = y.clone();
        for i in 0..n - 1 {
            if sub[i].abs() > d[i].abs() {
                // swap rows i and i+1; row i spans cols (i, i+1, i+2) as
                // (d, e, f), row i+1 spans them as (sub, d, e)
                let (r0c0, r0c1, r0c2) = (d[i], e[i], f[i]);
                let r1c2 = if i + 1 < n - 1 { e[i + 1] } else { 0.0 };
                d[i] = sub[i];
                f[i] = r1c2;
                sub[i] = r0c0;
                let r1c1 = d[i + 1];
                e[i] = r1c1;
                d[i + 1] = r0c1;
                if i + 1 < n - 1 {
                    e[i + 1] = r0c2;
                }
                rhs.swap(i, i + 1);
            }
            let pivot = if d[i] == 0.0 { f64::MIN_POSITIVE } else { d[i] };
            let l = sub[i] / pivot;
            d[i + 1] -= l * e[i];
            if i + 1 < n - 1 {
                e[i + 1] -= l * f[i];
            }
            rhs[i + 1] -= l * rhs[i];
            sub[i] = 0.0;
        }
        // back substitution
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            if i + 1 < n {
                acc -= e[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= f[i] * x[i + 2];
            }
            let pivot = if d[i] == 0.0 { f64::MIN_POSITIVE } else { d[i] };
            x[i] = acc / pivot;
        }
        let nrm = norm(&x);
        y = x.into_iter().map(|v| v / nrm).collect();
    }
    y
}

struct LanczosRound {
    candidate: Candidate,
    converged: bool,
    second_theta: Option<f64>,
    second_vector: Option<Vec<f64>>,
}

fn lanczos_round(op: &KernelOp, start: &[f64], target: f64, max_steps: usize) -> LanczosRound {
    let dim = op.dim();
    let sigma = op.sigma();
    let breakdown = 1e-14 * sigma;
    let max_steps = max_steps.min(dim);

    let mut v = start.to_vec();
    let nrm = norm(&v);
    v.iter_mut().for_each(|x| *x /= nrm);
    let mut basis: Vec<Vec<f64>> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut matvecs = 0;
    let mut w = vec![0.0; dim];
    let mut kx = vec![0.0; dim];

    loop {
        op.apply(&v, &mut w);
        matvecs += 1;
        let a = dot(&w, &v);
        alphas.push(a);
        let k = alphas.len();
        if k >= 2 {
            let b = betas[k - 2];
            let prev = &basis[k - 2];
            for i in 0..dim {
                w[i] -= a * v[i] + b * prev[i];
            }
        } else {
            for i in 0..dim {
                w[i] -= a * v[i];
            }
        }
        for _ in 0..2 {
            for u in &basis {
                let c = dot(&w, u);
                if c != 0.0 {
                    for i in 0..dim {
                        w[i] -= c * u[i];
                    }
                }
            }
        }
        let b = norm(&w);
        let exhausted = b <= breakdown || k == max_steps;

        if k % 10 == 0 || exhausted {
            let theta = tridiag_kth_smallest(&alphas, &betas, 1);
            let y = tridiag_eigvec(&alphas, &betas, theta);
            let estimate = b * y[k - 1].abs();
            if estimate <= 0.5 * target || exhausted {
                let mut x = vec![0.0; dim];
                for (yi, u) in y.iter().zip(&basis) {
                    for i in 0..dim {
                        x[i] += yi * u[i];
                    }
                }
                let nrm = norm(&x);
                x.iter_mut().for_each(|xi| *xi /= nrm);
                op.apply(&x, &mut kx);
                matvecs += 1;
                let theta = dot(&x, &kx);
                let residual = x
                    .iter()
                    .zip(&kx)
                    .map(|(xi, ki)| (ki - theta * xi).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let converged = residual <= target || b <= breakdown;
                if converged || k == max_steps {
                    let (second_theta, second_vector) = if k >= 2 {
                        let t2 = tridiag_kth_smallest(&alphas, &betas, 2);
                        let y2 = tridiag_eigvec(&alphas, &betas, t2);
                        let mut x2 = vec![0.0; dim];
                        for (yi, u) in y2.iter().zip(&basis) {
                            for i in 0..dim {
                                x2[i] += yi * u[i];
                            }
                        }
                        let nrm2 = norm(&x2);
                        x2.iter_mut().for_each(|xi| *xi /= nrm2);
                        (Some(t2), Some(x2))
                    } else {
                        (None, None)
                    };
                    return LanczosRound {
                        candidate: Candidate {
                            theta,
                            vector: x,
                            residual,
                            matvecs,
                        },
                        converged,
                        second_theta,
                        second_vector,
                    };
                }
            }
        }

        betas.push(b);
        let next: Vec<f64> = w.iter().map(|x| x / b).collect();
        v = next;
        basis.push(v.clone());
    }
}

fn finish(
    op: &KernelOp,
    alpha: f64,
    candidate: Candidate,
    second: (Option<f64>, Option<Vec<f64>>),
    total_matvecs: usize,
    target: f64,
) -> Result<MinimizationResult> {
    let mut vector = candidate.vector;
    let mut theta = candidate.theta;
    let mut residual = candidate.residual;
    let mut degenerate = false;

    // near-equal bottom pair: keep the eigenvector with the larger |c₀|
    if let (Some(t2), Some(x2)) = second {
        if (t2 - theta).abs() <= (1e-12 * op.sigma()).max(1e-10) {
            degenerate = true;
            if x2[0].abs() > vector[0].abs() {
                let mut kx = vec![0.0; op.dim()];
                op.apply(&x2, &mut kx);
                let t = dot(&x2, &kx);
                let r = x2
                    .iter()
                    .zip(&kx)
                    .map(|(xi, ki)| (ki - t * xi).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if r <= target {
                    vector = x2;
                    theta = t;
                    residual = r;
                }
            }
        }
    }

    if vector[0] < 0.0 {
        vector.iter_mut().for_each(|x| *x = -*x);
    }
    let nrm = norm(&vector);
    vector.iter_mut().for_each(|x| *x /= nrm);
    let state = CoefficientVector::new(vector, alpha)?;
    Ok(MinimizationResult {
        p_min: theta,
        state,
        iterations: total_matvecs,
        residual_norm: residual,
        degenerate,
    })
}

fn minimize_with(op: &KernelOp, alpha: f64, tol: f64) -> Result<MinimizationResult> {
    let sigma = op.sigma();
    let target = (tol * sigma).min(1e-10);
    let start = build_guess(op.dim() - 1, alpha)?.state.coeffs().to_vec();

    let budget = match op {
        KernelOp::Dense(_) => POWER_BUDGET_DENSE,
        KernelOp::Free { .. } => POWER_BUDGET_FREE,
    };
    let (power, converged) = shifted_power(op, &start, target, budget);
    let mut total = power.matvecs;
    if converged {
        return finish(op, alpha, power, (None, None), total, target);
    }

    let mut start = power.vector;
    let mut best: Option<Candidate> = None;
    for _ in 0..LANCZOS_MAX_ROUNDS {
        let round = lanczos_round(op, &start, target, LANCZOS_STEPS_PER_ROUND);
        total += round.candidate.matvecs;
        if round.converged {
            let mut candidate = round.candidate;
            candidate.matvecs = total;
            return finish(
                op,
                alpha,
                candidate,
                (round.second_theta, round.second_vector),
                total,
                target,
            );
        }
        start = round.candidate.vector.clone();
        match &best {
            Some(b) if b.residual <= round.candidate.residual => {}
            _ => best = Some(round.candidate),
        }
    }

    let best = best.expect("at least one Lanczos round ran");
    let result = finish(op, alpha, best, (None, None), total, target)?;
    Err(Error::ConvergenceFailure {
        best: Box::new(result),
    })
}

/// Smallest eigenvalue and eigenvector of the transfer kernel at (n_max, α).
///
/// `tol` scales the residual target tol·σ (σ = 2αN/π + 1), additionally
/// capped at 1e-10 so the returned pair always satisfies
/// ‖K·c − p_min·c‖₂ ≤ 1e-10. Dense kernel storage up to
/// [`MATRIX_FREE_THRESHOLD`], matrix-free products beyond.
pub fn minimize_transfer(n_max: usize, alpha: f64, tol: f64) -> Result<MinimizationResult> {
    if tol < 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "tol must be >= 1e-12, got {tol:e}"
        )));
    }
    let op = make_op(n_max, alpha, n_max > MATRIX_FREE_THRESHOLD)?;
    minimize_with(&op, alpha, tol)
}

fn make_op(n_max: usize, alpha: f64, matrix_free: bool) -> Result<KernelOp> {
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
    if matrix_free {
        Ok(KernelOp::Free { n_max, alpha })
    } else {
        Ok(KernelOp::Dense(build_kernel(n_max, alpha)?))
    }
}

/// Matrix-free variant regardless of size; same results as the dense path.
pub fn minimize_transfer_matrix_free(
    n_max: usize,
    alpha: f64,
    tol: f64,
) -> Result<MinimizationResult> {
    if tol < 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "tol must be >= 1e-12, got {tol:e}"
        )));
    }
    let op = make_op(n_max, alpha, true)?;
    minimize_with(&op, alpha, tol)
}

/// One grid point of an α scan.
#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub alpha: f64,
    pub p_min: Option<f64>,
    pub error: Option<String>,
}

/// Scan results plus the parabolic refinement around the grid minimum.
#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub points: Vec<ScanPoint>,
    pub refined_alpha: f64,
    pub refined_p_min: f64,
}

/// p_min(α) over a sorted positive grid. Per-point solver failures are
/// recorded without aborting the scan; the grid minimum is refined by fitting
/// a parabola through the three bracketing points and re-solving at its
/// vertex.
pub fn scan_alpha(n_max: usize, grid: &[f64], tol: f64) -> Result<ScanOutcome> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty alpha grid".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "alpha grid must be strictly increasing".into(),
        ));
    }
    if !(grid[0] > 0.0) {
        return Err(Error::InvalidArgument(
            "alpha grid must be positive".into(),
        ));
    }
    let points: Vec<ScanPoint> = grid
        .iter()
        .map(|&alpha| match minimize_transfer(n_max, alpha, tol) {
            Ok(r) => ScanPoint {
                alpha,
                p_min: Some(r.p_min),
                error: None,
            },
            Err(e) => ScanPoint {
                alpha,
                p_min: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let best = points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.p_min.map(|v| (i, v)))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .ok_or_else(|| Error::InvalidArgument("no scan point converged".into()))?;

    let (i, grid_min) = best;
    let mut refined_alpha = grid[i];
    let mut refined_p_min = grid_min;
    if i > 0 && i + 1 < points.len() {
        if let (Some(y1), Some(y3)) = (points[i - 1].p_min, points[i + 1].p_min) {
            let (x1, x2, x3) = (grid[i - 1], grid[i], grid[i + 1]);
            let y2 = grid_min;
            let num = (x2 - x1).powi(2) * (y2 - y3) - (x2 - x3).powi(2) * (y2 - y1);
            let den = (x2 - x1) * (y2 - y3) - (x2 - x3) * (y2 - y1);
            if den != 0.0 {
                let vertex = x2 - 0.5 * num / den;
                if vertex > x1 && vertex < x3 {
                    // keep the vertex only when it actually improves on the grid
                    if let Ok(r) = minimize_transfer(n_max, vertex, tol) {
                        if r.p_min <= grid_min {
                            refined_alpha = vertex;
                            refined_p_min = r.p_min;
                        }
                    }
                }
            }
        }
    }
    Ok(ScanOutcome {
        points,
        refined_alpha,
        refined_p_min,
    })
}
