//! Cross-module invariants: independent evaluation routes for the same
//! physical quantities must agree.

mod common;

use common::{random_state, weierstrass};
use proptest::prelude::*;
use ringflow_core::*;
use std::f64::consts::TAU;

/// ⟨χ±|ψ(t)⟩ accumulated with plain trig, independent of the production
/// phase-reduction path.
fn rank2_current(pair: &SpectralPair, state: &CoefficientVector, t: f64) -> f64 {
    let mut proj = [(0.0f64, 0.0f64); 2];
    for (m, &c) in state.coeffs().iter().enumerate() {
        let phi = (m * m) as f64 * t;
        let (s, co) = phi.sin_cos();
        for (p, chi) in proj
            .iter_mut()
            .zip([pair.chi_plus.coeffs(), pair.chi_minus.coeffs()])
        {
            p.0 += chi[m] * c * co;
            p.1 -= chi[m] * c * s;
        }
    }
    pair.lambda_plus * (proj[0].0 * proj[0].0 + proj[0].1 * proj[0].1)
        + pair.lambda_minus * (proj[1].0 * proj[1].0 + proj[1].1 * proj[1].1)
}

#[test]
fn current_three_evaluation_paths_agree() {
    for (i, &n_max) in [7usize, 40, 150, 300].iter().enumerate() {
        let state = random_state(n_max, OPTIMAL_ALPHA, 100 + i as u64);
        let pair = closed_form_spectrum(n_max).unwrap();
        let (_, hi) = instantaneous_bounds(n_max).unwrap();
        for j in 0..20 {
            let t = -1.5 + 0.17 * j as f64;
            let fast = current_at(&state, t);
            let slow = ringflow_core::dynamics::current_at_double_sum(&state, t);
            let spectral_route = rank2_current(&pair, &state, t);
            assert!(
                (fast - slow).abs() <= 1e-10 * hi,
                "n={n_max} t={t}: factorized {fast} vs double sum {slow}"
            );
            assert!(
                (fast - spectral_route).abs() <= 1e-10 * hi,
                "n={n_max} t={t}: factorized {fast} vs rank-2 {spectral_route}"
            );
        }
    }
}

#[test]
fn sandwich_holds_for_random_states() {
    for &n_max in &[1usize, 5, 50] {
        let (lo, hi) = instantaneous_bounds(n_max).unwrap();
        let slack = 1e-12 * hi;
        for seed in 0..1000u64 {
            let state = random_state(n_max, OPTIMAL_ALPHA, 7_000 + seed);
            let t = (seed as f64 * 0.0137) % TAU;
            let j = current_at(&state, t);
            assert!(
                j >= lo - slack && j <= hi + slack,
                "n={n_max} seed={seed}: j={j} outside [{lo}, {hi}]"
            );
        }
    }
}

#[test]
fn chi_states_reach_the_extremes() {
    for &n_max in &[1usize, 6, 80] {
        let pair = closed_form_spectrum(n_max).unwrap();
        // at t = 0 the projections are real and the current is the quotient
        let j_plus = current_at(&pair.chi_plus, 0.0);
        let j_minus = current_at(&pair.chi_minus, 0.0);
        assert!((j_plus - pair.lambda_plus).abs() < 1e-12 * pair.lambda_plus.abs().max(1.0));
        assert!((j_minus - pair.lambda_minus).abs() < 1e-12 * pair.lambda_plus.abs().max(1.0));
    }
}

#[test]
fn transfer_routes_agree_on_random_windows() {
    for seed in 0..10u64 {
        let n_max = 10 + (seed as usize * 13) % 90;
        let alpha = 0.15 + 0.27 * seed as f64;
        let state = random_state(n_max, alpha, 500 + seed);
        let exact = transfer_double_sum(&state);
        let panels = suggested_panels(n_max, alpha);
        let quad = transfer_by_quadrature(&state, panels).unwrap();
        let parts = transfer_decomposed(&state, panels).unwrap();
        assert!((quad.value - exact).abs() < 1e-6, "seed {seed}");
        assert!((parts.total - exact).abs() < 1e-6, "seed {seed}");
        assert!(parts.plus_part >= -1e-12 && parts.minus_part <= 1e-12);
    }
}

#[test]
fn minimal_transfer_monotone_in_cutoff() {
    let a = minimize_transfer(30, OPTIMAL_ALPHA, 1e-12).unwrap();
    let b = minimize_transfer(60, OPTIMAL_ALPHA, 1e-12).unwrap();
    let c = minimize_transfer(120, OPTIMAL_ALPHA, 1e-12).unwrap();
    assert!(b.p_min <= a.p_min + 1e-12);
    assert!(c.p_min <= b.p_min + 1e-12);
}

#[test]
fn half_sampled_fractal_dimension_is_consistent() {
    let full = weierstrass(1 << 15, 0.5, TAU);
    let half: Vec<f64> = full.iter().step_by(2).copied().collect();
    let cfg_full = HiguchiConfig::geometric(1 << 10);
    let cfg_half = HiguchiConfig::geometric(1 << 9);
    let d_full = higuchi_dimension(
        &TimeSeries::from_samples(full, 0.0, TAU, "w").unwrap(),
        &cfg_full,
    )
    .unwrap()
    .dimension;
    let d_half = higuchi_dimension(
        &TimeSeries::from_samples(half, 0.0, TAU, "w2").unwrap(),
        &cfg_half,
    )
    .unwrap()
    .dimension;
    assert!(
        (d_full - d_half).abs() < 0.03,
        "full {d_full} vs half {d_half}"
    );
}

#[test]
fn product_of_fractal_signals_takes_larger_dimension() {
    // D = 5/4 times D = 7/4 should estimate near 7/4
    let low = weierstrass(1 << 17, 0.75, TAU);
    let high = weierstrass(1 << 17, 0.25, TAU);
    let product: Vec<f64> = low.iter().zip(&high).map(|(a, b)| a * b).collect();
    let cfg = HiguchiConfig::geometric(1 << 13);
    let d = higuchi_dimension(
        &TimeSeries::from_samples(product, 0.0, TAU, "prod").unwrap(),
        &cfg,
    )
    .unwrap()
    .dimension;
    assert!((d - 1.75).abs() < 0.05, "product dimension {d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_contract(raw in prop::collection::vec(-10.0f64..10.0, 2..60)) {
        prop_assume!(raw.iter().any(|c| c.abs() > 1e-6));
        let state = CoefficientVector::normalize(&raw, 1.0).unwrap();
        let norm: f64 = state.coeffs().iter().map(|c| c * c).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
        prop_assert!(state.coeffs()[0] >= 0.0);
        let again = CoefficientVector::normalize(state.coeffs(), 1.0).unwrap();
        for (a, b) in state.coeffs().iter().zip(again.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn persistence_round_trip(raw in prop::collection::vec(-10.0f64..10.0, 2..40), alpha in 0.01f64..10.0) {
        prop_assume!(raw.iter().any(|c| c.abs() > 1e-6));
        let state = CoefficientVector::normalize(&raw, alpha).unwrap();
        let text = state.to_text();
        let back = CoefficientVector::from_text(&text, "prop").unwrap();
        prop_assert_eq!(back.n_max(), state.n_max());
        prop_assert_eq!(back.alpha().to_bits(), state.alpha().to_bits());
        for (a, b) in state.coeffs().iter().zip(back.coeffs()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(state.digest(), back.digest());
    }

    #[test]
    fn fidelity_range_and_symmetry(
        xs in prop::collection::vec(-5.0f64..5.0, 8),
        ys in prop::collection::vec(-5.0f64..5.0, 8),
    ) {
        prop_assume!(xs.iter().any(|c| c.abs() > 1e-6));
        prop_assume!(ys.iter().any(|c| c.abs() > 1e-6));
        let a = CoefficientVector::normalize(&xs, 1.0).unwrap();
        let b = CoefficientVector::normalize(&ys, 1.0).unwrap();
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
        prop_assert_eq!(f, fidelity(&b, &a).unwrap());
    }

    #[test]
    fn sinc_bounded_and_even(z in -1e9f64..1e9) {
        let s = sinc(z);
        prop_assert!(s <= 1.0 + 1e-15);
        prop_assert!(s >= -0.25);
        prop_assert_eq!(s, sinc(-z));
    }

    #[test]
    fn sample_grid_endpoints(t0 in -2.0f64..2.0, span in 0.1f64..3.0, count in 2usize..64) {
        let s = CoefficientVector::basis_state(1, 3, 1.0).unwrap();
        let ts = sample_current(&s, t0, t0 + span, count).unwrap();
        prop_assert_eq!(ts.time_at(0), t0);
        prop_assert_eq!(ts.time_at(count - 1), t0 + span);
        prop_assert_eq!(ts.count(), count);
    }
}
