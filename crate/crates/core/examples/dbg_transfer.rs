use ringflow_core::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_state(n_max: usize, alpha: f64, seed: u64) -> CoefficientVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let raw: Vec<f64> = (0..=n_max).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if let Ok(state) = CoefficientVector::normalize(&raw, alpha) {
            return state;
        }
    }
}

fn main() {
    for seed in 0..10u64 {
        let n_max = 10 + (seed as usize * 13) % 90;
        let alpha = 0.15 + 0.27 * seed as f64;
        let state = random_state(n_max, alpha, 500 + seed);
        let exact = transfer_double_sum(&state);
        let panels = suggested_panels(n_max, alpha);
        let quad = transfer_by_quadrature(&state, panels).unwrap();
        let parts = transfer_decomposed(&state, panels).unwrap();
        println!("seed {seed} n={n_max} a={alpha:.2} panels={panels}: quad err {:.2e}, parts err {:.2e}",
            (quad.value - exact).abs(), (parts.total - exact).abs());
    }
}
