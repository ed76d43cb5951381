//! Helpers shared by the integration tests.

use mlce::generate::{generate_planted, generate_uniform, PlantedParams};
use mlce::{verify, Instance, Mode, Solution};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Mix of uniform and planted instances with `n <= 5` and `k, d <= 2`.
pub fn random_instance(rng: &mut ChaCha8Rng, mode: Mode, max_ell: usize, seed: u64) -> Instance {
    let n = rng.random_range(2..=5);
    let ell = rng.random_range(1..=max_ell);
    let k = rng.random_range(0..=2);
    let d = rng.random_range(0..=2);
    if rng.random_bool(0.5) {
        let density = rng.random_range(0.2..0.8);
        generate_uniform(n, ell, density, k, d, mode, seed)
    } else {
        let p = PlantedParams {
            n,
            ell,
            clusters: rng.random_range(1..=3),
            drift: rng.random_range(0..=1),
            noise: rng.random_range(0..=2),
            seed,
        };
        generate_planted(&p, mode).instance.with_budgets(k, d)
    }
}

#[allow(dead_code)]
pub fn assert_valid(inst: &Instance, sol: &Option<Solution>, who: &str) {
    if let Some(s) = sol {
        let report = verify(inst, s).unwrap();
        assert!(
            report.is_valid(),
            "{who} returned an invalid solution:\n{report}"
        );
    }
}
