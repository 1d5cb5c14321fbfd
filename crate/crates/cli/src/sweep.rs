use casimir_core::modes::IdentityCase;
use casimir_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

/// Deterministic sweep of `ω₀` over the closed fourth quadrant with `|ω₀| ∈ [0.1, 10]`. Every
/// fifth case sits on the negative imaginary axis (principal value) and every fifth, offset by
/// one, on the positive real axis; the test-function family alternates.
pub fn identity_sweep(n: usize, seed: u64, tol: Option<f64>) -> Vec<IdentityCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let r = 10f64.powf(rng.random_range(-1.0..1.0));
            let theta = rng.random_range(-FRAC_PI_2..0.0);
            let w = match i % 5 {
                0 => Complex64::new(0.0, -r),
                1 => Complex64::new(r, 0.0),
                _ => Complex64::from_polar(r, theta),
            };
            let mut case = if i % 2 == 0 { IdentityCase::exponential(w) } else { IdentityCase::rational(w) };
            if let Some(t) = tol {
                case.tolerance = t;
            }
            case
        })
        .collect()
}
