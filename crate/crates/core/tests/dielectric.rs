use casimir_core::dielectric::{
    epsilon, make_ohmic_bath, make_ohmic_bath_on, mu_discrete, polarizability_generalized, BathGrid, BathMode,
    DielectricModel, DiscreteBath, DrudeLorentz,
};
use casimir_core::{Complex64, Error};
use proptest::prelude::*;

fn drude(wp: f64, w0: f64, g: f64) -> DielectricModel {
    DielectricModel::DrudeLorentz(DrudeLorentz::new(wp, w0, g).unwrap())
}

fn bath(wp: f64, w0: f64, couplings: &[(f64, f64)]) -> DiscreteBath {
    DiscreteBath::new(
        wp,
        w0,
        couplings
            .iter()
            .map(|&(omega_j, mass_ratio)| BathMode { omega_j, mass_ratio })
            .collect(),
    )
    .unwrap()
}

/// `ε_N(iξ)` summed term by term from the bath definition.
fn bath_eps_imag(b: &DiscreteBath, xi: f64) -> f64 {
    let mut mu = 0.0;
    for c in &b.couplings {
        mu += c.mass_ratio * c.omega_j * c.omega_j / (c.omega_j * c.omega_j + xi * xi);
    }
    1.0 + b.omega_p * b.omega_p / (xi * xi + b.omega_0 * b.omega_0 + xi * xi * mu)
}

#[test]
fn drude_static_limit() {
    let m = drude(2.0, 0.5, 0.3);
    let e = epsilon(&m, Complex64::new(0.0, 0.0)).unwrap();
    assert!((e - Complex64::new(1.0 + 4.0 / 0.25, 0.0)).norm() < 1e-14);
}

#[test]
fn bare_bath_equals_lossless_oscillator() {
    let b = DielectricModel::DiscreteBath(bath(1.5, 0.4, &[]));
    let d = drude(1.5, 0.4, 0.0);
    for xi in [0.01, 0.3, 1.0, 7.0] {
        let z = Complex64::new(0.0, xi);
        let eb = epsilon(&b, z).unwrap();
        assert_eq!(eb.im, 0.0);
        assert!((eb.re - (1.0 + 2.25 / (xi * xi + 0.16))).abs() < 1e-14);
        assert!((eb - epsilon(&d, z).unwrap()).norm() < 1e-14);
    }
}

#[test]
fn drude_rejects_lower_half_plane_without_flag() {
    let m = drude(1.0, 0.0, 0.2);
    let z = Complex64::new(0.5, -0.1);
    assert!(matches!(epsilon(&m, z), Err(Error::Domain(_))));
    assert!(m.epsilon_on_sheet(z, true).is_ok());
    assert!(matches!(epsilon(&DielectricModel::PerfectMirror, z), Err(Error::Domain(_))));
}

#[test]
fn bath_pole_is_reported() {
    let b = bath(1.0, 0.0, &[(2.0, 0.5)]);
    let poles = b.epsilon_poles();
    // With ω₀ = 0, P > 0 below ω₁, so the only pole sits above the bath frequency.
    assert_eq!(poles.len(), 1);
    assert!(poles[0] > 2.0);
    // Pole of ε_N: P(ω²) = 0 with P = ω² + (m₁/m)ω₁²ω²/(ω₁² − ω²).
    for &p in &poles {
        let x = p * p;
        assert!((x + 0.5 * 4.0 * x / (4.0 - x)).abs() < 1e-10);
    }
    assert!(b.epsilon_real(poles[0] * (1.0 - 1e-9)) > 1e6);
    assert!(b.epsilon_real(poles[0] * (1.0 + 1e-9)) < -1e6);
    assert!(matches!(b.mu(Complex64::new(2.0, 0.0)), Err(Error::PoleHit(_))));
}

#[test]
fn memory_function_examples() {
    let empty = bath(1.0, 0.0, &[]);
    assert_eq!(mu_discrete(&empty, Complex64::new(0.3, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
    let b = bath(1.0, 0.2, &[(0.5, 0.3), (1.5, 0.1)]);
    for xi in [0.1, 1.0, 4.0] {
        let mu = mu_discrete(&b, Complex64::new(0.0, xi)).unwrap();
        let expect = xi * (0.3 * 0.25 / (0.25 + xi * xi) + 0.1 * 2.25 / (2.25 + xi * xi));
        assert!(mu.im.abs() < 1e-15 && mu.re > 0.0);
        assert!((mu.re - expect).abs() < 1e-14);
        assert!((b.epsilon_imag(xi) - bath_eps_imag(&b, xi)).abs() < 1e-13);
    }
}

#[test]
fn ohmic_memory_function_approaches_gamma() {
    let gamma = 0.4;
    let wc = 200.0;
    let b = make_ohmic_bath(1.0, 0.0, gamma, wc, 4000).unwrap();
    for xi in [0.5, 1.0, 2.0] {
        let continuum = 2.0 * gamma / std::f64::consts::PI * (wc / xi).atan();
        let mu = b.mu_imag(xi);
        assert!((mu - continuum).abs() < 1e-3 * gamma, "ξ = {xi}: {mu} vs {continuum}");
        assert!((mu - gamma).abs() < 0.01 * gamma);
    }
}

#[test]
fn polarizability_examples() {
    let d = drude(2.0, 0.5, 0.3);
    let a = polarizability_generalized(&d, Complex64::new(0.0, 0.0)).unwrap();
    assert!((a - Complex64::new(16.0, 0.0)).norm() < 1e-13);
    let b = DielectricModel::DiscreteBath(bath(2.0, 0.5, &[]));
    for w in [0.1, 0.3, 1.7] {
        let a = polarizability_generalized(&b, Complex64::new(w, 0.0)).unwrap();
        assert!((a.re - 4.0 / (0.25 - w * w)).abs() < 1e-12 * a.re.abs());
        let e = epsilon(&b, Complex64::new(w, 0.0)).unwrap();
        assert!((e - 1.0 - a).norm() < 1e-12 * a.norm());
    }
}

#[test]
fn reversible_polarizability_is_even() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let m = DielectricModel::DiscreteBath(make_ohmic_bath(1.3, 0.2, 0.25, 6.0, 24).unwrap());
    for _ in 0..100 {
        let w: f64 = rng.random_range(0.0..8.0);
        let (Ok(a), Ok(b)) = (
            polarizability_generalized(&m, Complex64::new(w, 0.0)),
            polarizability_generalized(&m, Complex64::new(-w, 0.0)),
        ) else {
            continue;
        };
        assert!((a - b).norm() <= 1e-12 * a.norm());
        assert_eq!(a.im, 0.0);
    }
}

#[test]
fn ohmic_bath_degenerate_inputs() {
    assert!(make_ohmic_bath(1.0, 0.0, 0.3, 5.0, 0).unwrap().couplings.is_empty());
    assert!(make_ohmic_bath(1.0, 0.0, 0.0, 5.0, 16).unwrap().couplings.is_empty());
    assert!(make_ohmic_bath(1.0, 0.0, -0.1, 5.0, 16).is_err());
    let b = make_ohmic_bath(1.0, 0.0, 0.3, 4.0, 8).unwrap();
    assert_eq!(b.n(), 8);
    assert!((b.couplings[0].omega_j - 0.25).abs() < 1e-15);
    assert!((b.couplings[7].omega_j - 3.75).abs() < 1e-15);
}

#[test]
fn ohmic_log_grid_matches_drude_at_sixty_four_modes() {
    let wp = 1.0;
    let gamma = 0.1 * wp;
    let d = drude(wp, 0.0, gamma);
    let b = DielectricModel::DiscreteBath(make_ohmic_bath_on(wp, 0.0, gamma, 5.0 * wp, 64, BathGrid::Logarithmic).unwrap());
    let mut worst: f64 = 0.0;
    for j in 0..=40 {
        let xi = wp * 10f64.powf(-2.0 + 2.0 * j as f64 / 40.0);
        let (eb, ed) = (b.epsilon_imag(xi).unwrap(), d.epsilon_imag(xi).unwrap());
        worst = worst.max((eb / ed - 1.0).abs());
    }
    assert!(worst < 0.01, "worst relative gap {worst}");
}

#[test]
fn ohmic_gap_at_plasma_frequency_shrinks() {
    let wp = 1.0;
    let d = drude(wp, 0.0, 0.1 * wp).epsilon_imag(wp).unwrap();
    let gaps: Vec<f64> = [8usize, 16, 32, 64]
        .iter()
        .map(|&n| {
            let wc = 5.0 * wp * (n as f64 / 8.0).sqrt();
            let b = make_ohmic_bath(wp, 0.0, 0.1 * wp, wc, n).unwrap();
            (b.epsilon_imag(wp) - d).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn drude_poles_are_causal() {
    for (w0, g) in [(0.0, 0.3), (1.0, 0.1), (1.0, 3.0), (0.5, 1.0)] {
        let m = DrudeLorentz::new(1.0, w0, g).unwrap();
        for p in m.poles() {
            assert!(p.im < 0.0 || (p.im == 0.0 && p.re == 0.0 && w0 == 0.0));
            let den = p * (p + Complex64::new(0.0, g)) - w0 * w0;
            assert!(den.norm() < 1e-12);
        }
    }
}

fn model_strategy() -> impl Strategy<Value = (f64, f64, f64, f64, usize)> {
    (0.5..5.0f64, prop_oneof![Just(0.0), 0.1..3.0f64], 0.01..2.0f64, 2.0..20.0f64, 1usize..=32)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crossing_relation((wp, w0, g, wc, n) in model_strategy(), re in -10.0..10.0f64, im in 1e-3..10.0f64) {
        let z = Complex64::new(re, im);
        for m in [drude(wp, w0, g), DielectricModel::DiscreteBath(make_ohmic_bath(wp, w0, g, wc, n).unwrap())] {
            let a = epsilon(&m, z).unwrap().conj();
            let b = epsilon(&m, -z.conj()).unwrap();
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn imaginary_axis_permittivity_exceeds_one((wp, w0, g, wc, n) in model_strategy(), log_xi in -3.0..2.0f64) {
        let xi = 10f64.powf(log_xi);
        for m in [drude(wp, w0, g), DielectricModel::DiscreteBath(make_ohmic_bath(wp, w0, g, wc, n).unwrap())] {
            let e = epsilon(&m, Complex64::new(0.0, xi)).unwrap();
            prop_assert!(e.im.abs() <= 1e-12 * e.re);
            prop_assert!(e.re > 1.0);
            prop_assert!(m.epsilon_imag(xi).unwrap() > 1.0);
        }
    }

    #[test]
    fn bath_permittivity_is_even((wp, w0, g, wc, n) in model_strategy(), w in 0.0..30.0f64) {
        let b = make_ohmic_bath(wp, w0, g, wc, n).unwrap();
        match (b.epsilon(Complex64::new(w, 0.0)), b.epsilon(Complex64::new(-w, 0.0))) {
            (Ok(x), Ok(y)) => {
                prop_assert_eq!(x.im, 0.0);
                prop_assert!((x - y).norm() <= 1e-12 * x.norm().max(1.0));
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "parity broken at a pole"),
        }
    }

    #[test]
    fn ohmic_gap_never_grows_under_doubling((wp, w0, g, wc, _n) in model_strategy()) {
        let d = drude(wp, w0, g);
        let mut previous = f64::INFINITY;
        for n in [8usize, 16, 32, 64] {
            let b = make_ohmic_bath(wp, w0, g, wc * (n as f64 / 8.0).sqrt(), n).unwrap();
            let gap = (0..24)
                .map(|j| 0.05 * 1.35f64.powi(j))
                .map(|xi| (b.epsilon_imag(xi) - d.epsilon_imag(xi).unwrap()).abs())
                .fold(0.0, f64::max);
            prop_assert!(gap <= previous, "N = {n}: {gap} after {previous}");
            previous = gap;
        }
    }
}
