use casimir_core::dielectric::{DielectricModel, DrudeLorentz};
use casimir_core::lifshitz::{
    channel_energy_zero_t, energy_zero_t, free_energy_matsubara, free_energy_real_frequency, pressure, Route,
};
use casimir_core::planar::{PlanarCavity, Polarization, Thickness, TransverseChannel};
use proptest::prelude::*;
use std::f64::consts::PI;

fn zeta4() -> f64 {
    let n = 100_000u64;
    (1..=n).rev().map(|j| (j as f64).powi(-4)).sum::<f64>() + 1.0 / (3.0 * (n as f64).powi(3))
}

fn casimir(l: f64) -> f64 {
    -zeta4() / (8.0 * PI * PI * l.powi(3))
}

fn drude(wp: f64, g: f64) -> DielectricModel {
    DielectricModel::DrudeLorentz(DrudeLorentz::new(wp, 0.0, g).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Matsubara free energy summed directly over `l ≤ 2000` with a 10⁴-point trapezoid in
/// `κ = sqrt(k² + ξ²)`; the Fresnel coefficients are written out here.
fn brute_force_drude(wp: f64, gamma: f64, l: f64, tau: f64) -> f64 {
    let points = 10_000;
    let span = 40.0 / l;
    let mut total = 0.0;
    for m in 0..=2000usize {
        let xi = m as f64 * tau;
        let eps = if m == 0 { f64::INFINITY } else { 1.0 + wp * wp / (xi * xi + gamma * xi) };
        let h = span / points as f64;
        let mut channel = 0.0;
        for j in 0..=points {
            let kap = xi + j as f64 * h;
            let k2 = kap * kap - xi * xi;
            let damp = (-2.0 * kap * l).exp();
            let (r_te, r_tm) = if m == 0 {
                // ξ → 0: TE reflection of a dissipative conductor vanishes, TM tends to one.
                (0.0, 1.0)
            } else {
                let km = (k2 + eps * xi * xi).sqrt();
                ((kap - km) / (kap + km), (eps * kap - km) / (eps * kap + km))
            };
            let f = if kap == 0.0 {
                0.0
            } else {
                kap * ((-r_te * r_te * damp).ln_1p() + (-r_tm * r_tm * damp).ln_1p())
            };
            channel += if j == 0 || j == points { 0.5 * f } else { f };
        }
        channel *= h / (2.0 * PI);
        total += if m == 0 { 0.5 * channel } else { channel };
        if m > 0 && channel.abs() < 1e-18 * total.abs() {
            break;
        }
    }
    tau / (2.0 * PI) * total
}

#[test]
fn vacuum_gives_zero_on_every_route() {
    let mut c = PlanarCavity::bulk(1.0, DielectricModel::Vacuum);
    assert_eq!(energy_zero_t(&c).unwrap().value, 0.0);
    c.temperature_wavenumber = 0.5;
    assert_eq!(free_energy_matsubara(&c).unwrap().value, 0.0);
    assert_eq!(free_energy_real_frequency(&c, 100.0, 1e-4).unwrap().value, 0.0);
    assert_eq!(pressure(&c).unwrap(), 0.0);
}

#[test]
fn perfect_mirror_energy() {
    for l in [0.5, 1.0, 2.0] {
        let r = energy_zero_t(&PlanarCavity::bulk(l, DielectricModel::PerfectMirror)).unwrap();
        assert_eq!(r.route, Route::ZeroT);
        assert!(r.abs_error >= 0.0);
        assert!(rel(r.value, casimir(l)) < 1e-6, "L = {l}");
        assert!(rel(r.value, -PI * PI / (720.0 * l.powi(3))) < 1e-6);
    }
}

#[test]
fn perfect_mirror_matsubara_near_zero_temperature() {
    let mut c = PlanarCavity::bulk(1.0, DielectricModel::PerfectMirror);
    c.temperature_wavenumber = 0.01;
    let r = free_energy_matsubara(&c).unwrap();
    assert_eq!(r.route, Route::Matsubara);
    assert!(r.metadata.matsubara_terms.unwrap() > 1);
    assert!(rel(r.value, casimir(1.0)) < 1e-3);
}

#[test]
fn bulk_drude_matsubara_against_brute_force() {
    let (wp, gamma, l, tau) = (10.0, 0.1, 1.0, 0.1);
    let mut c = PlanarCavity::bulk(l, drude(wp, gamma));
    c.temperature_wavenumber = tau;
    let v = free_energy_matsubara(&c).unwrap().value;
    let oracle = brute_force_drude(wp, gamma, l, tau);
    assert!(rel(v, oracle) < 1e-5, "{v} vs {oracle}");
}

#[test]
fn matsubara_approaches_zero_temperature() {
    let base = PlanarCavity::bulk(1.0, drude(5.0, 0.2));
    let zero = energy_zero_t(&base).unwrap().value;
    let gaps: Vec<f64> = [0.3, 0.1, 0.03]
        .iter()
        .map(|&tau| {
            let mut c = base.clone();
            c.temperature_wavenumber = tau;
            (free_energy_matsubara(&c).unwrap().value - zero).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn wick_rotation_equivalence() {
    let mut c = PlanarCavity::bulk(1.0, drude(3.0, 0.3));
    c.temperature_wavenumber = 1.0;
    let m = free_energy_matsubara(&c).unwrap().value;
    let r = free_energy_real_frequency(&c, 400.0, 1e-4).unwrap();
    assert_eq!(r.route, Route::RealFrequency);
    assert_eq!(r.metadata.omega_max, Some(400.0));
    assert!(rel(r.value, m) < 1e-3, "{} vs {m}", r.value);
}

#[test]
fn perfect_mirror_pressure() {
    for l in [0.7, 1.0] {
        let p = pressure(&PlanarCavity::bulk(l, DielectricModel::PerfectMirror)).unwrap();
        assert!(rel(p, -PI * PI / (240.0 * l.powi(4))) < 1e-4, "L = {l}: {p}");
    }
}

#[test]
fn plasma_mirrors_approach_perfect_from_above() {
    let perfect = casimir(1.0);
    let values: Vec<f64> = [10.0, 30.0, 100.0]
        .iter()
        .map(|&wp| energy_zero_t(&PlanarCavity::bulk(1.0, DielectricModel::DrudeLorentz(DrudeLorentz::plasma(wp)))).unwrap().value)
        .collect();
    assert!(values.iter().all(|&v| v > perfect && v < 0.0));
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
    assert!(rel(values[2], perfect) < 0.05);
}

#[test]
fn slab_approaches_bulk_monotonically() {
    let m = drude(4.0, 0.2);
    let bulk = energy_zero_t(&PlanarCavity::bulk(1.0, m.clone())).unwrap().value;
    let mut last = f64::INFINITY;
    for d in [0.05, 0.1, 0.2, 0.4, 0.8] {
        let e = energy_zero_t(&PlanarCavity::new(1.0, Thickness::Finite(d), m.clone(), 0.0).unwrap()).unwrap().value;
        let gap = (e - bulk).abs();
        assert!(gap < last, "d = {d}");
        last = gap;
    }
}

#[test]
fn channel_energies_sum_to_total() {
    // E = ∫ k dk/(2π) Σ_p E_p(k); the per-channel values integrate back to the total.
    let c = PlanarCavity::bulk(1.0, drude(3.0, 0.3));
    let total = energy_zero_t(&c).unwrap().value;
    let panels = 400;
    let kmax = 30.0;
    let h = kmax / panels as f64;
    let mut acc = 0.0;
    for j in 0..panels {
        // Three-point Gauss-Legendre on each panel.
        for (x, w) in [(-0.7745966692414834, 5.0 / 9.0), (0.0, 8.0 / 9.0), (0.7745966692414834, 5.0 / 9.0)] {
            let k = h * (j as f64 + 0.5 + 0.5 * x);
            let mut e = 0.0;
            for p in Polarization::BOTH {
                e += channel_energy_zero_t(&c, TransverseChannel::new(p, k).unwrap(), 1e-11).unwrap();
            }
            acc += 0.5 * h * w * k / (2.0 * PI) * e;
        }
    }
    assert!(rel(acc, total) < 1e-6, "{acc} vs {total}");
}

#[test]
fn invalid_cavities_are_rejected() {
    assert!(PlanarCavity::new(-1.0, Thickness::Bulk, DielectricModel::PerfectMirror, 0.0).is_err());
    assert!(PlanarCavity::new(1.0, Thickness::Finite(0.0), DielectricModel::PerfectMirror, 0.0).is_err());
    let c = PlanarCavity::bulk(1.0, DielectricModel::PerfectMirror);
    assert!(free_energy_matsubara(&c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn plasma_scaling_law(wp in 1.0..20.0f64, lambda in 0.3..3.0f64) {
        let e1 = energy_zero_t(&PlanarCavity::bulk(1.0, DielectricModel::DrudeLorentz(DrudeLorentz::plasma(wp)))).unwrap().value;
        let e2 = energy_zero_t(&PlanarCavity::bulk(lambda, DielectricModel::DrudeLorentz(DrudeLorentz::plasma(wp / lambda)))).unwrap().value;
        prop_assert!(rel(e2, e1 / lambda.powi(3)) < 1e-8);
    }

    #[test]
    fn bulk_pressure_is_attractive(wp in 0.5..20.0f64, g in 0.0..2.0f64, l in 0.3..3.0f64) {
        let p = pressure(&PlanarCavity::bulk(l, drude(wp, g))).unwrap();
        prop_assert!(p < 0.0);
    }

    #[test]
    fn passive_energy_is_negative(wp in 0.5..20.0f64, g in 0.0..2.0f64, l in 0.3..3.0f64, d in 0.05..2.0f64) {
        let e = energy_zero_t(&PlanarCavity::new(l, Thickness::Finite(d), drude(wp, g), 0.0).unwrap()).unwrap().value;
        prop_assert!(e < 0.0);
    }
}
