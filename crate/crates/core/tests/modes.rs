use casimir_core::dielectric::{make_ohmic_bath, DielectricModel, DiscreteBath, DrudeLorentz};
use casimir_core::modes::{
    audit_spectrum, count_modes_in, find_resonances, generalized_mode_sum, generalized_mode_sum_with, identity_check,
    quasistatic_channel_energy, real_mode_spectrum, reference_resonances, sum_over_modes_energy, IdentityCase,
    ModeSumOptions, RealModeOptions, ResonanceSet, TestFunction,
};
use casimir_core::numerics::{integrate_to_infinity, QuadOptions, Rectangle};
use casimir_core::planar::{PlanarCavity, Polarization, Thickness, TransverseChannel};
use casimir_core::{Complex64, Error};
use proptest::prelude::*;
use std::f64::consts::PI;

fn channel(p: Polarization, k: f64) -> TransverseChannel {
    TransverseChannel::new(p, k).unwrap()
}

fn bath_cavity(bath: DiscreteBath, gap: f64, d: f64) -> PlanarCavity {
    PlanarCavity::new(gap, Thickness::Finite(d), DielectricModel::DiscreteBath(bath), 0.0).unwrap()
}

fn oscillator(wp: f64, w0: f64) -> DiscreteBath {
    DiscreteBath::new(wp, w0, Vec::new()).unwrap()
}

fn drude_bulk(wp: f64, g: f64, gap: f64) -> (DrudeLorentz, PlanarCavity) {
    let m = DrudeLorentz::new(wp, 0.0, g).unwrap();
    (m, PlanarCavity::bulk(gap, DielectricModel::DrudeLorentz(m)))
}

/// Reflection ratio of a wall-backed slab at `iξ`, written from the bath permittivity.
fn slab_rho(bath: &DiscreteBath, p: Polarization, k: f64, xi: f64, d: f64) -> f64 {
    let eps = bath.epsilon_imag(xi);
    let kap = (k * k + xi * xi).sqrt();
    let km = (k * k + eps * xi * xi).sqrt();
    let (a, b) = match p {
        Polarization::TE => (kap, km * (km * d).tanh()),
        Polarization::TM => (eps * kap, km / (km * d).tanh()),
    };
    (a - b) / (a + b)
}

fn contour_channel_energy(bath: &DiscreteBath, p: Polarization, k: f64, d: f64, l: f64, l_ref: f64) -> f64 {
    let f = |xi: f64| {
        let r2 = slab_rho(bath, p, k, xi, d).powi(2);
        let kap = (k * k + xi * xi).sqrt();
        ((-r2 * (-2.0 * kap * l).exp()).ln_1p() - (-r2 * (-2.0 * kap * l_ref).exp()).ln_1p()) / (2.0 * PI)
    };
    integrate_to_infinity(f, 0.0, QuadOptions::relative(1e-12).with_abs(1e-300)).unwrap().value
}

#[test]
fn strong_plasma_reproduces_the_empty_box() {
    // Far below ω_p the slab is a mirror at the gap faces; the field penetrates 1/ω_p on each side.
    let (l, k) = (1.0, 0.5);
    let mut last = f64::INFINITY;
    for wp in [200.0, 2000.0] {
        let cavity = bath_cavity(oscillator(wp, 0.0), l, 0.5);
        let s = real_mode_spectrum(&cavity, channel(Polarization::TE, k), &RealModeOptions::new(30.0)).unwrap();
        let w = s.frequencies();
        assert_eq!(w.len(), 9, "{w:?}");
        let mut worst: f64 = 0.0;
        for (n, &x) in w.iter().enumerate() {
            let ladder = (k * k + ((n + 1) as f64 * PI / l).powi(2)).sqrt();
            worst = worst.max((x / ladder - 1.0).abs());
        }
        assert!(worst < 3.0 / (wp * l), "ω_p = {wp}: {worst}");
        assert!(worst < last);
        last = worst;
    }
}

#[test]
fn spectrum_is_ordered_and_bounded() {
    let cavity = bath_cavity(make_ohmic_bath(3.0, 0.0, 0.3, 6.0, 4).unwrap(), 1.0, 0.5);
    for p in Polarization::BOTH {
        let s = real_mode_spectrum(&cavity, channel(p, 0.8), &RealModeOptions::new(20.0)).unwrap();
        let w = s.frequencies();
        assert!(!w.is_empty());
        assert!(w.windows(2).all(|x| x[1] > x[0]));
        assert!(w.iter().all(|&x| x > 0.0 && x <= 20.0));
        assert_eq!(s.len(), s.even.len() + s.odd.len());
    }
}

#[test]
fn lossless_oscillator_count_matches_argument_principle() {
    let cavity = bath_cavity(oscillator(3.0, 1.0), 1.0, 0.5);
    for p in Polarization::BOTH {
        let ch = channel(p, 0.5);
        let s = real_mode_spectrum(&cavity, ch, &RealModeOptions::new(15.0)).unwrap();
        // Windows above the single permittivity pole at ω₀ with edges between spectral lines.
        let pole = cavity_pole(&cavity);
        let above: Vec<f64> = s.frequencies().into_iter().filter(|&w| w > pole + 0.05).collect();
        assert!(above.len() > 6);
        let a = 0.5 * (above[0] + above[1]);
        let b = 0.5 * (above[above.len() - 2] + above[above.len() - 1]);
        let expected = above.iter().filter(|&&w| w > a && w < b).count();
        assert_eq!(count_modes_in(&cavity, ch, a, b, 1e-3 * (b - a)).unwrap(), expected as i64);
        assert_eq!(audit_spectrum(&cavity, &s, a, b).unwrap(), expected);
    }
}

fn cavity_pole(cavity: &PlanarCavity) -> f64 {
    match &cavity.mirror {
        DielectricModel::DiscreteBath(b) => b.epsilon_poles()[0],
        _ => unreachable!(),
    }
}

#[test]
fn audit_reports_missing_lines() {
    let cavity = bath_cavity(oscillator(3.0, 1.0), 1.0, 0.5);
    let ch = channel(Polarization::TE, 0.5);
    let mut s = real_mode_spectrum(&cavity, ch, &RealModeOptions::new(15.0)).unwrap();
    let w = s.frequencies();
    let (a, b) = (0.5 * (w[w.len() - 6] + w[w.len() - 5]), 15.0 - 1e-3);
    let dropped = w[w.len() - 3];
    s.even.retain(|&x| x != dropped);
    s.odd.retain(|&x| x != dropped);
    match audit_spectrum(&cavity, &s, a, b) {
        Err(Error::CountMismatch { found, expected, suggested_scan }) => {
            assert_eq!(found as i64 + 1, expected);
            assert!(suggested_scan > found);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn spectrum_moves_continuously_with_the_gap() {
    let ch = channel(Polarization::TM, 1.0);
    let bath = make_ohmic_bath(3.0, 0.0, 0.3, 6.0, 2).unwrap();
    let a = real_mode_spectrum(&bath_cavity(bath.clone(), 1.0, 0.5), ch, &RealModeOptions::new(12.0)).unwrap();
    let b = real_mode_spectrum(&bath_cavity(bath, 1.0 + 1e-6, 0.5), ch, &RealModeOptions::new(12.0)).unwrap();
    let (wa, wb) = (a.frequencies(), b.frequencies());
    // Lines below the last permittivity pole are cut at a fixed slab phase, not a fixed ω.
    let window = |w: &[f64]| w.iter().copied().filter(|&x| x > 6.5 && x < 11.5).collect::<Vec<_>>();
    let (wa, wb) = (window(&wa), window(&wb));
    assert_eq!(wa.len(), wb.len());
    for (x, y) in wa.iter().zip(&wb) {
        assert!((x - y).abs() < 1e-5, "{x} → {y}");
        assert!(y <= x);
    }
}

#[test]
fn real_modes_need_a_bath_slab() {
    let ch = channel(Polarization::TE, 1.0);
    let drude = PlanarCavity::bulk(1.0, DielectricModel::DrudeLorentz(DrudeLorentz::plasma(2.0)));
    assert!(real_mode_spectrum(&drude, ch, &RealModeOptions::new(5.0)).is_err());
    let bulk = PlanarCavity::bulk(1.0, DielectricModel::DiscreteBath(oscillator(2.0, 0.0)));
    assert!(real_mode_spectrum(&bulk, ch, &RealModeOptions::new(5.0)).is_err());
}

#[test]
fn mode_sum_at_the_reference_gap_is_zero() {
    let cavity = bath_cavity(make_ohmic_bath(3.0, 0.0, 0.3, 6.0, 4).unwrap(), 1.0, 0.5);
    let ch = channel(Polarization::TE, 0.5);
    let r = sum_over_modes_energy(&cavity, ch, 1.0, &ModeSumOptions::for_channel(1.0, 0.5)).unwrap();
    assert_eq!(r.value, 0.0);
}

#[test]
fn mode_sum_matches_imaginary_axis_contour() {
    let bath = make_ohmic_bath(3.0, 0.0, 0.3, 6.0, 4).unwrap();
    let (l, l_ref, d) = (1.0, 20.0, 0.5);
    let cavity = bath_cavity(bath.clone(), l, d);
    for (p, k) in [(Polarization::TE, 0.5), (Polarization::TM, 1.5)] {
        let ch = channel(p, k);
        let r = sum_over_modes_energy(&cavity, ch, l_ref, &ModeSumOptions::for_channel(l, k)).unwrap();
        let oracle = contour_channel_energy(&bath, p, k, d, l, l_ref);
        assert!(r.modes_at_reference > r.modes_at_gap);
        assert!((r.value / oracle - 1.0).abs() < 1e-4, "{p:?}: {} vs {oracle}", r.value);
    }
}

fn closed_form_quasistatic(wp: f64, g: f64, k: f64, l: f64) -> [Complex64; 2] {
    // ω(ω + iγ) = ω±², with ω±² = (ω_p²/2)(1 ∓ e^{−kL}).
    let e = (-k * l).exp();
    [1.0 - e, 1.0 + e].map(|f| {
        let w2 = 0.5 * wp * wp * f;
        Complex64::new((w2 - 0.25 * g * g).sqrt(), -0.5 * g)
    })
}

#[test]
fn lossless_quasistatic_plasma_closed_form() {
    let (wp, l) = (1.0, 1.0);
    let (_, cavity) = drude_bulk(wp, 0.0, l);
    let region = Rectangle::new(0.0, 2.0, -1.0, 1.0).unwrap();
    for k in [0.2, 1.0, 3.0] {
        let set = find_resonances(&cavity, channel(Polarization::TM, k), &region, true).unwrap();
        let expect = closed_form_quasistatic(wp, 0.0, k, l);
        assert_eq!(set.complex_pairs.len(), 2, "{set:?}");
        for (z, w) in set.complex_pairs.iter().zip(expect) {
            assert!((z - w).norm() < 1e-10, "k = {k}: {z} vs {w}");
        }
        assert!(!set.continuation_warning);
    }
}

#[test]
fn damping_moves_resonances_below_the_axis() {
    let (wp, l, k) = (1.0, 1.0, 0.7);
    let region = Rectangle::new(0.0, 2.0, -1.0, 0.0).unwrap();
    let mut previous = closed_form_quasistatic(wp, 0.0, k, l);
    for g in [1e-3, 1e-2, 0.1, 0.4] {
        let (_, cavity) = drude_bulk(wp, g, l);
        let set = find_resonances(&cavity, channel(Polarization::TM, k), &region, true).unwrap();
        assert!(set.continuation_warning);
        assert_eq!(set.complex_pairs.len(), 2);
        assert!(set.imaginary_modes.is_empty());
        let expect = closed_form_quasistatic(wp, g, k, l);
        for ((z, w), before) in set.complex_pairs.iter().zip(expect).zip(previous) {
            assert!(z.re > 0.0 && z.im < 0.0);
            assert!((z - w).norm() < 1e-10);
            assert!((z - before).norm() < 0.5, "continuity in γ");
        }
        previous = expect;
    }
}

#[test]
fn quasistatic_te_has_only_eddy_modes() {
    let (_, cavity) = drude_bulk(1.0, 0.5, 1.0);
    let region = Rectangle::new(0.0, 5.0, -5.0, 0.0).unwrap();
    for k in [0.3, 1.0, 2.5] {
        let set = find_resonances(&cavity, channel(Polarization::TE, k), &region, true).unwrap();
        assert!(set.complex_pairs.is_empty(), "{set:?}");
        assert!(set.imaginary_modes.iter().all(|&x| x > 0.0));
    }
}

#[test]
fn resonance_regions_are_validated() {
    let (_, cavity) = drude_bulk(1.0, 0.5, 1.0);
    let ch = channel(Polarization::TM, 1.0);
    let upper = Rectangle::new(0.0, 2.0, -1.0, 1.0).unwrap();
    assert!(find_resonances(&cavity, ch, &upper, false).is_err());
    let left = Rectangle::new(-1.0, 2.0, -1.0, 0.0).unwrap();
    assert!(find_resonances(&cavity, ch, &left, true).is_err());
    let slab = PlanarCavity::new(1.0, Thickness::Finite(0.2), DielectricModel::DrudeLorentz(DrudeLorentz::plasma(1.0)), 0.0).unwrap();
    assert!(find_resonances(&slab, ch, &Rectangle::new(0.0, 2.0, -1.0, 0.0).unwrap(), true).is_err());
}

fn quasistatic_sets(wp: f64, g: f64, k: f64, l: f64) -> (DrudeLorentz, ResonanceSet, ResonanceSet) {
    let (m, cavity) = drude_bulk(wp, g, l);
    let region = Rectangle::new(0.0, 5.0, -5.0, 0.0).unwrap();
    let ch = channel(Polarization::TM, k);
    let at = find_resonances(&cavity, ch, &region, true).unwrap();
    let reference = reference_resonances(&cavity, ch, &region, true).unwrap();
    (m, at, reference)
}

#[test]
fn generalized_sum_of_identical_sets_is_zero() {
    let (_, at, _) = quasistatic_sets(1.0, 1.2, 0.5, 1.0);
    assert_eq!(generalized_mode_sum(&at, &at, 1.0).unwrap().value, 0.0);
}

#[test]
fn generalized_sum_is_cutoff_independent_and_matches_lifshitz() {
    let l = 1.0;
    for (g, k) in [(1.2, 0.1), (1.2, 0.5), (0.3, 2.0)] {
        let (m, at, reference) = quasistatic_sets(1.0, g, k, l);
        let a = generalized_mode_sum(&at, &reference, 1.0).unwrap();
        let b = generalized_mode_sum(&at, &reference, 10.0).unwrap();
        assert!(a.sum_rule_residual.abs() < 1e-6 * a.scale);
        assert!((b.value / a.value - 1.0).abs() < 1e-10);
        // (1/2π)∫dξ ln[1 − r²e^{−2kL}] with r = (ε − 1)/(ε + 1) = ω_p²/(2ξ(ξ + γ) + ω_p²).
        let oracle = integrate_to_infinity(
            |xi: f64| {
                let r = 1.0 / (2.0 * xi * (xi + g) + 1.0);
                (-r * r * (-2.0 * k * l).exp()).ln_1p() / (2.0 * PI)
            },
            0.0,
            QuadOptions::relative(1e-12).with_abs(1e-300),
        )
        .unwrap()
        .value;
        let lib = quasistatic_channel_energy(&m, k, l).unwrap();
        assert!((lib / oracle - 1.0).abs() < 1e-10);
        assert!((a.value / oracle - 1.0).abs() < 1e-4, "γ = {g}, k = {k}: {} vs {oracle}", a.value);
    }
}

#[test]
fn missing_resonance_breaks_the_sum_rule() {
    let (_, mut at, reference) = quasistatic_sets(1.0, 0.3, 0.5, 1.0);
    at.complex_pairs.pop();
    assert!(matches!(
        generalized_mode_sum(&at, &reference, 1.0),
        Err(Error::SumRuleViolation { .. })
    ));
    assert!(generalized_mode_sum_with(&at, &reference, 1.0, 1.0).is_ok());
    assert!(generalized_mode_sum(&at, &reference, 0.0).is_err());
}

#[test]
fn crossing_partners_are_zeros_too() {
    let (wp, g, k, l) = (1.0, 0.3, 0.5, 1.0);
    let (_, at, _) = quasistatic_sets(wp, g, k, l);
    // Quasistatic TM numerator (2s − ω_p²)² − ω_p⁴e^{−2kL}, s = ω(ω + iγ).
    let h = |z: Complex64| {
        let s = z * (z + Complex64::new(0.0, g));
        let b = 2.0 * s - wp * wp;
        b * b - wp.powi(4) * (-2.0 * k * l).exp()
    };
    for z in &at.complex_pairs {
        assert!(h(*z).norm() < 1e-12);
        assert!(h(-z.conj()).norm() < 1e-12);
    }
    let rec = at.record();
    assert_eq!(rec.pairs.len(), at.complex_pairs.len());
    assert_eq!(rec.gap, Some(l));
}

#[test]
fn identity_on_the_real_axis_is_exact() {
    for w in [0.3, 1.0, 4.0] {
        let case = IdentityCase::exponential(Complex64::new(w, 0.0));
        let r = identity_check(&case).unwrap();
        assert_eq!(r.lhs, case.f_spec.eval(Complex64::new(w, 0.0)).re);
        assert!(!r.principal_value);
        assert!(r.gap < 1e-10);
    }
}

#[test]
fn identity_examples() {
    let r = identity_check(&IdentityCase::exponential(Complex64::new(1.0, -0.1))).unwrap();
    assert!(r.gap < 1e-8, "{r:?}");
    let r = identity_check(&IdentityCase::exponential(Complex64::new(0.0, -0.5))).unwrap();
    assert!(r.principal_value);
    assert!(r.gap < 1e-7, "{r:?}");
    let r = identity_check(&IdentityCase::rational(Complex64::new(0.7, -0.4))).unwrap();
    assert!(r.gap < 1e-7, "{r:?}");
}

#[test]
fn identity_rejects_bad_cases() {
    assert!(identity_check(&IdentityCase::exponential(Complex64::new(1.0, 0.2))).is_err());
    assert!(identity_check(&IdentityCase::exponential(Complex64::new(-1.0, -0.2))).is_err());
    assert!(identity_check(&IdentityCase::exponential(Complex64::new(0.0, 0.0))).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn identity_holds_across_the_fourth_quadrant(re in 0.0..3.0f64, im in -3.0..0.0f64, rational in any::<bool>()) {
        prop_assume!(re * re + im * im > 1e-4);
        let w = Complex64::new(re, im);
        let case = if rational { IdentityCase::rational(w) } else { IdentityCase::exponential(w) };
        let r = identity_check(&case).unwrap();
        prop_assert!(r.gap < 1e-7, "{:?}", r);
    }

    #[test]
    fn identity_insensitive_to_cutoff_doubling(re in 0.1..2.0f64, im in -2.0..-0.1f64) {
        let w = Complex64::new(re, im);
        let mut case = IdentityCase::exponential(w);
        let a = identity_check(&case).unwrap();
        case.f_spec = case.f_spec.with_scale(2.0 * case.f_spec.scale());
        let b = identity_check(&case).unwrap();
        prop_assert!(a.gap < 1e-7 && b.gap < 1e-7);
        let doubled = matches!(case.f_spec, TestFunction::ExponentialCutoff { scale } if scale == 20.0 * w.norm());
        prop_assert!(doubled);
    }
}

