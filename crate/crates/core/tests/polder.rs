use casimir_core::dielectric::{DielectricModel, DrudeLorentz};
use casimir_core::numerics::Rectangle;
use casimir_core::polder::{
    acausal_coefficient_fit, cp_energy_exact, cp_energy_perturbative, cp_force, dressed_polarizability,
    dressed_polarizability_imag, radiative_damping, response_zero_count, scattered_green_derivative,
    scattered_green_halfspace, undamped_polarizability, vacuum_green_avg, vacuum_green_avg_imag, CpMode,
    GaussianDipole, HalfSpaceGeometry, ResponseForm,
};
use casimir_core::{Complex64, Error};
use proptest::prelude::*;
use std::f64::consts::PI;

fn dipole() -> GaussianDipole {
    GaussianDipole::new(1.0, 1.0, 0.01, 0.05).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn drude(wp: f64, g: f64) -> DielectricModel {
    DielectricModel::DrudeLorentz(DrudeLorentz::new(wp, 0.0, g).unwrap())
}

/// `(4π/3)∫d³k/(2π)³ e^{−k²a²/π}(−3ξ² − k²)/(k² + ξ²)` by composite Simpson on `[0, 9√π/a]`.
fn green_avg_oracle(a: f64, xi: f64) -> f64 {
    let n = 40_000;
    let kmax = 9.0 * PI.sqrt() / a;
    let h = kmax / n as f64;
    let f = |k: f64| {
        if k == 0.0 {
            return 0.0;
        }
        k * k * (-k * k * a * a / PI).exp() * (-3.0 * xi * xi - k * k) / (k * k + xi * xi)
    };
    let mut s = f(0.0) + f(kmax);
    for j in 1..n {
        s += if j % 2 == 1 { 4.0 } else { 2.0 } * f(j as f64 * h);
    }
    (4.0 * PI / 3.0) * s * h / 3.0 / (2.0 * PI * PI)
}

#[test]
fn coulomb_shift_at_zero_frequency() {
    for a in [0.01, 0.05, 0.3] {
        let d = GaussianDipole::new(1.0, 1.0, 0.01, a).unwrap();
        let expect = -PI / (6.0 * a.powi(3));
        assert!(rel(vacuum_green_avg_imag(&d, 0.0), expect) < 1e-15);
        assert!(rel(vacuum_green_avg(&d, Complex64::new(0.0, 0.0)).re, expect) < 1e-15);
        assert!(rel(green_avg_oracle(a, 0.0), expect) < 1e-10);
    }
}

#[test]
fn imaginary_axis_average_against_k_integral() {
    for a in [0.05, 0.2] {
        let d = GaussianDipole::new(1.0, 1.0, 0.01, a).unwrap();
        for xi in [0.01, 0.3, 2.0, 10.0, 60.0] {
            let v = vacuum_green_avg_imag(&d, xi);
            assert!(rel(v, green_avg_oracle(a, xi)) < 1e-8, "a = {a}, ξ = {xi}");
            let c = vacuum_green_avg(&d, Complex64::new(1e-300, xi));
            assert!(rel(c.re, v) < 1e-10 && c.im.abs() < 1e-10 * v.abs());
        }
    }
}

#[test]
fn static_polarizability_and_imaginary_axis_shape() {
    let d = dipole();
    let alpha0 = d.q * d.q / d.spring();
    assert!(rel(d.static_polarizability(), alpha0) < 1e-15);
    assert!(rel(dressed_polarizability(&d, Complex64::new(0.0, 0.0)).unwrap().re, alpha0) < 1e-14);
    assert!(rel(dressed_polarizability_imag(&d, 0.0), alpha0) < 1e-14);
    let mut last = f64::INFINITY;
    for j in 0..200 {
        let xi = 1e-3 * 1.08f64.powi(j);
        let a = dressed_polarizability_imag(&d, xi);
        assert!(a > 0.0 && a < last, "ξ = {xi}");
        last = a;
    }
}

#[test]
fn renormalized_constants_from_small_frequency_fit() {
    let d = GaussianDipole::new(0.7, 2.0, 0.05, 0.1).unwrap();
    let inv = |xi: f64| d.q * d.q / dressed_polarizability_imag(&d, xi);
    assert!(rel(inv(0.0), d.k0 + PI * d.q * d.q / (6.0 * d.a.powi(3))) < 1e-14);
    // (inv(ξ) − K)/ξ² = m − cξ + O(ξ²); one Richardson step removes the linear term.
    let slope = |xi: f64| (inv(xi) - inv(0.0)) / (xi * xi);
    let xi = 1e-3;
    let m = 2.0 * slope(xi / 2.0) - slope(xi);
    assert!(rel(m, d.m0 + 2.0 * d.q * d.q / (3.0 * d.a)) < 1e-6, "{m}");
    assert!(rel(d.mass(), d.m0 + 2.0 * d.q * d.q / (3.0 * d.a)) < 1e-15);
}

#[test]
fn point_limit_recovers_abraham_lorentz_coefficient() {
    let d = dipole();
    let unit = (d.m0 / d.k0).sqrt();
    let fit = acausal_coefficient_fit(&d, &[1e-2 * unit, 1e-3 * unit, 1e-4 * unit], 1.0 / unit).unwrap();
    assert_eq!(fit.samples.len(), 3);
    assert!(rel(fit.expected, 2.0 * d.q * d.q / 3.0) < 1e-15);
    assert!(rel(fit.coefficient, fit.expected) < 0.01, "{fit:?}");
    assert!(acausal_coefficient_fit(&d, &[1e-2], 1.0).is_err());
}

#[test]
fn radiative_damping_examples() {
    let d = dipole();
    assert_eq!(radiative_damping(&d, 0.0), Complex64::new(0.0, 0.0));
    for w in [1e-4, 1e-3, 1e-2] {
        let g = radiative_damping(&d, w);
        let lead = 2.0 * d.q * d.q * w * w / 3.0;
        assert!(rel(g.re, lead) < 10.0 * (d.a * w).powi(2), "ω = {w}");
    }
}

#[test]
fn undamped_form_hits_its_pole() {
    let d = dipole();
    assert!(matches!(undamped_polarizability(&d, d.resonance()), Err(Error::PoleHit(_))));
    assert!(rel(undamped_polarizability(&d, 0.0).unwrap(), d.static_polarizability()) < 1e-15);
}

#[test]
fn causality_scan_separates_gaussian_from_point_limit() {
    let d = GaussianDipole::new(1.0, 1.0, 0.3, 0.05).unwrap();
    let upper = Rectangle::new(-100.0, 100.0, 1e-3, 100.0).unwrap();
    assert_eq!(response_zero_count(&d, ResponseForm::Gaussian, &upper).unwrap(), 0);
    assert_eq!(response_zero_count(&d, ResponseForm::PointLimit, &upper).unwrap(), 1);
}

#[test]
fn invalid_dipoles_are_rejected() {
    assert!(GaussianDipole::new(1.0, 1.0, 0.1, 0.0).is_err());
    assert!(GaussianDipole::new(1.0, -1e6, 0.1, 0.05).is_err());
    assert!(GaussianDipole::new(-1.0, 1.0, 0.0, 0.05).is_err());
}

#[test]
fn image_dipole_static_limit() {
    for z in [0.5, 1.0, 3.0] {
        let g = scattered_green_halfspace(&HalfSpaceGeometry::new(DielectricModel::PerfectMirror, z).unwrap(), 0.0).unwrap();
        assert!(rel(g.zz, 1.0 / (4.0 * z.powi(3))) < 1e-12);
        assert!(rel(g.xx, 1.0 / (8.0 * z.powi(3))) < 1e-12);
        assert!(rel(g.zz, 2.0 * g.xx) < 1e-12);
        let dg = scattered_green_derivative(&HalfSpaceGeometry::new(DielectricModel::PerfectMirror, z).unwrap(), 0.0).unwrap();
        assert!(rel(dg.zz, -3.0 / (4.0 * z.powi(4))) < 1e-12);
    }
    let v = scattered_green_halfspace(&HalfSpaceGeometry::new(DielectricModel::Vacuum, 1.0).unwrap(), 0.7).unwrap();
    assert_eq!((v.xx, v.zz), (0.0, 0.0));
}

#[test]
fn drude_half_space_approaches_perfect_mirror() {
    let (z, xi) = (2.0, 0.4);
    let perfect = scattered_green_halfspace(&HalfSpaceGeometry::new(DielectricModel::PerfectMirror, z).unwrap(), xi).unwrap();
    let mut last = f64::INFINITY;
    for wp in [3.0, 30.0, 300.0] {
        let g = scattered_green_halfspace(&HalfSpaceGeometry::new(drude(wp, 0.1), z).unwrap(), xi).unwrap();
        let gap = rel(g.xx, perfect.xx).max(rel(g.zz, perfect.zz));
        assert!(gap < last, "ω_p = {wp}");
        last = gap;
    }
    assert!(last < 0.01);
}

#[test]
fn vacuum_half_space_has_no_energy_or_force() {
    let g = HalfSpaceGeometry::new(DielectricModel::Vacuum, 2.0).unwrap();
    let d = dipole();
    assert_eq!(cp_energy_exact(&d, &g).unwrap().value, 0.0);
    assert_eq!(cp_energy_perturbative(&d, &g).unwrap().value, 0.0);
    assert_eq!(cp_force(&d, &g, CpMode::Exact).unwrap().value, 0.0);
}

#[test]
fn far_zone_matches_retarded_asymptote() {
    let d = dipole();
    let z0 = 1e3 * (d.m0 / d.k0).sqrt();
    let g = HalfSpaceGeometry::new(DielectricModel::PerfectMirror, z0).unwrap();
    let asymptote = -3.0 * d.static_polarizability() / (8.0 * PI * z0.powi(4));
    let e = cp_energy_perturbative(&d, &g).unwrap().value;
    assert!(rel(e, asymptote) < 0.01, "{e} vs {asymptote}");
    assert!(rel(cp_energy_exact(&d, &g).unwrap().value, asymptote) < 0.01);
}

#[test]
fn exact_and_perturbative_converge_with_distance() {
    let d = GaussianDipole::new(1.0, 1.0, 0.2, 0.02).unwrap();
    let mut last = f64::INFINITY;
    for z in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let g = HalfSpaceGeometry::new(DielectricModel::PerfectMirror, z).unwrap();
        let exact = cp_energy_exact(&d, &g).unwrap().value;
        let pert = cp_energy_perturbative(&d, &g).unwrap().value;
        assert!(exact < pert && pert < 0.0, "z = {z}");
        let gap = rel(exact, pert);
        assert!(gap < last, "z = {z}");
        last = gap;
    }
}

#[test]
fn force_is_minus_energy_gradient() {
    let d = dipole();
    let points = [
        (DielectricModel::PerfectMirror, 2.0),
        (DielectricModel::PerfectMirror, 10.0),
        (drude(3.0, 0.3), 1.5),
        (drude(3.0, 0.3), 4.0),
        (drude(3.0, 0.3), 20.0),
    ];
    for (mirror, z) in points {
        let g = HalfSpaceGeometry::new(mirror, z).unwrap();
        let e = |zz: f64| cp_energy_exact(&d, &g.at(zz)).unwrap().value;
        let h = 1e-3 * z;
        let de = (-e(z + 2.0 * h) + 8.0 * e(z + h) - 8.0 * e(z - h) + e(z - 2.0 * h)) / (12.0 * h);
        let f = cp_force(&d, &g, CpMode::Exact).unwrap().value;
        assert!(rel(f, -de) < 1e-5, "z = {z}: {f} vs {}", -de);
        assert!(f < 0.0);
        let fp = cp_force(&d, &g, CpMode::Perturbative).unwrap().value;
        assert!(fp < 0.0 && rel(fp, f) < 1e-3);
    }
}

#[test]
fn geometry_and_coupling_guards() {
    let d = dipole();
    let close = HalfSpaceGeometry::new(DielectricModel::PerfectMirror, 20.0 * d.a).unwrap();
    assert!(matches!(cp_energy_exact(&d, &close), Err(Error::Geometry(_))));
    assert!(HalfSpaceGeometry::new(DielectricModel::PerfectMirror, 0.0).is_err());
    // K₀ cancels the Coulomb shift almost entirely, so α₀ = q²/K is enormous.
    let (q, a): (f64, f64) = (0.1, 0.05);
    let soft = GaussianDipole::new(1.0, 1e-9 - PI * q * q / (6.0 * a.powi(3)), q, a).unwrap();
    let g = HalfSpaceGeometry::new(DielectricModel::PerfectMirror, 2.0).unwrap();
    assert!(matches!(cp_energy_exact(&soft, &g), Err(Error::StrongCoupling { .. })));
    let p = cp_energy_perturbative(&soft, &g);
    assert!(p.is_ok(), "{p:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn green_average_crossing(re in -20.0..20.0f64, im in -5.0..20.0f64, a in 0.01..0.5f64) {
        let d = GaussianDipole::new(1.0, 1.0, 0.01, a).unwrap();
        let z = Complex64::new(re, im);
        let lhs = vacuum_green_avg(&d, z).conj();
        let rhs = vacuum_green_avg(&d, -z.conj());
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm());
    }

    #[test]
    fn radiation_reaction_is_passive(w in -50.0..50.0f64, a in 0.01..0.5f64) {
        let d = GaussianDipole::new(1.0, 1.0, 0.05, a).unwrap();
        prop_assert!(radiative_damping(&d, w).re >= 0.0);
    }
}
