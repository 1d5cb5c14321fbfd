use casimir_core::dielectric::{make_ohmic_bath, DielectricModel, DrudeLorentz};
use casimir_core::lifshitz::{channel_energy_zero_t, energy_zero_t, free_energy_matsubara, free_energy_real_frequency};
use casimir_core::modes::{
    find_resonances, generalized_mode_sum, identity_check, mode_route_energy, quasistatic_channel_energy,
    reference_resonances, sum_over_modes_energy, KIntegrationOptions, ModeSumOptions,
};
use casimir_core::numerics::Rectangle;
use casimir_core::planar::{PlanarCavity, Polarization, Thickness, TransverseChannel};
use casimir_core::polder::{
    acausal_coefficient_fit, cp_energy_exact, cp_energy_perturbative, cp_force, CpMode, GaussianDipole,
    HalfSpaceGeometry,
};
use casimir_core::{Complex64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

use crate::sweep::identity_sweep;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub time_limit: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {}: {} | {} | {:.2} s (limit {} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds,
            self.time_limit
        )
    }
}

pub const TITLES: [&str; 8] = [
    "perfect-mirror law",
    "real-frequency vs Matsubara",
    "finite-N mode sum vs contour oracle",
    "continuum limit of the mode route",
    "complex-mode route",
    "sum-over-poles identity",
    "dielectric properties",
    "Casimir-Polder",
];

const LIMITS: [f64; 8] = [5.0, 60.0, 120.0, 600.0, 60.0, 30.0, 10.0, 60.0];

/// Runs one criterion, `id` in `1..=8`.
pub fn criterion(id: usize, seed: u64, threads: usize) -> Outcome {
    let start = Instant::now();
    let result = match id {
        1 => perfect_mirror(),
        2 => wick_rotation(),
        3 => finite_bath_modes(),
        4 => continuum_limit(threads),
        5 => complex_route(),
        6 => identity(seed),
        7 => dielectric(seed),
        8 => polder(),
        _ => panic!("criteria are numbered 1 to 8, got {id}"),
    };
    let seconds = start.elapsed().as_secs_f64();
    let time_limit = LIMITS[id - 1];
    let (ok, detail) = match result {
        Ok(v) => v,
        Err(e) => (false, format!("{}: {e}", e.kind())),
    };
    Outcome {
        id,
        title: TITLES[id - 1],
        passed: ok && seconds < time_limit,
        detail,
        seconds,
        time_limit,
    }
}

pub fn run_all(seed: u64, threads: usize) -> Vec<Outcome> {
    (1..=8).map(|id| criterion(id, seed, threads)).collect()
}

pub fn table(outcomes: &[Outcome]) -> Table {
    let mut t = Table::new("verify", &["criterion", "title", "passed", "detail", "seconds", "time_limit"]);
    for o in outcomes {
        t.push(vec![
            o.id.into(),
            o.title.into(),
            o.passed.into(),
            o.detail.clone().into(),
            o.seconds.into(),
            Cell::Num(o.time_limit),
        ]);
    }
    t
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn perfect_mirror() -> Result<(bool, String)> {
    const TOL: f64 = 1e-6;
    // ζ(4) from its partial sum with the integral tail.
    let n = 100_000u64;
    let zeta4: f64 = (1..=n).rev().map(|j| (j as f64).powi(-4)).sum::<f64>() + 1.0 / (3.0 * (n as f64).powi(3));
    let mut worst: f64 = 0.0;
    for l in [0.5, 1.0, 2.0] {
        let e = energy_zero_t(&PlanarCavity::bulk(l, DielectricModel::PerfectMirror))?.value;
        let oracle = -zeta4 / (8.0 * PI * PI * l.powi(3));
        worst = worst.max(rel(e, oracle));
    }
    Ok((worst < TOL, format!("max rel err {worst:.2e} < {TOL:e}")))
}

fn wick_rotation() -> Result<(bool, String)> {
    const TOL: f64 = 1e-3;
    let mut c = PlanarCavity::bulk(1.0, DielectricModel::DrudeLorentz(DrudeLorentz::new(3.0, 0.0, 0.3)?));
    c.temperature_wavenumber = 1.0;
    let m = free_energy_matsubara(&c)?.value;
    let r = free_energy_real_frequency(&c, 400.0, 1e-4)?.value;
    let err = rel(r, m);
    Ok((err < TOL, format!("rel diff {err:.2e} < {TOL:e}")))
}

fn finite_bath_modes() -> Result<(bool, String)> {
    const TOL: f64 = 1e-4;
    let bath = make_ohmic_bath(3.0, 0.0, 0.3, 15.0, 16)?;
    let c = PlanarCavity::new(1.0, Thickness::Finite(0.5), DielectricModel::DiscreteBath(bath), 0.0)?;
    let l_ref = 20.0;
    let mut worst: f64 = 0.0;
    for (p, k) in [(Polarization::TE, 0.5), (Polarization::TM, 0.5), (Polarization::TM, 2.0)] {
        let ch = TransverseChannel::new(p, k)?;
        let modes = sum_over_modes_energy(&c, ch, l_ref, &ModeSumOptions::for_channel(c.gap, k))?.value;
        let oracle = channel_energy_zero_t(&c, ch, 1e-12)? - channel_energy_zero_t(&c.with_gap(l_ref), ch, 1e-12)?;
        worst = worst.max(rel(modes, oracle));
    }
    Ok((worst < TOL, format!("max rel err {worst:.2e} < {TOL:e} over 3 channels")))
}

fn continuum_limit(threads: usize) -> Result<(bool, String)> {
    const FINAL_GAP: f64 = 0.02;
    let drude = DielectricModel::DrudeLorentz(DrudeLorentz::new(3.0, 0.0, 0.3)?);
    let c = PlanarCavity::new(1.0, Thickness::Finite(0.5), drude, 0.0)?;
    let l_ref = 20.0;
    let target = energy_zero_t(&c)?.value - energy_zero_t(&c.with_gap(l_ref))?.value;
    let opts = KIntegrationOptions {
        threads,
        ..KIntegrationOptions::default()
    };
    let mut gaps = Vec::new();
    for n in [8, 16, 32] {
        let bath = make_ohmic_bath(3.0, 0.0, 0.3, 6.0, n)?;
        let cn = PlanarCavity::new(1.0, Thickness::Finite(0.5), DielectricModel::DiscreteBath(bath), 0.0)?;
        gaps.push(rel(mode_route_energy(&cn, l_ref, &opts)?.value, target));
    }
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    let last = gaps[gaps.len() - 1];
    Ok((
        monotone && last < FINAL_GAP,
        format!(
            "gaps N=8,16,32: {:.3}%, {:.3}%, {:.3}%; monotone {monotone}; final < {}%",
            100.0 * gaps[0],
            100.0 * gaps[1],
            100.0 * gaps[2],
            100.0 * FINAL_GAP
        ),
    ))
}

fn complex_route() -> Result<(bool, String)> {
    const TOL: f64 = 1e-4;
    const SUM_RULE: f64 = 1e-6;
    const LAMBDA: f64 = 1e-10;
    let model = DrudeLorentz::new(1.0, 0.0, 1.2)?;
    let c = PlanarCavity::bulk(1.0, DielectricModel::DrudeLorentz(model));
    let region = Rectangle::new(0.0, 5.0, -5.0, 0.0)?;
    let (mut err, mut sum_rule, mut lambda): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in [0.1, 0.5, 2.0] {
        let ch = TransverseChannel::new(Polarization::TM, k)?;
        let at_gap = find_resonances(&c, ch, &region, true)?;
        let reference = reference_resonances(&c, ch, &region, true)?;
        let a = generalized_mode_sum(&at_gap, &reference, 1.0)?;
        let b = generalized_mode_sum(&at_gap, &reference, 10.0)?;
        let oracle = quasistatic_channel_energy(&model, k, c.gap)?;
        err = err.max(rel(a.value, oracle));
        sum_rule = sum_rule.max(a.sum_rule_residual.abs() / a.scale);
        lambda = lambda.max(rel(b.value, a.value));
    }
    Ok((
        err < TOL && sum_rule < SUM_RULE && lambda < LAMBDA,
        format!("rel err {err:.2e} < {TOL:e}; sum rule {sum_rule:.2e} < {SUM_RULE:e}; Λ vs 10Λ {lambda:.2e} < {LAMBDA:e}"),
    ))
}

fn identity(seed: u64) -> Result<(bool, String)> {
    const TOL: f64 = 1e-7;
    let cases = identity_sweep(50, seed, Some(TOL));
    let (mut worst, mut pv, mut real, mut reduction): (f64, usize, usize, f64) = (0.0, 0, 0, 0.0);
    for case in &cases {
        let r = identity_check(case)?;
        worst = worst.max(r.gap);
        if r.principal_value {
            pv += 1;
        }
        if case.omega_0.im == 0.0 {
            real += 1;
            reduction = reduction.max((r.lhs - case.f_spec.eval(case.omega_0).re).abs());
        }
    }
    Ok((
        worst < TOL && pv > 0 && real > 0 && reduction < TOL,
        format!("50 cases ({pv} principal value, {real} real): max gap {worst:.2e} < {TOL:e}; lhs − f(ω₀) {reduction:.1e}"),
    ))
}

fn dielectric(seed: u64) -> Result<(bool, String)> {
    const SAMPLES: usize = 200;
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi_grid: Vec<f64> = (0..24).map(|j| 0.05 * 1.35f64.powi(j)).collect();
    let mut failures = [0usize; 4];
    for _ in 0..SAMPLES {
        let wp = rng.random_range(0.5..5.0);
        let w0 = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.1..3.0) };
        let gamma = rng.random_range(0.01..2.0);
        let drude = DrudeLorentz::new(wp, w0, gamma)?;
        let wc = rng.random_range(2.0..20.0);
        let n = rng.random_range(4..=32);
        let bath = make_ohmic_bath(wp, w0, gamma, wc, n)?;
        let dm = DielectricModel::DrudeLorentz(drude);
        let bm = DielectricModel::DiscreteBath(bath.clone());

        let zeta = Complex64::new(rng.random_range(-10.0..10.0), rng.random_range(1e-3..10.0));
        let mut crossing_ok = true;
        for m in [&dm, &bm] {
            let a = m.epsilon(zeta)?.conj();
            let b = m.epsilon(-zeta.conj())?;
            crossing_ok &= (a - b).norm() <= TOL * a.norm().max(1.0);
        }
        if !crossing_ok {
            failures[0] += 1;
        }

        let xi = 10f64.powf(rng.random_range(-3.0..2.0));
        if !(dm.epsilon_imag(xi)? > 1.0 && bm.epsilon_imag(xi)? > 1.0) {
            failures[1] += 1;
        }

        let w = rng.random_range(0.0..3.0 * wc);
        match (bm.epsilon(Complex64::new(w, 0.0)), bm.epsilon(Complex64::new(-w, 0.0))) {
            (Ok(a), Ok(b)) if (a - b).norm() <= TOL * a.norm().max(1.0) && a.im == 0.0 => {}
            (Err(_), Err(_)) => {}
            _ => failures[2] += 1,
        }

        let mut previous = f64::INFINITY;
        for n in [8, 16, 32, 64] {
            let wc_n = wc * (n as f64 / 8.0).sqrt();
            let bn = DielectricModel::DiscreteBath(make_ohmic_bath(wp, w0, gamma, wc_n, n)?);
            let mut gap: f64 = 0.0;
            for &x in &xi_grid {
                gap = gap.max((bn.epsilon_imag(x)? - dm.epsilon_imag(x)?).abs());
            }
            if gap > previous {
                failures[3] += 1;
                break;
            }
            previous = gap;
        }
    }
    Ok((
        failures.iter().all(|&f| f == 0),
        format!(
            "{SAMPLES} samples; failures crossing {}, eps(iξ) > 1 {}, parity {}, N-doubling {}",
            failures[0], failures[1], failures[2], failures[3]
        ),
    ))
}

fn polder() -> Result<(bool, String)> {
    const FAR: f64 = 0.01;
    const FORCE: f64 = 1e-5;
    const FIT: f64 = 0.01;
    let dipole = GaussianDipole::new(1.0, 1.0, 0.01, 0.05)?;
    let z0 = 1e3;
    let pm = HalfSpaceGeometry::new(DielectricModel::PerfectMirror, z0)?;
    let far = cp_energy_perturbative(&dipole, &pm)?.value
        / (-3.0 * dipole.static_polarizability() / (8.0 * PI * z0.powi(4)));
    let far_err = (far - 1.0).abs();

    let drude = DielectricModel::DrudeLorentz(DrudeLorentz::new(3.0, 0.0, 0.3)?);
    let points = [
        (DielectricModel::PerfectMirror, 2.0),
        (DielectricModel::PerfectMirror, 10.0),
        (drude.clone(), 1.5),
        (drude.clone(), 4.0),
        (drude, 20.0),
    ];
    let mut force_err: f64 = 0.0;
    for (mirror, z) in points {
        let g = HalfSpaceGeometry::new(mirror, z)?;
        let f = cp_force(&dipole, &g, CpMode::Exact)?.value;
        let e = |zz: f64| cp_energy_exact(&dipole, &g.at(zz)).map(|r| r.value);
        let h = 1e-3 * z;
        let de = (-e(z + 2.0 * h)? + 8.0 * e(z + h)? - 8.0 * e(z - h)? + e(z - 2.0 * h)?) / (12.0 * h);
        force_err = force_err.max(rel(f, -de));
    }

    let unit = (dipole.m0 / dipole.k0).sqrt();
    let fit = acausal_coefficient_fit(&dipole, &[1e-2 * unit, 1e-3 * unit, 1e-4 * unit], 1.0 / unit)?;
    let fit_err = rel(fit.coefficient, fit.expected);
    Ok((
        far_err < FAR && force_err < FORCE && fit_err < FIT,
        format!(
            "far-zone ratio {far:.6} (±{FAR}); force vs −dE/dz₀ {force_err:.2e} < {FORCE:e}; ω³ coefficient {fit_err:.2e} < {FIT}"
        ),
    ))
}
