use num_complex::Complex64;
use serde::Serialize;
use std::cell::RefCell;
use std::f64::consts::PI;

use crate::dielectric::DielectricModel;
use crate::error::{Error, Result};
use crate::numerics::{
    gauss_legendre_panels, integrate, integrate_to_infinity, integrate_with_breaks, matsubara_sum, CompensatedSum,
    QuadOptions,
};
use crate::planar::{ln_g_imag, reflection_ratio_g, PlanarCavity, Polarization, TransverseChannel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Matsubara,
    ZeroT,
    RealFrequency,
    ModeSum,
    ComplexModeSum,
}

impl Route {
    pub fn label(&self) -> &'static str {
        match self {
            Route::Matsubara => "matsubara",
            Route::ZeroT => "zero_t",
            Route::RealFrequency => "real_frequency",
            Route::ModeSum => "mode_sum",
            Route::ComplexModeSum => "complex_mode_sum",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EnergyMetadata {
    pub polarizations: usize,
    pub evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matsubara_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    /// Set when the oscillatory real-frequency integrand lost more digits to cancellation than
    /// the requested tolerance allows.
    pub accuracy_degraded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyResult {
    pub value: f64,
    pub route: Route,
    pub abs_error: f64,
    pub metadata: EnergyMetadata,
}

pub const DEFAULT_TOL: f64 = 1e-10;

/// Runs `body` with a sink for errors raised inside integrand closures, which can only return
/// plain numbers; a recorded error takes precedence over the quadrature outcome.
fn guarded<T>(body: impl FnOnce(&RefCell<Option<Error>>) -> Result<T>) -> Result<T> {
    let sink = RefCell::new(None);
    let out = body(&sink);
    if let Some(e) = sink.into_inner() {
        return Err(e);
    }
    out
}

fn record<T: Default>(sink: &RefCell<Option<Error>>, r: Result<T>) -> T {
    match r {
        Ok(v) => v,
        Err(e) => {
            sink.borrow_mut().get_or_insert(e);
            T::default()
        }
    }
}

fn is_trivial(cavity: &PlanarCavity) -> bool {
    matches!(cavity.mirror, DielectricModel::Vacuum) && cavity.slab_thickness == crate::planar::Thickness::Bulk
}

fn trivial(route: Route) -> EnergyResult {
    EnergyResult {
        value: 0.0,
        route,
        abs_error: 0.0,
        metadata: EnergyMetadata {
            polarizations: 2,
            ..Default::default()
        },
    }
}

/// `∫₀^∞ k dk/(2π) ln G^p(iξ)` through `κ = sqrt(k² + ξ²)`, so `k dk = κ dκ` on `[ξ, ∞)`.
fn k_integral(cavity: &PlanarCavity, pol: Polarization, xi: f64, tol: f64) -> Result<(f64, f64, usize)> {
    let l2 = 2.0 * cavity.gap;
    guarded(|sink| {
        let f = |u: f64| {
            let kap = xi + u / l2;
            let k = (kap * kap - xi * xi).max(0.0).sqrt();
            kap * record(sink, ln_g_imag(cavity, pol, k, xi)) / (2.0 * PI * l2)
        };
        let r = integrate_to_infinity(f, 0.0, QuadOptions::relative(tol).with_abs(1e-300))?;
        Ok((r.value, r.abs_error_estimate, r.evaluations))
    })
}

/// Matsubara free energy per unit area, `(τ/2π) Σ'_l Σ_p ∫ k dk/(2π) ln G^p(iξ_l)`, `ξ_l = lτ`.
pub fn free_energy_matsubara(cavity: &PlanarCavity) -> Result<EnergyResult> {
    free_energy_matsubara_with(cavity, DEFAULT_TOL)
}

pub fn free_energy_matsubara_with(cavity: &PlanarCavity, tol: f64) -> Result<EnergyResult> {
    cavity.validate()?;
    let tau = cavity.temperature_wavenumber;
    if !(tau > 0.0) {
        return Err(Error::InvalidInput("Matsubara summation needs a positive temperature".into()));
    }
    if is_trivial(cavity) {
        return Ok(trivial(Route::Matsubara));
    }
    let mut quad_err = 0.0;
    let mut evaluations = 0;
    let mut failure = None;
    let sum = matsubara_sum(
        |l| {
            let xi = l as f64 * tau;
            let mut acc = 0.0;
            for pol in Polarization::BOTH {
                match k_integral(cavity, pol, xi, 0.1 * tol) {
                    Ok((v, e, n)) => {
                        acc += v;
                        quad_err += if l == 0 { 0.5 * e } else { e };
                        evaluations += n;
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        return 0.0;
                    }
                }
            }
            acc
        },
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let sum = sum?;
    let pref = tau / (2.0 * PI);
    Ok(EnergyResult {
        value: pref * sum.value,
        route: Route::Matsubara,
        abs_error: pref * (sum.remainder_bound + quad_err),
        metadata: EnergyMetadata {
            polarizations: 2,
            evaluations,
            matsubara_terms: Some(sum.terms),
            ..Default::default()
        },
    })
}

/// Zero-temperature energy per unit area `Σ_p ∫ k dk/(2π) ∫ dξ/(2π) ln G^p(iξ)`, written in
/// polar form `(1/4π²) ∫₀^∞ κ² dκ ∫₀¹ dt ln G^p(k = κ sqrt(1 − t²), ξ = κt)`.
pub fn energy_zero_t(cavity: &PlanarCavity) -> Result<EnergyResult> {
    energy_zero_t_with(cavity, DEFAULT_TOL)
}

pub fn energy_zero_t_with(cavity: &PlanarCavity, tol: f64) -> Result<EnergyResult> {
    cavity.validate()?;
    if is_trivial(cavity) {
        return Ok(trivial(Route::ZeroT));
    }
    let l2 = 2.0 * cavity.gap;
    let mut value = 0.0;
    let mut abs_error = 0.0;
    let mut evaluations = 0;
    for pol in Polarization::BOTH {
        let inner_err = RefCell::new(0.0);
        let inner_evals = RefCell::new(0usize);
        let r = guarded(|sink| {
            let outer = |u: f64| {
                let kap = u / l2;
                let inner = |t: f64| {
                    let k = kap * (1.0 - t * t).max(0.0).sqrt();
                    record(sink, ln_g_imag(cavity, pol, k, kap * t))
                };
                let r = record(sink, integrate(inner, 0.0, 1.0, QuadOptions::relative(0.1 * tol).with_abs(1e-300)).map(Some))
                    .unwrap_or(crate::numerics::QuadratureResult {
                        value: 0.0,
                        abs_error_estimate: 0.0,
                        evaluations: 0,
                    });
                let w = kap * kap / (4.0 * PI * PI * l2);
                *inner_err.borrow_mut() += w * r.abs_error_estimate;
                *inner_evals.borrow_mut() += r.evaluations;
                w * r.value
            };
            integrate_to_infinity(outer, 0.0, QuadOptions::relative(tol).with_abs(1e-300))
        })?;
        value += r.value;
        abs_error += r.abs_error_estimate;
        evaluations += r.evaluations + *inner_evals.borrow();
    }
    Ok(EnergyResult {
        value,
        route: Route::ZeroT,
        abs_error,
        metadata: EnergyMetadata {
            polarizations: 2,
            evaluations,
            ..Default::default()
        },
    })
}

/// Zero-temperature energy of one transverse channel, `(1/2π)∫₀^∞ dξ ln G^p(iξ)`.
pub fn channel_energy_zero_t(cavity: &PlanarCavity, channel: TransverseChannel, tol: f64) -> Result<f64> {
    cavity.validate()?;
    let l2 = 2.0 * cavity.gap;
    guarded(|sink| {
        let f = |u: f64| record(sink, ln_g_imag(cavity, channel.polarization, channel.k, u / l2)) / (2.0 * PI * l2);
        let r = integrate_to_infinity(f, 0.0, QuadOptions::relative(tol).with_abs(1e-300))?;
        Ok(r.value)
    })
}

/// `coth(πω/τ)`, equal to 1 at zero temperature.
fn thermal_weight(omega: f64, tau: f64) -> f64 {
    if tau == 0.0 {
        return 1.0;
    }
    let x = PI * omega / tau;
    if x > 20.0 {
        1.0
    } else {
        1.0 / x.tanh()
    }
}

fn g_real(cavity: &PlanarCavity, channel: TransverseChannel, omega: f64) -> Result<Complex64> {
    reflection_ratio_g(cavity, channel, Complex64::new(omega, 0.0))
}

/// Continuous `arg G` from `(ω_a, phase_a)` to `ω_b`, bisecting whenever the phase of a step
/// would move by more than `π/4`.
fn unwrap_to(
    cavity: &PlanarCavity,
    channel: TransverseChannel,
    wa: f64,
    ga: Complex64,
    phase_a: f64,
    wb: f64,
    depth: u32,
) -> Result<(Complex64, f64)> {
    let gb = g_real(cavity, channel, wb)?;
    let step = (gb / ga).arg();
    if step.abs() <= PI / 4.0 || depth > 50 {
        return Ok((gb, phase_a + step));
    }
    let wm = 0.5 * (wa + wb);
    let (gm, pm) = unwrap_to(cavity, channel, wa, ga, phase_a, wm, depth + 1)?;
    unwrap_to(cavity, channel, wm, gm, pm, wb, depth + 1)
}

struct ChannelIntegral {
    value: f64,
    abs_error: f64,
    magnitude: f64,
    evaluations: usize,
}

/// `∫₀^{ω_max} dω/(2π) coth(πω/τ) Im ln G^p(ω + i0⁺)` at fixed `k`.
fn real_frequency_channel(cavity: &PlanarCavity, channel: TransverseChannel, omega_max: f64, tol: f64) -> Result<ChannelIntegral> {
    let tau = cavity.temperature_wavenumber;
    let k = channel.k;
    let mut value = CompensatedSum::new();
    let mut magnitude = 0.0;
    let mut abs_error = 0.0;
    let mut evaluations = 0;

    // Evanescent band ω = k sin θ: G can wind around the origin here, so its phase is followed
    // continuously from ω = 0, where G is real and positive.
    if k > 0.0 {
        let band = k.min(omega_max);
        let theta_max = (band / k).min(1.0).asin();
        let panels = (16.0 * band * cavity.gap).ceil().max(24.0) as usize;
        let mut estimates = [0.0; 2];
        for (pass, n) in [panels, 2 * panels].into_iter().enumerate() {
            let nodes = gauss_legendre_panels(0.0, theta_max, n);
            let mut w_prev = 1e-12 * k;
            let mut g_prev = g_real(cavity, channel, w_prev)?;
            let mut phase = g_prev.arg();
            let mut acc = CompensatedSum::new();
            let mut mag = 0.0;
            for (theta, wt) in nodes {
                let w = k * theta.sin();
                let (g, p) = unwrap_to(cavity, channel, w_prev, g_prev, phase, w, 0)?;
                let f = thermal_weight(w, tau) * p * k * theta.cos() / (2.0 * PI);
                acc.add(wt * f);
                mag += (wt * f).abs();
                w_prev = w;
                g_prev = g;
                phase = p;
                evaluations += 1;
            }
            estimates[pass] = acc.value();
            if pass == 1 {
                magnitude += mag;
            }
        }
        value.add(estimates[1]);
        abs_error += (estimates[1] - estimates[0]).abs();
    }

    // Propagating band in q = sqrt(ω² − k²): |ρ² e^{2iqL}| < 1 for passive mirrors, so the
    // principal logarithm is already continuous.
    if omega_max > k {
        let q_max = (omega_max * omega_max - k * k).sqrt();
        let period = PI / cavity.gap;
        let n_breaks = ((q_max / period).ceil() as usize).max(1);
        let mut breaks: Vec<f64> = (0..=n_breaks).map(|i| (i as f64 * period).min(q_max)).collect();
        breaks.dedup();
        let r = guarded(|sink| {
            let f = |q: f64| {
                let w = (k * k + q * q).sqrt();
                if w == 0.0 {
                    return 0.0;
                }
                let g = record(sink, g_real(cavity, channel, w));
                thermal_weight(w, tau) * g.arg() * q / (w * 2.0 * PI)
            };
            integrate_with_breaks(f, &breaks, QuadOptions::new(tol).with_budget(200_000))
        })?;
        value.add(r.value);
        abs_error += r.abs_error_estimate;
        magnitude += r.value.abs();
        evaluations += r.evaluations;
    }
    Ok(ChannelIntegral {
        value: value.value(),
        abs_error,
        magnitude,
        evaluations,
    })
}

/// Real-frequency free energy `Σ_p ∫ k dk/(2π) ∫₀^{ω_max} dω/(2π) coth(πω/τ) Im ln G^p(ω + i0⁺)`.
/// The integrand oscillates in `ω`, so the attainable accuracy is far below the imaginary-axis
/// engines; `accuracy_degraded` flags runs whose cancellation or truncation exceeds `tol`.
pub fn free_energy_real_frequency(cavity: &PlanarCavity, omega_max: f64, tol: f64) -> Result<EnergyResult> {
    cavity.validate()?;
    match cavity.mirror {
        DielectricModel::DrudeLorentz(_) | DielectricModel::PerfectMirror | DielectricModel::Vacuum => {}
        _ => {
            return Err(Error::InvalidInput(
                "the real-frequency route supports Drude-Lorentz and perfect mirrors".into(),
            ))
        }
    }
    if !(omega_max > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidInput("omega_max and tol must be positive".into()));
    }
    if is_trivial(cavity) {
        return Ok(trivial(Route::RealFrequency));
    }
    let inner_tol = 1e-3 * tol;
    let l2 = 2.0 * cavity.gap;
    // Per channel the exact integral decays like e^{−2kL}; beyond k_max only cancelling noise remains.
    let k_max = 40.0 / l2;
    if omega_max < 2.0 * k_max {
        return Err(Error::InvalidInput(format!(
            "omega_max must be at least {} for gap {}",
            2.0 * k_max,
            cavity.gap
        )));
    }
    let mut value = 0.0;
    let mut abs_error = 0.0;
    let mut magnitude = 0.0;
    let mut evaluations = 0;
    for pol in Polarization::BOTH {
        let stats = RefCell::new((0.0, 0.0, 0usize));
        let r = guarded(|sink| {
            let f = |k: f64| {
                let channel = TransverseChannel { polarization: pol, k };
                let c = record(
                    sink,
                    real_frequency_channel(cavity, channel, omega_max, inner_tol).map(Some),
                );
                match c {
                    Some(c) => {
                        let mut s = stats.borrow_mut();
                        s.0 += c.abs_error * k;
                        s.1 += c.magnitude * k;
                        s.2 += c.evaluations;
                        k * c.value / (2.0 * PI)
                    }
                    None => 0.0,
                }
            };
            let breaks: Vec<f64> = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|x| x / l2).chain([k_max]).collect();
            integrate_with_breaks(f, &breaks, QuadOptions::new(0.1 * tol).with_budget(2000))
        })?;
        let s = stats.into_inner();
        value += r.value;
        abs_error += r.abs_error_estimate;
        magnitude += s.1 / (2.0 * PI) * k_max / r.evaluations.max(1) as f64;
        evaluations += s.2;
    }
    let accuracy_degraded = abs_error > tol * value.abs() || magnitude * f64::EPSILON * 1e6 > tol * value.abs();
    Ok(EnergyResult {
        value,
        route: Route::RealFrequency,
        abs_error,
        metadata: EnergyMetadata {
            polarizations: 2,
            evaluations,
            omega_max: Some(omega_max),
            accuracy_degraded,
            ..Default::default()
        },
    })
}

/// Pressure `−∂𝓕/∂L` from a five-point central difference with step `10⁻³L`, on the Matsubara
/// engine at `τ > 0` and the zero-temperature engine otherwise.
pub fn pressure(cavity: &PlanarCavity) -> Result<f64> {
    cavity.validate()?;
    if is_trivial(cavity) {
        return Ok(0.0);
    }
    let l = cavity.gap;
    let h = 1e-3 * l;
    let energy = |gap: f64| -> Result<f64> {
        let c = cavity.with_gap(gap);
        if c.temperature_wavenumber > 0.0 {
            Ok(free_energy_matsubara_with(&c, 1e-12)?.value)
        } else {
            Ok(energy_zero_t_with(&c, 1e-12)?.value)
        }
    };
    let d = (energy(l - 2.0 * h)? - 8.0 * energy(l - h)? + 8.0 * energy(l + h)? - energy(l + 2.0 * h)?) / (12.0 * h);
    Ok(-d)
}
