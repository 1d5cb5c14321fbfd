//! Casimir-Polder interaction of a small Gaussian dipole with a planar half-space.
//!
//! Gaussian units with `ħ = c = 1`: the free Green tensor is `4π(ω² − kk)/(k² − ω²)` in Fourier
//! space and polarizabilities carry the dimension of a volume.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;

use crate::dielectric::DielectricModel;
use crate::error::{Error, Result};
use crate::numerics::{count_zeros, faddeeva, integrate_with_breaks, one_minus_sqrt_pi_x_erfcx, QuadOptions, Rectangle};
use crate::planar::{rho_imag, Polarization, Thickness};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianDipole {
    pub m0: f64,
    pub k0: f64,
    pub q: f64,
    /// Form-factor radius, `|ρ(k)|² = e^{−k²a²/π}`.
    pub a: f64,
}

impl GaussianDipole {
    pub fn new(m0: f64, k0: f64, q: f64, a: f64) -> Result<Self> {
        let d = GaussianDipole { m0, k0, q, a };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) {
            return Err(Error::InvalidInput(format!("form-factor radius must be > 0, got {}", self.a)));
        }
        if !self.q.is_finite() || !self.m0.is_finite() || !self.k0.is_finite() {
            return Err(Error::InvalidInput("dipole parameters must be finite".into()));
        }
        if !(self.mass() > 0.0) {
            return Err(Error::InvalidInput(format!("renormalized mass must be > 0, got {}", self.mass())));
        }
        if !(self.spring() > 0.0) {
            return Err(Error::InvalidInput(format!(
                "renormalized spring constant must be > 0, got {}",
                self.spring()
            )));
        }
        Ok(())
    }

    /// `m = m₀ + 2q²/(3a)`.
    pub fn mass(&self) -> f64 {
        self.m0 + 2.0 * self.q * self.q / (3.0 * self.a)
    }

    /// `K = K₀ + πq²/(6a³)`.
    pub fn spring(&self) -> f64 {
        self.k0 + PI * self.q * self.q / (6.0 * self.a.powi(3))
    }

    /// `α₀ = q²/K`.
    pub fn static_polarizability(&self) -> f64 {
        self.q * self.q / self.spring()
    }

    pub fn resonance(&self) -> f64 {
        (self.spring() / self.mass()).sqrt()
    }

    pub fn with_radius(&self, a: f64) -> GaussianDipole {
        GaussianDipole { a, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceGeometry {
    pub mirror: DielectricModel,
    pub distance: f64,
}

impl HalfSpaceGeometry {
    pub fn new(mirror: DielectricModel, distance: f64) -> Result<Self> {
        let g = HalfSpaceGeometry { mirror, distance };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance > 0.0) {
            return Err(Error::InvalidInput(format!("distance must be > 0, got {}", self.distance)));
        }
        self.mirror.validate()
    }

    pub fn at(&self, distance: f64) -> HalfSpaceGeometry {
        HalfSpaceGeometry {
            distance,
            ..self.clone()
        }
    }
}

/// Isotropic form-factor average `⟨G₀⟩(ζ)` of the free Green tensor.
pub fn vacuum_green_avg(dipole: &GaussianDipole, zeta: Complex64) -> Complex64 {
    if zeta.re == 0.0 && zeta.im >= 0.0 {
        return Complex64::new(vacuum_green_avg_imag(dipole, zeta.im), 0.0);
    }
    let a = dipole.a;
    let w = faddeeva(a * zeta / PI.sqrt());
    let bracket = 1.0 + Complex64::i() * a * zeta * w;
    2.0 * zeta * zeta / (3.0 * a) * bracket - PI / (6.0 * a.powi(3))
}

/// `⟨G₀⟩(iξ) = −(2ξ²/3a)[1 − aξ erfcx(aξ/√π)] − π/(6a³)`.
pub fn vacuum_green_avg_imag(dipole: &GaussianDipole, xi: f64) -> f64 {
    let a = dipole.a;
    let x = a * xi.abs() / PI.sqrt();
    -2.0 * xi * xi / (3.0 * a) * one_minus_sqrt_pi_x_erfcx(x) - PI / (6.0 * a.powi(3))
}

/// `Γ(ω) = (2q²ω²/3) e^{−ω²a²/π}(1 + erf(iaω/√π))`.
pub fn radiative_damping(dipole: &GaussianDipole, omega: f64) -> Complex64 {
    let q2 = dipole.q * dipole.q;
    2.0 * q2 * omega * omega / 3.0 * faddeeva(Complex64::new(dipole.a * omega / PI.sqrt(), 0.0))
}

/// Inverse response `−m₀ζ² + K₀ − q²⟨G₀⟩(ζ) = −mζ² + K − iζΓ(ζ)`.
pub fn dressed_denominator(dipole: &GaussianDipole, zeta: Complex64) -> Complex64 {
    -dipole.m0 * zeta * zeta + dipole.k0 - dipole.q * dipole.q * vacuum_green_avg(dipole, zeta)
}

/// The `a → 0` form `−mω² + K − (2i/3)q²ω³` with `m` and `K` held at their values for the
/// dipole's own radius.
pub fn point_limit_denominator(dipole: &GaussianDipole, zeta: Complex64) -> Complex64 {
    let q2 = dipole.q * dipole.q;
    -dipole.mass() * zeta * zeta + dipole.spring() - Complex64::i() * (2.0 / 3.0) * q2 * zeta * zeta * zeta
}

pub fn dressed_polarizability(dipole: &GaussianDipole, zeta: Complex64) -> Result<Complex64> {
    dipole.validate()?;
    let d = dressed_denominator(dipole, zeta);
    if d.norm() == 0.0 {
        return Err(Error::PoleHit(format!("dressed polarizability at {zeta}")));
    }
    Ok(dipole.q * dipole.q / d)
}

/// `α_d(iξ)`, real and positive.
pub fn dressed_polarizability_imag(dipole: &GaussianDipole, xi: f64) -> f64 {
    let a = dipole.a;
    let x = a * xi.abs() / PI.sqrt();
    let q2 = dipole.q * dipole.q;
    let d = dipole.spring() + dipole.m0 * xi * xi + 2.0 * q2 * xi * xi / (3.0 * a) * one_minus_sqrt_pi_x_erfcx(x);
    dipole.q * dipole.q / d
}

/// `q²/(−mω² + K)` on the real axis with radiation reaction switched off.
pub fn undamped_polarizability(dipole: &GaussianDipole, omega: f64) -> Result<f64> {
    dipole.validate()?;
    let d = -dipole.mass() * omega * omega + dipole.spring();
    if d == 0.0 {
        return Err(Error::PoleHit(format!("undamped polarizability at resonance {omega}")));
    }
    Ok(dipole.q * dipole.q / d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseForm {
    Gaussian,
    PointLimit,
}

/// Zeros of the inverse response inside `region` by the argument principle. Zeros with
/// `Im ω > 0` violate causality.
pub fn response_zero_count(dipole: &GaussianDipole, form: ResponseForm, region: &Rectangle) -> Result<i64> {
    dipole.validate()?;
    match form {
        ResponseForm::Gaussian => count_zeros(|z| dressed_denominator(dipole, z), region, 512),
        ResponseForm::PointLimit => count_zeros(|z| point_limit_denominator(dipole, z), region, 512),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcausalFit {
    /// `(a, c(a))` with `c(a)` the least-squares coefficient of `−Im[q²/α_d] ≈ c ω³`.
    pub samples: Vec<(f64, f64)>,
    /// Extrapolation of `c(a) = c₀ + c₂a²` to `a = 0`.
    pub coefficient: f64,
    /// `2q²/3`.
    pub expected: f64,
}

/// Fits the `ω³` coefficient of the inverse dressed polarizability on real frequencies
/// `ω ∈ [ω_ref/2, 2ω_ref]` for each radius and extrapolates to the point limit.
pub fn acausal_coefficient_fit(dipole: &GaussianDipole, radii: &[f64], omega_ref: f64) -> Result<AcausalFit> {
    if radii.len() < 2 || !(omega_ref > 0.0) {
        return Err(Error::InvalidInput("need at least two radii and a positive reference frequency".into()));
    }
    let q2 = dipole.q * dipole.q;
    let mut samples = Vec::with_capacity(radii.len());
    for &a in radii {
        let d = dipole.with_radius(a);
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..9 {
            let w = omega_ref * 2f64.powf(-1.0 + j as f64 / 4.0);
            let alpha = dressed_polarizability(&d, Complex64::new(w, 0.0))?;
            let y = -(q2 / alpha).im;
            let x = w.powi(3);
            num += x * y;
            den += x * x;
        }
        samples.push((a, num / den));
    }
    let n = samples.len() as f64;
    let (sx, sy) = samples.iter().fold((0.0, 0.0), |(sx, sy), &(a, c)| (sx + a * a, sy + c));
    let (sxx, sxy) = samples.iter().fold((0.0, 0.0), |(sxx, sxy), &(a, c)| (sxx + a.powi(4), sxy + a * a * c));
    let det = n * sxx - sx * sx;
    let coefficient = if det.abs() > 0.0 { (sxx * sy - sx * sxy) / det } else { sy / n };
    Ok(AcausalFit {
        samples,
        coefficient,
        expected: 2.0 * q2 / 3.0,
    })
}

/// Diagonal reflected Green tensor at the dipole position, `xx = yy` and `zz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteredGreen {
    pub xx: f64,
    pub zz: f64,
}

impl ScatteredGreen {
    pub fn trace(&self) -> f64 {
        2.0 * self.xx + self.zz
    }
}

const GREEN_TOL: f64 = 1e-13;

/// `𝒢_xx = ½∫_ξ^∞ dκ e^{−2κz}(−ξ² r_TE + κ² r_TM)` and `𝒢_zz = ∫_ξ^∞ dκ e^{−2κz}(κ² − ξ²) r_TM`,
/// multiplied by `(−2κ)^order` under the integral.
fn green_integral(geometry: &HalfSpaceGeometry, xi: f64, order: i32) -> Result<ScatteredGreen> {
    geometry.validate()?;
    if !(xi >= 0.0) {
        return Err(Error::InvalidInput(format!("xi must be >= 0, got {xi}")));
    }
    if let DielectricModel::Vacuum = geometry.mirror {
        return Ok(ScatteredGreen { xx: 0.0, zz: 0.0 });
    }
    let z = geometry.distance;
    let sink = RefCell::new(None);
    let integrand = |u: f64| -> [f64; 2] {
        let kap = xi + u / (2.0 * z);
        let k = (u / (2.0 * z) * (2.0 * xi + u / (2.0 * z))).sqrt();
        let r = |p| match rho_imag(&geometry.mirror, Thickness::Bulk, p, k, xi) {
            Ok(v) => v,
            Err(e) => {
                sink.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        let (te, tm) = (r(Polarization::TE), r(Polarization::TM));
        let w = (-u - 2.0 * xi * z).exp() / (2.0 * z) * (-2.0 * kap).powi(order);
        [0.5 * w * (-xi * xi * te + kap * kap * tm), w * k * k * tm]
    };
    let parts = [0.0, 1.0, 3.0, 8.0, 20.0, 45.0, 80.0];
    let mut out = [0.0; 2];
    for (c, slot) in out.iter_mut().enumerate() {
        let r = integrate_with_breaks(|u| integrand(u)[c], &parts, QuadOptions::relative(GREEN_TOL).with_abs(1e-300))
            .or_else(|_| integrate_with_breaks(|u| integrand(u)[c], &parts, QuadOptions::relative(1e-10)))?;
        *slot = r.value;
    }
    if let Some(e) = sink.into_inner() {
        return Err(e);
    }
    Ok(ScatteredGreen { xx: out[0], zz: out[1] })
}

/// Reflected Green tensor of the half-space at `r = r' = z₀ẑ` and frequency `iξ`.
pub fn scattered_green_halfspace(geometry: &HalfSpaceGeometry, xi: f64) -> Result<ScatteredGreen> {
    green_integral(geometry, xi, 0)
}

/// `∂/∂z₀` of [`scattered_green_halfspace`].
pub fn scattered_green_derivative(geometry: &HalfSpaceGeometry, xi: f64) -> Result<ScatteredGreen> {
    green_integral(geometry, xi, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CpResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpMode {
    Exact,
    Perturbative,
}

const CP_TOL: f64 = 1e-10;

fn check_geometry(dipole: &GaussianDipole, geometry: &HalfSpaceGeometry) -> Result<()> {
    dipole.validate()?;
    geometry.validate()?;
    if dipole.a >= geometry.distance / 20.0 {
        return Err(Error::Geometry(format!(
            "radius {} is not below distance/20 = {}",
            dipole.a,
            geometry.distance / 20.0
        )));
    }
    Ok(())
}

/// `∫₀^∞ dξ/(2π) f(ξ)` on the scale `1/z₀`, with extra breaks around the dipole resonance
/// `ω₀ = sqrt(K/m)` where `α_d(iξ)` turns over.
fn xi_integral(
    dipole: &GaussianDipole,
    geometry: &HalfSpaceGeometry,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<CpResult> {
    let z = geometry.distance;
    let sink = RefCell::new(None);
    let g = |v: f64| match f(v / (2.0 * z)) {
        Ok(x) => x / (2.0 * z) / (2.0 * PI),
        Err(e) => {
            sink.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let v0 = 2.0 * z * dipole.resonance();
    let mut parts = vec![0.0, 0.5, 2.0, 6.0, 15.0, 35.0, 70.0, 140.0];
    parts.extend([0.1, 0.3, 1.0, 3.0, 10.0].iter().map(|s| s * v0).filter(|&v| v < 140.0));
    parts.sort_by(f64::total_cmp);
    parts.dedup();
    let r = integrate_with_breaks(g, &parts, QuadOptions::relative(CP_TOL).with_abs(1e-300))?;
    if let Some(e) = sink.into_inner() {
        return Err(e);
    }
    Ok(CpResult {
        value: r.value,
        abs_error: r.abs_error_estimate,
        evaluations: r.evaluations,
    })
}

fn coupling(alpha: f64, g: f64) -> Result<f64> {
    let x = alpha * g;
    if !(x.abs() < 1.0) {
        return Err(Error::StrongCoupling { value: x.abs() });
    }
    Ok(x)
}

/// `E = ∫₀^∞ dξ/(2π) tr ln[1 − α_d(iξ)⟨𝒢⟩(iξ, z₀)]`, the energy including multiple reflections.
pub fn cp_energy_exact(dipole: &GaussianDipole, geometry: &HalfSpaceGeometry) -> Result<CpResult> {
    check_geometry(dipole, geometry)?;
    xi_integral(dipole, geometry, |xi| {
        let alpha = dressed_polarizability_imag(dipole, xi);
        let g = scattered_green_halfspace(geometry, xi)?;
        let (xx, zz) = (coupling(alpha, g.xx)?, coupling(alpha, g.zz)?);
        Ok(2.0 * (-xx).ln_1p() + (-zz).ln_1p())
    })
}

/// Leading term `E ≈ −∫₀^∞ dξ/(2π) α_d(iξ) tr⟨𝒢⟩(iξ, z₀)`.
pub fn cp_energy_perturbative(dipole: &GaussianDipole, geometry: &HalfSpaceGeometry) -> Result<CpResult> {
    check_geometry(dipole, geometry)?;
    xi_integral(dipole, geometry, |xi| {
        let alpha = dressed_polarizability_imag(dipole, xi);
        Ok(-alpha * scattered_green_halfspace(geometry, xi)?.trace())
    })
}

/// Force along the surface normal, `F = −∂E/∂z₀`; negative values attract the dipole.
/// The exact mode dresses the polarizability with the reflected field,
/// `α_Tot = α_d/(1 − α_d⟨𝒢⟩)` per tensor component.
pub fn cp_force(dipole: &GaussianDipole, geometry: &HalfSpaceGeometry, mode: CpMode) -> Result<CpResult> {
    check_geometry(dipole, geometry)?;
    xi_integral(dipole, geometry, |xi| {
        let alpha = dressed_polarizability_imag(dipole, xi);
        let dg = scattered_green_derivative(geometry, xi)?;
        match mode {
            CpMode::Perturbative => Ok(alpha * dg.trace()),
            CpMode::Exact => {
                let g = scattered_green_halfspace(geometry, xi)?;
                let (xx, zz) = (coupling(alpha, g.xx)?, coupling(alpha, g.zz)?);
                Ok(2.0 * alpha / (1.0 - xx) * dg.xx + alpha / (1.0 - zz) * dg.zz)
            }
        }
    })
}
