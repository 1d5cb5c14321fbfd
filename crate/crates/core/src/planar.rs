use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dielectric::DielectricModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    TE,
    TM,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::TE, Polarization::TM];

    pub fn label(&self) -> &'static str {
        match self {
            Polarization::TE => "TE",
            Polarization::TM => "TM",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseChannel {
    pub polarization: Polarization,
    pub k: f64,
}

impl TransverseChannel {
    pub fn new(polarization: Polarization, k: f64) -> Result<Self> {
        if !(k >= 0.0) {
            return Err(Error::InvalidInput(format!("transverse wavenumber must be >= 0, got {k}")));
        }
        Ok(TransverseChannel { polarization, k })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Thickness {
    Finite(f64),
    Bulk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarCavity {
    pub gap: f64,
    pub slab_thickness: Thickness,
    pub mirror: DielectricModel,
    #[serde(default)]
    pub temperature_wavenumber: f64,
}

impl PlanarCavity {
    pub fn new(gap: f64, slab_thickness: Thickness, mirror: DielectricModel, temperature_wavenumber: f64) -> Result<Self> {
        let c = PlanarCavity {
            gap,
            slab_thickness,
            mirror,
            temperature_wavenumber,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn bulk(gap: f64, mirror: DielectricModel) -> Self {
        PlanarCavity {
            gap,
            slab_thickness: Thickness::Bulk,
            mirror,
            temperature_wavenumber: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gap > 0.0) {
            return Err(Error::InvalidInput(format!("gap must be positive, got {}", self.gap)));
        }
        if let Thickness::Finite(d) = self.slab_thickness {
            if !(d > 0.0) {
                return Err(Error::InvalidInput(format!("slab thickness must be positive, got {d}")));
            }
        }
        if !(self.temperature_wavenumber >= 0.0) {
            return Err(Error::InvalidInput("temperature must be >= 0".into()));
        }
        self.mirror.validate()
    }

    pub fn with_gap(&self, gap: f64) -> PlanarCavity {
        PlanarCavity { gap, ..self.clone() }
    }
}

/// Square root with `Re ≥ 0`; on the negative real axis the `+i0` frequency convention picks
/// `−i·sqrt|z|·sign(Re ζ)`.
fn branch_sqrt(z: Complex64, zeta: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re < 0.0 {
        let s = if zeta.re < 0.0 { 1.0 } else { -1.0 };
        return Complex64::new(0.0, s * (-z.re).sqrt());
    }
    z.sqrt()
}

/// `κ = sqrt(k² − ζ²)` on the physical sheet.
pub fn kappa(k: f64, zeta: Complex64) -> Complex64 {
    branch_sqrt(k * k - zeta * zeta, zeta)
}

/// Analytic continuation of `κ` from the upper half plane across the propagating band
/// `Re ζ > k` into the lower half plane.
pub fn kappa_continued(k: f64, zeta: Complex64) -> Complex64 {
    if zeta.im >= 0.0 {
        return kappa(k, zeta);
    }
    let s = (zeta * zeta - k * k).sqrt();
    if zeta.re >= 0.0 {
        Complex64::new(s.im, -s.re)
    } else {
        Complex64::new(-s.im, s.re)
    }
}

/// `κ_m = sqrt(k² − ε(ζ)ζ²)` on the physical sheet.
pub fn kappa_m(model: &DielectricModel, k: f64, zeta: Complex64) -> Result<Complex64> {
    let eps = model.epsilon(zeta)?;
    Ok(branch_sqrt(k * k - eps * zeta * zeta, zeta))
}

fn tanh_guarded(z: Complex64) -> Complex64 {
    if z.re > 40.0 {
        Complex64::new(1.0, 0.0)
    } else if z.re < -40.0 {
        Complex64::new(-1.0, 0.0)
    } else {
        z.tanh()
    }
}

/// `x·coth(x)`, regular at `x = 0`.
fn x_coth(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        return 1.0 + z2 / 3.0 - z2 * z2 / 45.0;
    }
    z / tanh_guarded(z)
}

/// Interface terms `(a, b)` with `ρ = (a − b)/(a + b)`: `a = κ` (TE) or `εκ` (TM), `b` the slab
/// admittance `κ_m tanh κ_m d` (TE) or `κ_m coth κ_m d` (TM), reducing to `κ_m` for bulk.
fn interface_terms(
    eps: Complex64,
    kap: Complex64,
    kap_m: Complex64,
    polarization: Polarization,
    thickness: Thickness,
) -> (Complex64, Complex64) {
    match (polarization, thickness) {
        (Polarization::TE, Thickness::Bulk) => (kap, kap_m),
        (Polarization::TM, Thickness::Bulk) => (eps * kap, kap_m),
        (Polarization::TE, Thickness::Finite(d)) => (kap, kap_m * tanh_guarded(kap_m * d)),
        (Polarization::TM, Thickness::Finite(d)) => (eps * kap, x_coth(kap_m * d) / d),
    }
}

/// Schram dispersion function `D^p_N(ω, L)` of the boxed two-slab cavity.
pub fn dispersion_d(cavity: &PlanarCavity, channel: TransverseChannel, omega: Complex64) -> Result<Complex64> {
    let d = match cavity.slab_thickness {
        Thickness::Finite(d) => d,
        Thickness::Bulk => {
            return Err(Error::InvalidInput("the dispersion function needs a finite slab".into()))
        }
    };
    let eps = cavity.mirror.epsilon(omega)?;
    let kap = kappa(channel.k, omega);
    let kap_m = branch_sqrt(channel.k * channel.k - eps * omega * omega, omega);
    let (a, b) = interface_terms(eps, kap, kap_m, channel.polarization, Thickness::Finite(d));
    let l = cavity.gap;
    Ok((kap * l).exp() * (a + b) * (a + b) - (a - b) * (a - b) * (-kap * l).exp())
}

/// Reflection amplitude `ρ_p(ζ)` of one mirror seen from the gap.
pub fn rho(
    mirror: &DielectricModel,
    thickness: Thickness,
    channel: TransverseChannel,
    zeta: Complex64,
) -> Result<Complex64> {
    match mirror {
        DielectricModel::PerfectMirror => Ok(match channel.polarization {
            Polarization::TE => Complex64::new(-1.0, 0.0),
            Polarization::TM => Complex64::new(1.0, 0.0),
        }),
        DielectricModel::Vacuum if thickness == Thickness::Bulk => Ok(Complex64::new(0.0, 0.0)),
        _ => {
            let eps = mirror.epsilon(zeta)?;
            let kap = kappa(channel.k, zeta);
            let kap_m = branch_sqrt(channel.k * channel.k - eps * zeta * zeta, zeta);
            let (a, b) = interface_terms(eps, kap, kap_m, channel.polarization, thickness);
            Ok((a - b) / (a + b))
        }
    }
}

/// `G^p = D^p/D^p_∞ = 1 − ρ_p² e^{−2κL}`.
pub fn reflection_ratio_g(cavity: &PlanarCavity, channel: TransverseChannel, zeta: Complex64) -> Result<Complex64> {
    let r = rho(&cavity.mirror, cavity.slab_thickness, channel, zeta)?;
    let kap = kappa(channel.k, zeta);
    Ok(1.0 - r * r * (-2.0 * kap * cavity.gap).exp())
}

/// `ρ_p(iξ)` in real arithmetic; this is the hot path of every imaginary-axis engine.
pub fn rho_imag(mirror: &DielectricModel, thickness: Thickness, polarization: Polarization, k: f64, xi: f64) -> Result<f64> {
    let chi = match mirror {
        DielectricModel::PerfectMirror => {
            return Ok(match polarization {
                Polarization::TE => -1.0,
                Polarization::TM => 1.0,
            })
        }
        DielectricModel::Vacuum if thickness == Thickness::Bulk => return Ok(0.0),
        m if xi == 0.0 => match m.susceptibility_imag(0.0) {
            Ok(chi) => chi,
            Err(Error::PoleHit(_)) => return Ok(rho_static_conductor(m, thickness, polarization, k)),
            Err(e) => return Err(e),
        },
        m => m.susceptibility_imag(xi)?,
    };
    Ok(rho_imag_with_chi(chi, thickness, polarization, k, xi))
}

/// `ξ → 0⁺` limit for conductors, where `ε(iξ)` diverges but `ε(iξ)ξ²` stays finite.
fn rho_static_conductor(model: &DielectricModel, thickness: Thickness, polarization: Polarization, k: f64) -> f64 {
    if polarization == Polarization::TM {
        return 1.0;
    }
    let s = match model {
        DielectricModel::DrudeLorentz(m) if m.gamma == 0.0 => m.omega_p * m.omega_p,
        DielectricModel::DiscreteBath(m) => {
            let total: f64 = m.couplings.iter().map(|c| c.mass_ratio).sum();
            m.omega_p * m.omega_p / (1.0 + total)
        }
        _ => 0.0,
    };
    let kap_m = (k * k + s).sqrt();
    let b = match thickness {
        Thickness::Bulk => kap_m,
        Thickness::Finite(d) => kap_m * (kap_m * d).min(40.0).tanh(),
    };
    if k + b == 0.0 {
        return 0.0;
    }
    (k - b) / (k + b)
}

/// Same ratio from the susceptibility `χ = ε − 1`; numerators are formed without cancellation
/// so that `ρ` keeps full relative accuracy for dilute or transparent mirrors.
pub fn rho_imag_with_chi(chi: f64, thickness: Thickness, polarization: Polarization, k: f64, xi: f64) -> f64 {
    let eps = 1.0 + chi;
    let kap = (k * k + xi * xi).sqrt();
    let kap_m = (k * k + eps * xi * xi).sqrt();
    // κ − κ_m and εκ − κ_m
    let te_gap = -chi * xi * xi / (kap + kap_m);
    let tm_gap = chi * ((eps + 1.0) * k * k + eps * xi * xi) / (eps * kap + kap_m);
    let (sum, diff) = match (polarization, thickness) {
        (Polarization::TE, Thickness::Bulk) => (kap + kap_m, te_gap),
        (Polarization::TM, Thickness::Bulk) => (eps * kap + kap_m, tm_gap),
        (Polarization::TE, Thickness::Finite(d)) => {
            let x = kap_m * d;
            let one_minus_tanh = 2.0 / ((2.0 * x).exp() + 1.0);
            let b = kap_m * if x > 40.0 { 1.0 } else { x.tanh() };
            (kap + b, te_gap + kap_m * one_minus_tanh)
        }
        (Polarization::TM, Thickness::Finite(d)) => {
            let x = kap_m * d;
            if x < 1e-4 {
                let b = (1.0 + x * x / 3.0) / d;
                (eps * kap + b, eps * kap - b)
            } else {
                let coth_minus_one = 2.0 / (2.0 * x).exp_m1();
                let b = kap_m * (1.0 + coth_minus_one);
                (eps * kap + b, tm_gap - kap_m * coth_minus_one)
            }
        }
    };
    if sum == 0.0 {
        return 0.0;
    }
    diff / sum
}

/// `ln G^p(iξ) = ln(1 − ρ² e^{−2κL})` on the imaginary axis.
pub fn ln_g_imag(cavity: &PlanarCavity, polarization: Polarization, k: f64, xi: f64) -> Result<f64> {
    let r = rho_imag(&cavity.mirror, cavity.slab_thickness, polarization, k, xi)?;
    let kap = (k * k + xi * xi).sqrt();
    Ok((-r * r * (-2.0 * kap * cavity.gap).exp()).ln_1p())
}

/// Bulk Fresnel coefficient `r^p(iξ)`.
pub fn fresnel(model: &DielectricModel, channel: TransverseChannel, xi: f64) -> Result<f64> {
    if !(xi >= 0.0) {
        return Err(Error::InvalidInput(format!("xi must be >= 0, got {xi}")));
    }
    rho_imag(model, Thickness::Bulk, channel.polarization, channel.k, xi)
}
