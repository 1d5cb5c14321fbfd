use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::brent;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrudeLorentz {
    pub omega_p: f64,
    #[serde(default)]
    pub omega_0: f64,
    #[serde(default)]
    pub gamma: f64,
}

/// One bath oscillator: frequency `omega_j` and coupling `m_j/m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathMode {
    pub omega_j: f64,
    pub mass_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteBath {
    pub omega_p: f64,
    #[serde(default)]
    pub omega_0: f64,
    #[serde(default, with = "pairs")]
    pub couplings: Vec<BathMode>,
}

mod pairs {
    use super::BathMode;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BathMode], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<[f64; 2]> = v.iter().map(|m| [m.omega_j, m.mass_ratio]).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BathMode>, D::Error> {
        let raw: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|[omega_j, mass_ratio]| BathMode { omega_j, mass_ratio })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DielectricModel {
    DrudeLorentz(DrudeLorentz),
    DiscreteBath(DiscreteBath),
    #[serde(rename = "perfect")]
    PerfectMirror,
    Vacuum,
}

impl DrudeLorentz {
    pub fn new(omega_p: f64, omega_0: f64, gamma: f64) -> Result<Self> {
        let m = DrudeLorentz {
            omega_p,
            omega_0,
            gamma,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn plasma(omega_p: f64) -> Self {
        DrudeLorentz {
            omega_p,
            omega_0: 0.0,
            gamma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_p > 0.0) || !(self.omega_0 >= 0.0) || !(self.gamma >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "Drude-Lorentz needs omega_p > 0, omega_0 >= 0, gamma >= 0: {self:?}"
            )));
        }
        Ok(())
    }

    /// `1 − ω_p²/(ζ(ζ + iγ) − ω₀²)`, defined for `Im ζ ≥ 0` unless `unphysical_sheet` is set.
    pub fn epsilon(&self, zeta: Complex64, unphysical_sheet: bool) -> Result<Complex64> {
        if zeta.im < 0.0 && !unphysical_sheet {
            return Err(Error::Domain(format!(
                "causal permittivity evaluated below the real axis at {zeta}"
            )));
        }
        let den = zeta * (zeta + I * self.gamma) - self.omega_0 * self.omega_0;
        if den.norm() == 0.0 {
            return Err(Error::PoleHit(format!("Drude-Lorentz pole at {zeta}")));
        }
        Ok(1.0 - self.omega_p * self.omega_p / den)
    }

    /// Poles of `ε − 1`: roots of `ζ² + iγζ − ω₀² = 0`.
    pub fn poles(&self) -> [Complex64; 2] {
        let disc = (Complex64::new(self.omega_0 * self.omega_0 - 0.25 * self.gamma * self.gamma, 0.0)).sqrt();
        let c = Complex64::new(0.0, -0.5 * self.gamma);
        [c + disc, c - disc]
    }
}

impl DiscreteBath {
    pub fn new(omega_p: f64, omega_0: f64, couplings: Vec<BathMode>) -> Result<Self> {
        let m = DiscreteBath {
            omega_p,
            omega_0,
            couplings,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_p > 0.0) || !(self.omega_0 >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "discrete bath needs omega_p > 0 and omega_0 >= 0, got {} and {}",
                self.omega_p, self.omega_0
            )));
        }
        let mut last = 0.0;
        for m in &self.couplings {
            if !(m.omega_j > last) || !(m.mass_ratio > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "bath frequencies must increase from 0 with positive mass ratios: {m:?}"
                )));
            }
            last = m.omega_j;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.couplings.len()
    }

    /// Denominator `P(ζ) = ζ² − ω₀² + Σ_j (m_j/m) ω_j² ζ²/(ω_j² − ζ²)`, so that `ε = 1 − ω_p²/P`.
    /// Returns `None` at a bath frequency, where `P` is infinite.
    pub fn denominator(&self, zeta: Complex64) -> Option<Complex64> {
        let z2 = zeta * zeta;
        let mut p = z2 - self.omega_0 * self.omega_0;
        for m in &self.couplings {
            let w2 = m.omega_j * m.omega_j;
            let d = w2 - z2;
            if d.norm() == 0.0 {
                return None;
            }
            p += m.mass_ratio * w2 * z2 / d;
        }
        Some(p)
    }

    /// `P` as a real function of `x = ω²`; strictly increasing between bath frequencies.
    pub fn denominator_real(&self, x: f64) -> f64 {
        let mut p = x - self.omega_0 * self.omega_0;
        for m in &self.couplings {
            let w2 = m.omega_j * m.omega_j;
            p += m.mass_ratio * w2 * x / (w2 - x);
        }
        p
    }

    pub fn epsilon(&self, zeta: Complex64) -> Result<Complex64> {
        match self.denominator(zeta) {
            None => Ok(Complex64::new(1.0, 0.0)),
            Some(p) if p.norm() == 0.0 => Err(Error::PoleHit(format!("discrete-bath permittivity pole at {zeta}"))),
            Some(p) => Ok(1.0 - self.omega_p * self.omega_p / p),
        }
    }

    /// `ε_N` at real frequency, without error plumbing; infinite at a pole.
    pub fn epsilon_real(&self, omega: f64) -> f64 {
        let x = omega * omega;
        for m in &self.couplings {
            if m.omega_j * m.omega_j == x {
                return 1.0;
            }
        }
        1.0 - self.omega_p * self.omega_p / self.denominator_real(x)
    }

    /// `ε_N(iξ) = 1 + ω_p²/(ξ² + ω₀² + ξ μ(iξ))`.
    pub fn epsilon_imag(&self, xi: f64) -> f64 {
        1.0 + self.susceptibility_imag(xi)
    }

    pub fn susceptibility_imag(&self, xi: f64) -> f64 {
        self.omega_p * self.omega_p / (xi * xi + self.omega_0 * self.omega_0 + xi * self.mu_imag(xi))
    }

    /// `μ(iξ) = ξ Σ_j (m_j/m) ω_j²/(ω_j² + ξ²)`.
    pub fn mu_imag(&self, xi: f64) -> f64 {
        xi * self
            .couplings
            .iter()
            .map(|m| m.mass_ratio * m.omega_j * m.omega_j / (m.omega_j * m.omega_j + xi * xi))
            .sum::<f64>()
    }

    pub fn mu(&self, zeta: Complex64) -> Result<Complex64> {
        let z2 = zeta * zeta;
        let mut s = Complex64::new(0.0, 0.0);
        for m in &self.couplings {
            let w2 = m.omega_j * m.omega_j;
            let d = w2 - z2;
            if d.norm() == 0.0 {
                return Err(Error::PoleHit(format!("bath frequency {} hit by mu", m.omega_j)));
            }
            s += m.mass_ratio * w2 / d;
        }
        Ok(-I * zeta * s)
    }

    /// Positive real frequencies where `P = 0`, i.e. the poles of `ε_N`, in increasing order.
    /// Below each pole `ε_N → +∞`, above it `ε_N → −∞`.
    pub fn epsilon_poles(&self) -> Vec<f64> {
        let mut edges: Vec<f64> = vec![0.0];
        edges.extend(self.couplings.iter().map(|m| m.omega_j * m.omega_j));
        let mut poles = Vec::new();
        for (i, &lo) in edges.iter().enumerate() {
            let hi = edges.get(i + 1).copied();
            let mut f = |x: f64| self.denominator_real(x);
            // Each interval sweeps P from −∞ (or −ω₀² at x = 0) upwards to +∞.
            let a = if i == 0 { 0.0 } else { lo * (1.0 + 1e-15) + 1e-300 };
            let fa = if i == 0 { -self.omega_0 * self.omega_0 } else { f(a) };
            if i == 0 && fa >= 0.0 {
                continue;
            }
            let mut b = match hi {
                Some(h) => h * (1.0 - 1e-15),
                None => (2.0 * lo).max(1.0),
            };
            let mut fb = f(b);
            while hi.is_none() && fb <= 0.0 {
                b *= 2.0;
                fb = f(b);
            }
            if fa < 0.0 && fb > 0.0 {
                let x = brent(&mut f, a, b, fa, fb);
                poles.push(x.sqrt());
            }
        }
        poles
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BathGrid {
    #[default]
    Linear,
    /// Geometric cells on `[10⁻⁶ω_c, ω_c]`, each oscillator at its cell's geometric mean.
    Logarithmic,
}

/// Ohmic bath with `N` oscillators on `(0, ω_c]`, midpoint rule, couplings
/// `m_j/m = 2γΔω_j/(π ω_j²)` so that `μ(iξ) → (2γ/π) arctan(ω_c/ξ)` as `N → ∞`.
pub fn make_ohmic_bath(omega_p: f64, omega_0: f64, gamma: f64, omega_c: f64, n: usize) -> Result<DiscreteBath> {
    make_ohmic_bath_on(omega_p, omega_0, gamma, omega_c, n, BathGrid::Linear)
}

pub fn make_ohmic_bath_on(
    omega_p: f64,
    omega_0: f64,
    gamma: f64,
    omega_c: f64,
    n: usize,
    grid: BathGrid,
) -> Result<DiscreteBath> {
    if !(gamma >= 0.0) || !(omega_c > 0.0) {
        return Err(Error::InvalidInput(format!(
            "ohmic bath needs gamma >= 0 and omega_c > 0, got {gamma}, {omega_c}"
        )));
    }
    let mut couplings = Vec::with_capacity(n);
    if gamma > 0.0 {
        for j in 0..n {
            let (w, dw) = match grid {
                BathGrid::Linear => {
                    let dw = omega_c / n as f64;
                    ((j as f64 + 0.5) * dw, dw)
                }
                BathGrid::Logarithmic => {
                    let lo = (omega_c * 1e-6).ln();
                    let step = (omega_c.ln() - lo) / n as f64;
                    let a = (lo + j as f64 * step).exp();
                    let b = (lo + (j as f64 + 1.0) * step).exp();
                    ((a * b).sqrt(), b - a)
                }
            };
            couplings.push(BathMode {
                omega_j: w,
                mass_ratio: 2.0 * gamma * dw / (std::f64::consts::PI * w * w),
            });
        }
    }
    DiscreteBath::new(omega_p, omega_0, couplings)
}

impl DielectricModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            DielectricModel::DrudeLorentz(m) => m.validate(),
            DielectricModel::DiscreteBath(m) => m.validate(),
            _ => Ok(()),
        }
    }

    pub fn epsilon(&self, zeta: Complex64) -> Result<Complex64> {
        self.epsilon_on_sheet(zeta, false)
    }

    pub fn epsilon_on_sheet(&self, zeta: Complex64, unphysical_sheet: bool) -> Result<Complex64> {
        match self {
            DielectricModel::DrudeLorentz(m) => m.epsilon(zeta, unphysical_sheet),
            DielectricModel::DiscreteBath(m) => m.epsilon(zeta),
            DielectricModel::Vacuum => Ok(Complex64::new(1.0, 0.0)),
            DielectricModel::PerfectMirror => Err(Error::Domain(
                "a perfect mirror has no finite permittivity".into(),
            )),
        }
    }

    /// Permittivity on the imaginary axis, `ε(iξ)`, as a real number.
    pub fn epsilon_imag(&self, xi: f64) -> Result<f64> {
        self.susceptibility_imag(xi).map(|chi| 1.0 + chi)
    }

    /// `ε(iξ) − 1`, evaluated without forming `ε`.
    pub fn susceptibility_imag(&self, xi: f64) -> Result<f64> {
        match self {
            DielectricModel::DrudeLorentz(m) => {
                let den = xi * (xi + m.gamma) + m.omega_0 * m.omega_0;
                if den == 0.0 {
                    return Err(Error::PoleHit("Drude permittivity at xi = 0".into()));
                }
                Ok(m.omega_p * m.omega_p / den)
            }
            DielectricModel::DiscreteBath(m) => {
                if xi == 0.0 && m.omega_0 == 0.0 {
                    return Err(Error::PoleHit("discrete-bath permittivity at xi = 0".into()));
                }
                Ok(m.susceptibility_imag(xi))
            }
            DielectricModel::Vacuum => Ok(0.0),
            DielectricModel::PerfectMirror => Err(Error::Domain(
                "a perfect mirror has no finite permittivity".into(),
            )),
        }
    }

    /// Memory function `μ(ζ)`: `γ` for Drude-Lorentz, the bath sum for a discrete bath.
    pub fn mu(&self, zeta: Complex64) -> Result<Complex64> {
        match self {
            DielectricModel::DrudeLorentz(m) => Ok(Complex64::new(m.gamma, 0.0)),
            DielectricModel::DiscreteBath(m) => m.mu(zeta),
            _ => Err(Error::Domain("memory function needs a material model".into())),
        }
    }

    /// Generalized polarizability normalized so that `ε = 1 + α`:
    /// `α(ζ) = ω_p²/(−ζ² + ω₀² − iζμ(ζ))`.
    pub fn polarizability_generalized(&self, zeta: Complex64) -> Result<Complex64> {
        let (omega_p, omega_0) = match self {
            DielectricModel::DrudeLorentz(m) => {
                if zeta.im < 0.0 {
                    return Err(Error::Domain(format!(
                        "causal polarizability evaluated below the real axis at {zeta}"
                    )));
                }
                (m.omega_p, m.omega_0)
            }
            DielectricModel::DiscreteBath(m) => (m.omega_p, m.omega_0),
            _ => return Err(Error::Domain("polarizability needs a material model".into())),
        };
        let den = -zeta * zeta + omega_0 * omega_0 - I * zeta * self.mu(zeta)?;
        if den.norm() == 0.0 {
            return Err(Error::PoleHit(format!("polarizability pole at {zeta}")));
        }
        Ok(omega_p * omega_p / den)
    }
}

pub fn mu_discrete(model: &DiscreteBath, zeta: Complex64) -> Result<Complex64> {
    model.mu(zeta)
}

pub fn epsilon(model: &DielectricModel, zeta: Complex64) -> Result<Complex64> {
    model.epsilon(zeta)
}

pub fn polarizability_generalized(model: &DielectricModel, zeta: Complex64) -> Result<Complex64> {
    model.polarizability_generalized(zeta)
}
