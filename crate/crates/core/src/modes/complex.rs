//! Complex resonances of the dissipative cavity and the generalized sum over them.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::dielectric::{DielectricModel, DrudeLorentz};
use crate::error::{Error, Result};
use crate::numerics::{find_complex_roots, find_real_roots, integrate_to_infinity, CompensatedSum, QuadOptions, Rectangle};
use crate::planar::{kappa_continued, PlanarCavity, Polarization, Thickness, TransverseChannel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceSet {
    pub channel: TransverseChannel,
    /// Gap length; `None` for the single-interface reference `L → ∞`.
    pub gap: Option<f64>,
    /// Zeros with `Re ω > 0`, `Im ω < 0`; their mirror images `−ω*` are implied.
    pub complex_pairs: Vec<Complex64>,
    /// `ξ > 0` of zeros at `ω = −iξ`, which enter the sum with weight one half.
    pub imaginary_modes: Vec<f64>,
    pub region: Rectangle,
    pub quasistatic: bool,
    /// Set when the search evaluated the mirror permittivity on its unphysical sheet.
    pub continuation_warning: bool,
}

impl ResonanceSet {
    /// Plot-friendly record `{channel, L, pairs, imaginary}`.
    pub fn record(&self) -> ResonanceRecord {
        ResonanceRecord {
            polarization: self.channel.polarization,
            k: self.channel.k,
            gap: self.gap,
            pairs: self.complex_pairs.iter().map(|z| [z.re, z.im]).collect(),
            imaginary: self.imaginary_modes.clone(),
        }
    }

    fn weighted(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        self.complex_pairs
            .iter()
            .map(|&z| (z, 1.0))
            .chain(self.imaginary_modes.iter().map(|&xi| (Complex64::new(0.0, -xi), 0.5)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceRecord {
    pub polarization: Polarization,
    pub k: f64,
    #[serde(rename = "L")]
    pub gap: Option<f64>,
    pub pairs: Vec<[f64; 2]>,
    pub imaginary: Vec<f64>,
}

fn drude_bulk(cavity: &PlanarCavity) -> Result<&DrudeLorentz> {
    match (&cavity.mirror, cavity.slab_thickness) {
        (DielectricModel::DrudeLorentz(m), Thickness::Bulk) => Ok(m),
        _ => Err(Error::InvalidInput("resonance search needs a bulk Drude-Lorentz mirror".into())),
    }
}

/// `s = ζ(ζ + iγ) − ω₀²`, so that `ε = 1 − ω_p²/s`.
fn oscillator(m: &DrudeLorentz, z: Complex64) -> Complex64 {
    z * (z + Complex64::new(0.0, m.gamma)) - m.omega_0 * m.omega_0
}

/// Numerator of `G^p(ω, L)` cleared of permittivity poles. Outside the quasistatic TM family
/// it is the product over both `κ_m` branches, which is free of the `κ_m` cut; `branch` then
/// tells which factor a zero belongs to.
#[derive(Clone, Copy)]
struct Numerator<'a> {
    model: &'a DrudeLorentz,
    polarization: Polarization,
    k: f64,
    gap: f64,
    quasistatic: bool,
}

struct Parts {
    /// `κ` (TE) or `κ(s − ω_p²)` (TM).
    a: Complex64,
    /// `b²` with `b = κ_m` (TE) or `sκ_m` (TM).
    b2: Complex64,
    /// `b` on the branch continued from the upper half plane.
    b: Complex64,
    /// `e^{−2κL}`.
    e: Complex64,
}

impl Numerator<'_> {
    fn kappa(&self, z: Complex64) -> Complex64 {
        if self.quasistatic {
            Complex64::new(self.k, 0.0)
        } else {
            kappa_continued(self.k, z)
        }
    }

    fn parts(&self, z: Complex64, gap: f64) -> Parts {
        let m = self.model;
        let wp2 = m.omega_p * m.omega_p;
        let s = oscillator(m, z);
        let k = self.k;
        let kap = self.kappa(z);
        // κ_m² s = (k² − z²)s + ω_p² z²; the quasistatic limit drops the displacement term z²
        // and keeps the conduction term, which leaves the eddy-current diffusion problem.
        let ms = if self.quasistatic {
            k * k * s + wp2 * z * z
        } else {
            (k * k - z * z) * s + wp2 * z * z
        };
        let km = continued_sqrt(ms / s);
        let e = (-2.0 * kap * gap).exp();
        match self.polarization {
            Polarization::TE => Parts {
                a: kap,
                b2: ms / s,
                b: km,
                e,
            },
            Polarization::TM => Parts {
                a: kap * (s - wp2),
                b2: ms * s,
                b: km * s,
                e,
            },
        }
    }

    /// Clears the poles at `s = 0` (TE) and divides out the double zero at `ω = 0` that
    /// conductors add to the quasistatic TE product.
    fn regularizer(&self, z: Complex64) -> Complex64 {
        match self.polarization {
            Polarization::TE => {
                let s = oscillator(self.model, z);
                if self.model.omega_0 == 0.0 {
                    s * s / (z * z)
                } else {
                    s * s
                }
            }
            Polarization::TM => Complex64::new(1.0, 0.0),
        }
    }

    fn value_at(&self, z: Complex64, gap: f64) -> Complex64 {
        if self.quasistatic && self.polarization == Polarization::TM {
            let m = self.model;
            let wp2 = m.omega_p * m.omega_p;
            let b = 2.0 * oscillator(m, z) - wp2;
            return b * b - wp2 * wp2 * (-2.0 * self.k * gap).exp();
        }
        let p = self.parts(z, gap);
        let a2 = p.a * p.a;
        let big = a2 + p.b2;
        (big * big * (1.0 - p.e) * (1.0 - p.e) - 4.0 * a2 * p.b2 * (1.0 + p.e) * (1.0 + p.e)) * self.regularizer(z)
    }

    fn value(&self, z: Complex64) -> Complex64 {
        self.value_at(z, self.gap)
    }

    /// Single-interface factor `a² − b²` (or `2s − ω_p²` quasistatically for TM).
    fn interface(&self, z: Complex64) -> Complex64 {
        let m = self.model;
        if self.quasistatic && self.polarization == Polarization::TM {
            return 2.0 * oscillator(m, z) - m.omega_p * m.omega_p;
        }
        let p = self.parts(z, self.gap);
        let r = match self.polarization {
            Polarization::TE => oscillator(m, z),
            Polarization::TM => Complex64::new(1.0, 0.0),
        };
        (p.a * p.a - p.b2) * r
    }

    /// Whether a zero of the product belongs to the continued branch of `κ_m`.
    fn on_branch(&self, z: Complex64, reference: bool) -> bool {
        if self.quasistatic && self.polarization == Polarization::TM {
            return true;
        }
        let p = self.parts(z, self.gap);
        let plus = p.a + p.b;
        let minus = p.a - p.b;
        if reference {
            return plus.norm() <= minus.norm();
        }
        let v = plus * plus - minus * minus * p.e;
        v.norm() <= 1e-6 * (plus.norm_sqr() + minus.norm_sqr() * p.e.norm())
    }

    /// `L ∂ω/∂L` at a zero, from `∂N/∂L` and `∂N/∂ω`.
    fn gap_sensitivity(&self, z: Complex64) -> f64 {
        let h = 1e-6 * self.gap;
        let dl = (self.value_at(z, self.gap + h) - self.value_at(z, self.gap - h)) / (2.0 * h);
        let dz = 1e-7 * z.norm().max(1e-3);
        let dw = (self.value(z + dz) - self.value(z - dz)) / (2.0 * dz);
        if dw.norm() == 0.0 {
            return f64::INFINITY;
        }
        (dl / dw).norm() * self.gap
    }
}

/// Square root continued across the negative real axis from above, as `κ` is.
fn continued_sqrt(w: Complex64) -> Complex64 {
    let s = (-w).sqrt();
    Complex64::new(s.im, -s.re)
}

fn imaginary_axis_roots<F: Fn(Complex64) -> Complex64>(h: F, xi_max: f64) -> Vec<f64> {
    let g = |xi: f64| h(Complex64::new(0.0, -xi)).re;
    let mut roots = find_real_roots(g, 1e-12 * xi_max, xi_max, 4000);
    roots.retain(|&x| x > 0.0);
    roots
}

/// The quasistatic numerators are analytic across the real axis, so their regions may reach
/// into the upper half plane, which lossless mirrors need.
fn split_region(region: &Rectangle, quasistatic: bool) -> Result<Rectangle> {
    if (region.im_max > 0.0 && !quasistatic) || region.re_max <= 0.0 || region.re_min < 0.0 {
        return Err(Error::InvalidInput(
            "resonance regions must lie in the closed fourth quadrant".into(),
        ));
    }
    let re_min = region.re_min.max(1e-9 * region.diagonal());
    let im_max = if region.im_max > 0.0 {
        region.im_max
    } else {
        region.im_max.min(-1e-9 * region.diagonal())
    };
    Rectangle::new(re_min, region.re_max, region.im_min, im_max)
}

/// Zeros in the open quadrant, plus zeros on the negative imaginary axis when the region
/// touches it. `κ` is cut along that axis off the quasistatic limit, so the axis search is
/// quasistatic only.
fn search(
    h: impl Fn(Complex64) -> Complex64,
    region: &Rectangle,
    axis: bool,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let inner = split_region(region, axis)?;
    let tol = 1e-13 * region.diagonal();
    let pairs = find_complex_roots(&h, &inner, tol)?;
    let imaginary = if axis && region.re_min == 0.0 {
        imaginary_axis_roots(&h, -region.im_min)
    } else {
        Vec::new()
    };
    Ok((pairs, imaginary))
}

fn numerator<'a>(model: &'a DrudeLorentz, cavity: &PlanarCavity, channel: TransverseChannel, quasistatic: bool) -> Numerator<'a> {
    Numerator {
        model,
        polarization: channel.polarization,
        k: channel.k,
        gap: cavity.gap,
        quasistatic,
    }
}

/// Zeros of `G^p(ω, L)` in the fourth-quadrant `region`, plus eddy modes on the negative
/// imaginary axis when the region touches it. Zeros whose position does not depend on `L`
/// (`L|∂ω/∂L| < 10⁻⁸|ω|`) belong to a single interface and are dropped.
pub fn find_resonances(
    cavity: &PlanarCavity,
    channel: TransverseChannel,
    region: &Rectangle,
    quasistatic: bool,
) -> Result<ResonanceSet> {
    cavity.validate()?;
    let model = drude_bulk(cavity)?;
    let num = numerator(model, cavity, channel, quasistatic);
    let (mut pairs, mut imaginary) = search(|z| num.value(z), region, quasistatic)?;
    let keep = |z: Complex64| num.on_branch(z, false) && num.gap_sensitivity(z) >= 1e-8 * z.norm();
    pairs.retain(|&z| keep(z));
    imaginary.retain(|&xi| keep(Complex64::new(0.0, -xi)));
    pairs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ResonanceSet {
        channel,
        gap: Some(cavity.gap),
        complex_pairs: pairs,
        imaginary_modes: imaginary,
        region: *region,
        quasistatic,
        continuation_warning: model.gamma > 0.0,
    })
}

/// Resonances of the `L → ∞` reference: each single-interface zero counted twice.
pub fn reference_resonances(
    cavity: &PlanarCavity,
    channel: TransverseChannel,
    region: &Rectangle,
    quasistatic: bool,
) -> Result<ResonanceSet> {
    cavity.validate()?;
    let model = drude_bulk(cavity)?;
    let num = numerator(model, cavity, channel, quasistatic);
    let (mut pairs, mut imaginary) = search(|z| num.interface(z), region, quasistatic)?;
    pairs.retain(|&z| num.on_branch(z, true));
    imaginary.retain(|&xi| num.on_branch(Complex64::new(0.0, -xi), true));
    pairs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ResonanceSet {
        channel,
        gap: None,
        complex_pairs: pairs.iter().flat_map(|&z| [z, z]).collect(),
        imaginary_modes: imaginary.iter().flat_map(|&x| [x, x]).collect(),
        region: *region,
        quasistatic,
        continuation_warning: model.gamma > 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralizedSum {
    pub value: f64,
    /// `Im Σ'[ω_K]^L_∞`, which vanishes when no resonance was missed.
    pub sum_rule_residual: f64,
    pub scale: f64,
}

fn weighted_sums(set: &ResonanceSet, lambda: f64) -> (f64, f64, f64) {
    let mut energy = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut scale = 0.0;
    for (w, weight) in set.weighted() {
        let term = w - Complex64::new(0.0, 2.0 / PI) * w * (w / lambda).ln();
        energy.add(weight * term.re);
        im.add(weight * w.im);
        scale += weight * w.norm();
    }
    (energy.value(), im.value(), scale)
}

/// `E = (1/2) Re Σ'_K [ω_K − (2i/π) ω_K ln(ω_K/Λ)]` at `L` minus the reference, with the
/// sum rule `Im Σ'[ω_K]^L_∞ = 0` enforced to `1e−6` relative.
pub fn generalized_mode_sum(set_l: &ResonanceSet, set_ref: &ResonanceSet, lambda: f64) -> Result<GeneralizedSum> {
    generalized_mode_sum_with(set_l, set_ref, lambda, 1e-6)
}

pub fn generalized_mode_sum_with(
    set_l: &ResonanceSet,
    set_ref: &ResonanceSet,
    lambda: f64,
    sum_rule_tol: f64,
) -> Result<GeneralizedSum> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!("cutoff must be positive, got {lambda}")));
    }
    if set_l.channel != set_ref.channel {
        return Err(Error::InvalidInput("resonance sets belong to different channels".into()));
    }
    if set_l == set_ref {
        return Ok(GeneralizedSum {
            value: 0.0,
            sum_rule_residual: 0.0,
            scale: 0.0,
        });
    }
    let (e1, i1, s1) = weighted_sums(set_l, lambda);
    let (e2, i2, s2) = weighted_sums(set_ref, lambda);
    let residual = i1 - i2;
    let scale = s1 + s2;
    if residual.abs() > sum_rule_tol * scale {
        return Err(Error::SumRuleViolation {
            residual,
            tolerance: sum_rule_tol * scale,
        });
    }
    Ok(GeneralizedSum {
        value: 0.5 * (e1 - e2),
        sum_rule_residual: residual,
        scale,
    })
}

/// Quasistatic TM channel energy `(1/2π)∫₀^∞ dξ ln[1 − r(iξ)² e^{−2kL}]`, `r = (ε − 1)/(ε + 1)`.
pub fn quasistatic_channel_energy(model: &DrudeLorentz, k: f64, gap: f64) -> Result<f64> {
    let e = (-2.0 * k * gap).exp();
    let wp2 = model.omega_p * model.omega_p;
    let f = |xi: f64| {
        let s = xi * xi + model.gamma * xi + model.omega_0 * model.omega_0;
        let r = wp2 / (2.0 * s + wp2);
        (-r * r * e).ln_1p() / (2.0 * PI)
    };
    Ok(integrate_to_infinity(f, 0.0, QuadOptions::relative(1e-13).with_abs(1e-300))?.value)
}
