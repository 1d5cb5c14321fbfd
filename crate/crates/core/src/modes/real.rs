//! Real spectrum of the boxed cavity with discrete-bath slabs.
//!
//! `D = e^{κL}X² − Y²e^{−κL}` factorizes into `D₊ = e^{κL/2}X − Y e^{−κL/2}` and
//! `D₋ = e^{κL/2}X + Y e^{−κL/2}`, the modes even and odd under the gap reflection. Each factor
//! is the real part of a complex function whose phase winds monotonically with frequency, so an
//! adaptive grid on which that phase moves by less than `π/8` per step brackets every root.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::dielectric::{DielectricModel, DiscreteBath};
use crate::error::{Error, Result};
use crate::numerics::{brent, count_zeros, roots_on_grid, CompensatedSum, QuadOptions, Rectangle};
use crate::planar::{PlanarCavity, Polarization, Thickness, TransverseChannel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealModeOptions {
    pub omega_max: f64,
    /// Slab-phase periods kept below each permittivity pole, where modes accumulate.
    pub accumulation_periods: usize,
    pub max_phase_step: f64,
}

impl RealModeOptions {
    pub fn new(omega_max: f64) -> Self {
        RealModeOptions {
            omega_max,
            accumulation_periods: 200,
            max_phase_step: PI / 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSpectrum {
    pub channel: TransverseChannel,
    pub gap: f64,
    pub slab_thickness: f64,
    pub omega_max: f64,
    /// Roots of the even factor `D₊`.
    pub even: Vec<f64>,
    /// Roots of the odd factor `D₋/κ`.
    pub odd: Vec<f64>,
}

impl ModeSpectrum {
    pub fn frequencies(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.even.iter().chain(self.odd.iter()).copied().collect();
        all.sort_by(f64::total_cmp);
        all
    }

    pub fn len(&self) -> usize {
        self.even.len() + self.odd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Channel data for real-frequency evaluation of the two factors.
pub(crate) struct SlabChannel<'a> {
    pub bath: &'a DiscreteBath,
    pub polarization: Polarization,
    pub k: f64,
    pub d: f64,
    pub gap: f64,
}

/// Slab functions `C = cosh κ_m d`, `S = sinh(κ_m d)/κ_m` and `κ_m²S`, jointly scaled by a
/// positive factor when they grow exponentially.
struct Slab {
    c: f64,
    s: f64,
    r: f64,
}

fn slab(km2: f64, d: f64) -> Slab {
    if km2 > 0.0 {
        let km = km2.sqrt();
        let z = km * d;
        let t = if z > 20.0 { 1.0 } else { z.tanh() };
        let s = if z < 1e-8 { d } else { t / km };
        Slab { c: 1.0, s, r: km * t }
    } else if km2 < 0.0 {
        let qm = (-km2).sqrt();
        let phi = qm * d;
        let s = if phi < 1e-8 { d } else { phi.sin() / qm };
        Slab {
            c: phi.cos(),
            s,
            r: -qm * phi.sin(),
        }
    } else {
        Slab { c: 1.0, s: d, r: 0.0 }
    }
}

/// `sinh(x)/x`.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-5 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-5 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    /// Propagating in the gap, `ω > k`.
    Open,
    /// Evanescent in the gap, oscillatory in the slab.
    Guided,
    /// Evanescent in both; only TM with `ε < 0` has roots here.
    Surface,
}

impl<'a> SlabChannel<'a> {
    pub fn new(cavity: &'a PlanarCavity, channel: TransverseChannel) -> Result<Self> {
        let bath = match &cavity.mirror {
            DielectricModel::DiscreteBath(b) => b,
            _ => {
                return Err(Error::InvalidInput(
                    "real mode spectra need a discrete-bath mirror".into(),
                ))
            }
        };
        let d = match cavity.slab_thickness {
            Thickness::Finite(d) => d,
            Thickness::Bulk => {
                return Err(Error::InvalidInput("real mode spectra need a finite slab".into()))
            }
        };
        Ok(SlabChannel {
            bath,
            polarization: channel.polarization,
            k: channel.k,
            d,
            gap: cavity.gap,
        })
    }

    fn eps(&self, w: f64) -> f64 {
        self.bath.epsilon_real(w)
    }

    /// Slab phase `q_m d` where the slab field oscillates, zero otherwise.
    fn slab_phase(&self, w: f64) -> f64 {
        let v = self.eps(w) * w * w - self.k * self.k;
        if v > 0.0 {
            v.sqrt() * self.d
        } else {
            0.0
        }
    }

    /// Phase carriers `(Z₊, Z₋)` with `D₊ ∝ Re Z₊`, `D₋ ∝ Re Z₋` (guided) or the single
    /// `Z = e^{−iqL/2} X` with `D₊ ∝ Re Z`, `D₋ ∝ Im Z` (open).
    fn carriers(&self, region: Region, w: f64) -> (Complex64, Complex64) {
        let eps = self.eps(w);
        let k = self.k;
        let scale = 1.0 / (1.0 + eps.abs());
        match region {
            Region::Open => {
                let q = (w * w - k * k).max(0.0).sqrt();
                let sl = slab(k * k - eps * w * w, self.d);
                let (u, v) = match self.polarization {
                    Polarization::TE => (sl.r, q * sl.c),
                    Polarization::TM => (sl.c * scale, q * eps * sl.s * scale),
                };
                let a = 0.5 * q * self.gap;
                let z = Complex64::new(a.cos(), -a.sin()) * Complex64::new(u, -v);
                (z, z)
            }
            Region::Guided => {
                let kap = (k * k - w * w).max(0.0).sqrt();
                let qm = (eps * w * w - k * k).max(0.0).sqrt();
                let phi = qm * self.d;
                let a = 0.5 * kap * self.gap;
                let e2 = (-2.0 * a).exp();
                let ch = 0.5 * (1.0 + e2);
                let sh = 0.5 * (1.0 - e2);
                let shc = sinhc(a) * 0.5 * self.gap * (-a).exp();
                let (wp, wm) = match self.polarization {
                    Polarization::TE => (
                        Complex64::new(kap * sh, qm * ch),
                        Complex64::new(ch, qm * shc),
                    ),
                    Polarization::TM => (
                        Complex64::new(qm * ch, -eps * kap * sh) * scale,
                        Complex64::new(qm * shc, -eps * ch) * scale,
                    ),
                };
                let rot = Complex64::new(phi.cos(), phi.sin());
                (rot * wp, rot * wm)
            }
            Region::Surface => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        }
    }

    /// Real factors `(D₊, D₋/κ)` up to positive scale factors.
    fn factors(&self, region: Region, w: f64) -> (f64, f64) {
        match region {
            Region::Open => {
                let eps = self.eps(w);
                let k = self.k;
                let q = (w * w - k * k).max(0.0).sqrt();
                let sl = slab(k * k - eps * w * w, self.d);
                let scale = 1.0 / (1.0 + eps.abs());
                let a = 0.5 * q * self.gap;
                let sin_a_over_q = 0.5 * self.gap * sinc(a);
                // X = u − iv with v = q·v1.
                let (u, v1) = match self.polarization {
                    Polarization::TE => (sl.r, sl.c),
                    Polarization::TM => (sl.c * scale, eps * sl.s * scale),
                };
                let plus = u * a.cos() - q * v1 * a.sin();
                let minus = -(u * sin_a_over_q + v1 * a.cos());
                (plus, minus)
            }
            Region::Guided if self.polarization == Polarization::TM => {
                // The TM carriers vanish with q_m at the guided edge; divided by q_m they do not.
                let eps = self.eps(w);
                let k = self.k;
                let kap = (k * k - w * w).max(0.0).sqrt();
                let qm = (eps * w * w - k * k).max(0.0).sqrt();
                let phi = qm * self.d;
                let sin_over_q = self.d * sinc(phi);
                let a = 0.5 * kap * self.gap;
                let e2 = (-2.0 * a).exp();
                let ch = 0.5 * (1.0 + e2);
                let sh = 0.5 * (1.0 - e2);
                let shc = sinhc(a) * 0.5 * self.gap * (-a).exp();
                let scale = 1.0 / (1.0 + eps.abs());
                (
                    (ch * phi.cos() + eps * kap * sh * sin_over_q) * scale,
                    (shc * phi.cos() + eps * ch * sin_over_q) * scale,
                )
            }
            Region::Guided => {
                let (zp, zm) = self.carriers(region, w);
                (zp.re, zm.re)
            }
            Region::Surface => {
                let eps = self.eps(w);
                let k = self.k;
                let kap = (k * k - w * w).max(0.0).sqrt();
                let sl = slab(k * k - eps * w * w, self.d);
                let a = 0.5 * kap * self.gap;
                let e2 = (-2.0 * a).exp();
                let ch = 0.5 * (1.0 + e2);
                let sh = 0.5 * (1.0 - e2);
                let shc = sinhc(a) * 0.5 * self.gap * (-a).exp();
                let scale = 1.0 / (1.0 + eps.abs());
                match self.polarization {
                    Polarization::TE => (1.0, 1.0),
                    Polarization::TM => (
                        (eps * kap * sl.s * sh + sl.c * ch) * scale,
                        (eps * sl.s * ch + sl.c * shc) * scale,
                    ),
                }
            }
        }
    }

    /// Grid on `[a, b]` on which both carrier phases move by at most `max_step` per step.
    fn phase_grid(&self, region: Region, a: f64, b: f64, max_step: f64) -> Vec<f64> {
        let carriers = |w: f64| self.carriers(region, w);
        let moved = |x: (Complex64, Complex64), y: (Complex64, Complex64)| -> (f64, f64) {
            ((y.0 / x.0).arg(), (y.1 / x.1).arg())
        };
        // Slab and gap phases are known explicitly; bounding their steps rules out aliasing of
        // whole turns that the carrier arguments alone cannot see.
        let fast = |w: f64| self.slab_phase(w) + 0.5 * self.gap * (w * w - self.k * self.k).max(0.0).sqrt();
        let n0 = 16usize;
        let mut grid = Vec::new();
        let mut x0 = a;
        let mut v0 = carriers(a);
        grid.push(a);
        let mut stack: Vec<(f64, (Complex64, Complex64))> = Vec::new();
        for i in (1..=n0).rev() {
            let x = a + (b - a) * i as f64 / n0 as f64;
            stack.push((x, carriers(x)));
        }
        while let Some((x1, v1)) = stack.pop() {
            let xm = 0.5 * (x0 + x1);
            let tiny = x1 - x0 <= 4.0 * f64::EPSILON * x1.abs();
            if !tiny {
                let vm = carriers(xm);
                let d01 = moved(v0, v1);
                let d0m = moved(v0, vm);
                let dm1 = moved(vm, v1);
                let ok = |full: f64, h1: f64, h2: f64| {
                    h1.abs() <= max_step && h2.abs() <= max_step && (full - h1 - h2).abs() < 1e-6
                };
                let (f0, fm, f1) = (fast(x0), fast(xm), fast(x1));
                let slow = (fm - f0).abs() <= max_step && (f1 - fm).abs() <= max_step;
                if !(slow && ok(d01.0, d0m.0, dm1.0) && ok(d01.1, d0m.1, dm1.1)) {
                    stack.push((x1, v1));
                    stack.push((xm, vm));
                    continue;
                }
                grid.push(xm);
            }
            grid.push(x1);
            x0 = x1;
            v0 = v1;
        }
        grid
    }

    /// Roots of both factors on `[a, b]` inside one region.
    fn region_roots(&self, region: Region, a: f64, b: f64, opts: &RealModeOptions, even: &mut Vec<f64>, odd: &mut Vec<f64>) {
        if !(b > a) {
            return;
        }
        let grid = match region {
            Region::Surface => {
                if self.polarization == Polarization::TE {
                    return;
                }
                surface_grid(a, b)
            }
            _ => self.phase_grid(region, a, b, opts.max_phase_step),
        };
        let mut fp = |w: f64| self.factors(region, w).0;
        even.extend(roots_on_grid(&mut fp, &grid));
        let mut fm = |w: f64| self.factors(region, w).1;
        odd.extend(roots_on_grid(&mut fm, &grid));
    }

    /// Point below `pole` where the slab phase reaches `(n + ½)π`.
    fn accumulation_cut(&self, lo: f64, pole: f64, periods: usize) -> f64 {
        let target = (periods as f64 + 0.5) * PI;
        let mut f = |w: f64| self.slab_phase(w) - target;
        let b = pole * (1.0 - 4.0 * f64::EPSILON);
        let fb = f(b);
        if fb <= 0.0 {
            return b;
        }
        // Bisect from the pole downwards until the phase falls below the target.
        let mut a = 0.5 * (lo + pole);
        let mut gap = pole - a;
        while f(a) >= 0.0 && gap > 4.0 * f64::EPSILON * pole {
            gap *= 0.5;
            a = pole - gap;
            if f(a) < 0.0 {
                break;
            }
            a = lo.max(pole - 2.0 * gap);
            if f(a) < 0.0 {
                break;
            }
        }
        let fa = f(a);
        if fa >= 0.0 {
            return a;
        }
        brent(&mut f, a, b, fa, fb)
    }

    /// Point in `(a, b)` where `εω² = k²`, assuming it is crossed upwards once.
    fn guided_edge(&self, a: f64, b: f64) -> Option<f64> {
        let k2 = self.k * self.k;
        let mut f = |w: f64| self.eps(w) * w * w - k2;
        let fa = f(a);
        let fb = f(b);
        if fa >= 0.0 {
            return Some(a);
        }
        if fb <= 0.0 {
            return None;
        }
        Some(brent(&mut f, a, b, fa, fb))
    }

    fn epsilon_zero(&self, a: f64, b: f64) -> Option<f64> {
        let mut f = |w: f64| self.eps(w);
        let fa = f(a);
        let fb = f(b);
        if fa >= 0.0 {
            return None;
        }
        if fb < 0.0 {
            return Some(b);
        }
        Some(brent(&mut f, a, b, fa, fb))
    }

    pub fn spectrum(&self, opts: &RealModeOptions) -> Result<(Vec<f64>, Vec<f64>)> {
        if !(opts.omega_max > 0.0) {
            return Err(Error::InvalidInput("omega_max must be positive".into()));
        }
        let poles: Vec<f64> = self.bath.epsilon_poles().into_iter().filter(|&p| p < opts.omega_max).collect();
        let mut even = Vec::new();
        let mut odd = Vec::new();
        let mut lo = 0.0;
        for seg in 0..=poles.len() {
            let (hi, at_pole) = match poles.get(seg) {
                Some(&p) => (p, true),
                None => (opts.omega_max, false),
            };
            let start = if lo == 0.0 { 1e-12 * hi } else { lo * (1.0 + 1e-13) };
            let end = if at_pole {
self.accumulation_cut(start, hi, opts.accumulation_periods)
            } else {
                hi
            };
            if end > start {
                self.segment_roots(start, end, opts, &mut even, &mut odd);
            }
            lo = hi;
        }
        even.sort_by(f64::total_cmp);
        odd.sort_by(f64::total_cmp);
        even.dedup();
        odd.dedup();
        Ok((even, odd))
    }

    fn segment_roots(&self, start: f64, end: f64, opts: &RealModeOptions, even: &mut Vec<f64>, odd: &mut Vec<f64>) {
        let k = self.k;
        let below = end.min(k);
        if below > start {
            match self.guided_edge(start, below) {
                Some(edge) => {
                    if let Some(z) = self.epsilon_zero(start, edge) {
                        self.region_roots(Region::Surface, start, z, opts, even, odd);
                    }
                    self.region_roots(Region::Guided, edge, below, opts, even, odd);
                }
                None => {
                    if let Some(z) = self.epsilon_zero(start, below) {
                        self.region_roots(Region::Surface, start, z, opts, even, odd);
                    }
                }
            }
        }
        let open_start = start.max(k);
        if end > open_start {
            self.region_roots(Region::Open, open_start, end, opts, even, odd);
        }
    }
}

/// Scan grid for the surface region, logarithmic towards the lower end where `ε → −∞`.
fn surface_grid(a: f64, b: f64) -> Vec<f64> {
    let mut g: Vec<f64> = Vec::with_capacity(800);
    let span = b - a;
    for i in 0..=400 {
        g.push(a + span * i as f64 / 400.0);
    }
    for i in 0..400 {
        let s = -14.0 + 14.0 * i as f64 / 400.0;
        g.push(a + span * 10f64.powf(s));
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// All real zeros of `D^p_N(ω)` in `(0, ω_max)` for a discrete-bath cavity, truncated below each
/// permittivity pole after `accumulation_periods` slab-phase periods.
pub fn real_mode_spectrum(cavity: &PlanarCavity, channel: TransverseChannel, opts: &RealModeOptions) -> Result<ModeSpectrum> {
    cavity.validate()?;
    let sc = SlabChannel::new(cavity, channel)?;
    let (even, odd) = sc.spectrum(opts)?;
    Ok(ModeSpectrum {
        channel,
        gap: cavity.gap,
        slab_thickness: sc.d,
        omega_max: opts.omega_max,
        even,
        odd,
    })
}

/// Smooth cutoff `χ(x) = e^{−x} Σ_{j<order} x^j/j!`, equal to `1 − O(x^order)` at small `x`.
pub fn cutoff(x: f64, order: u32) -> f64 {
    let mut term = 1.0;
    let mut s = 1.0;
    for j in 1..order {
        term *= x / j as f64;
        s += term;
    }
    (-x).exp() * s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeSumOptions {
    /// Cutoff frequency `Λ` of the smooth regulator.
    pub cutoff: f64,
    pub cutoff_order: u32,
    pub accumulation_periods: usize,
}

impl ModeSumOptions {
    /// `Λ = 15(k + 1/L)`, order-4 regulator.
    pub fn for_channel(gap: f64, k: f64) -> Self {
        ModeSumOptions {
            cutoff: 15.0 * (k + 1.0 / gap),
            cutoff_order: 4,
            accumulation_periods: 200,
        }
    }

    /// `Λ = factor·(k + 1/L)`, order-4 regulator.
    pub fn with_cutoff_factor(gap: f64, k: f64, factor: f64) -> Self {
        ModeSumOptions {
            cutoff: factor * (k + 1.0 / gap),
            ..Self::for_channel(gap, k)
        }
    }

    pub fn omega_max(&self) -> f64 {
        50.0 * self.cutoff
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSumResult {
    pub value: f64,
    pub modes_at_gap: usize,
    pub modes_at_reference: usize,
    pub vacuum_density: f64,
    pub options: ModeSumOptions,
}

/// Vacuum energy per unit gap length of one channel under the regulator,
/// `V = ∫₀^∞ dq/(2π) ω χ(ω/Λ)` with `ω = sqrt(k² + q²)`.
pub fn vacuum_density(k: f64, opts: &ModeSumOptions) -> Result<f64> {
    let lam = opts.cutoff;
    let f = |q: f64| {
        let w = (k * k + q * q).sqrt();
        w * cutoff(w / lam, opts.cutoff_order) / (2.0 * PI)
    };
    let breaks = [0.0, 0.5 * lam, lam, 3.0 * lam, 10.0 * lam, 30.0 * lam, 80.0 * lam];
    let r = crate::numerics::integrate_with_breaks(f, &breaks, QuadOptions::relative(1e-15).with_abs(1e-300).with_budget(20000))
        .or_else(|_| crate::numerics::integrate_with_breaks(f, &breaks, QuadOptions::relative(1e-13)))?;
    Ok(r.value)
}

/// Regulated zero-point sum `Σ ω_n/2 · χ(ω_n/Λ)` over a spectrum.
pub fn zero_point_sum(spectrum: &ModeSpectrum, opts: &ModeSumOptions) -> f64 {
    let mut acc = CompensatedSum::new();
    for &w in spectrum.even.iter().chain(spectrum.odd.iter()) {
        acc.add(0.5 * w * cutoff(w / opts.cutoff, opts.cutoff_order));
    }
    acc.value()
}

/// Casimir's sum over modes for one channel: the regulated zero-point energy at gap `L` minus the
/// same at `L_ref`, with the bulk term `(L − L_ref)·V` of the extra vacuum removed.
pub fn sum_over_modes_energy(
    cavity: &PlanarCavity,
    channel: TransverseChannel,
    l_ref: f64,
    opts: &ModeSumOptions,
) -> Result<ModeSumResult> {
    if l_ref == cavity.gap {
        return Ok(ModeSumResult {
            value: 0.0,
            modes_at_gap: 0,
            modes_at_reference: 0,
            vacuum_density: 0.0,
            options: *opts,
        });
    }
    let mode_opts = RealModeOptions {
        omega_max: opts.omega_max(),
        accumulation_periods: opts.accumulation_periods,
        max_phase_step: PI / 8.0,
    };
    let at_gap = real_mode_spectrum(cavity, channel, &mode_opts)?;
    let at_ref = real_mode_spectrum(&cavity.with_gap(l_ref), channel, &mode_opts)?;
    let v = vacuum_density(channel.k, opts)?;
    let value = zero_point_sum(&at_gap, opts) - zero_point_sum(&at_ref, opts) - (cavity.gap - l_ref) * v;
    Ok(ModeSumResult {
        value,
        modes_at_gap: at_gap.len(),
        modes_at_reference: at_ref.len(),
        vacuum_density: v,
        options: *opts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KIntegrationOptions {
    /// Panel edges in units of `1/L`; the last one is the transverse cutoff.
    pub breaks: Vec<f64>,
    pub cutoff_factor: f64,
    pub threads: usize,
}

impl Default for KIntegrationOptions {
    fn default() -> Self {
        KIntegrationOptions {
            breaks: vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 14.0],
            cutoff_factor: 10.0,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRouteEnergy {
    /// `E(L) − E(L_ref)` per unit area.
    pub value: f64,
    pub te: f64,
    pub tm: f64,
    pub channels: usize,
    pub modes: usize,
}

/// Sum-over-modes energy difference per unit area, `Σ_p ∫ k dk/(2π) ΔE_p(k)`, with 10-point
/// Gauss rules on each panel. Channels are spread over `threads` workers and reduced in a fixed
/// order, so the result does not depend on the thread count.
pub fn mode_route_energy(cavity: &PlanarCavity, l_ref: f64, opts: &KIntegrationOptions) -> Result<ModeRouteEnergy> {
    cavity.validate()?;
    if opts.breaks.len() < 2 || opts.breaks.windows(2).any(|w| !(w[1] > w[0])) || opts.breaks[0] < 0.0 {
        return Err(Error::InvalidInput("k breaks must be increasing and start at >= 0".into()));
    }
    let l = cavity.gap;
    let mut nodes = Vec::new();
    for w in opts.breaks.windows(2) {
        nodes.extend(crate::numerics::gauss_legendre_panels(w[0] / l, w[1] / l, 1));
    }
    let tasks: Vec<(Polarization, f64, f64)> = Polarization::BOTH
        .iter()
        .flat_map(|&p| nodes.iter().map(move |&(k, w)| (p, k, w)))
        .collect();
    let run = |&(p, k, _): &(Polarization, f64, f64)| -> Result<ModeSumResult> {
        let channel = TransverseChannel::new(p, k)?;
        sum_over_modes_energy(cavity, channel, l_ref, &ModeSumOptions::with_cutoff_factor(l, k, opts.cutoff_factor))
    };
    let threads = opts.threads.max(1).min(tasks.len());
    let results: Vec<Result<ModeSumResult>> = if threads == 1 {
        tasks.iter().map(run).collect()
    } else {
        let chunk = tasks.len().div_ceil(threads);
        std::thread::scope(|scope| {
            let handles: Vec<_> = tasks
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(run).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("mode worker panicked")).collect()
        })
    };
    let (mut te, mut tm) = (CompensatedSum::new(), CompensatedSum::new());
    let mut modes = 0;
    for (&(p, k, w), r) in tasks.iter().zip(results) {
        let r = r?;
        modes += r.modes_at_gap + r.modes_at_reference;
        let term = w * k * r.value / (2.0 * PI);
        match p {
            Polarization::TE => te.add(term),
            Polarization::TM => tm.add(term),
        }
    }
    let (te, tm) = (te.value(), tm.value());
    Ok(ModeRouteEnergy {
        value: te + tm,
        te,
        tm,
        channels: tasks.len(),
        modes,
    })
}

/// Argument-principle count of zeros of `κD` inside a thin rectangle around the real interval
/// `[a, b]`, which must avoid permittivity poles. `D` is multiplied by `cosh²(κ_m d)` (TE) or
/// `(sinh(κ_m d)/κ_m)²` (TM), which removes the slab resonance poles and adds no zeros.
pub fn count_modes_in(cavity: &PlanarCavity, channel: TransverseChannel, a: f64, b: f64, half_height: f64) -> Result<i64> {
    let d = match cavity.slab_thickness {
        Thickness::Finite(d) => d,
        Thickness::Bulk => return Err(Error::InvalidInput("mode counts need a finite slab".into())),
    };
    let rect = Rectangle::new(a, b, -half_height, half_height)?;
    let k = channel.k;
    let h = |w: Complex64| {
        let Ok(eps) = cavity.mirror.epsilon(w) else {
            return Complex64::new(f64::NAN, f64::NAN);
        };
        let km = (k * k - eps * w * w).sqrt();
        let x = km * d;
        let clear = match channel.polarization {
            Polarization::TE => x.cosh(),
            Polarization::TM if x.norm() < 1e-8 => Complex64::new(d, 0.0),
            Polarization::TM => x.sinh() / km,
        };
        crate::planar::dispersion_d(cavity, channel, w)
            .map(|v| v * crate::planar::kappa(k, w) * clear * clear)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    count_zeros(h, &rect, 256)
}

/// Compares the roots of `spectrum` inside `[a, b]` with the argument-principle count there and
/// returns that count, or `CountMismatch` when the scan missed or duplicated roots.
pub fn audit_spectrum(cavity: &PlanarCavity, spectrum: &ModeSpectrum, a: f64, b: f64) -> Result<usize> {
    let half_height = 1e-3 * (b - a);
    let expected = count_modes_in(cavity, spectrum.channel, a, b, half_height)?;
    let found = spectrum.frequencies().iter().filter(|&&w| w > a && w < b).count();
    if expected != found as i64 {
        return Err(Error::CountMismatch {
            found,
            expected,
            suggested_scan: 4 * (expected.max(found as i64) as usize + 16),
        });
    }
    Ok(found)
}
