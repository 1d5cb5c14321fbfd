use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rectangle {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max) || !(im_min < im_max) {
            return Err(Error::InvalidInput(format!(
                "degenerate rectangle [{re_min}, {re_max}]x[{im_min}, {im_max}]"
            )));
        }
        Ok(Rectangle {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn diagonal(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, z: Complex64, margin: f64) -> bool {
        z.re >= self.re_min - margin
            && z.re <= self.re_max + margin
            && z.im >= self.im_min - margin
            && z.im <= self.im_max + margin
    }

    pub fn dilate(&self, by: f64) -> Rectangle {
        Rectangle {
            re_min: self.re_min - by,
            re_max: self.re_max + by,
            im_min: self.im_min - by,
            im_max: self.im_max + by,
        }
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn split(&self, fraction: f64) -> (Rectangle, Rectangle) {
        let mut lo = *self;
        let mut hi = *self;
        if self.re_max - self.re_min >= self.im_max - self.im_min {
            let cut = self.re_min + fraction * (self.re_max - self.re_min);
            lo.re_max = cut;
            hi.re_min = cut;
        } else {
            let cut = self.im_min + fraction * (self.im_max - self.im_min);
            lo.im_max = cut;
            hi.im_min = cut;
        }
        (lo, hi)
    }
}

/// Winding number and first moment `(1/2πi)∮ z dlog h` of `h` along the boundary.
#[derive(Debug, Clone, Copy)]
struct Walk {
    winding: f64,
    moment: Complex64,
}

const MAX_DEPTH: u32 = 40;

fn walk_segment<H: Fn(Complex64) -> Complex64>(
    h: &H,
    za: Complex64,
    ha: Complex64,
    zb: Complex64,
    hb: Complex64,
    depth: u32,
    acc: &mut (f64, Complex64),
) -> Result<()> {
    let ratio = hb / ha;
    let darg = ratio.arg();
    // On the coarse samples also look at the midpoint: a pair of zeros close to one segment
    // turns the phase forth and back and leaves the endpoint ratio unchanged.
    let hidden = depth == 0 && {
        let hm = eval(h, 0.5 * (za + zb))?;
        (hm / ha).arg().abs() > PI / 4.0 || (hb / hm).arg().abs() > PI / 4.0
    };
    if darg.abs() > PI / 4.0 || hidden {
        if depth >= MAX_DEPTH {
            return Err(Error::BoundaryZero {
                min_modulus: ha.norm().min(hb.norm()),
            });
        }
        let zm = 0.5 * (za + zb);
        let hm = eval(h, zm)?;
        walk_segment(h, za, ha, zm, hm, depth + 1, acc)?;
        return walk_segment(h, zm, hm, zb, hb, depth + 1, acc);
    }
    acc.0 += darg;
    let dlog = Complex64::new(ratio.norm().ln(), darg);
    acc.1 += 0.5 * (za + zb) * dlog;
    Ok(())
}

fn eval<H: Fn(Complex64) -> Complex64>(h: &H, z: Complex64) -> Result<Complex64> {
    let v = h(z);
    if !v.re.is_finite() || !v.im.is_finite() || v.norm() == 0.0 {
        return Err(Error::BoundaryZero { min_modulus: v.norm() });
    }
    Ok(v)
}

fn walk<H: Fn(Complex64) -> Complex64>(h: &H, rect: &Rectangle, samples_per_side: usize) -> Result<Walk> {
    let n = samples_per_side.max(4);
    let corners = rect.corners();
    let mut acc = (0.0, Complex64::new(0.0, 0.0));
    let mut first = None;
    let mut prev: Option<(Complex64, Complex64)> = None;
    let mut min_mod = f64::INFINITY;
    let mut max_mod: f64 = 0.0;
    for side in 0..4 {
        let a = corners[side];
        let b = corners[(side + 1) % 4];
        for j in 0..n {
            let z = a + (b - a) * (j as f64 / n as f64);
            let v = eval(h, z)?;
            min_mod = min_mod.min(v.norm());
            max_mod = max_mod.max(v.norm());
            if let Some((zp, vp)) = prev {
                walk_segment(h, zp, vp, z, v, 0, &mut acc)?;
            } else {
                first = Some((z, v));
            }
            prev = Some((z, v));
        }
    }
    let (z0, v0) = first.expect("boundary sampled");
    let (zp, vp) = prev.expect("boundary sampled");
    walk_segment(h, zp, vp, z0, v0, 0, &mut acc)?;
    if min_mod < 1e-13 * max_mod {
        return Err(Error::BoundaryZero { min_modulus: min_mod });
    }
    Ok(Walk {
        winding: acc.0 / (2.0 * PI),
        moment: acc.1 / Complex64::new(0.0, 2.0 * PI),
    })
}

fn rounded_winding(w: &Walk) -> Result<i64> {
    let n = w.winding.round();
    if (w.winding - n).abs() > 0.05 {
        return Err(Error::BoundaryZero { min_modulus: 0.0 });
    }
    Ok(n as i64)
}

/// Number of zeros of `h` inside `region` by the argument principle; the region is dilated by
/// 1e-6 of its diagonal and retried once when a zero sits on the boundary.
pub fn count_zeros<H: Fn(Complex64) -> Complex64>(
    h: H,
    region: &Rectangle,
    samples_per_side: usize,
) -> Result<i64> {
    match walk(&h, region, samples_per_side).and_then(|w| rounded_winding(&w)) {
        Ok(n) => Ok(n),
        Err(Error::BoundaryZero { .. }) => {
            let grown = region.dilate(1e-6 * region.diagonal());
            walk(&h, &grown, samples_per_side).and_then(|w| rounded_winding(&w))
        }
        Err(e) => Err(e),
    }
}

fn newton<H: Fn(Complex64) -> Complex64>(h: &H, mut z: Complex64, tol: f64) -> Option<Complex64> {
    for _ in 0..60 {
        let step = (1e-7 * z.norm()).max(1e-7);
        let d = (h(z + step) - h(z - step)) / (2.0 * step);
        let v = h(z);
        if v.norm() == 0.0 {
            return Some(z);
        }
        if d.norm() == 0.0 || !d.re.is_finite() || !d.im.is_finite() {
            return None;
        }
        let dz = v / d;
        z -= dz;
        if !z.re.is_finite() || !z.im.is_finite() {
            return None;
        }
        if dz.norm() <= 0.01 * tol || dz.norm() <= 4.0 * f64::EPSILON * z.norm() {
            return Some(z);
        }
    }
    None
}

fn subdivide<H: Fn(Complex64) -> Complex64>(
    h: &H,
    rect: &Rectangle,
    count: i64,
    moment: Complex64,
    tol: f64,
    samples: usize,
    depth: u32,
    out: &mut Vec<Complex64>,
) -> Result<()> {
    if count <= 0 {
        return Ok(());
    }
    if count == 1 {
        let guess = if rect.contains(moment, 0.0) { moment } else { rect.center() };
        if let Some(z) = newton(h, guess, tol) {
            if rect.contains(z, 1e-9 * rect.diagonal()) {
                out.push(z);
                return Ok(());
            }
        }
    }
    if rect.diagonal() < tol || depth > 60 {
        for _ in 0..count {
            out.push(moment / count as f64);
        }
        return Ok(());
    }
    let fractions = [0.5, 0.4731, 0.5419, 0.4123, 0.5877];
    for f in fractions {
        let (lo, hi) = rect.split(f);
        let wl = match walk(h, &lo, samples) {
            Ok(w) => w,
            Err(Error::BoundaryZero { .. }) => continue,
            Err(e) => return Err(e),
        };
        let wh = match walk(h, &hi, samples) {
            Ok(w) => w,
            Err(Error::BoundaryZero { .. }) => continue,
            Err(e) => return Err(e),
        };
        let (nl, nh) = match (rounded_winding(&wl), rounded_winding(&wh)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        if nl + nh != count {
            continue;
        }
        subdivide(h, &lo, nl, wl.moment, tol, samples, depth + 1, out)?;
        return subdivide(h, &hi, nh, wh.moment, tol, samples, depth + 1, out);
    }
    Err(Error::NonConvergence {
        routine: "find_complex_roots",
        detail: format!("could not split rectangle {rect:?} holding {count} zeros"),
    })
}

/// All zeros of `h` in `region` by recursive bisection with argument-principle counts, each
/// polished by Newton iteration with a central-difference derivative.
pub fn find_complex_roots<H: Fn(Complex64) -> Complex64>(
    h: H,
    region: &Rectangle,
    tol: f64,
) -> Result<Vec<Complex64>> {
    let samples = 32;
    let (rect, w) = match walk(&h, region, samples) {
        Ok(w) => (*region, w),
        Err(Error::BoundaryZero { .. }) => {
            let grown = region.dilate(1e-6 * region.diagonal());
            let w = walk(&h, &grown, samples)?;
            (grown, w)
        }
        Err(e) => return Err(e),
    };
    let count = rounded_winding(&w)?;
    let mut roots = Vec::new();
    subdivide(&h, &rect, count, w.moment, tol, samples, 0, &mut roots)?;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut merged: Vec<Complex64> = Vec::with_capacity(roots.len());
    for z in roots {
        if merged.iter().all(|m| (m - z).norm() > 10.0 * tol) {
            merged.push(z);
        }
    }
    Ok(merged)
}
