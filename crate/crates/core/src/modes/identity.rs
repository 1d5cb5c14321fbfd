//! Numerical check of the sum-over-poles identity behind the generalized mode sum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{
    integrate_oscillatory_tail, integrate_principal_value, integrate_to_infinity, integrate_with_breaks,
    QuadOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TestFunction {
    /// `f(ω) = (ω/2) e^{−ω/Ω}`.
    ExponentialCutoff { scale: f64 },
    /// `f(ω) = (ω/2) Ω²/(ω + Ω)²`.
    Rational { scale: f64 },
}

impl TestFunction {
    pub fn scale(&self) -> f64 {
        match *self {
            TestFunction::ExponentialCutoff { scale } | TestFunction::Rational { scale } => scale,
        }
    }

    pub fn with_scale(&self, scale: f64) -> TestFunction {
        match self {
            TestFunction::ExponentialCutoff { .. } => TestFunction::ExponentialCutoff { scale },
            TestFunction::Rational { .. } => TestFunction::Rational { scale },
        }
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        match *self {
            TestFunction::ExponentialCutoff { scale } => 0.5 * w * (-w / scale).exp(),
            TestFunction::Rational { scale } => 0.5 * w * scale * scale / ((w + scale) * (w + scale)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCase {
    pub omega_0: Complex64,
    pub f_spec: TestFunction,
    pub tolerance: f64,
}

impl IdentityCase {
    /// Case with the cutoff scale fixed at `10|ω₀|`.
    pub fn exponential(omega_0: Complex64) -> Self {
        IdentityCase {
            omega_0,
            f_spec: TestFunction::ExponentialCutoff {
                scale: 10.0 * omega_0.norm(),
            },
            tolerance: 1e-7,
        }
    }

    pub fn rational(omega_0: Complex64) -> Self {
        IdentityCase {
            omega_0,
            f_spec: TestFunction::Rational {
                scale: 10.0 * omega_0.norm(),
            },
            tolerance: 1e-7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.omega_0;
        if !(w.re >= 0.0) || !(w.im <= 0.0) || w.norm() == 0.0 {
            return Err(Error::InvalidInput(format!(
                "omega_0 must be nonzero with Re >= 0 and Im <= 0, got {w}"
            )));
        }
        if !(self.f_spec.scale() > 0.0) || !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput("scale and tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub principal_value: bool,
}

/// `−(1/π)∫₀^∞ f(ω) Im[1/(ω − ω₀) + 1/(ω + ω₀*)] dω`; equal to `f(ω₀)` for real `ω₀`.
fn lhs(case: &IdentityCase, tol: f64) -> Result<f64> {
    let a = case.omega_0.re;
    let b = -case.omega_0.im;
    let f = case.f_spec;
    if b == 0.0 {
        return Ok(f.eval(Complex64::new(a, 0.0)).re);
    }
    let g = |w: f64| {
        let fw = f.eval(Complex64::new(w, 0.0)).re;
        b / PI * fw * (1.0 / ((w - a) * (w - a) + b * b) + 1.0 / ((w + a) * (w + a) + b * b))
    };
    let mut breaks = vec![0.0];
    for t in [-30.0, -3.0, -1.0, 0.0, 1.0, 3.0, 30.0] {
        let x = a + t * b;
        if x > 0.0 {
            breaks.push(x);
        }
    }
    let end = (a + 30.0 * b).max(f.scale());
    breaks.push(end);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let opts = QuadOptions::new(tol);
    let body = integrate_with_breaks(g, &breaks, opts)?.value;
    let tail = integrate_to_infinity(g, end, opts)?.value;
    Ok(body + tail)
}

/// `∫₀^∞ Im f(iξ) K(ξ) dξ` split into a finite part handled by `head` and an oscillatory or
/// algebraically decaying tail.
fn axis_integral(case: &IdentityCase, kernel: impl Fn(f64) -> f64 + Copy, head_end: f64, tol: f64) -> Result<f64> {
    let f = case.f_spec;
    let g = move |xi: f64| f.eval(Complex64::new(0.0, xi)).im * kernel(xi);
    match f {
        TestFunction::ExponentialCutoff { scale } => {
            Ok(integrate_oscillatory_tail(g, head_end, PI * scale, tol)?.value)
        }
        TestFunction::Rational { .. } => Ok(integrate_to_infinity(g, head_end, QuadOptions::new(tol))?.value),
    }
}

/// Start of the tail, at least `4|ω₀|`; for the exponential family a zero of `cos(ξ/Ω)`, where
/// `Im f(iξ) = (ξ/2)cos(ξ/Ω)` changes sign every `πΩ`.
fn tail_start(case: &IdentityCase) -> f64 {
    let w = case.omega_0.norm();
    match case.f_spec {
        TestFunction::ExponentialCutoff { scale } => scale * (0.5 * PI + ((4.0 * w / scale - 0.5 * PI) / PI).ceil().max(0.0) * PI),
        TestFunction::Rational { .. } => 4.0 * w,
    }
}

/// `Re f(ω₀) + (1/π)∫₀^∞ Im f(iξ) Re[2iω₀/(ξ² + ω₀²)] dξ`, as a principal value when
/// `Re ω₀ = 0`.
fn rhs(case: &IdentityCase, tol: f64) -> Result<(f64, bool)> {
    let w0 = case.omega_0;
    let f = case.f_spec;
    let residue = f.eval(w0).re;
    let end = tail_start(case);
    let pv = w0.re == 0.0;
    let im_f = move |xi: f64| f.eval(Complex64::new(0.0, xi)).im;
    let head = if pv {
        let xi0 = -w0.im;
        let main = integrate_principal_value(|xi| im_f(xi) / PI, xi0, end, tol)?.value;
        let kernel = move |xi: f64| 2.0 * xi0 / (xi * xi - xi0 * xi0) / PI;
        main + axis_integral(case, kernel, end, tol)?
    } else {
        let kernel = move |xi: f64| {
            let z = Complex64::new(0.0, 2.0) * w0 / (xi * xi + w0 * w0);
            z.re / PI
        };
        let b = -w0.im;
        let a = w0.re;
        let mut breaks = vec![0.0];
        for x in [0.5 * a, a, 2.0 * a, b, a.hypot(b)] {
            if x > 0.0 && x < end {
                breaks.push(x);
            }
        }
        breaks.push(end);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let g = move |xi: f64| im_f(xi) * kernel(xi);
        let body = integrate_with_breaks(g, &breaks, QuadOptions::new(tol))?.value;
        body + axis_integral(case, kernel, end, tol)?
    };
    Ok((residue + head, pv))
}

/// Both sides of the single-pole sum-over-poles identity and their difference.
pub fn identity_check(case: &IdentityCase) -> Result<IdentityRecord> {
    case.validate()?;
    let tol = 1e-3 * case.tolerance;
    let lhs = lhs(case, tol)?;
    let (rhs, principal_value) = rhs(case, tol)?;
    let gap = (lhs - rhs).abs();
    if !gap.is_finite() {
        return Err(Error::NonConvergence {
            routine: "identity_check",
            detail: format!("non-finite sides lhs={lhs}, rhs={rhs}"),
        });
    }
    Ok(IdentityRecord {
        lhs,
        rhs,
        gap,
        principal_value,
    })
}
