use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Scalar types the adaptive rules can integrate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Default
{
    fn modulus(&self) -> f64;
}

impl QuadValue for f64 {
    fn modulus(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn modulus(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl QuadOptions {
    pub fn new(tol: f64) -> Self {
        QuadOptions {
            abs_tol: tol,
            rel_tol: tol,
            max_intervals: 4000,
        }
    }

    pub fn relative(tol: f64) -> Self {
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: tol,
            max_intervals: 4000,
        }
    }

    pub fn with_abs(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_budget(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals;
        self
    }
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980508628,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// One 21-point Kronrod panel with its embedded 10-point Gauss estimate.
pub fn kronrod21<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = T::default();
    for j in 0..10 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    (k * h, (k - g).modulus() * h.abs())
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss-Kronrod integration over `[a, b]` with optional interior breakpoints.
pub fn integrate_with_breaks<T, F>(
    mut f: F,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if breaks.len() < 2 {
        return Err(Error::InvalidInput("integration needs two endpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (value, err) = kronrod21(&mut f, w[0], w[1]);
        evaluations += 21;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            err,
        });
    }
    loop {
        let mut total = T::default();
        let mut err = 0.0;
        for p in heap.iter() {
            total = total + p.value;
            err += p.err;
        }
        let target = opts.abs_tol.max(opts.rel_tol * total.modulus());
        if err <= target {
            return Ok(QuadratureResult {
                value: total,
                abs_error_estimate: err,
                evaluations,
            });
        }
        if !err.is_finite() {
            return Err(Error::NonConvergence {
                routine: "integrate",
                detail: "integrand produced a non-finite value".into(),
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if heap.len() + 2 > opts.max_intervals || mid == worst.a || mid == worst.b {
            return Err(Error::NonConvergence {
                routine: "integrate",
                detail: format!(
                    "error estimate {err:e} above target {target:e} after {} panels",
                    heap.len() + 1
                ),
            });
        }
        let (v1, e1) = kronrod21(&mut f, worst.a, mid);
        let (v2, e2) = kronrod21(&mut f, mid, worst.b);
        evaluations += 42;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
}

pub fn integrate<T, F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    integrate_with_breaks(f, &[a, b], opts)
}

/// Integral over `[a, ∞)` through the map `x = a + t/(1 − t)`.
pub fn integrate_to_infinity<T, F>(mut f: F, a: f64, opts: QuadOptions) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let g = |t: f64| {
        let u = 1.0 - t;
        let x = a + t / u;
        let v = f(x);
        if v.modulus() == 0.0 {
            T::default()
        } else {
            v * (1.0 / (u * u))
        }
    };
    integrate_with_breaks(g, &[0.0, 0.5, 1.0], opts)
}

/// `∫₀^∞ f` with `|error| ≤ tol·max(1, |value|)`.
pub fn integrate_semi_infinite<F>(f: F, tol: f64) -> Result<QuadratureResult<f64>>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    integrate_to_infinity(f, 0.0, QuadOptions::new(tol))
}

/// Principal value of `∫₀^upper f(ξ)·2ξ₀/(ξ² − ξ₀²) dξ`; `upper` may be infinite.
pub fn integrate_principal_value<F>(
    f: F,
    pole: f64,
    upper: f64,
    tol: f64,
) -> Result<QuadratureResult<f64>>
where
    F: Fn(f64) -> f64,
{
    if !(pole > 0.0) || !(upper > pole) {
        return Err(Error::InvalidInput(format!(
            "principal value needs 0 < pole < upper, got pole={pole}, upper={upper}"
        )));
    }
    let g = |x: f64| f(x) * 2.0 * pole / (x + pole);
    let h = if upper.is_finite() {
        pole.min(upper - pole)
    } else {
        pole
    };
    let opts = QuadOptions::new(tol);
    let window = integrate(
        |t: f64| {
            if t == 0.0 {
                0.0
            } else {
                (g(pole + t) - g(pole - t)) / t
            }
        },
        0.0,
        h,
        opts,
    )?;
    let kernel = |x: f64| g(x) / (x - pole);
    let mut value = window.value;
    let mut err = window.abs_error_estimate;
    let mut evaluations = window.evaluations;
    if pole - h > 0.0 {
        let left = integrate(kernel, 0.0, pole - h, opts)?;
        value += left.value;
        err += left.abs_error_estimate;
        evaluations += left.evaluations;
    }
    if upper.is_finite() {
        if upper > pole + h {
            let right = integrate(kernel, pole + h, upper, opts)?;
            value += right.value;
            err += right.abs_error_estimate;
            evaluations += right.evaluations;
        }
    } else {
        let right = integrate_to_infinity(kernel, pole + h, opts)?;
        value += right.value;
        err += right.abs_error_estimate;
        evaluations += right.evaluations;
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate: err,
        evaluations,
    })
}

/// Fixed composite Gauss-Legendre rule: nodes and weights on `[a, b]` split into `panels`.
pub fn gauss_legendre_panels(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(panels * 10);
    let w = (b - a) / panels as f64;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * w;
        let h = 0.5 * w;
        for (j, x) in [1usize, 3, 5, 7, 9].iter().enumerate() {
            out.push((c - h * XGK[*x], h * WG[j]));
        }
        for (j, x) in [9usize, 7, 5, 3, 1].iter().enumerate() {
            out.push((c + h * XGK[*x], h * WG[4 - j]));
        }
    }
    out
}

/// Wynn's epsilon extrapolation of a sequence of partial sums.
pub fn wynn_epsilon(partials: &[f64]) -> f64 {
    let n = partials.len();
    if n < 3 {
        return partials.last().copied().unwrap_or(0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partials.to_vec();
    let mut best = partials[n - 1];
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 {
                return cur[i + 1];
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        col += 1;
        if col % 2 == 0 {
            best = *next.last().expect("non-empty column");
        }
        prev = cur;
        cur = next;
    }
    best
}

/// `∫_a^∞ f` for an integrand oscillating with sign changes every `half_period`, from
/// per-half-period integrals accelerated by Wynn's epsilon algorithm.
pub fn integrate_oscillatory_tail<F>(mut f: F, a: f64, half_period: f64, tol: f64) -> Result<QuadratureResult<f64>>
where
    F: FnMut(f64) -> f64,
{
    if !(half_period > 0.0) {
        return Err(Error::InvalidInput("half period must be positive".into()));
    }
    let mut partials = Vec::with_capacity(40);
    let mut acc = 0.0;
    let mut evaluations = 0;
    let mut err = 0.0;
    for n in 0..40 {
        let lo = a + n as f64 * half_period;
        let r = integrate(&mut f, lo, lo + half_period, QuadOptions::new(0.01 * tol))?;
        acc += r.value;
        err += r.abs_error_estimate;
        evaluations += r.evaluations;
        partials.push(acc);
    }
    let full = wynn_epsilon(&partials);
    let shorter = wynn_epsilon(&partials[..partials.len() - 2]);
    Ok(QuadratureResult {
        value: full,
        abs_error_estimate: err + (full - shorter).abs(),
        evaluations,
    })
}
