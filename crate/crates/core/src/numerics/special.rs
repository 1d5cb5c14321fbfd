use num_complex::Complex64;
use std::f64::consts::PI;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

pub fn erf_real_line(x: f64) -> f64 {
    if x.is_infinite() {
        return x.signum();
    }
    let ax = x.abs();
    if ax < 0.5 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term.abs() > 1e-18 * sum.abs() {
            n += 1.0;
            term *= -x2 / n;
            sum += term / (2.0 * n + 1.0);
        }
        return FRAC_2_SQRT_PI * sum;
    }
    x.signum() * (1.0 - (-ax * ax).exp() * erfcx(ax))
}

/// Scaled complementary error function `e^{x²} erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        if x < -26.6 {
            return f64::INFINITY;
        }
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 5.0 {
        return faddeeva(Complex64::new(0.0, x)).re;
    }
    // Laplace continued fraction erfcx(x) = (1/√π)/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))),
    // evaluated backwards from a fixed depth.
    let depth = if x > 50.0 { 20 } else { 90 };
    let mut t = x;
    for n in (1..=depth).rev() {
        t = x + 0.5 * n as f64 / t;
    }
    1.0 / (PI.sqrt() * t)
}

/// The combination `e^{−y²}(1 + erf(iy))` at `y = aξ/√π` on the imaginary frequency axis,
/// where it becomes `erfcx(y)`.
pub fn erf_scaled_imag(y: f64) -> f64 {
    erfcx(y)
}

/// Dawson integral `F(x) = e^{−x²} ∫₀^x e^{t²} dt`.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        return x;
    }
    if ax < 6.0 {
        // e^{−x²} Σ x^{2n+1}/(n!(2n+1)): all terms positive, so no cancellation.
        let x2 = ax * ax;
        let mut term = ax;
        let mut sum = ax;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= x2 / n;
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add < 1e-17 * sum {
                break;
            }
        }
        return x.signum() * sum * (-x2).exp();
    }
    // Asymptotic series 1/(2x) Σ (2n−1)!!/(2x²)^n, truncated at its smallest term.
    let inv = 1.0 / (2.0 * ax * ax);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    loop {
        n += 1.0;
        let next = term * (2.0 * n - 1.0) * inv;
        if next >= term || next < 1e-17 * sum {
            break;
        }
        term = next;
        sum += term;
    }
    x.signum() * sum / (2.0 * ax)
}

/// Faddeeva function on the real line, `w(x) = e^{−x²}(1 + erf(ix)) = e^{−x²} + (2i/√π) F(x)`.
pub fn faddeeva_real(x: f64) -> Complex64 {
    Complex64::new((-x * x).exp(), FRAC_2_SQRT_PI * dawson(x))
}

/// `1 − √π x erfcx(x)` for `x ≥ 0`. Past `x = 2` the continued fraction tail is used directly,
/// so the value keeps full relative precision as it decays like `1/(2x²)`.
pub fn one_minus_sqrt_pi_x_erfcx(x: f64) -> f64 {
    if x < 2.0 {
        return 1.0 - PI.sqrt() * x * erfcx(x);
    }
    let depth = if x > 50.0 { 20 } else if x > 5.0 { 90 } else { 400 };
    let mut t = x;
    for n in (2..=depth).rev() {
        t = x + 0.5 * n as f64 / t;
    }
    // √π x erfcx(x) = x/(x + tail) with tail = (1/2)/t.
    let tail = 0.5 / t;
    tail / (x + tail)
}

const WEIDEMAN_N: usize = 40;

fn weideman_coefficients() -> &'static [f64; WEIDEMAN_N] {
    static COEFFS: std::sync::OnceLock<[f64; WEIDEMAN_N]> = std::sync::OnceLock::new();
    COEFFS.get_or_init(|| {
        let n = WEIDEMAN_N;
        let m = 2 * n;
        let l = weideman_l();
        // f on the 2M-point grid, index 0 at θ = −π.
        let mut f = vec![0.0; 2 * m];
        for (idx, k) in (-(m as i64) + 1..m as i64).enumerate() {
            let theta = k as f64 * PI / m as f64;
            let t = l * (0.5 * theta).tan();
            f[idx + 1] = (-t * t).exp() * (l * l + t * t);
        }
        let len = 2 * m;
        let mut out = [0.0; WEIDEMAN_N];
        for (j, slot) in out.iter_mut().enumerate() {
            let freq = j + 1;
            let mut acc = 0.0;
            for i in 0..len {
                let phase = -2.0 * PI * ((i * freq) % len) as f64 / len as f64;
                acc += f[(i + len / 2) % len] * phase.cos();
            }
            *slot = acc / len as f64;
        }
        out
    })
}

fn weideman_l() -> f64 {
    (WEIDEMAN_N as f64 / std::f64::consts::SQRT_2).sqrt()
}

/// Faddeeva function `w(z) = e^{−z²} erfc(−iz)` anywhere in the plane: Weideman's rational
/// expansion in the upper half plane and `w(z) = 2e^{−z²} − w(−z)` below it.
pub fn faddeeva(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return 2.0 * (-z * z).exp() - faddeeva(-z);
    }
    if z.im == 0.0 {
        return faddeeva_real(z.re);
    }
    let l = weideman_l();
    let iz = Complex64::i() * z;
    let big_z = (l + iz) / (l - iz);
    let a = weideman_coefficients();
    let mut p = Complex64::new(0.0, 0.0);
    for &c in a.iter().rev() {
        p = p * big_z + c;
    }
    2.0 * p / ((l - iz) * (l - iz)) + (1.0 / PI.sqrt()) / (l - iz)
}
