/// Brent's method on a bracket with `f(a)·f(b) ≤ 0`; converges to adjacent floats.
pub fn brent<F: FnMut(f64) -> f64>(f: &mut F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return b;
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    b
}

/// Roots from sign changes of `g` on a sorted grid, each polished by Brent's method.
pub fn roots_on_grid<F: FnMut(f64) -> f64>(g: &mut F, grid: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    if grid.is_empty() {
        return out;
    }
    let mut xa = grid[0];
    let mut fa = g(xa);
    if fa == 0.0 {
        out.push(xa);
    }
    for &xb in &grid[1..] {
        let fb = g(xb);
        if fb == 0.0 {
            out.push(xb);
        } else if fa != 0.0 && (fa > 0.0) != (fb > 0.0) && fa.is_finite() && fb.is_finite() {
            out.push(brent(g, xa, xb, fa, fb));
        }
        xa = xb;
        fa = fb;
    }
    out
}

/// Real roots of `g` on `[a, b]` from a uniform scan with `scan_points` samples.
pub fn find_real_roots<F: FnMut(f64) -> f64>(mut g: F, a: f64, b: f64, scan_points: usize) -> Vec<f64> {
    let n = scan_points.max(2);
    let grid: Vec<f64> = (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect();
    let mut roots = roots_on_grid(&mut g, &grid);
    roots.sort_by(f64::total_cmp);
    let resolution = (b - a).abs() / n as f64 * 1e-6;
    roots.dedup_by(|x, y| (*x - *y).abs() <= resolution);
    roots
}
