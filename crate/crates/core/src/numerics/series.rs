use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraSum {
    pub value: f64,
    pub remainder_bound: f64,
    pub terms: usize,
}

/// `term(0)/2 + Σ_{l≥1} term(l)`, stopped once a tail bound drops below `tol·|partial|`.
///
/// The tail is bounded geometrically when consecutive ratios sit below 0.9 and by an
/// algebraic fit `t_l ~ l^{−p}` otherwise.
pub fn matsubara_sum<F: FnMut(usize) -> f64>(mut term: F, tol: f64) -> Result<MatsubaraSum> {
    matsubara_sum_budget(&mut term, tol, 10_000_000)
}

pub fn matsubara_sum_budget<F: FnMut(usize) -> f64>(
    term: &mut F,
    tol: f64,
    max_terms: usize,
) -> Result<MatsubaraSum> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let mut acc = CompensatedSum::new();
    acc.add(0.5 * term(0));
    let mut prev = f64::NAN;
    let mut zeros = 0;
    for l in 1..max_terms {
        let t = term(l);
        if !t.is_finite() {
            return Err(Error::NonConvergence {
                routine: "matsubara_sum",
                detail: format!("term {l} is not finite"),
            });
        }
        acc.add(t);
        let partial = acc.value();
        if t == 0.0 {
            zeros += 1;
            if zeros >= 2 {
                return Ok(MatsubaraSum {
                    value: partial,
                    remainder_bound: 0.0,
                    terms: l + 1,
                });
            }
            prev = t;
            continue;
        }
        zeros = 0;
        if l >= 3 && prev != 0.0 && prev.is_finite() {
            let ratio = (t / prev).abs();
            let bound = if ratio < 0.9 {
                t.abs() * ratio / (1.0 - ratio)
            } else {
                let lf = l as f64;
                let p = (prev / t).abs().ln() / (lf / (lf - 1.0)).ln();
                if p > 1.05 {
                    t.abs() * lf / (p - 1.0)
                } else {
                    f64::INFINITY
                }
            };
            if bound <= tol * partial.abs() {
                return Ok(MatsubaraSum {
                    value: partial,
                    remainder_bound: bound,
                    terms: l + 1,
                });
            }
        }
        prev = t;
    }
    Err(Error::NonConvergence {
        routine: "matsubara_sum",
        detail: format!("terms did not decay within {max_terms} terms"),
    })
}
