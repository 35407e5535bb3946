//! Small numerical kernels shared by the branch code: compensated sums, a
//! bracketed root finder and the cancellation-free `x − ln(1+x)`.

use crate::error::{Error, Result};

/// Neumaier compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
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

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// `(x − ln(1+x)) / x²` for `x > −1`, evaluated by its alternating series near
/// zero. The value at `x = 0` is `1/2`.
pub fn log1p_remainder(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let mut power = 1.0;
        let mut sum = 0.0;
        for k in 2..64 {
            let t = power / k as f64;
            sum += t;
            if t.abs() <= 1e-18 * sum.abs() {
                break;
            }
            power *= -x;
        }
        sum
    } else {
        (x - x.ln_1p()) / (x * x)
    }
}

/// `−μ − ln(1−μ)` given both `μ` and `1−μ`, so that the value stays accurate
/// when `μ` sits next to either endpoint.
pub fn neg_mu_minus_log1m(mu: f64, one_minus: f64) -> f64 {
    if mu.abs() < 0.1 {
        mu * mu * log1p_remainder(-mu)
    } else {
        -mu - one_minus.ln()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub xtol: f64,
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            xtol: 0.0,
            ftol: 0.0,
            max_iter: 300,
        }
    }
}

/// Brent's method on a bracket `[a, b]` whose end values are already known.
pub fn brent<F>(mut f: F, a: f64, b: f64, fa: f64, fb: f64, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NotBracketed("brent"));
    }
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..opts.max_iter {
        if (fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0) {
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
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * opts.xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() <= opts.ftol {
            return Ok(b);
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
            } else {
                p = -p;
            }
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
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b)?;
    }
    Err(Error::NoConvergence {
        what: "brent root",
        iterations: opts.max_iter,
    })
}

/// Plain bisection on the sign of `f`, returning the final bracket.
pub fn bisect_sign<F>(mut f: F, mut lo: f64, mut hi: f64, max_iter: usize, mut done: impl FnMut(f64, f64) -> bool) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let s_lo = f(lo)?.signum();
    for _ in 0..max_iter {
        if done(lo, hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)?.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remainder_series_matches_direct_formula_away_from_zero() {
        for &x in &[-0.099, -0.05, 0.03, 0.0999] {
            let direct = (x - f64::ln_1p(x)) / (x * x);
            assert!((log1p_remainder(x) - direct).abs() < 1e-12);
        }
        assert_eq!(log1p_remainder(0.0), 0.5);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn brent_finds_cubic_root() {
        let f = |x: f64| Ok(x * x * x - 2.0);
        let r = brent(f, 0.0, 2.0, -2.0, 6.0, RootOptions::default()).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn brent_rejects_unbracketed() {
        let f = |x: f64| Ok(x * x + 1.0);
        assert!(brent(f, -1.0, 1.0, 2.0, 2.0, RootOptions::default()).is_err());
    }
}
