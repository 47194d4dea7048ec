//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Finds a root of `f` in `[lo, hi]` to absolute tolerance `tol` on `x`.
///
/// The bracket must straddle a sign change. Each step tries a secant
/// update and falls back to bisection whenever the secant point leaves the
/// bracket or fails to halve it.
pub fn bisect_secant<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !tol.is_finite() || tol <= 0.0 {
        return Err(Error::domain(format!(
            "invalid bracket [{lo}, {hi}] / tolerance {tol}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::domain(format!(
            "no sign change on [{lo}, {hi}] (f = {fa:e}, {fb:e})"
        )));
    }

    for _ in 0..400 {
        let width = b - a;
        if width <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let secant = b - fb * (b - a) / (fb - fa);
        let x = if secant.is_finite() && secant > a && secant < b {
            secant
        } else {
            mid
        };
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // Secant steps that creep along one side are followed by a bisection.
        if b - a > 0.5 * width {
            let fm = f(mid)?;
            if fm == 0.0 {
                return Ok(mid);
            }
            if mid > a && mid < b {
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                    fb = fm;
                }
            }
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Plain bisection, used as an independent cross-check of closed forms.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(Error::domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?;
    let fb = f(b)?;
    if fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        return Err(Error::domain(format!("no sign change on [{lo}, {hi}]")));
    }
    let sa = fa.signum();
    for _ in 0..2000 {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
