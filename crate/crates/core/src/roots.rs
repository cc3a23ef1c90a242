//! Bracketed root finding.
//!
//! Brent's method: inverse quadratic interpolation and secant steps, falling
//! back to bisection whenever the interpolated step is not safely inside the
//! current bracket or does not shrink it fast enough.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Iteration cap for [`solve_bracketed_root`].
pub const MAX_ITERATIONS: usize = 200;

/// Finds `x` in `[lo, hi]` with `f(x) = 0`, given `f(lo)` and `f(hi)` of
/// opposite sign. The returned point lies inside a bracket of width `<= tol`
/// (or is an exact zero).
pub fn solve_bracketed_root<T, F>(mut f: F, lo: T, hi: T, tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if !(tol > T::zero()) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Validation(format!(
            "bad root bracket or tolerance: [{lo}, {hi}], tol = {tol}"
        )));
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);

    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::NotBracketed {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: fa.as_f64(),
            f_hi: fb.as_f64(),
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
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

        let tol1 = two * T::epsilon() * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }

        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = two * xm * s;
                q = T::one() - s;
            } else {
                // inverse quadratic
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
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
            b = b + d;
        } else {
            b = b + if xm > T::zero() { tol1 } else { -tol1 };
        }
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Validation(format!(
                "function returned NaN at {b} during root search"
            )));
        }
    }

    Err(Error::Convergence {
        what: "bracketed root search",
        iterations: MAX_ITERATIONS,
    })
}
