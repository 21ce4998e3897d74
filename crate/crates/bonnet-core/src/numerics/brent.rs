//! Brent's method for bracketed scalar root finding.
//!
//! Combines bisection, secant and inverse quadratic interpolation; always
//! keeps a bracket, so convergence is guaranteed for continuous functions at
//! roughly superlinear speed. The function may fail (e.g. a series
//! evaluation outside its validity strip), in which case the error is
//! propagated.

use crate::error::{Error, Result};

/// Find a root of `f` in `[a, b]`, where `f(a)` and `f(b)` must have
/// opposite signs.
///
/// # Arguments
///
/// * `f` — function whose root is sought; may fail.
/// * `a`, `b` — bracket endpoints.
/// * `tol` — absolute tolerance on the root abscissa.
/// * `max_iter` — iteration budget before giving up.
pub fn brent_root<F>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::Domain(format!(
            "root bracket [{a}, {b}] does not have a sign change (f(a) = {fa:.3e}, f(b) = {fb:.3e})"
        )));
    }

    // `c` is the previous iterate; (b, fb) is always the best current root.
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = b - a;

    for _ in 0..max_iter {
        if fb.abs() > fc.abs() {
            // Make b the best estimate, keep the bracket [b, c].
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Attempt inverse quadratic interpolation (secant if a == c).
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
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
        fb = f(b)?;
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            e = b - a;
            d = e;
        }
    }
    Err(Error::NoConvergence { iters: max_iter, residual: fb.abs() })
}
