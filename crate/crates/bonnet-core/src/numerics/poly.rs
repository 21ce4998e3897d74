//! Real-root isolation for low-degree polynomials: Descartes' rule on
//! Möbius-transformed coefficients to isolate, bisection to separate,
//! Brent's method to polish.
//!
//! This is the classic Vincent–Collins–Akritas scheme specialized to the
//! cubics/quartics of the reparametrization step, where we must *classify*
//! the real-root pattern (0, 2, or 4 real roots of a quartic) reliably — an
//! eigenvalue companion-matrix solve would hand back complex pairs whose
//! "realness" would then need ad-hoc thresholds.

use super::brent::brent_root;

/// Evaluate a polynomial with ascending coefficients by Horner's rule.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Evaluate the derivative of a polynomial with ascending coefficients.
pub fn eval_deriv(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (i, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * x + c * i as f64;
    }
    acc
}

/// Coefficients of the derivative polynomial.
pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

/// Divide by the linear factor (x − root), dropping the remainder
/// (synthetic division). The remainder equals `eval(coeffs, root)` and is
/// expected to be at round-off level for polished roots.
pub fn deflate(coeffs: &[f64], root: f64) -> Vec<f64> {
    let n = coeffs.len();
    debug_assert!(n >= 2, "cannot deflate a constant");
    let mut out = vec![0.0; n - 1];
    let mut carry = coeffs[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = carry;
        carry = coeffs[i] + root * carry;
    }
    out
}

/// Number of sign variations in a coefficient sequence (zeros skipped).
fn sign_variations(coeffs: &[f64]) -> usize {
    let mut count = 0;
    let mut last = 0.0f64;
    for &c in coeffs {
        if c == 0.0 {
            continue;
        }
        if last != 0.0 && (c > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = c;
    }
    count
}

/// Taylor shift in place: c(x) ← c(x + a).
fn taylor_shift(coeffs: &mut [f64], a: f64) {
    let n = coeffs.len();
    for k in 0..n {
        for j in (k..n - 1).rev() {
            let next = coeffs[j + 1];
            coeffs[j] += a * next;
        }
    }
}

/// Descartes bound for the number of roots of `coeffs` in the open
/// interval (a, b): sign variations of (1+t)ⁿ p((a + b t)/(1 + t))… realized
/// as reverse-then-shift of the polynomial rescaled to [0, 1].
fn descartes_count(coeffs: &[f64], a: f64, b: f64) -> usize {
    let mut c: Vec<f64> = coeffs.to_vec();
    // p(x + a): roots in (a,b) → (0, b−a).
    taylor_shift(&mut c, a);
    // p((b−a)·x): roots → (0, 1).
    let width = b - a;
    let mut scale = 1.0;
    for ci in c.iter_mut() {
        *ci *= scale;
        scale *= width;
    }
    // (1+t)ⁿ p(1/(1+t)): roots in (0,1) ↔ t ∈ (0, ∞); count by Descartes.
    c.reverse();
    taylor_shift(&mut c, 1.0);
    sign_variations(&c)
}

/// Recursively isolate and polish real roots of `coeffs` inside (lo, hi).
fn isolate(coeffs: &[f64], lo: f64, hi: f64, depth: usize, out: &mut Vec<f64>) {
    let count = descartes_count(coeffs, lo, hi);
    if count == 0 {
        return;
    }
    let width_floor = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    if count == 1 {
        let flo = eval(coeffs, lo);
        let fhi = eval(coeffs, hi);
        if flo == 0.0 {
            out.push(lo);
            return;
        }
        if flo * fhi < 0.0 {
            let root = brent_root(|x| Ok(eval(coeffs, x)), lo, hi, 1e-15, 200)
                .expect("bracketed polynomial root");
            out.push(root);
            return;
        }
        // Descartes said one root but the endpoints do not straddle it:
        // either an endpoint grazes zero or the bound overcounted; subdivide.
    }
    if hi - lo < width_floor || depth == 0 {
        // Unresolvable cluster (multiple root at working precision): report
        // the cluster center once per counted root so degenerate parameter
        // sets classify as their limiting root pattern.
        for _ in 0..count {
            out.push(0.5 * (lo + hi));
        }
        return;
    }
    let mid = 0.5 * (lo + hi);
    if eval(coeffs, mid) == 0.0 {
        out.push(mid);
        // Deflating in place would lose accuracy; instead isolate on both
        // sides of a tiny exclusion around the exact hit.
        let eps = width_floor;
        isolate(coeffs, lo, mid - eps, depth - 1, out);
        isolate(coeffs, mid + eps, hi, depth - 1, out);
        return;
    }
    isolate(coeffs, lo, mid, depth - 1, out);
    isolate(coeffs, mid, hi, depth - 1, out);
}

/// All real roots of the polynomial in (lo, hi), ascending, polished to
/// ~1e-15 relative accuracy. Multiple roots appear once per multiplicity
/// *bound* (they are inherently ill-conditioned; the callers treat them as
/// degenerate parameter choices).
pub fn real_roots_in(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    // Normalize and trim negligible leading coefficients for stability.
    let max_mag = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max_mag == 0.0 {
        return Vec::new();
    }
    let mut c: Vec<f64> = coeffs.iter().map(|&x| x / max_mag).collect();
    while c.len() > 1 && c.last().is_some_and(|&l| l.abs() < 1e-14) {
        c.pop();
    }
    if c.len() < 2 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    isolate(&c, lo, hi, 80, &mut roots);
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-11 * (1.0 + a.abs()));
    roots
}

/// All real roots, using the Cauchy bound to enclose them.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    if n < 2 {
        return Vec::new();
    }
    let lead = coeffs[n - 1];
    if lead == 0.0 {
        return real_roots(&coeffs[..n - 1]);
    }
    let bound = 1.0 + coeffs[..n - 1].iter().fold(0.0f64, |m, c| m.max((c / lead).abs()));
    real_roots_in(coeffs, -bound, bound)
}
