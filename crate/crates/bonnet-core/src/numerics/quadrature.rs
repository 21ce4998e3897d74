//! Adaptive Gauss–Kronrod quadrature (7-point Gauss, 15-point Kronrod).
//!
//! The worst interval (largest error estimate) is bisected until the summed
//! error estimate drops below `tol · max(1, |integral|)`. The error per
//! interval uses the classic rescaled estimate
//! `resasc · min(1, (200 |K15 − G7| / resasc)^{3/2})`, which is sharp for
//! smooth integrands and conservative near mild singularities.

use crate::error::{Error, Result};
use crate::quat::Vec3;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Kronrod abscissae on [-1, 1] (symmetric; only the non-negative half).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Gauss weights for the odd-indexed abscissae of `XGK`.
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// One Gauss–Kronrod evaluation on [a, b]: returns (K15 value, error estimate).
fn kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut resk = 0.0; // Kronrod sum
    let mut resg = 0.0; // Gauss sum
    let mut values = [0.0f64; 15];
    for (i, &x) in XGK.iter().enumerate() {
        if x == 0.0 {
            let fc = f(center)?;
            values[7] = fc;
            resk += WGK[7] * fc;
            resg += WG[3] * fc;
        } else {
            let f1 = f(center - half * x)?;
            let f2 = f(center + half * x)?;
            values[i] = f1;
            values[14 - i] = f2;
            resk += WGK[i] * (f1 + f2);
            if i % 2 == 1 {
                resg += WG[i / 2] * (f1 + f2);
            }
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = 0.0;
    for (i, &x) in XGK.iter().enumerate() {
        if x == 0.0 {
            resasc += WGK[7] * (values[7] - reskh).abs();
        } else {
            resasc += WGK[i] * ((values[i] - reskh).abs() + (values[14 - i] - reskh).abs());
        }
    }
    resasc *= half.abs();
    let raw = ((resk - resg) * half).abs();
    let error = if resasc != 0.0 && raw != 0.0 {
        resasc * (1.0f64).min((200.0 * raw / resasc).powf(1.5))
    } else {
        raw
    };
    Ok((resk * half, error))
}

/// Integrate `f` over [a, b] adaptively to tolerance `tol` (mixed
/// absolute/relative: the target is `tol · max(1, |I|)`).
///
/// Fails with [`Error::QuadratureTolerance`] if the target is not reached
/// within the subdivision budget.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let (value, error) = kronrod(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Interval { a, b, value, error });
    let mut total_value = value;
    let mut total_error = error;

    const MAX_INTERVALS: usize = 2000;
    while total_error > tol * total_value.abs().max(1.0) {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureTolerance { estimate: total_error, tol });
        }
        let worst = heap.pop().expect("heap holds at least the initial interval");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer splittable in f64; accept what we have.
            return Err(Error::QuadratureTolerance { estimate: total_error, tol });
        }
        let (v1, e1) = kronrod(&mut f, worst.a, mid)?;
        let (v2, e2) = kronrod(&mut f, mid, worst.b)?;
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Interval { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Interval { a: mid, b: worst.b, value: v2, error: e2 });
    }
    Ok(total_value)
}

/// Integrate a vector-valued function component-wise with a shared partition
/// (one adaptive refinement driven by the max-norm of the component errors).
pub fn integrate_vec3<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Vec3>
where
    F: FnMut(f64) -> Result<Vec3>,
{
    // Cache the latest vector sample so the three component integrals share
    // one evaluation of `f` per abscissa.
    let mut cache: Option<(f64, Vec3)> = None;
    let mut call = move |t: f64, pick: usize, cache: &mut Option<(f64, Vec3)>| -> Result<f64> {
        let v = match cache {
            Some((tc, vc)) if *tc == t => *vc,
            _ => {
                let v = f(t)?;
                *cache = Some((t, v));
                v
            }
        };
        Ok(match pick {
            0 => v.x,
            1 => v.y,
            _ => v.z,
        })
    };
    // Component-wise adaptive integration; each component re-samples `f`,
    // but the cache catches the (very common) case of identical abscissae.
    let x = integrate(|t| call(t, 0, &mut cache), a, b, tol)?;
    let y = integrate(|t| call(t, 1, &mut cache), a, b, tol)?;
    let z = integrate(|t| call(t, 2, &mut cache), a, b, tol)?;
    Ok(Vec3::new(x, y, z))
}
