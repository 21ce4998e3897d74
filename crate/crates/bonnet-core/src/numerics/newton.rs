//! Damped Newton iteration for two-dimensional root systems.
//!
//! The Jacobian is formed by central differences with a relative step, the
//! 2×2 linear solve is explicit, and a step-halving line search keeps the
//! residual norm decreasing. Evaluation failures during the line search
//! (e.g. a trial point outside the parameter domain) shorten the step
//! instead of aborting, which is exactly the behavior the periodicity
//! solver needs near the boundary of the admissible region.

use crate::error::{Error, Result};

/// Relative step for the central-difference Jacobian.
const JACOBIAN_REL_STEP: f64 = 1e-6;

/// Solve `f(x) = 0` for `x ∈ ℝ²` by damped Newton iteration.
///
/// # Arguments
///
/// * `f` — residual function; may fail at infeasible points.
/// * `x0` — starting point (must be feasible).
/// * `tol` — convergence threshold on `max(|f₁|, |f₂|)`.
/// * `max_iter` — iteration budget.
pub fn newton2<F>(mut f: F, x0: [f64; 2], tol: f64, max_iter: usize) -> Result<[f64; 2]>
where
    F: FnMut([f64; 2]) -> Result<[f64; 2]>,
{
    let mut x = x0;
    let mut fx = f(x)?;
    let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs());

    for _ in 0..max_iter {
        if norm(fx) < tol {
            return Ok(x);
        }
        // Central-difference Jacobian, column by column.
        let mut jac = [[0.0f64; 2]; 2];
        for col in 0..2 {
            let h = JACOBIAN_REL_STEP * x[col].abs().max(1e-3);
            let mut xp = x;
            let mut xm = x;
            xp[col] += h;
            xm[col] -= h;
            let fp = f(xp)?;
            let fm = f(xm)?;
            jac[0][col] = (fp[0] - fm[0]) / (2.0 * h);
            jac[1][col] = (fp[1] - fm[1]) / (2.0 * h);
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let scale = jac[0][0].abs().max(jac[0][1].abs()).max(jac[1][0].abs()).max(jac[1][1].abs());
        if det.abs() <= 1e-14 * scale * scale || !det.is_finite() {
            return Err(Error::DegenerateJacobian);
        }
        let dx = [
            (-fx[0] * jac[1][1] + fx[1] * jac[0][1]) / det,
            (-fx[1] * jac[0][0] + fx[0] * jac[1][0]) / det,
        ];

        // Step-halving line search on the residual norm; infeasible trial
        // points count as "no decrease" and shorten the step.
        let mut lambda = 1.0;
        let mut advanced = false;
        for _ in 0..25 {
            let trial = [x[0] + lambda * dx[0], x[1] + lambda * dx[1]];
            match f(trial) {
                Ok(ft) if norm(ft) < norm(fx) => {
                    x = trial;
                    fx = ft;
                    advanced = true;
                    break;
                }
                _ => lambda *= 0.5,
            }
        }
        if !advanced {
            // A full stall with a nonsingular Jacobian: residual is at the
            // bottom of the attainable basin.
            return Err(Error::NoConvergence { iters: max_iter, residual: norm(fx) });
        }
    }
    if norm(fx) < tol {
        Ok(x)
    } else {
        Err(Error::NoConvergence { iters: max_iter, residual: norm(fx) })
    }
}
