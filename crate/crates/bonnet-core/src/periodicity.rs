//! Closing conditions over one period of the reparametrized cylinder.
//!
//! One period v ↦ v + 𝒱 acts on the surface by the rigid motion encoded in
//! the frame monodromy M = Φ(𝒱): a rotation by θ about an axis A together
//! with a translation along A. The cylinder closes into a torus after k
//! periods exactly when
//!
//! ```text
//! k·θ ∈ 2πℕ        (the rotation returns to the identity), and
//! ⟨A, ∫₀^𝒱 e^{−h(ω,w(v))} n(ω,v) dv⟩ = 0   (no drift along the axis).
//! ```
//!
//! Both quantities can be measured on any integrated frame; for the
//! quartic-oval reparametrization they collapse to abelian integrals over
//! the oval,
//!
//! ```text
//! θ/2 = ∫ (Z₀/Q̃₂(s)) Q₂(s) ds/√Q(s),      0 = ∫ Q₂(s) ds/√Q(s),
//! Q₂(s)  = −(s−s₁)(s−s₂) + δ²U₁′(ω)s,
//! Q̃₂(s)  = Z₀²s² − (1 + sR²(U′(ω)+s₁s₂U₁′(ω)))²,
//! Z₀²    = R²(2(s₁+s₂)U₁′(ω) + δ²U₁′(ω)² − U₂(ω)) + R⁴(U′(ω)+s₁s₂U₁′(ω))²,
//! ```
//!
//! with R = R(ω); Z₀ is the speed |Z′(ω)| of the sphere-center line, so its
//! positivity is the existence of the axis. The angle is defined up to sign
//! by these integrals, so the absolute value is reported.
//!
//! Two solvers tune parameters until a target angle is hit with zero axial
//! drift: one moves (δ, s₂) of the spherical family at fixed s₁ on the
//! integral formulas, the other moves two coefficients of an arbitrary
//! [`CoefficientFamily`] on frame measurements.

use crate::error::{Error, Result};
use crate::lame::LameData;
use crate::numerics::{brent_root, newton2, poly_eval, real_roots};
use crate::planar::{CoefficientFamily, IsothermicSurface, PlanarFamily};
use crate::quat::{Quat, Vec3};
use crate::spherical::{a_roots, QuarticQ, SphericalParams};
use std::f64::consts::PI;

/// Tolerance for the oval quadratures of the closing integrals.
const OVAL_INT_TOL: f64 = 1e-12;

/// Below this rotation angle the monodromy counts as the identity and the
/// axis is numerically undefined.
const NEAR_IDENTITY_ANGLE: f64 = 1e-8;

/// Residual tolerance and iteration budget of the closing solvers.
const SOLVE_TOL: f64 = 1e-12;
const SOLVE_MAX_ITER: usize = 60;

/// Largest fold count searched when classifying a monodromy angle.
const MAX_FOLD: u32 = 64;

/// Absolute slack per fold when testing k·θ ∈ 2πℕ.
const FOLD_TOL: f64 = 1e-6;

/// Result of the periodicity analysis of one frame period.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PeriodicityReport {
    /// Monodromy rotation angle, canonicalized to [0, π].
    pub theta: f64,
    /// Unit rotation axis (defined up to sign together with `theta`).
    pub axis: Vec3,
    /// Drift along the axis: ⟨axis, ∫₀^𝒱 e^{−h(ω,w)} n(ω,v) dv⟩.
    pub axial_defect: f64,
    /// Smallest k ≤ 64 with k·θ a multiple of 2π within tolerance, if any.
    pub fold: Option<u32>,
}

/// Rotation angle of a unit quaternion along the continuous lift produced
/// by the frame integration: θ ∈ (0, 2π), smooth across θ = π, together
/// with the axis of that lift. Rotation by θ about A equals rotation by
/// 2π − θ about −A; canonicalization is the caller's choice.
fn lifted_axis_angle(m: Quat) -> Result<(f64, Vec3)> {
    let norm = m.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Domain(format!("monodromy quaternion has norm {norm}")));
    }
    let m = m.normalized();
    let im = m.im_h();
    let theta = 2.0 * im.norm().atan2(m.a);
    let canonical = theta.min(2.0 * PI - theta);
    let axis = im.normalized().filter(|_| canonical >= NEAR_IDENTITY_ANGLE).ok_or_else(|| {
        Error::Domain(format!(
            "monodromy rotation angle {canonical:.3e} is numerically zero; axis undefined"
        ))
    })?;
    Ok((theta, axis))
}

/// Canonical rotation angle θ ∈ [0, π] and matching unit axis of a unit
/// quaternion acting by conjugation.
pub fn rotation_axis_angle(m: Quat) -> Result<(f64, Vec3)> {
    let (theta, axis) = lifted_axis_angle(m)?;
    if theta > PI {
        Ok((2.0 * PI - theta, -axis))
    } else {
        Ok((theta, axis))
    }
}

/// ∫₀^𝒱 e^{−h(ω, w(v))} n(ω, v) dv on the frame nodes — composite Simpson
/// when the node count is even, trapezoid otherwise.
fn weighted_gauss_integral(surface: &IsothermicSurface) -> Result<Vec3> {
    let omega = surface.family().lame().omega();
    let n = surface.frame().steps();
    let h = surface.v_period() / n as f64;
    let mut acc = Vec3::ZERO;
    let sample = |j: usize| -> Result<Vec3> {
        let v = j as f64 * h;
        Ok(surface.normal(omega, v)? / surface.metric(omega, v)?)
    };
    if n % 2 == 0 {
        acc += sample(0)? + sample(n)?;
        for j in 1..n {
            acc += sample(j)? * if j % 2 == 1 { 4.0 } else { 2.0 };
        }
        Ok(acc * (h / 3.0))
    } else {
        acc += (sample(0)? + sample(n)?) * 0.5;
        for j in 1..n {
            acc += sample(j)?;
        }
        Ok(acc * h)
    }
}

/// Smallest fold count k ≤ 64 with k·θ a multiple of 2π within tolerance.
fn detect_fold(theta: f64) -> Option<u32> {
    (1..=MAX_FOLD).find(|&k| {
        let kt = theta * k as f64;
        let m = (kt / (2.0 * PI)).round();
        m >= 1.0 && (kt - 2.0 * PI * m).abs() <= FOLD_TOL * k as f64
    })
}

/// Monodromy angle, axis, axial drift and fold classification of one frame
/// period of an isothermic cylinder.
pub fn monodromy_report(surface: &IsothermicSurface) -> Result<PeriodicityReport> {
    let (lift, lift_axis) = lifted_axis_angle(surface.frame().monodromy())?;
    let (theta, axis) =
        if lift > PI { (2.0 * PI - lift, -lift_axis) } else { (lift, lift_axis) };
    let axial_defect = axis.dot(weighted_gauss_integral(surface)?);
    Ok(PeriodicityReport { theta, axis, axial_defect, fold: detect_fold(theta) })
}

/// Z₀² = |Z′(ω)|², the squared speed of the sphere-center line at the
/// critical coordinate. Positive exactly when the rotation axis is defined.
fn axis_norm_squared(lame: &LameData, p: &SphericalParams) -> f64 {
    let r2 = lame.r_omega().powi(2);
    let u1p = lame.u1_prime_omega();
    let cross = lame.u_prime_omega() + p.s1 * p.s2 * u1p;
    r2 * (2.0 * (p.s1 + p.s2) * u1p + (p.delta * u1p).powi(2) - lame.u2_omega())
        + (r2 * cross).powi(2)
}

/// Shared numerator quadratic of both closing integrands,
/// Q₂(s) = −(s−s₁)(s−s₂) + δ²U₁′(ω)s.
fn q2_eval(lame: &LameData, p: &SphericalParams, s: f64) -> f64 {
    -(s - p.s1) * (s - p.s2) + p.delta.powi(2) * lame.u1_prime_omega() * s
}

/// Ascending coefficients of the angle denominator
/// Q̃₂(s) = Z₀²s² − (1 + sR²(U′(ω)+s₁s₂U₁′(ω)))².
fn qtilde2_coeffs(lame: &LameData, p: &SphericalParams) -> [f64; 3] {
    let z0_sq = axis_norm_squared(lame, p);
    let w = lame.r_omega().powi(2)
        * (lame.u_prime_omega() + p.s1 * p.s2 * lame.u1_prime_omega());
    [-1.0, -2.0 * w, z0_sq - w * w]
}

/// Axial part of the closing conditions, ∫ Q₂(s) ds/√Q(s) over the oval.
/// A torus must make this vanish: any nonzero value is a drift of the
/// fundamental piece along the rotation axis.
pub fn bpart_integral(lame: &LameData, params: &SphericalParams) -> Result<f64> {
    let quartic = QuarticQ::new(lame, params)?;
    quartic.integrate_over_oval(|s| q2_eval(lame, params, s), OVAL_INT_TOL)
}

/// Monodromy rotation angle |θ| of the spherical family from its integral
/// formula, |θ| = |2 ∫ (Z₀/Q̃₂(s)) Q₂(s) ds/√Q(s)| over the oval.
pub fn theta_integral(lame: &LameData, params: &SphericalParams) -> Result<f64> {
    let quartic = QuarticQ::new(lame, params)?;
    let z0_sq = axis_norm_squared(lame, params);
    if !(z0_sq > 0.0) {
        return Err(Error::Domain(format!(
            "sphere-center speed squared Z₀² = {z0_sq:.3e} is not positive for δ = {}, \
             s1 = {}, s2 = {}; the rotation axis is undefined",
            params.delta, params.s1, params.s2
        )));
    }
    let qt = qtilde2_coeffs(lame, params);
    let (lo, hi) = quartic.oval();
    if let Some(root) = real_roots(&qt).into_iter().find(|&r| r >= lo && r <= hi) {
        return Err(Error::DegenerateAngleIntegrand { s: root });
    }
    let integral = quartic
        .integrate_over_oval(|s| q2_eval(lame, params, s) / poly_eval(&qt, s), OVAL_INT_TOL)?;
    Ok((2.0 * z0_sq.sqrt() * integral).abs())
}

/// Solve the axial condition alone: find s₂ near `warm` with
/// bpart_integral(δ, s₁, s₂) = 0 at fixed δ and s₁, by bracket expansion
/// and Brent iteration.
fn axial_zero(lame: &LameData, s1: f64, delta: f64, warm: f64) -> Result<f64> {
    let f = |s2: f64| bpart_integral(lame, &SphericalParams { delta, s1, s2 });
    let f_warm = f(warm)?;
    if f_warm.abs() < 1e-14 {
        return Ok(warm);
    }
    // Expand a bracket around the warm start, ignoring probes that leave
    // the admissible parameter region.
    let mut step = 1e-3 * (1.0 + warm.abs());
    for _ in 0..24 {
        for cand in [warm + step, warm - step] {
            if let Ok(val) = f(cand) {
                if val * f_warm < 0.0 {
                    let (a, b) = if cand < warm { (cand, warm) } else { (warm, cand) };
                    return brent_root(&f, a, b, 1e-14, 120);
                }
            }
        }
        step *= 2.0;
    }
    Err(Error::NoConvergence { iters: 24, residual: f_warm.abs() })
}

/// Continuation along one branch of the axial condition: starting from a
/// root of the seed quadratic at δ → 0, grow δ while keeping the axial
/// integral zero, and watch the angle for a crossing of the target.
fn march_branch(
    lame: &LameData,
    theta_target: f64,
    s1: f64,
    seed: f64,
) -> Result<SphericalParams> {
    let angle_on_branch = |delta: f64, warm: f64| -> Result<(f64, f64)> {
        let s2 = axial_zero(lame, s1, delta, warm)?;
        let theta = theta_integral(lame, &SphericalParams { delta, s1, s2 })?;
        Ok((s2, theta))
    };

    // Walk the branch towards larger δ.  The branch may fold back (the oval
    // and the axial root cease to exist past some δ), so on a failed step the
    // multiplicative stride shrinks towards the last good point, letting the
    // walk creep up to the fold instead of stepping over the target.
    let mut delta = 0.02;
    let mut warm = seed;
    let mut stride = 1.25;
    let mut prev: Option<(f64, f64)> = None; // (δ, θ − target)
    while delta < 60.0 && stride > 1.0 + 1e-4 {
        match angle_on_branch(delta, warm) {
            Ok((s2, theta)) => {
                let gap = theta - theta_target;
                if let Some((delta_prev, gap_prev)) = prev {
                    if gap_prev * gap <= 0.0 {
                        let warm_cell = std::cell::Cell::new(warm);
                        let delta_star = brent_root(
                            |d| {
                                let (s2_d, theta_d) = angle_on_branch(d, warm_cell.get())?;
                                warm_cell.set(s2_d);
                                Ok(theta_d - theta_target)
                            },
                            delta_prev,
                            delta,
                            1e-12,
                            120,
                        )?;
                        let s2_star = axial_zero(lame, s1, delta_star, warm_cell.get())?;
                        return Ok(SphericalParams { delta: delta_star, s1, s2: s2_star });
                    }
                }
                prev = Some((delta, gap));
                warm = s2;
                delta *= stride;
            }
            Err(err) => {
                let Some((delta_prev, _)) = prev else { return Err(err) };
                stride = stride.sqrt();
                delta = delta_prev * stride;
            }
        }
    }
    Err(Error::NoConvergence {
        iters: 0,
        residual: prev.map_or(f64::NAN, |(_, gap)| gap.abs()),
    })
}

/// Find spherical parameters (δ, s₂) at fixed s₁ whose monodromy angle is
/// `theta_target` with vanishing axial integral.
///
/// A supplied initial guess is polished directly by damped Newton; without
/// one (or if polishing fails), each root of the seed quadratic A(s₁, ·)
/// that pairs to a valid oval spawns a continuation branch from δ → 0,
/// which is scanned for the target angle and then polished.
pub fn solve_spherical(
    lame: &LameData,
    theta_target: f64,
    s1: f64,
    init: Option<SphericalParams>,
) -> Result<SphericalParams> {
    if !(theta_target > 0.0) || !theta_target.is_finite() {
        return Err(Error::Domain(format!(
            "target angle must be positive and finite, got {theta_target}"
        )));
    }
    let residual = |x: [f64; 2]| -> Result<[f64; 2]> {
        let p = SphericalParams { delta: x[0], s1, s2: x[1] };
        Ok([theta_integral(lame, &p)? - theta_target, bpart_integral(lame, &p)?])
    };
    let polish = |p: SphericalParams| -> Result<SphericalParams> {
        let sol = newton2(residual, [p.delta, p.s2], SOLVE_TOL, SOLVE_MAX_ITER)?;
        Ok(SphericalParams { delta: sol[0], s1, s2: sol[1] })
    };

    if let Some(guess) = init {
        match polish(SphericalParams { s1, ..guess }) {
            Ok(found) => return Ok(found),
            Err(_) => {} // fall through to the continuation scan
        }
    }

    let mut last_err =
        Error::Domain(format!("seed quadratic at s1 = {s1} has no admissible root"));
    for seed in a_roots(lame, s1) {
        if lame.q3(s1) * lame.q3(seed) >= 0.0 {
            continue; // this pairing carries no oval
        }
        match march_branch(lame, theta_target, s1, seed).and_then(polish) {
            Ok(found) => return Ok(found),
            Err(err) => last_err = err,
        }
    }
    Err(last_err)
}

/// Tune two coefficients of a reparametrization family until the frame
/// monodromy angle is `theta_target` and the axial drift vanishes.
///
/// The angle residual uses the continuous lift of the integrated frame, so
/// targets at and beyond π (e.g. the half-turn of two-fold tori) are regular
/// roots rather than folds of the canonical angle.
pub fn solve_family<R: CoefficientFamily + 'static>(
    family: &PlanarFamily,
    init: &R,
    free: [usize; 2],
    theta_target: f64,
    n_steps: usize,
) -> Result<R> {
    let base = init.coefficients();
    if free[0] == free[1] || free[0] >= base.len() || free[1] >= base.len() {
        return Err(Error::Domain(format!(
            "free coefficient indices {free:?} must be two distinct indices below {}",
            base.len()
        )));
    }
    if !(0.0..2.0 * PI).contains(&theta_target) {
        return Err(Error::Domain(format!(
            "target angle {theta_target} must lie in [0, 2π)"
        )));
    }

    let measure = |x: [f64; 2]| -> Result<(f64, f64)> {
        let mut coeffs = base.clone();
        coeffs[free[0]] = x[0];
        coeffs[free[1]] = x[1];
        let rep = init.with_coefficients(&coeffs);
        let surface = IsothermicSurface::new(family.clone(), Box::new(rep), n_steps)?;
        let (lift, axis) = lifted_axis_angle(surface.frame().monodromy())?;
        Ok((lift, axis.dot(weighted_gauss_integral(&surface)?)))
    };

    // The frame lift sees a rotation by θ either as θ or as 2π − θ,
    // depending on which sheet the integration lands on; aim for the sheet
    // the initial guess is already on.
    let x0 = [base[free[0]], base[free[1]]];
    let (lift0, _) = measure(x0)?;
    let target_lift = if (lift0 - theta_target).abs() <= (lift0 - (2.0 * PI - theta_target)).abs()
    {
        theta_target
    } else {
        2.0 * PI - theta_target
    };

    let sol = newton2(
        |x| {
            let (lift, drift) = measure(x)?;
            Ok([lift - target_lift, drift])
        },
        x0,
        1e-10,
        SOLVE_MAX_ITER,
    )?;
    let mut coeffs = base;
    coeffs[free[0]] = sol[0];
    coeffs[free[1]] = sol[1];
    Ok(init.with_coefficients(&coeffs))
}
