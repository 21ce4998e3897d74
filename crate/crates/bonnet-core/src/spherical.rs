//! Reparametrization functions w(v) whose v-curves are spherical.
//!
//! Along v the surface metric at the critical line is encoded by
//! s(v) = e^{−h(ω, w(v))}, which together with w(v) satisfies
//!
//! ```text
//! w′(s) = 1/√Q₃(s),        v′(s) = δ/√Q(s),
//! Q(s)  = −(s−s₁)²(s−s₂)² + δ²·Q₃(s),
//! ```
//!
//! with the cubic Q₃ from [`LameData`]. For parameters of the right type the
//! quartic Q has exactly two real roots s₁⁻ < s₁⁺; the segment [s₁⁻, s₁⁺]
//! (the real oval of the elliptic curve y² = Q(s)) lies strictly inside the
//! cubic's positive locus (s₀, ∞), and one closed v-period traverses the
//! oval up and back. All oval integrals are desingularized by the angular
//! substitution s = m − r·cos ψ (m the oval midpoint, r its half-width),
//! which converts ds/√Q into dψ/√comp(s) for the strictly positive
//! quadratic cofactor comp; turning-point square-root singularities
//! disappear entirely.
//!
//! The δ→0 seed: as δ → 0 the oval collapses onto whichever parameter s₁,
//! s₂ sits inside the cubic's positive locus, and the translational closing
//! integral vanishes to leading order exactly on the zero set of the
//! polynomial A(s₁, s₂) implemented here; A is symmetric in its arguments
//! and quadratic in each separately, so it provides cheap root seeds.

use crate::error::{Error, Result};
use crate::lame::LameData;
use crate::numerics::{integrate, poly_eval, real_roots, HermiteTable};
use crate::planar::Reparametrization;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Absolute tolerance for every oval quadrature.
pub const OVAL_QUAD_TOL: f64 = 1e-12;

/// Nodes of the ψ ∈ [0, π] construction tables.
const N_PSI: usize = 2048;

/// Parameters (δ, s₁, s₂) of the spherical reparametrization family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalParams {
    pub delta: f64,
    pub s1: f64,
    pub s2: f64,
}

/// The quartic Q(s) = −(s−s₁)²(s−s₂)² + δ²Q₃(s) with its real oval and the
/// positive quadratic cofactor used for desingularized integration.
#[derive(Debug, Clone)]
pub struct QuarticQ {
    params: SphericalParams,
    /// Ascending coefficients of Q; leading term is exactly −1.
    coeffs: [f64; 5],
    /// Ascending coefficients of the cubic Q₃.
    q3: [f64; 4],
    /// Positive root of the cubic (left end of its positive locus).
    s0: f64,
    /// Real oval [s₁⁻, s₁⁺] of Q.
    lo: f64,
    hi: f64,
    /// Monic quadratic comp with Q(s) = (s₁⁺−s)(s−s₁⁻)·comp(s); comp > 0 on
    /// the oval.
    comp: [f64; 3],
}

impl QuarticQ {
    pub fn new(lame: &LameData, params: &SphericalParams) -> Result<Self> {
        let SphericalParams { delta, s1, s2 } = *params;
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Domain(format!("delta must be positive, got {delta}")));
        }
        // Exactly one of s₁, s₂ may lie inside the cubic's positive locus:
        // the quartic then lifts above zero around that one only.
        let (q3_s1, q3_s2) = (lame.q3(s1), lame.q3(s2));
        if !(q3_s1 * q3_s2 < 0.0) {
            return Err(Error::WrongOvalType);
        }
        let q3 = lame.q3_coeffs();
        let (a, b) = (s1 + s2, s1 * s2);
        let d2 = delta * delta;
        let coeffs = [
            -b * b + d2 * q3[0],
            2.0 * a * b + d2 * q3[1],
            -(a * a + 2.0 * b) + d2 * q3[2],
            2.0 * a + d2 * q3[3],
            -1.0,
        ];
        let roots = real_roots(&coeffs);
        let (lo, hi) = match roots.len() {
            0 => return Err(Error::NoRealOval { delta, s1, s2 }),
            2 => (roots[0], roots[1]),
            _ => return Err(Error::WrongOvalType),
        };
        let s0 = lame.s0();
        if lo <= s0 {
            return Err(Error::OvalOutsideCubic { lo, hi, s0 });
        }
        // Q / (−(s−lo)(s−hi)) is a monic quadratic, positive on the oval.
        let after_lo = crate::numerics::poly::deflate(&coeffs, lo);
        let after_hi = crate::numerics::poly::deflate(&after_lo, hi);
        let comp = [-after_hi[0], -after_hi[1], -after_hi[2]];
        let vertex = -0.5 * comp[1] / comp[2];
        let comp_min = if (lo..=hi).contains(&vertex) {
            poly_eval(&comp, vertex)
        } else {
            poly_eval(&comp, lo).min(poly_eval(&comp, hi))
        };
        if !(comp_min > 0.0) {
            return Err(Error::WrongOvalType);
        }
        Ok(QuarticQ { params: *params, coeffs, q3, s0, lo, hi, comp })
    }

    pub fn params(&self) -> &SphericalParams {
        &self.params
    }

    pub fn delta(&self) -> f64 {
        self.params.delta
    }

    /// Ascending coefficients of Q.
    pub fn coeffs(&self) -> [f64; 5] {
        self.coeffs
    }

    pub fn eval(&self, s: f64) -> f64 {
        poly_eval(&self.coeffs, s)
    }

    pub fn q3_eval(&self, s: f64) -> f64 {
        poly_eval(&self.q3, s)
    }

    /// The real oval [s₁⁻, s₁⁺].
    pub fn oval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn oval_midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn oval_half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    /// Left end of the cubic's positive locus.
    pub fn s0(&self) -> f64 {
        self.s0
    }

    /// The angular parametrization s(ψ) = m − r·cos ψ of the oval, ψ ∈ [0, π].
    pub fn s_of_psi(&self, psi: f64) -> f64 {
        self.oval_midpoint() - self.oval_half_width() * psi.cos()
    }

    /// The positive quadratic cofactor, comp(s) = Q(s)/((s₁⁺−s)(s−s₁⁻)).
    pub fn comp_eval(&self, s: f64) -> f64 {
        poly_eval(&self.comp, s)
    }

    /// ∫ over the oval of g(s)·ds/√Q(s), desingularized: the integrand
    /// becomes g(s(ψ))/√comp(s(ψ)) on ψ ∈ [0, π].
    pub fn integrate_over_oval<F>(&self, mut g: F, tol: f64) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        integrate(
            |psi| {
                let s = self.s_of_psi(psi);
                Ok(g(s) / self.comp_eval(s).sqrt())
            },
            0.0,
            PI,
            tol,
        )
    }
}

/// The reparametrization curve: w(v) and s(v) over one period 𝒱, built from
/// the quartic's oval by desingularized quadrature and monotone inversion.
#[derive(Debug, Clone)]
pub struct ReparamCurve {
    quartic: QuarticQ,
    /// Cumulative v(ψ) on [0, π] with analytic derivative δ/√comp.
    v_of_psi: HermiteTable,
    /// w(ψ) = w_base + ∫ r sin ψ/√Q₃ with analytic derivative.
    w_of_psi: HermiteTable,
    v_half: f64,
    w_base: f64,
    w_max: f64,
}

impl ReparamCurve {
    pub fn build(lame: &LameData, params: &SphericalParams) -> Result<Self> {
        let quartic = QuarticQ::new(lame, params)?;
        let delta = quartic.delta();
        let (lo, _hi) = quartic.oval();
        let r = quartic.oval_half_width();
        let s0 = quartic.s0();

        // w at the bottom of the oval: ∫_{s₀}^{s₁⁻} ds/√Q₃, desingularized
        // at the cubic's root by s = s₀ + t².
        let q3_slope = {
            let d = crate::numerics::poly::derivative(&lame.q3_coeffs());
            poly_eval(&d, s0)
        };
        let t_end = (lo - s0).sqrt();
        let w_base = integrate(
            |t| {
                if t < 1e-7 * t_end {
                    Ok(2.0 / q3_slope.sqrt())
                } else {
                    Ok(2.0 * t / quartic.q3_eval(s0 + t * t).sqrt())
                }
            },
            0.0,
            t_end,
            OVAL_QUAD_TOL,
        )?;

        // Cumulative tables over ψ ∈ [0, π]. Both integrands are smooth, so
        // per-interval Gauss–Kronrod panels at 1e−14 keep the accumulated
        // error well under the 1e−12 target for the period.
        let h = PI / N_PSI as f64;
        let psi_nodes: Vec<f64> = (0..=N_PSI).map(|j| j as f64 * h).collect();
        let v_rate = |psi: f64| delta / quartic.comp_eval(quartic.s_of_psi(psi)).sqrt();
        let w_rate =
            |psi: f64| r * psi.sin() / quartic.q3_eval(quartic.s_of_psi(psi)).sqrt();
        let mut v_vals = Vec::with_capacity(N_PSI + 1);
        let mut w_vals = Vec::with_capacity(N_PSI + 1);
        let mut v_acc = 0.0;
        let mut w_acc = w_base;
        v_vals.push(v_acc);
        w_vals.push(w_acc);
        for j in 0..N_PSI {
            let (a, b) = (psi_nodes[j], psi_nodes[j + 1]);
            v_acc += integrate(|p| Ok(v_rate(p)), a, b, 1e-14)?;
            w_acc += integrate(|p| Ok(w_rate(p)), a, b, 1e-14)?;
            v_vals.push(v_acc);
            w_vals.push(w_acc);
        }
        let v_half = v_acc;
        let w_max = w_acc;
        // The curve must stay inside one period strip of the frame
        // coefficient W₁, which is singular at w ∈ 2πλ·ℤ.
        let strip = 2.0 * PI * lame.lattice().lambda();
        if !(w_base > 0.0 && w_max < strip) {
            return Err(Error::Domain(format!(
                "w range [{w_base:.6}, {w_max:.6}] leaves the admissible strip (0, {strip:.6})"
            )));
        }
        let v_derivs: Vec<f64> = psi_nodes.iter().map(|&p| v_rate(p)).collect();
        let w_derivs: Vec<f64> = psi_nodes.iter().map(|&p| w_rate(p)).collect();
        let v_of_psi = HermiteTable::new(psi_nodes.clone(), v_vals, v_derivs)?;
        let w_of_psi = HermiteTable::new(psi_nodes, w_vals, w_derivs)?;
        Ok(ReparamCurve { quartic, v_of_psi, w_of_psi, v_half, w_base, w_max })
    }

    pub fn quartic(&self) -> &QuarticQ {
        &self.quartic
    }

    /// Half period: v at the top of the oval.
    pub fn v_half(&self) -> f64 {
        self.v_half
    }

    pub fn w_base(&self) -> f64 {
        self.w_base
    }

    pub fn w_max(&self) -> f64 {
        self.w_max
    }

    /// Fold v into the ascending half [0, v_half]; the second component is
    /// +1 on the ascending half of the period and −1 on the descending half.
    fn fold(&self, v: f64) -> (f64, f64) {
        let period = 2.0 * self.v_half;
        let vr = v.rem_euclid(period);
        if vr <= self.v_half {
            (vr, 1.0)
        } else {
            (period - vr, -1.0)
        }
    }

    fn psi_of_folded(&self, x: f64) -> f64 {
        self.v_of_psi.inverse(x.clamp(0.0, self.v_half)).clamp(0.0, PI)
    }

    /// s(v) = e^{−h(ω, w(v))} on the oval.
    pub fn s_of_v(&self, v: f64) -> f64 {
        let (x, _) = self.fold(v);
        self.quartic.s_of_psi(self.psi_of_folded(x))
    }

    /// s′(v) = ±√Q(s)/δ (+ on the ascending half).
    pub fn s_prime(&self, v: f64) -> f64 {
        let (x, sign) = self.fold(v);
        let s = self.quartic.s_of_psi(self.psi_of_folded(x));
        let q = self.quartic.eval(s).max(0.0);
        sign * q.sqrt() / self.quartic.delta()
    }
}

impl Reparametrization for ReparamCurve {
    fn period(&self) -> f64 {
        2.0 * self.v_half
    }

    fn w(&self, v: f64) -> f64 {
        let (x, _) = self.fold(v);
        self.w_of_psi.eval(self.psi_of_folded(x))
    }

    /// w′(v) = ±√Q(s)/(δ√Q₃(s)), with √Q in the stable factored form
    /// r·sin ψ·√comp.
    fn w_prime(&self, v: f64) -> f64 {
        let (x, sign) = self.fold(v);
        let psi = self.psi_of_folded(x);
        let s = self.quartic.s_of_psi(psi);
        let sqrt_q = self.quartic.oval_half_width() * psi.sin() * self.quartic.comp_eval(s).sqrt();
        sign * sqrt_q / (self.quartic.delta() * self.quartic.q3_eval(s).sqrt())
    }

    /// Signed tilt cosine −(s−s₁)(s−s₂)/(δ√Q₃(s)).  Its square is 1−w′²
    /// because δ²Q₃ − Q = (s−s₁)²(s−s₂)², but the sign is the continuous
    /// branch: when the oval contains s₂ the slope touches ±1 there and the
    /// curve plane tips over, so the cosine must pass through zero rather
    /// than bounce off it.
    fn w_prime_complement(&self, v: f64) -> f64 {
        let s = self.s_of_v(v);
        let p = &self.quartic.params;
        -((s - p.s1) * (s - p.s2)) / (p.delta * self.quartic.q3_eval(s).sqrt())
    }
}

/// The δ→0 seed polynomial
/// A(s₁, s₂) = (s₁−s₂)²·U₁′(ω)·s₁ − ½Q₃′(s₁)(s₁−s₂) + Q₃(s₁):
/// the translational closing integral is asymptotically proportional to it.
/// Symmetric in (s₁, s₂) and quadratic in each argument separately.
pub fn a_value(lame: &LameData, s1: f64, s2: f64) -> f64 {
    let d = s1 - s2;
    d * d * lame.u1_prime_omega() * s1 - 0.5 * lame.q3_deriv(s1) * d + lame.q3(s1)
}

/// Ascending coefficients of A(s₁, ·) as a quadratic in the second slot:
/// [−(U′s₁ + U²), U₁′s₁² − U₂s₁ − U′, U₁′s₁].
pub fn a_quadratic_coeffs(lame: &LameData, s1: f64) -> [f64; 3] {
    let u1p = lame.u1_prime_omega();
    let up = lame.u_prime_omega();
    let u = lame.u_omega();
    [-(up * s1 + u * u), u1p * s1 * s1 - lame.u2_omega() * s1 - up, u1p * s1]
}

/// Real roots in s₂ of A(s₁, s₂) = 0, ascending; empty when the
/// discriminant is negative or the quadratic degenerates.
pub fn a_roots(lame: &LameData, s1: f64) -> Vec<f64> {
    let [c, b, a] = a_quadratic_coeffs(lame, s1);
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    // Stable quadratic formula: avoid cancellation in the small root.
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = (q / a, if q != 0.0 { c / q } else { -b / a });
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    vec![lo, hi]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::PlanarFamily;
    use approx::assert_abs_diff_eq;
    use std::sync::OnceLock;

    const LAMBDA: f64 = 0.3205128205;

    /// Published parameters of the 3-fold symmetric torus.
    fn golden_params() -> SphericalParams {
        SphericalParams { delta: 1.897366596, s1: -3.601381552, s2: 0.5965202011 }
    }

    fn lame() -> &'static LameData {
        static CACHE: OnceLock<LameData> = OnceLock::new();
        CACHE.get_or_init(|| LameData::from_lambda(LAMBDA).unwrap())
    }

    fn golden_curve() -> &'static ReparamCurve {
        static CACHE: OnceLock<ReparamCurve> = OnceLock::new();
        CACHE.get_or_init(|| ReparamCurve::build(lame(), &golden_params()).unwrap())
    }

    #[test]
    fn golden_oval_roots() {
        let q = QuarticQ::new(lame(), &golden_params()).unwrap();
        let (lo, hi) = q.oval();
        // Frozen from the polynomial root oracle; the residual checks keep
        // them honest against the quartic itself.
        assert_abs_diff_eq!(lo, 0.396103075281, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, 4.075452423494, epsilon = 1e-9);
        assert!(q.eval(lo).abs() < 1e-9);
        assert!(q.eval(hi).abs() < 1e-9);
        assert!(lo > q.s0());
        // The oval surrounds exactly one of the two parameters.
        let p = golden_params();
        assert!(p.s2 > lo && p.s2 < hi);
        assert!(p.s1 < lo);
    }

    #[test]
    fn quartic_factorization_against_cofactor() {
        let q = QuarticQ::new(lame(), &golden_params()).unwrap();
        let (lo, hi) = q.oval();
        for s in [lo + 0.1, 1.0, 2.5, hi - 0.2] {
            let rebuilt = (hi - s) * (s - lo) * q.comp_eval(s);
            assert_abs_diff_eq!(q.eval(s), rebuilt, epsilon = 1e-9 * rebuilt.abs().max(1.0));
            assert!(q.comp_eval(s) > 0.0);
        }
    }

    #[test]
    fn wrong_type_is_rejected() {
        // Both parameters inside the cubic's positive locus…
        let bad = SphericalParams { delta: 0.5, s1: 1.0, s2: 2.0 };
        assert!(matches!(QuarticQ::new(lame(), &bad), Err(Error::WrongOvalType)));
        // … or both outside.
        let bad = SphericalParams { delta: 0.5, s1: -1.0, s2: 0.1 };
        assert!(matches!(QuarticQ::new(lame(), &bad), Err(Error::WrongOvalType)));
        // Non-positive delta.
        let bad = SphericalParams { delta: 0.0, ..golden_params() };
        assert!(matches!(QuarticQ::new(lame(), &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn oval_integral_matches_direct_quadrature() {
        // ∫ ds/√Q via the angular substitution vs. a raw integral kept away
        // from the endpoints plus analytic endpoint corrections is hard to
        // do well — instead integrate a function vanishing at both ends,
        // where the raw quadrature converges, too.
        let q = QuarticQ::new(lame(), &golden_params()).unwrap();
        let (lo, hi) = q.oval();
        let desing = q
            .integrate_over_oval(|s| (s - lo) * (hi - s), OVAL_QUAD_TOL)
            .unwrap();
        let raw = integrate(
            |s| Ok((s - lo) * (hi - s) / q.eval(s).max(1e-300).sqrt()),
            lo + 1e-10,
            hi - 1e-10,
            1e-10,
        )
        .unwrap();
        assert_abs_diff_eq!(desing, raw, epsilon = 1e-7 * desing.abs());
    }

    #[test]
    fn reparam_slope_stays_admissible() {
        let curve = golden_curve();
        let period = curve.period();
        for j in 0..=1000 {
            let v = period * j as f64 / 1000.0;
            let wp = curve.w_prime(v);
            assert!(wp.abs() <= 1.0 + 1e-12, "w'({v}) = {wp}");
            let wc = curve.w_prime_complement(v);
            assert_abs_diff_eq!(wp * wp + wc * wc, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn reparam_is_periodic_and_mirror_symmetric() {
        let curve = golden_curve();
        let period = curve.period();
        assert_abs_diff_eq!(curve.w(0.0), curve.w(period), epsilon = 1e-10);
        assert_abs_diff_eq!(curve.w_prime(0.0), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(curve.w_prime(curve.v_half()), 0.0, epsilon = 1e-10);
        for x in [0.1, 0.3, 0.45 * period] {
            let a = curve.w(curve.v_half() + x);
            let b = curve.w(curve.v_half() - x);
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            assert_abs_diff_eq!(
                curve.w_prime(curve.v_half() + x),
                -curve.w_prime(curve.v_half() - x),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn w_prime_matches_finite_difference() {
        let curve = golden_curve();
        let d = 1e-6;
        for v in [0.2, 0.8, 1.7, 2.9] {
            let fd = (curve.w(v + d) - curve.w(v - d)) / (2.0 * d);
            assert_abs_diff_eq!(fd, curve.w_prime(v), epsilon = 1e-7);
        }
    }

    #[test]
    fn curve_stays_inside_frame_strip() {
        let curve = golden_curve();
        let strip = 2.0 * PI * LAMBDA;
        assert!(curve.w_base() > 0.0);
        assert!(curve.w_max() < strip, "w_max {} vs strip {strip}", curve.w_max());
    }

    #[test]
    fn s_is_inverse_metric_at_critical_line() {
        // s(v)·e^{h(ω, w(v))} = 1: ties the spherical tables (including the
        // w_base offset) to the planar family's conformal factor.
        let family = PlanarFamily::new(lame().clone());
        let curve = golden_curve();
        let omega = lame().omega();
        for j in 0..=16 {
            let v = curve.period() * j as f64 / 16.0;
            let s = curve.s_of_v(v);
            let eh = family.metric(omega, curve.w(v)).unwrap();
            assert_abs_diff_eq!(s * eh, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn s_prime_squared_is_quartic() {
        let curve = golden_curve();
        let d = 1e-6;
        let delta = golden_params().delta;
        for v in [0.3, 0.9, 1.9, 2.6] {
            let fd = (curve.s_of_v(v + d) - curve.s_of_v(v - d)) / (2.0 * d);
            let q = curve.quartic().eval(curve.s_of_v(v));
            assert_abs_diff_eq!(fd * fd, q / (delta * delta), epsilon = 1e-6 * q.abs().max(1.0));
            assert_abs_diff_eq!(fd, curve.s_prime(v), epsilon = 1e-6);
        }
    }

    #[test]
    fn slope_identity_from_metric_derivative() {
        // w′(v)² = (h_w² − p²)/h_w² at u = ω, p = (s−s₁)(s−s₂)/(sδ).
        let family = PlanarFamily::new(lame().clone());
        let curve = golden_curve();
        let omega = lame().omega();
        let p = golden_params();
        let d = 1e-5;
        for v in [0.4, 1.1, 2.2] {
            let w = curve.w(v);
            let s = curve.s_of_v(v);
            let h_w = (family.metric(omega, w + d).unwrap().ln()
                - family.metric(omega, w - d).unwrap().ln())
                / (2.0 * d);
            let big_p = (s - p.s1) * (s - p.s2) / (s * p.delta);
            let expected = (h_w * h_w - big_p * big_p) / (h_w * h_w);
            let wp = curve.w_prime(v);
            assert_abs_diff_eq!(wp * wp, expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn seed_polynomial_symmetry_and_quadratic_form() {
        let lame = lame();
        for (s1, s2) in [(-3.6, 0.59), (0.5, 2.0), (1.3, -0.7)] {
            assert_abs_diff_eq!(
                a_value(lame, s1, s2),
                a_value(lame, s2, s1),
                epsilon = 1e-10 * a_value(lame, s1, s2).abs().max(1.0)
            );
            let coeffs = a_quadratic_coeffs(lame, s1);
            assert_abs_diff_eq!(
                poly_eval(&coeffs, s2),
                a_value(lame, s1, s2),
                epsilon = 1e-10 * a_value(lame, s1, s2).abs().max(1.0)
            );
        }
    }

    #[test]
    fn seed_roots_vanish_and_exist_at_half() {
        let lame = lame();
        // At s₁ = 1/2 the quadratic has two real roots.
        let roots = a_roots(lame, 0.5);
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert!(a_value(lame, 0.5, *r).abs() < 1e-10);
        }
    }

    #[test]
    fn seed_roots_large_center_asymptotics() {
        let lame = lame();
        let u1p = lame.u1_prime_omega();
        for s1 in [300.0, 3000.0] {
            let roots = a_roots(lame, s1);
            assert_eq!(roots.len(), 2);
            // Small root → U′/(s₁U₁′); large root → −s₁ + U₂/U₁′.
            let small_pred = lame.u_prime_omega() / (s1 * u1p);
            let large_pred = -s1 + lame.u2_omega() / u1p;
            let small = roots.iter().cloned().min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
            let large = roots.iter().cloned().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
            assert!(
                (small / small_pred - 1.0).abs() < 5.0 / s1,
                "small root {small} vs {small_pred}"
            );
            assert!(
                (large / large_pred - 1.0).abs() < 5.0 / s1,
                "large root {large} vs {large_pred}"
            );
        }
    }
}
