//! Bonnet-pair assembly: from an isothermic cylinder with closed planar
//! curvature lines to the two immersions f± that are isometric and share
//! their mean curvature function, yet are non-congruent in general.
//!
//! For an isothermic immersion f with Christoffel dual f*, the pair is the
//! integral of the exact one-form
//!
//! ```text
//! df± = (±ε − f) · df* · (±ε + f),
//! ```
//!
//! and for the planar-curvature-line family everything integrates in closed
//! form. The quadratic terms are parameter shifts of f itself — the dual is
//! f*(u,v) = −f(π−u, v) and the inverted dual is R(ω)²·f(π−2ω+u, v) — while
//! the ε-linear translational piece splits into a scalar potential B̂(u, w)
//! conjugated into space coordinates plus a path B̃(v) depending on v alone:
//!
//! ```text
//! f±(u,v) = R²·f(π−2ω+u, v) − ε²·f(π−u, v) ± 2ε(Φ⁻¹ B̂ i Φ + B̃).
//! ```
//!
//! B̂ comes from a theta-quotient antiderivative; B̃ is integrated once per
//! assembly on the frame grid. [`BonnetPair::kpp_quadrature`] integrates the
//! defining one-form directly (in its ε-expansion form, through a different
//! arithmetic path) and serves as an independent cross-check of the closed
//! forms; [`BonnetPair::verify`] measures the pair invariants on a grid.

use crate::congruence::congruence_score;
use crate::error::{Error, Result};
use crate::planar::{IsothermicSurface, PlanarFamily, POLE_TOL};
use crate::quat::{Quat, Vec3};
use crate::theta::ThetaKind;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Step for the finite-difference second derivatives used by [`BonnetPair::verify`].
const CURVATURE_STEP: f64 = 1e-3;

/// Seed for the random corresponding subsets of the congruence score.
const CONGRUENCE_SEED: u64 = 0xB0B7;

/// Theta-function constants of the assembly, fixed by the lattice and ω.
#[derive(Debug, Clone, Copy)]
struct ThetaConsts {
    /// Radius factor R(ω) of the spherical curve.
    r: f64,
    /// Critical point ω of log θ₂.
    omega: f64,
    /// R² · θ₁(2ω)/θ₁′(0): overall scale of the potential B̂.
    bhat_scale: f64,
    /// θ₂″(ω)/θ₂(ω): coefficient of the part of B̂ linear in w.
    bhat_linear: f64,
    /// 2θ₂(ω)/θ₁′(0): scale of the meridian profile b̃.
    tilde_scale: f64,
}

/// Ratio of two theta values that is real by symmetry (both factors carry
/// the same constant phase on the real axis).
fn real_ratio(num: Complex64, den: Complex64) -> f64 {
    let q = num / den;
    debug_assert!(
        q.im.abs() <= 1e-8 * (1.0 + q.re.abs()),
        "theta ratio expected to be real, got {q}"
    );
    q.re
}

fn theta_consts(family: &PlanarFamily) -> Result<ThetaConsts> {
    let lame = family.lame();
    let lat = lame.lattice();
    let omega = lame.omega();
    let zero = Complex64::new(0.0, 0.0);
    let om = Complex64::new(omega, 0.0);
    let th1p0 = lat.theta(ThetaKind::One, zero, 1)?;
    let th1_2om = lat.theta(ThetaKind::One, 2.0 * om, 0)?;
    let th2_om = lat.theta(ThetaKind::Two, om, 0)?;
    let th2pp_om = lat.theta(ThetaKind::Two, om, 2)?;
    let r = lame.r_omega();
    Ok(ThetaConsts {
        r,
        omega,
        bhat_scale: r * r * real_ratio(th1_2om, th1p0),
        bhat_linear: real_ratio(th2pp_om, th2_om),
        tilde_scale: 2.0 * real_ratio(th2_om, th1p0),
    })
}

/// Closed-form antiderivative of Im_ℂ(γ_u⁻¹γ) in u, before base-point
/// normalization: a w-linear term plus the imaginary part of a θ₂
/// log-derivative at (u + iw − ω)/2.
fn bhat_raw(family: &PlanarFamily, k: &ThetaConsts, u: f64, w: f64) -> Result<f64> {
    let lat = family.lame().lattice();
    let z = Complex64::new(u - k.omega, w) * 0.5;
    // θ₂ zeros sit where θ₁ vanishes shifted by π/2.
    lat.guard_theta1_zero(z + 0.5 * PI, POLE_TOL)?;
    let num = lat.theta(ThetaKind::Two, z, 1)?;
    let den = lat.theta(ThetaKind::Two, z, 0)?;
    Ok(k.bhat_scale * (0.5 * k.bhat_linear * w - (num / den).im))
}

/// Meridian profile b̃(w) of the translational path: a complex-valued
/// combination of theta quotients along the imaginary axis. The v-derivative
/// of B̃ is the conjugated k-component of R·b̃ (plus the base-point gauge
/// term, see [`btilde_rate`]).
fn tilde_b(family: &PlanarFamily, k: &ThetaConsts, w: f64) -> Result<Complex64> {
    let lat = family.lame().lattice();
    let iw = Complex64::new(0.0, w);
    let iw_half = Complex64::new(0.0, 0.5 * w);
    lat.guard_theta1_zero(iw, POLE_TOL)?;
    lat.guard_theta1_zero(iw_half + 0.5 * PI, POLE_TOL)?;
    let quot = lat.theta(ThetaKind::Two, iw - k.omega, 0)? / lat.theta(ThetaKind::One, iw, 0)?;
    let logder =
        (lat.theta(ThetaKind::Two, iw_half, 1)? / lat.theta(ThetaKind::Two, iw_half, 0)?).im;
    let first = quot * k.tilde_scale * (0.5 * k.bhat_linear * w - logder);
    let edge = lat.theta(ThetaKind::One, iw_half - k.omega, 0)?
        / lat.theta(ThetaKind::Two, iw_half, 0)?;
    Ok(first - Complex64::new(0.0, 1.0) * edge * edge)
}

/// Derivative B̃′(v) of the translational path, in space coordinates.
///
/// The first term conjugates R·b̃(w)·k by the frame; the second compensates
/// the base-point normalization B̂(0, w₀) = 0: shifting B̂ by the constant
/// −κ changes the v-derivative of Φ⁻¹B̂iΦ by −κ(Φ⁻¹iΦ)′ = −2κ·c·Φ⁻¹ iX Φ
/// with X = complex_k(W₁), which B̃′ must absorb with the opposite sign.
/// Both terms carry the tilt cosine c(v) of the curve plane.
fn btilde_rate(surface: &IsothermicSurface, k: &ThetaConsts, kappa: f64, v: f64) -> Result<Vec3> {
    let rep = surface.rep();
    let w = rep.w(v);
    let tilt = rep.w_prime_complement(v);
    let tb = tilde_b(surface.family(), k, w)?;
    let w1 = surface.family().w1(w)?;
    let core = Quat::complex_k(tb) * k.r + Quat::I * Quat::complex_k(w1) * (2.0 * kappa);
    Ok(core.conj_by(surface.frame().phi(v)).im_h() * tilt)
}

/// The path B̃(v), integrated once over the frame period and extended to all
/// v through the frame monodromy: B̃(v + 𝒱) = B̃(𝒱) + M⁻¹ B̃(v) M.
#[derive(Debug, Clone)]
struct TranslationPath {
    period: f64,
    /// Values at the nodes v_j = j·period/n, j = 0..=n, with B̃(0) = 0.
    nodes: Vec<Vec3>,
    /// Exact derivatives B̃′(v_j), for cubic Hermite evaluation.
    slopes: Vec<Vec3>,
    monodromy: Quat,
}

impl TranslationPath {
    /// Cumulative Simpson integration of [`btilde_rate`] on the frame grid
    /// (the midpoint frame comes from the Hermite-interpolated Φ).
    fn integrate(surface: &IsothermicSurface, k: &ThetaConsts, kappa: f64) -> Result<Self> {
        let frame = surface.frame();
        let n = frame.steps();
        let period = frame.period();
        let h = period / n as f64;
        let mut nodes = Vec::with_capacity(n + 1);
        let mut slopes = Vec::with_capacity(n + 1);
        let mut acc = Vec3::ZERO;
        let mut here = btilde_rate(surface, k, kappa, 0.0)?;
        nodes.push(acc);
        slopes.push(here);
        for j in 0..n {
            let v = j as f64 * h;
            let mid = btilde_rate(surface, k, kappa, v + 0.5 * h)?;
            let next = btilde_rate(surface, k, kappa, v + h)?;
            acc += (here + mid * 4.0 + next) * (h / 6.0);
            nodes.push(acc);
            slopes.push(next);
            here = next;
        }
        Ok(TranslationPath { period, nodes, slopes, monodromy: frame.monodromy() })
    }

    /// Increment over one period, T = B̃(𝒱).
    fn period_shift(&self) -> Vec3 {
        *self.nodes.last().expect("nodes nonempty")
    }

    /// Cubic Hermite between stored nodes, for v inside [0, period].
    fn in_period(&self, v: f64) -> Vec3 {
        let n = self.nodes.len() - 1;
        let h = self.period / n as f64;
        let j = ((v / h).floor() as usize).min(n - 1);
        let t = (v - j as f64 * h) / h;
        let (p0, p1) = (self.nodes[j], self.nodes[j + 1]);
        let (d0, d1) = (self.slopes[j] * h, self.slopes[j + 1] * h);
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        p0 * h00 + d0 * h10 + p1 * h01 + d1 * h11
    }

    /// B̃ at arbitrary v. Across periods the increments are conjugated by
    /// monodromy powers: B̃(v + m𝒱) = Σ_{l<m} M⁻ˡ T Mˡ + M⁻ᵐ B̃(v) Mᵐ.
    fn eval(&self, v: f64) -> Vec3 {
        let mf = (v / self.period).floor();
        let base = self.in_period((v - mf * self.period).clamp(0.0, self.period));
        let m = mf as i32;
        if m == 0 {
            return base;
        }
        let t = self.period_shift();
        let mut shift = Vec3::ZERO;
        if m > 0 {
            for l in 0..m {
                shift += self.monodromy.powi(l).rotate(t);
            }
        } else {
            for l in m..0 {
                shift -= self.monodromy.powi(l).rotate(t);
            }
        }
        shift + self.monodromy.powi(m).rotate(base)
    }
}

/// The assembled Bonnet pair over an isothermic cylinder: closed-form
/// evaluators for f±, their derivatives, and their shared metric.
pub struct BonnetPair {
    surface: IsothermicSurface,
    epsilon: f64,
    consts: ThetaConsts,
    /// Base-point value κ subtracted from the raw potential so B̂(0, w₀) = 0.
    bhat_base: f64,
    btilde: TranslationPath,
}

/// Grid measurements of the defining Bonnet-pair invariants, produced by
/// [`BonnetPair::verify`]. All residuals are nonnegative; lengths are
/// normalized by `diameter` where noted.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PairReport {
    pub grid_nu: usize,
    pub grid_nv: usize,
    /// Number of frame periods k the verification domain spans in v.
    pub fold: u32,
    pub epsilon: f64,
    /// Bounding-box diagonal of f⁺ over the sampled domain.
    pub diameter: f64,
    /// Largest relative mismatch of the induced length elements (first
    /// fundamental forms) of f⁺ and f⁻ at corresponding samples.
    pub isometry_residual: f64,
    /// Largest relative deviation of |f±_u|, |f±_v| from the predicted
    /// conformal factor (ε² + |f|²)e^{−h}, and of ⟨f±_u, f±_v⟩ from 0.
    pub conformal_residual: f64,
    /// max |H⁺ − H⁻| over the grid (finite-difference second derivatives).
    pub mean_curvature_residual: f64,
    /// max ||Q⁺| − |Q⁻|| over the grid (Hopf coefficients in (u,v) charts).
    pub hopf_modulus_residual: f64,
    /// |mean(Q⁺ − Q⁻)|: the pair's constant Hopf offset; zero would mean the
    /// second fundamental forms coincide.
    pub hopf_shift_modulus: f64,
    /// max |Q⁺ − Q⁻ − mean| / |mean|: how constant the offset is.
    pub hopf_shift_variation: f64,
    /// max |f(u, v+k𝒱) − f(u,v)| / diameter over the grid (base surface).
    pub closure_base: f64,
    /// Same closure measure for f⁺.
    pub closure_plus: f64,
    /// Same closure measure for f⁻.
    pub closure_minus: f64,
    /// How far f±(u, v+𝒱) − M⁻¹ f±(u,v) M is from a constant translation,
    /// relative to diameter: the residual of inheriting the base surface's
    /// rotational symmetry.
    pub symmetry_residual: f64,
    /// Worst-subset best-rigid-fit RMS of f⁺ vs f⁻ over the best of the
    /// identity and v-reversed correspondences, / diameter.
    pub congruence_direct: f64,
    /// Same against the mirror image of f⁻.
    pub congruence_mirrored: f64,
}

impl BonnetPair {
    /// Build the pair over `surface` with offset parameter `epsilon`:
    /// fixes the theta constants, normalizes the potential at the base point
    /// (u, v) = (0, 0), and integrates the translational path B̃ on the
    /// frame grid.
    pub fn assemble(surface: IsothermicSurface, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(Error::Domain(format!("epsilon must be finite, got {epsilon}")));
        }
        let consts = theta_consts(surface.family())?;
        let bhat_base = bhat_raw(surface.family(), &consts, 0.0, surface.rep().w(0.0))?;
        let btilde = TranslationPath::integrate(&surface, &consts, bhat_base)?;
        Ok(BonnetPair { surface, epsilon, consts, bhat_base, btilde })
    }

    pub fn surface(&self) -> &IsothermicSurface {
        &self.surface
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Scalar potential B̂(u, w): 2π-periodic in u, normalized to vanish at
    /// the assembly base point (u, w) = (0, w(0)).
    pub fn bhat(&self, u: f64, w: f64) -> Result<f64> {
        Ok(bhat_raw(self.surface.family(), &self.consts, u, w)? - self.bhat_base)
    }

    /// Translational path B̃ at v (monodromy-extended beyond one period).
    pub fn btilde(&self, v: f64) -> Vec3 {
        self.btilde.eval(v)
    }

    /// The exact primitive of the ε-linear one-form Im_H(df*·f):
    /// Φ⁻¹ B̂(u, w(v)) i Φ + B̃(v).
    pub fn translation_part(&self, u: f64, v: f64) -> Result<Vec3> {
        let w = self.surface.rep().w(v);
        let b = self.bhat(u, w)?;
        let phi = self.surface.frame().phi(v);
        Ok((Quat::I * b).conj_by(phi).im_h() + self.btilde.eval(v))
    }

    /// R²·f(π−2ω+u, v) − ε²·f(π−u, v): the inverted-dual and dual terms,
    /// both parameter shifts of the base immersion.
    fn dual_combination(&self, u: f64, v: f64) -> Result<Vec3> {
        let r2 = self.consts.r * self.consts.r;
        let inverted_dual = self.surface.position(PI - 2.0 * self.consts.omega + u, v)?;
        let dual = self.surface.position(PI - u, v)?;
        Ok(inverted_dual * r2 - dual * (self.epsilon * self.epsilon))
    }

    /// The pair positions (f⁺, f⁻) at (u, v).
    pub fn positions(&self, u: f64, v: f64) -> Result<(Vec3, Vec3)> {
        let a = self.dual_combination(u, v)?;
        let t = self.translation_part(u, v)? * (2.0 * self.epsilon);
        Ok((a + t, a - t))
    }

    /// Dual derivative (f*)_u = e^{−2h} f_u as a quaternion in space
    /// coordinates.
    fn star_u(&self, u: f64, v: f64) -> Result<Quat> {
        let w = self.surface.rep().w(v);
        let e2h = self.surface.family().metric(u, w)?.powi(2);
        let gu = self.surface.family().gamma_u(u, w)?;
        Ok(Quat::complex_j(gu).conj_by(self.surface.frame().phi(v)) * (1.0 / e2h))
    }

    /// Dual derivative (f*)_v = −e^{−2h} f_v as a quaternion in space
    /// coordinates.
    fn star_v(&self, u: f64, v: f64) -> Result<Quat> {
        let rep = self.surface.rep();
        let w = rep.w(v);
        let e2h = self.surface.family().metric(u, w)?.powi(2);
        let gu = self.surface.family().gamma_u(u, w)?;
        let inner =
            Quat::I * (rep.w_prime_complement(v) * gu.norm()) + Quat::complex_k(gu * rep.w_prime(v));
        Ok(inner.conj_by(self.surface.frame().phi(v)) * (-1.0 / e2h))
    }

    /// (±ε − f)·x·(±ε + f) for both signs; the factors are conjugate
    /// quaternions, so the result of each is purely imaginary.
    fn sandwich(&self, f: Quat, x: Quat) -> (Vec3, Vec3) {
        let e = Quat::from_scalar(self.epsilon);
        (((e - f) * x * (e + f)).im_h(), ((-e - f) * x * (-e + f)).im_h())
    }

    /// Analytic (∂f⁺/∂u, ∂f⁻/∂u).
    pub fn derivative_u(&self, u: f64, v: f64) -> Result<(Vec3, Vec3)> {
        let f = self.surface.position_quat(u, v)?;
        Ok(self.sandwich(f, self.star_u(u, v)?))
    }

    /// Analytic (∂f⁺/∂v, ∂f⁻/∂v).
    pub fn derivative_v(&self, u: f64, v: f64) -> Result<(Vec3, Vec3)> {
        let f = self.surface.position_quat(u, v)?;
        Ok(self.sandwich(f, self.star_v(u, v)?))
    }

    /// Unit normals (n⁺, n⁻) from the analytic tangents.
    pub fn normals(&self, u: f64, v: f64) -> Result<(Vec3, Vec3)> {
        let (dup, dum) = self.derivative_u(u, v)?;
        let (dvp, dvm) = self.derivative_v(u, v)?;
        let degenerate =
            || Error::Domain(format!("degenerate tangent plane of the pair at ({u}, {v})"));
        let np = dup.cross(dvp).normalized().ok_or_else(degenerate)?;
        let nm = dum.cross(dvm).normalized().ok_or_else(degenerate)?;
        Ok((np, nm))
    }

    /// The common conformal factor of both pair surfaces,
    /// e^{h±} = (ε² + |f|²)·e^{−h}: the induced metrics are
    /// e^{2h±}(du² + dv²) for f⁺ and f⁻ alike — the isometry of the pair.
    pub fn pair_metric(&self, u: f64, v: f64) -> Result<f64> {
        let w = self.surface.rep().w(v);
        let eh = self.surface.family().metric(u, w)?;
        let f2 = self.surface.position_quat(u, v)?.norm_sqr();
        Ok((self.epsilon * self.epsilon + f2) / eh)
    }

    /// df± contracted with the direction (du, dv), evaluated through the
    /// ε-expansion −f·df*·f + ε²·df* ± ε(df*·f − f·df*). Algebraically equal
    /// to the factored sandwich, but a different arithmetic path — which is
    /// what makes the quadrature below an independent cross-check.
    fn expansion_step(&self, u: f64, v: f64, du: f64, dv: f64) -> Result<(Vec3, Vec3)> {
        let x = self.star_u(u, v)? * du + self.star_v(u, v)? * dv;
        let f = self.surface.position_quat(u, v)?;
        let e = self.epsilon;
        let even = -(f * x * f) + x * (e * e);
        let odd = (x * f - f * x) * e;
        Ok(((even + odd).im_h(), (even - odd).im_h()))
    }

    /// Direct line integration of the pair one-form df± along a polyline in
    /// the (u, v) parameter plane, with composite Simpson quadrature per
    /// segment. Returns the increments (Δf⁺, Δf⁻) from the first vertex to
    /// the last; the one-form is exact, so the result is path-independent
    /// and matches the closed-form assembly up to the choice of base point.
    pub fn kpp_quadrature(
        &self,
        path: &[(f64, f64)],
        steps_per_segment: usize,
    ) -> Result<(Vec3, Vec3)> {
        if path.len() < 2 {
            return Err(Error::Domain(format!(
                "quadrature path needs at least 2 vertices, got {}",
                path.len()
            )));
        }
        let n = steps_per_segment.max(2) + steps_per_segment % 2;
        let mut plus = Vec3::ZERO;
        let mut minus = Vec3::ZERO;
        for seg in path.windows(2) {
            let (u0, v0) = seg[0];
            let (u1, v1) = seg[1];
            let (du, dv) = (u1 - u0, v1 - v0);
            if du == 0.0 && dv == 0.0 {
                continue;
            }
            let h = 1.0 / n as f64;
            for i in 0..=n {
                let t = i as f64 * h;
                let weight = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                } * (h / 3.0);
                let (p, m) = self.expansion_step(u0 + t * du, v0 + t * dv, du, dv)?;
                plus += p * weight;
                minus += m * weight;
            }
        }
        Ok((plus, minus))
    }

    /// Measure the pair invariants on an `nu` × `nv` grid covering
    /// u ∈ [0, 2π), v ∈ [0, k𝒱) for `fold` = k frame periods.
    pub fn verify(&self, nu: usize, nv: usize, fold: u32) -> Result<PairReport> {
        if nu < 8 || nv < 8 {
            return Err(Error::Domain(format!(
                "verification grid must be at least 8×8, got {nu}×{nv}"
            )));
        }
        if fold == 0 {
            return Err(Error::Domain("fold count must be positive".into()));
        }
        let v_span = self.surface.v_period() * fold as f64;
        let du = 2.0 * PI / nu as f64;
        let dv = v_span / nv as f64;

        // Positions over two spans in v: rows nv.. are the +k𝒱 shifts used
        // for the closure residuals (and row nv closes the v-edges).
        let rows: Vec<(Vec<Vec3>, Vec<Vec3>, Vec<Vec3>)> = (0..2 * nv)
            .into_par_iter()
            .map(|j| {
                let v = j as f64 * dv;
                let mut base = Vec::with_capacity(nu);
                let mut plus = Vec::with_capacity(nu);
                let mut minus = Vec::with_capacity(nu);
                for i in 0..nu {
                    let u = i as f64 * du;
                    base.push(self.surface.position(u, v)?);
                    let (p, m) = self.positions(u, v)?;
                    plus.push(p);
                    minus.push(m);
                }
                Ok((base, plus, minus))
            })
            .collect::<Result<_>>()?;

        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for row in rows.iter().take(nv) {
            for p in &row.1 {
                lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
                hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
            }
        }
        let diameter = (hi - lo).norm();
        if !(diameter > 0.0) {
            return Err(Error::Domain("pair surface degenerated to a point".into()));
        }

        let mut closure_base: f64 = 0.0;
        let mut closure_plus: f64 = 0.0;
        let mut closure_minus: f64 = 0.0;
        for j in 0..nv {
            for i in 0..nu {
                closure_base = closure_base.max((rows[j + nv].0[i] - rows[j].0[i]).norm());
                closure_plus = closure_plus.max((rows[j + nv].1[i] - rows[j].1[i]).norm());
                closure_minus = closure_minus.max((rows[j + nv].2[i] - rows[j].2[i]).norm());
            }
        }

        // First-fundamental-form isometry from the analytic tangents, and
        // curvatures from finite differences of the analytic tangents.
        struct RowMeasure {
            isometry: f64,
            conformal: f64,
            dh: f64,
            dq_mod: f64,
            shifts: Vec<Complex64>,
        }
        let measures: Vec<RowMeasure> = (0..nv)
            .into_par_iter()
            .map(|j| {
                let v = j as f64 * dv;
                let mut m = RowMeasure {
                    isometry: 0.0,
                    conformal: 0.0,
                    dh: 0.0,
                    dq_mod: 0.0,
                    shifts: Vec::with_capacity(nu),
                };
                for i in 0..nu {
                    let u = i as f64 * du;
                    let (dup, dum) = self.derivative_u(u, v)?;
                    let (dvp, dvm) = self.derivative_v(u, v)?;
                    let (ep, em) = (dup.norm_sqr(), dum.norm_sqr());
                    let (gp, gm) = (dvp.norm_sqr(), dvm.norm_sqr());
                    let (fp, fm) = (dup.dot(dvp), dum.dot(dvm));
                    let scale = ep.max(gp);
                    m.isometry = m
                        .isometry
                        .max((ep - em).abs() / scale)
                        .max((gp - gm).abs() / scale)
                        .max((fp - fm).abs() / scale);
                    let predicted = self.pair_metric(u, v)?;
                    for t in [ep.sqrt(), em.sqrt(), gp.sqrt(), gm.sqrt()] {
                        m.conformal = m.conformal.max((t - predicted).abs() / predicted);
                    }
                    m.conformal = m.conformal.max(fp.abs() / scale).max(fm.abs() / scale);

                    let (uup, uum) =
                        central4_pair(|x| self.derivative_u(x, v), u, CURVATURE_STEP)?;
                    let (vvp, vvm) =
                        central4_pair(|x| self.derivative_v(u, x), v, CURVATURE_STEP)?;
                    let (uvp, uvm) =
                        central4_pair(|x| self.derivative_u(u, x), v, CURVATURE_STEP)?;
                    let (np, nm) = self.normals(u, v)?;
                    let hp = (uup + vvp).dot(np) / (2.0 * ep);
                    let hm = (uum + vvm).dot(nm) / (2.0 * em);
                    m.dh = m.dh.max((hp - hm).abs());
                    let qp =
                        Complex64::new(0.25 * (uup - vvp).dot(np), -0.5 * uvp.dot(np));
                    let qm =
                        Complex64::new(0.25 * (uum - vvm).dot(nm), -0.5 * uvm.dot(nm));
                    m.dq_mod = m.dq_mod.max((qp.norm() - qm.norm()).abs());
                    m.shifts.push(qp - qm);
                }
                Ok(m)
            })
            .collect::<Result<_>>()?;

        let mut isometry_residual: f64 = 0.0;
        let mut conformal_residual: f64 = 0.0;
        let mut mean_curvature_residual: f64 = 0.0;
        let mut hopf_modulus_residual: f64 = 0.0;
        let mut shift_sum = Complex64::new(0.0, 0.0);
        let mut count = 0usize;
        for m in &measures {
            isometry_residual = isometry_residual.max(m.isometry);
            conformal_residual = conformal_residual.max(m.conformal);
            mean_curvature_residual = mean_curvature_residual.max(m.dh);
            hopf_modulus_residual = hopf_modulus_residual.max(m.dq_mod);
            for s in &m.shifts {
                shift_sum += s;
                count += 1;
            }
        }
        let shift_mean = shift_sum / count as f64;
        let mut shift_dev: f64 = 0.0;
        for m in &measures {
            for s in &m.shifts {
                shift_dev = shift_dev.max((s - shift_mean).norm());
            }
        }
        let hopf_shift_modulus = shift_mean.norm();
        let hopf_shift_variation =
            if hopf_shift_modulus > 0.0 { shift_dev / hopf_shift_modulus } else { f64::INFINITY };

        // Rotational symmetry inheritance: over one frame period the pair
        // transforms by the same rotation as the base surface plus a
        // constant translation; measure how constant that translation is.
        let period = self.surface.v_period();
        let monodromy = self.surface.frame().monodromy();
        let sym_n = 12usize;
        let mut shifts_p = Vec::with_capacity(sym_n * sym_n);
        let mut shifts_m = Vec::with_capacity(sym_n * sym_n);
        for j in 0..sym_n {
            let v = j as f64 * v_span / sym_n as f64;
            for i in 0..sym_n {
                let u = i as f64 * 2.0 * PI / sym_n as f64;
                let (p0, m0) = self.positions(u, v)?;
                let (p1, m1) = self.positions(u, v + period)?;
                shifts_p.push(p1 - monodromy.rotate(p0));
                shifts_m.push(m1 - monodromy.rotate(m0));
            }
        }
        let symmetry_residual = [shifts_p, shifts_m]
            .iter()
            .map(|shifts| {
                let mut mean = Vec3::ZERO;
                for s in shifts {
                    mean += *s;
                }
                let mean = mean / shifts.len() as f64;
                shifts.iter().map(|s| (*s - mean).norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
            / diameter;

        // Congruence is a statement about shapes, so besides the identity
        // correspondence try the v-reversal (u, v) ↦ (u, −v), which is an
        // isometry of both pair metrics: profiles with even w(v) produce
        // pairs whose mirror relation lives exactly over that reversal.
        // Each branch keeps its best correspondence.
        let cloud_plus: Vec<Vec3> = rows.iter().take(nv).flat_map(|r| r.1.clone()).collect();
        let cloud_minus: Vec<Vec3> = rows.iter().take(nv).flat_map(|r| r.2.clone()).collect();
        let cloud_minus_reversed: Vec<Vec3> = (0..nv)
            .flat_map(|j| rows[(nv - j) % nv].2.clone())
            .collect();
        let score_id = congruence_score(&cloud_plus, &cloud_minus, CONGRUENCE_SEED)?;
        let score_rev = congruence_score(&cloud_plus, &cloud_minus_reversed, CONGRUENCE_SEED)?;
        let score = crate::congruence::CongruenceScore {
            direct: score_id.direct.min(score_rev.direct),
            mirrored: score_id.mirrored.min(score_rev.mirrored),
        };

        Ok(PairReport {
            grid_nu: nu,
            grid_nv: nv,
            fold,
            epsilon: self.epsilon,
            diameter,
            isometry_residual,
            conformal_residual,
            mean_curvature_residual,
            hopf_modulus_residual,
            hopf_shift_modulus,
            hopf_shift_variation,
            closure_base: closure_base / diameter,
            closure_plus: closure_plus / diameter,
            closure_minus: closure_minus / diameter,
            symmetry_residual,
            congruence_direct: score.direct / diameter,
            congruence_mirrored: score.mirrored / diameter,
        })
    }
}

/// Fourth-order central difference of a pair-valued function of one
/// variable, on the 5-point stencil x ± {0, 1, 2}·step.
fn central4_pair<F>(mut g: F, x: f64, step: f64) -> Result<(Vec3, Vec3)>
where
    F: FnMut(f64) -> Result<(Vec3, Vec3)>,
{
    let a = g(x - 2.0 * step)?;
    let b = g(x - step)?;
    let c = g(x + step)?;
    let d = g(x + 2.0 * step)?;
    let scale = 1.0 / (12.0 * step);
    Ok(((a.0 - d.0 + (c.0 - b.0) * 8.0) * scale, (a.1 - d.1 + (c.1 - b.1) * 8.0) * scale))
}
