//! The isothermic cylinder with closed planar curvature lines.
//!
//! The u-coordinate lines are planar curves γ(u, w) ⊂ ℂ, evaluated at
//! w = w(v) for a reparametrization function with |w′(v)| ≤ 1; a unit
//! quaternion frame Φ(v) rotates each curve plane into space:
//!
//! ```text
//! f(u,v)  = Φ(v)⁻¹ γ(u, w(v)) j Φ(v),
//! Φ′(v)   = √(1 − w′(v)²) · (W₁(w(v)) k) · Φ(v),      Φ(0) = 1.
//! ```
//!
//! All ingredients are theta-function quotients on the rhombic lattice at
//! the critical point ω (where the quotients' exponential correction
//! factors vanish): with half-argument z± = (u + iw ± ω)/2,
//!
//! ```text
//! A(u,w)    = θ₂(z₋) / θ₁(z₊)
//! γ_u(u,w)  = −i A²,      e^h = |A|²,      e^{iσ} = −i A²/|A|²,
//! γ(u,w)    = −i R(ω) θ₁((u+iw−3ω)/2) / θ₁(z₊),
//! W₁(w)     = i c θ₂(ω − iw) / θ₁(iw),    c = θ₁′(0)/(2θ₂(ω)).
//! ```
//!
//! The factorization e^h = A·Ā makes positivity of the metric manifest and
//! is the mechanism behind every reality statement in this module.
//!
//! Frames are integrated once per period with classical RK4 and stored;
//! off-node values come from cubic Hermite interpolation with the exact ODE
//! derivative at the nodes, and values beyond one period from the exact
//! monodromy extension Φ(v + m𝒱) = Φ(v) Mᵐ.

use crate::error::{Error, Result};
use crate::lame::LameData;
use crate::quat::{Quat, Vec3};
use crate::theta::ThetaKind;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Minimum distance from theta-quotient arguments to their poles.
pub(crate) const POLE_TOL: f64 = 1e-6;

/// Default number of RK4 steps per frame period. Chosen so that common
/// verification grids (256, 64 samples per period) land exactly on nodes.
pub const DEFAULT_FRAME_STEPS: usize = 4096;

/// A periodic reparametrization function w(v) with |w′| ≤ 1.
pub trait Reparametrization: Send + Sync {
    /// Period 𝒱 in v.
    fn period(&self) -> f64;
    fn w(&self, v: f64) -> f64;
    fn w_prime(&self, v: f64) -> f64;
    /// The tilt cosine c(v) of the curve plane: the continuous companion of
    /// the slope, with c² + w′² = 1.  The default is the non-negative root,
    /// which is the correct branch whenever |w′| stays strictly below 1.
    /// Profiles whose slope touches ±1 tip the plane over, so their cosine
    /// changes sign there; such implementations must override this with the
    /// signed closed form (the square root would bounce instead of crossing).
    fn w_prime_complement(&self, v: f64) -> f64 {
        (1.0 - self.w_prime(v).powi(2)).max(0.0).sqrt()
    }
}

/// Constant w(v) ≡ w₀: the frame rotates uniformly about a fixed axis.
/// Used as an analytic benchmark for the integrator.
#[derive(Debug, Clone, Copy)]
pub struct ConstantW {
    pub w0: f64,
    pub period: f64,
}

impl Reparametrization for ConstantW {
    fn period(&self) -> f64 {
        self.period
    }
    fn w(&self, _v: f64) -> f64 {
        self.w0
    }
    fn w_prime(&self, _v: f64) -> f64 {
        0.0
    }
}

/// Truncated Fourier reparametrization
/// w(v) = a₀ + Σ_k (s_k sin((k+1)v·2π/𝒱) + c_k cos((k+1)v·2π/𝒱)).
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FourierSeries {
    pub a0: f64,
    pub sin_coeffs: Vec<f64>,
    pub cos_coeffs: Vec<f64>,
    pub period: f64,
}

impl FourierSeries {
    pub fn new(a0: f64, sin_coeffs: Vec<f64>, cos_coeffs: Vec<f64>, period: f64) -> Self {
        FourierSeries { a0, sin_coeffs, cos_coeffs, period }
    }
}

impl Reparametrization for FourierSeries {
    fn period(&self) -> f64 {
        self.period
    }

    fn w(&self, v: f64) -> f64 {
        let base = 2.0 * PI / self.period;
        let mut acc = self.a0;
        for (k, &s) in self.sin_coeffs.iter().enumerate() {
            acc += s * ((k + 1) as f64 * base * v).sin();
        }
        for (k, &c) in self.cos_coeffs.iter().enumerate() {
            acc += c * ((k + 1) as f64 * base * v).cos();
        }
        acc
    }

    fn w_prime(&self, v: f64) -> f64 {
        let base = 2.0 * PI / self.period;
        let mut acc = 0.0;
        for (k, &s) in self.sin_coeffs.iter().enumerate() {
            let a = (k + 1) as f64 * base;
            acc += s * a * (a * v).cos();
        }
        for (k, &c) in self.cos_coeffs.iter().enumerate() {
            let a = (k + 1) as f64 * base;
            acc -= c * a * (a * v).sin();
        }
        acc
    }
}

/// A reparametrization depending linearly on a finite coefficient vector,
/// so solvers can adjust coefficients while the basis shape stays fixed.
pub trait CoefficientFamily: Reparametrization + Clone {
    fn coefficients(&self) -> Vec<f64>;
    /// Same basis, new coefficients. Panics if the length does not match.
    fn with_coefficients(&self, coeffs: &[f64]) -> Self;
}

impl CoefficientFamily for FourierSeries {
    fn coefficients(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(1 + self.sin_coeffs.len() + self.cos_coeffs.len());
        c.push(self.a0);
        c.extend_from_slice(&self.sin_coeffs);
        c.extend_from_slice(&self.cos_coeffs);
        c
    }

    fn with_coefficients(&self, coeffs: &[f64]) -> Self {
        let ns = self.sin_coeffs.len();
        assert_eq!(
            coeffs.len(),
            1 + ns + self.cos_coeffs.len(),
            "coefficient count must match the series shape"
        );
        FourierSeries {
            a0: coeffs[0],
            sin_coeffs: coeffs[1..1 + ns].to_vec(),
            cos_coeffs: coeffs[1 + ns..].to_vec(),
            period: self.period,
        }
    }
}

/// One basis element of a [`BasisFamily`]: a fixed sin/cos mix at a single
/// harmonic, scaled by one shared coefficient.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct HarmonicTerm {
    /// Harmonic index k; k = 0 contributes a constant through `cos_scale`.
    pub harmonic: u32,
    pub sin_scale: f64,
    pub cos_scale: f64,
}

/// Reparametrization built from harmonic terms with tied sin/cos parts,
///
/// ```text
/// w(v) = Σ_t c_t (sin_scale_t sin(k_t x) + cos_scale_t cos(k_t x)),  x = 2πv/𝒱,
/// ```
///
/// for solvers that move a few coefficients of a structured profile rather
/// than every Fourier coefficient independently.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct BasisFamily {
    terms: Vec<HarmonicTerm>,
    coeffs: Vec<f64>,
    period: f64,
}

impl BasisFamily {
    pub fn new(terms: Vec<HarmonicTerm>, coeffs: Vec<f64>, period: f64) -> Result<Self> {
        if terms.len() != coeffs.len() {
            return Err(Error::Domain(format!(
                "basis has {} terms but {} coefficients",
                terms.len(),
                coeffs.len()
            )));
        }
        if !(period > 0.0) {
            return Err(Error::Domain(format!("basis period must be positive, got {period}")));
        }
        Ok(BasisFamily { terms, coeffs, period })
    }

    /// Three-coefficient profile of period 2π with a constant, a first and
    /// a second harmonic:
    ///
    /// ```text
    /// w(v) = c + a (sin v/π − cos v/π²) + b (−sin 2v/(2π) + cos 2v/(4π²)).
    /// ```
    pub fn two_harmonic(c: f64, a: f64, b: f64) -> Self {
        let terms = vec![
            HarmonicTerm { harmonic: 0, sin_scale: 0.0, cos_scale: 1.0 },
            HarmonicTerm { harmonic: 1, sin_scale: 1.0 / PI, cos_scale: -1.0 / (PI * PI) },
            HarmonicTerm { harmonic: 2, sin_scale: -0.5 / PI, cos_scale: 0.25 / (PI * PI) },
        ];
        BasisFamily { terms, coeffs: vec![c, a, b], period: 2.0 * PI }
    }
}

impl Reparametrization for BasisFamily {
    fn period(&self) -> f64 {
        self.period
    }

    fn w(&self, v: f64) -> f64 {
        let base = 2.0 * PI / self.period;
        self.terms
            .iter()
            .zip(&self.coeffs)
            .map(|(t, &c)| {
                let x = t.harmonic as f64 * base * v;
                c * (t.sin_scale * x.sin() + t.cos_scale * x.cos())
            })
            .sum()
    }

    fn w_prime(&self, v: f64) -> f64 {
        let base = 2.0 * PI / self.period;
        self.terms
            .iter()
            .zip(&self.coeffs)
            .map(|(t, &c)| {
                let freq = t.harmonic as f64 * base;
                let x = freq * v;
                c * freq * (t.sin_scale * x.cos() - t.cos_scale * x.sin())
            })
            .sum()
    }
}

impl CoefficientFamily for BasisFamily {
    fn coefficients(&self) -> Vec<f64> {
        self.coeffs.clone()
    }

    fn with_coefficients(&self, coeffs: &[f64]) -> Self {
        assert_eq!(coeffs.len(), self.terms.len(), "coefficient count must match the basis");
        BasisFamily { terms: self.terms.clone(), coeffs: coeffs.to_vec(), period: self.period }
    }
}

/// The family of planar curves and its pointwise evaluators.
#[derive(Debug, Clone)]
pub struct PlanarFamily {
    lame: LameData,
}

impl PlanarFamily {
    pub fn new(lame: LameData) -> Self {
        PlanarFamily { lame }
    }

    pub fn lame(&self) -> &LameData {
        &self.lame
    }

    pub fn r_omega(&self) -> f64 {
        self.lame.r_omega()
    }

    fn theta(&self, kind: ThetaKind, z: Complex64, d: u8) -> Result<Complex64> {
        self.lame.lattice().theta(kind, z, d)
    }

    /// Guarded θ₁ evaluation at a pole-sensitive denominator argument.
    fn theta1_den(&self, z: Complex64) -> Result<Complex64> {
        self.lame.lattice().guard_theta1_zero(z, POLE_TOL)?;
        self.theta(ThetaKind::One, z, 0)
    }

    /// Guarded θ₂ evaluation at a pole-sensitive denominator argument.
    fn theta2_den(&self, z: Complex64) -> Result<Complex64> {
        let half_pi = Complex64::new(0.5 * PI, 0.0);
        self.lame.lattice().guard_theta1_zero(z + half_pi, POLE_TOL)?;
        self.theta(ThetaKind::Two, z, 0)
    }

    /// The analytic-extension quotient A = θ₂(z₋)/θ₁(z₊); γ_u = −iA².
    fn quotient_a(&self, u: f64, w: f64) -> Result<Complex64> {
        let omega = self.lame.omega();
        let z = Complex64::new(u, w);
        let zp = (z + omega) * 0.5;
        let zm = (z - omega) * 0.5;
        let num = self.theta(ThetaKind::Two, zm, 0)?;
        let den = self.theta1_den(zp)?;
        Ok(num / den)
    }

    /// The planar curve γ(u, w) ⊂ ℂ.
    pub fn gamma(&self, u: f64, w: f64) -> Result<Complex64> {
        let omega = self.lame.omega();
        let z = Complex64::new(u, w);
        let num = self.theta(ThetaKind::One, (z - 3.0 * omega) * 0.5, 0)?;
        let den = self.theta1_den((z + omega) * 0.5)?;
        Ok(Complex64::new(0.0, -self.lame.r_omega()) * num / den)
    }

    /// Tangent γ_u(u, w) = −i γ_w(u, w).
    pub fn gamma_u(&self, u: f64, w: f64) -> Result<Complex64> {
        let a = self.quotient_a(u, w)?;
        Ok(Complex64::new(0.0, -1.0) * a * a)
    }

    /// Conformal factor e^{h(u,w)} = |γ_u|.
    pub fn metric(&self, u: f64, w: f64) -> Result<f64> {
        Ok(self.quotient_a(u, w)?.norm_sqr())
    }

    /// Unitary factor e^{iσ(u,w)} of γ_u = e^{h+iσ}.
    pub fn sigma_factor(&self, u: f64, w: f64) -> Result<Complex64> {
        let a = self.quotient_a(u, w)?;
        Ok(Complex64::new(0.0, -1.0) * a * a / a.norm_sqr())
    }

    /// Frame coefficient W₁(w); singular at w ∈ 2πλ·ℤ, so reparametrization
    /// curves must keep w inside one open lattice strip.
    pub fn w1(&self, w: f64) -> Result<Complex64> {
        let omega = self.lame.omega();
        let iw = Complex64::new(0.0, w);
        let num = self.theta(ThetaKind::Two, omega - iw, 0)?;
        let den = self.theta1_den(iw)?;
        Ok(Complex64::new(0.0, self.lame.prefactor()) * num / den)
    }

    /// The combination γ_u⁻¹γ = R(ω)·θ₁(z₊)θ₁((u+iw−3ω)/2)/θ₂(z₋)², used by
    /// the translational-part integrands. Evaluated in product form to avoid
    /// the spurious pole of γ_u⁻¹ alone.
    pub fn gamma_u_inv_gamma(&self, u: f64, w: f64) -> Result<Complex64> {
        let omega = self.lame.omega();
        let z = Complex64::new(u, w);
        let zp = (z + omega) * 0.5;
        let zm = (z - omega) * 0.5;
        let n1 = self.theta(ThetaKind::One, zp, 0)?;
        let n2 = self.theta(ThetaKind::One, (z - 3.0 * omega) * 0.5, 0)?;
        let den = self.theta2_den(zm)?;
        Ok(self.lame.r_omega() * n1 * n2 / (den * den))
    }
}

/// One period of the rotation frame Φ(v), sampled on a uniform grid, plus
/// the exact monodromy for evaluation at arbitrary v.
#[derive(Debug, Clone)]
pub struct FrameCurve {
    period: f64,
    /// Φ at nodes v_j = j·period/n, j = 0..=n.
    nodes: Vec<Quat>,
    /// ODE right-hand side X(v_j) with Φ′ = XΦ, for Hermite interpolation.
    x_nodes: Vec<Quat>,
    monodromy: Quat,
}

impl FrameCurve {
    /// Integrate Φ′ = √(1−w′²)·(W₁(w)k)·Φ over one period with RK4,
    /// renormalizing to the unit sphere at every step.
    pub fn integrate(
        family: &PlanarFamily,
        rep: &dyn Reparametrization,
        n_steps: usize,
    ) -> Result<Self> {
        if n_steps < 8 {
            return Err(Error::Domain(format!("frame needs ≥ 8 steps, got {n_steps}")));
        }
        let period = rep.period();
        if !(period > 0.0) {
            return Err(Error::Domain(format!("frame period must be positive, got {period}")));
        }
        let x_at = |v: f64| -> Result<Quat> {
            let wp = rep.w_prime(v);
            if wp.abs() > 1.0 + 1e-9 {
                return Err(Error::Domain(format!(
                    "reparametrization slope |w'({v})| = {} exceeds 1",
                    wp.abs()
                )));
            }
            let w1 = family.w1(rep.w(v))?;
            Ok(Quat::complex_k(w1) * rep.w_prime_complement(v))
        };
        let h = period / n_steps as f64;
        let mut nodes = Vec::with_capacity(n_steps + 1);
        let mut x_nodes = Vec::with_capacity(n_steps + 1);
        let mut phi = Quat::ONE;
        let mut x_here = x_at(0.0)?;
        nodes.push(phi);
        x_nodes.push(x_here);
        for j in 0..n_steps {
            let v = j as f64 * h;
            let x_mid = x_at(v + 0.5 * h)?;
            let x_next = x_at(v + h)?;
            let k1 = x_here * phi;
            let k2 = x_mid * (phi + k1 * (0.5 * h));
            let k3 = x_mid * (phi + k2 * (0.5 * h));
            let k4 = x_next * (phi + k3 * h);
            phi = phi + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            phi = phi.normalized();
            nodes.push(phi);
            x_nodes.push(x_next);
            x_here = x_next;
        }
        let monodromy = *nodes.last().expect("nodes nonempty");
        Ok(FrameCurve { period, nodes, x_nodes, monodromy })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Number of RK4 steps per period.
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Monodromy M = Φ(0)⁻¹Φ(𝒱) = Φ(𝒱); Φ(v + m𝒱) = Φ(v)·Mᵐ.
    pub fn monodromy(&self) -> Quat {
        self.monodromy
    }

    /// Φ at node j (exact stored value), j ≤ steps().
    pub fn node(&self, j: usize) -> Quat {
        self.nodes[j]
    }

    /// Frame at arbitrary v: Hermite interpolation inside the stored period
    /// and exact monodromy powers across periods.
    pub fn phi(&self, v: f64) -> Quat {
        let m = (v / self.period).floor();
        let v0 = v - m * self.period;
        let base = self.phi_in_period(v0.clamp(0.0, self.period));
        let m = m as i32;
        if m == 0 {
            base
        } else {
            base * self.monodromy.powi(m)
        }
    }

    fn phi_in_period(&self, v: f64) -> Quat {
        let n = self.steps();
        let h = self.period / n as f64;
        let jf = (v / h).floor();
        let j = (jf as usize).min(n - 1);
        let t = (v - j as f64 * h) / h;
        let (p0, p1) = (self.nodes[j], self.nodes[j + 1]);
        // ODE derivatives Φ′ = XΦ at the segment ends, scaled to unit t.
        let (d0, d1) = (self.x_nodes[j] * p0 * h, self.x_nodes[j + 1] * p1 * h);
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        (p0 * h00 + d0 * h10 + p1 * h01 + d1 * h11).normalized()
    }
}

/// The immersed cylinder/torus: planar family + reparametrization + frame.
pub struct IsothermicSurface {
    family: PlanarFamily,
    rep: Box<dyn Reparametrization>,
    frame: FrameCurve,
}

impl IsothermicSurface {
    pub fn new(
        family: PlanarFamily,
        rep: Box<dyn Reparametrization>,
        n_steps: usize,
    ) -> Result<Self> {
        let frame = FrameCurve::integrate(&family, rep.as_ref(), n_steps)?;
        Ok(IsothermicSurface { family, rep, frame })
    }

    pub fn family(&self) -> &PlanarFamily {
        &self.family
    }

    pub fn rep(&self) -> &dyn Reparametrization {
        self.rep.as_ref()
    }

    pub fn frame(&self) -> &FrameCurve {
        &self.frame
    }

    pub fn r_omega(&self) -> f64 {
        self.family.r_omega()
    }

    /// Period of the frame (and of w(v)) in v.
    pub fn v_period(&self) -> f64 {
        self.frame.period()
    }

    /// The immersion as an imaginary quaternion, f = Φ⁻¹ γ j Φ.
    pub fn position_quat(&self, u: f64, v: f64) -> Result<Quat> {
        let gamma = self.family.gamma(u, self.rep.w(v))?;
        Ok(Quat::complex_j(gamma).conj_by(self.frame.phi(v)))
    }

    pub fn position(&self, u: f64, v: f64) -> Result<Vec3> {
        Ok(self.position_quat(u, v)?.im_h())
    }

    /// Analytic ∂f/∂u = Φ⁻¹ (γ_u j) Φ.
    pub fn d_u(&self, u: f64, v: f64) -> Result<Vec3> {
        let gu = self.family.gamma_u(u, self.rep.w(v))?;
        Ok(Quat::complex_j(gu).conj_by(self.frame.phi(v)).im_h())
    }

    /// Analytic ∂f/∂v = Φ⁻¹ (√(1−w′²) e^h i + w′ γ_u k) Φ.
    pub fn d_v(&self, u: f64, v: f64) -> Result<Vec3> {
        let w = self.rep.w(v);
        let wp = self.rep.w_prime(v);
        let wc = self.rep.w_prime_complement(v);
        let gu = self.family.gamma_u(u, w)?;
        let inner = Quat::I * (wc * gu.norm()) + Quat::complex_k(gu * wp);
        Ok(inner.conj_by(self.frame.phi(v)).im_h())
    }

    /// Unit normal n = Φ⁻¹ (w′ i − √(1−w′²) e^{iσ} k) Φ.
    pub fn normal(&self, u: f64, v: f64) -> Result<Vec3> {
        let w = self.rep.w(v);
        let wp = self.rep.w_prime(v);
        let wc = self.rep.w_prime_complement(v);
        let sig = self.family.sigma_factor(u, w)?;
        let inner = Quat::I * wp - Quat::complex_k(sig) * wc;
        Ok(inner.conj_by(self.frame.phi(v)).im_h())
    }

    /// Conformal factor e^{h} at (u, v).
    pub fn metric(&self, u: f64, v: f64) -> Result<f64> {
        self.family.metric(u, self.rep.w(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::RhombicLattice;
    use approx::assert_abs_diff_eq;
    use std::sync::OnceLock;

    const LAMBDA: f64 = 0.3205128205;

    fn family() -> &'static PlanarFamily {
        static CACHE: OnceLock<PlanarFamily> = OnceLock::new();
        CACHE.get_or_init(|| {
            PlanarFamily::new(LameData::new(RhombicLattice::new(LAMBDA).unwrap()).unwrap())
        })
    }

    /// A smooth test reparametrization staying inside the valid w-strip
    /// with |w′| < 1.
    fn test_rep() -> FourierSeries {
        FourierSeries::new(1.0, vec![0.25], vec![0.0, 0.05], 2.6)
    }

    fn surface() -> &'static IsothermicSurface {
        static CACHE: OnceLock<IsothermicSurface> = OnceLock::new();
        CACHE.get_or_init(|| {
            IsothermicSurface::new(family().clone(), Box::new(test_rep()), 2048).unwrap()
        })
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_is_periodic_in_u() {
        let fam = family();
        for (u, w) in [(0.3, 0.8), (1.7, 1.3), (-0.4, 0.5)] {
            let a = fam.gamma(u, w).unwrap();
            let b = fam.gamma(u + 2.0 * PI, w).unwrap();
            assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn gamma_u_matches_finite_difference() {
        let fam = family();
        let d = 1e-5;
        for (u, w) in [(0.3, 0.8), (1.2, 1.4), (2.5, 0.4)] {
            let fd = (fam.gamma(u + d, w).unwrap() - fam.gamma(u - d, w).unwrap()) / (2.0 * d);
            let an = fam.gamma_u(u, w).unwrap();
            assert!((fd - an).norm() < 1e-8 * an.norm().max(1.0), "at ({u},{w})");
        }
    }

    #[test]
    fn gamma_w_is_i_gamma_u() {
        let fam = family();
        let d = 1e-5;
        for (u, w) in [(0.4, 0.9), (1.9, 1.2)] {
            let fd = (fam.gamma(u, w + d).unwrap() - fam.gamma(u, w - d).unwrap()) / (2.0 * d);
            let expected = c(0.0, 1.0) * fam.gamma_u(u, w).unwrap();
            assert!((fd - expected).norm() < 1e-8 * expected.norm().max(1.0));
        }
    }

    #[test]
    fn gamma_mirror_conjugation() {
        // conj(γ(u,w)) = −γ(u,−w): the curve family is symmetric under
        // reflection of the strip.
        let fam = family();
        for (u, w) in [(0.5, 0.7), (1.3, 1.1), (2.2, 0.3)] {
            let lhs = fam.gamma(u, w).unwrap().conj();
            let rhs = -fam.gamma(u, -w).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn metric_matches_tangent_modulus_and_w1_pairing() {
        let fam = family();
        for (u, w) in [(0.3, 0.6), (1.1, 1.0), (2.0, 1.5)] {
            let eh = fam.metric(u, w).unwrap();
            assert!(eh > 0.0);
            assert_abs_diff_eq!(eh, fam.gamma_u(u, w).unwrap().norm(), epsilon = 1e-12 * eh);
            // e^h = 2 Re(W₁(w) · conj(γ(u,w))).
            let pairing =
                2.0 * (fam.w1(w).unwrap() * fam.gamma(u, w).unwrap().conj()).re;
            assert_abs_diff_eq!(eh, pairing, epsilon = 1e-10 * eh);
        }
    }

    #[test]
    fn sigma_riccati_equation() {
        // σ_w = W e^{iσ} + W₁ e^{−iσ} with W = conj(W₁); σ_w from a
        // branch-safe log-derivative finite difference.
        let fam = family();
        let d = 1e-5;
        for (u, w) in [(0.4, 0.8), (1.5, 1.2)] {
            let plus = fam.sigma_factor(u, w + d).unwrap();
            let minus = fam.sigma_factor(u, w - d).unwrap();
            let sigma_w = (plus / minus).ln().im / (2.0 * d);
            let w1 = fam.w1(w).unwrap();
            let sig = fam.sigma_factor(u, w).unwrap();
            let rhs = (w1.conj() * sig + w1 * sig.conj()).re;
            assert_abs_diff_eq!(sigma_w, rhs, epsilon = 1e-7 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn log_metric_is_harmonic_and_cauchy_riemann() {
        let fam = family();
        let d = 1e-4;
        let h = |u: f64, w: f64| fam.metric(u, w).unwrap().ln();
        let sigma_diff = |a: Complex64, b: Complex64| (a / b).ln().im;
        for (u, w) in [(0.5, 0.9), (1.4, 1.3)] {
            // h_uu + h_ww = 0.
            let lap = (h(u + d, w) + h(u - d, w) + h(u, w + d) + h(u, w - d) - 4.0 * h(u, w))
                / (d * d);
            assert!(lap.abs() < 1e-6, "laplacian {lap}");
            // h_u = σ_w, h_w = −σ_u.
            let h_u = (h(u + d, w) - h(u - d, w)) / (2.0 * d);
            let h_w = (h(u, w + d) - h(u, w - d)) / (2.0 * d);
            let s_w = sigma_diff(
                fam.sigma_factor(u, w + d).unwrap(),
                fam.sigma_factor(u, w - d).unwrap(),
            ) / (2.0 * d);
            let s_u = sigma_diff(
                fam.sigma_factor(u + d, w).unwrap(),
                fam.sigma_factor(u - d, w).unwrap(),
            ) / (2.0 * d);
            assert_abs_diff_eq!(h_u, s_w, epsilon = 1e-6);
            assert_abs_diff_eq!(h_w, -s_u, epsilon = 1e-6);
        }
    }

    #[test]
    fn riccati_for_metric_from_coefficients() {
        // h_u = U(u) e^h + U₁(u) e^{−h}.
        let fam = family();
        let lame = fam.lame();
        let d = 1e-5;
        for (u, w) in [(0.3, 0.7), (1.0, 1.1), (1.8, 1.6)] {
            let h_u = (fam.metric(u + d, w).unwrap().ln() - fam.metric(u - d, w).unwrap().ln())
                / (2.0 * d);
            let eh = fam.metric(u, w).unwrap();
            let rhs = lame.u_d(u, 0).unwrap() * eh + lame.u1_d(u, 0).unwrap() / eh;
            assert_abs_diff_eq!(h_u, rhs, epsilon = 1e-8 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn squared_w_slope_of_metric() {
        // h_w² = −U₁²e^{−2h} + 2U₁′e^{−h} − U₂(u) − 2U′e^{h} − U²e^{2h},
        // with U₂(u) = U″/U + 2UU₁ away from ω.
        let fam = family();
        let lame = fam.lame();
        let d = 1e-5;
        for (u, w) in [(0.45, 0.8), (1.2, 1.3)] {
            let h_w = (fam.metric(u, w + d).unwrap().ln() - fam.metric(u, w - d).unwrap().ln())
                / (2.0 * d);
            let eh = fam.metric(u, w).unwrap();
            let u0 = lame.u_d(u, 0).unwrap();
            let u1 = lame.u1_d(u, 0).unwrap();
            let u2_at_u = lame.u_d(u, 2).unwrap() / u0 + 2.0 * u0 * u1;
            let rhs = -u1 * u1 / (eh * eh) + 2.0 * lame.u1_d(u, 1).unwrap() / eh
                - u2_at_u
                - 2.0 * lame.u_d(u, 1).unwrap() * eh
                - u0 * u0 * eh * eh;
            assert_abs_diff_eq!(h_w * h_w, rhs, epsilon = 1e-7 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn curve_at_critical_u_lies_on_sphere() {
        let fam = family();
        let r = fam.r_omega().abs();
        let omega = fam.lame().omega();
        for w in [0.3, 0.8, 1.4, 1.9] {
            assert_abs_diff_eq!(fam.gamma(omega, w).unwrap().norm(), r, epsilon = 1e-11 * r);
        }
    }

    #[test]
    fn tangent_quotient_closed_form() {
        let fam = family();
        for (u, w) in [(0.6, 0.9), (1.7, 1.2)] {
            let direct = fam.gamma(u, w).unwrap() / fam.gamma_u(u, w).unwrap();
            let closed = fam.gamma_u_inv_gamma(u, w).unwrap();
            assert!((direct - closed).norm() < 1e-10 * closed.norm().max(1.0));
        }
    }

    #[test]
    fn pole_proximity_is_rejected() {
        let fam = family();
        let omega = fam.lame().omega();
        // γ's denominator θ₁((u+iw+ω)/2) vanishes at u = −ω, w = 0.
        assert!(matches!(
            fam.gamma(-omega + 1e-9, 1e-9),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn constant_w_frame_matches_exponential() {
        let fam = family();
        let rep = ConstantW { w0: 0.9, period: 2.0 };
        let frame = FrameCurve::integrate(fam, &rep, 512).unwrap();
        let x = Quat::complex_k(fam.w1(0.9).unwrap());
        let angle = x.norm();
        let axis = x * (1.0 / angle);
        for j in [17, 150, 303, 512] {
            let v = 2.0 * j as f64 / 512.0;
            let exact = Quat::from_scalar((angle * v).cos()) + axis * (angle * v).sin();
            let got = frame.node(j);
            assert!((got - exact).norm() < 1e-10, "node {j}: {got:?} vs {exact:?}");
        }
        // Interpolated values agree off-node too.
        let v = 0.7137;
        let exact = Quat::from_scalar((angle * v).cos()) + axis * (angle * v).sin();
        assert!((frame.phi(v) - exact).norm() < 1e-10);
    }

    #[test]
    fn frame_is_unit_and_extends_by_monodromy() {
        let s = surface();
        let frame = s.frame();
        for j in [0, 300, 1024, 2048] {
            assert_abs_diff_eq!(frame.node(j).norm(), 1.0, epsilon = 1e-10);
        }
        let v = 0.37 * s.v_period();
        let direct = frame.phi(v);
        for m in [-2i32, 1, 3] {
            let shifted = frame.phi(v + m as f64 * s.v_period());
            let expected = direct * frame.monodromy().powi(m);
            assert!((shifted - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn frame_integrator_is_fourth_order()  {
        let fam = family();
        let rep = test_rep();
        let coarse = FrameCurve::integrate(fam, &rep, 256).unwrap().monodromy();
        let medium = FrameCurve::integrate(fam, &rep, 512).unwrap().monodromy();
        let fine = FrameCurve::integrate(fam, &rep, 4096).unwrap().monodromy();
        let e_coarse = (coarse - fine).norm();
        let e_medium = (medium - fine).norm();
        assert!(
            e_coarse / e_medium > 12.0,
            "convergence ratio {} (coarse {e_coarse:e}, medium {e_medium:e})",
            e_coarse / e_medium
        );
    }

    #[test]
    fn immersion_is_isothermic() {
        let s = surface();
        for (u, v) in [(0.4, 0.3), (1.3, 1.1), (2.7, 2.0)] {
            let fu = s.d_u(u, v).unwrap();
            let fv = s.d_v(u, v).unwrap();
            let eh = s.metric(u, v).unwrap();
            assert!(fu.dot(fv).abs() < 1e-10 * eh * eh, "⟨f_u,f_v⟩ at ({u},{v})");
            assert_abs_diff_eq!(fu.norm(), eh, epsilon = 1e-10 * eh);
            assert_abs_diff_eq!(fv.norm(), eh, epsilon = 1e-10 * eh);
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let s = surface();
        let d = 1e-5;
        for (u, v) in [(0.5, 0.4), (1.8, 1.6)] {
            let fd_u = (s.position(u + d, v).unwrap() - s.position(u - d, v).unwrap()) / (2.0 * d);
            assert!((fd_u - s.d_u(u, v).unwrap()).norm() < 1e-8);
            let fd_v = (s.position(u, v + d).unwrap() - s.position(u, v - d).unwrap()) / (2.0 * d);
            assert!((fd_v - s.d_v(u, v).unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn normal_is_unit_and_orthogonal() {
        let s = surface();
        for (u, v) in [(0.4, 0.5), (1.5, 1.9), (2.9, 0.8)] {
            let n = s.normal(u, v).unwrap();
            let eh = s.metric(u, v).unwrap();
            assert_abs_diff_eq!(n.norm(), 1.0, epsilon = 1e-10);
            assert!(n.dot(s.d_u(u, v).unwrap()).abs() < 1e-9 * eh);
            assert!(n.dot(s.d_v(u, v).unwrap()).abs() < 1e-9 * eh);
        }
    }

    #[test]
    fn normal_derivative_matches_curvature_sign() {
        // Along a u-curvature line n_u = −p e^{−h} f_u with
        // p = σ_u·cosφ = −σ_u·√(1−w′²): n_u must be parallel to f_u.
        let s = surface();
        let d = 1e-5;
        let (u, v) = (0.7, 0.9);
        let n_u = (s.normal(u + d, v).unwrap() - s.normal(u - d, v).unwrap()) / (2.0 * d);
        let fu = s.d_u(u, v).unwrap();
        let cross = n_u.cross(fu);
        assert!(cross.norm() < 1e-7 * n_u.norm() * fu.norm() + 1e-12);
    }

    #[test]
    fn surface_point_at_critical_u_on_sphere() {
        let s = surface();
        let r = s.r_omega().abs();
        let omega = s.family().lame().omega();
        for v in [0.2, 0.9, 1.7, 2.4] {
            assert_abs_diff_eq!(s.position(omega, v).unwrap().norm(), r, epsilon = 1e-9 * r);
        }
    }

    #[test]
    fn critical_point_and_tangent_antiparallel() {
        // f(ω,v)/R(ω) = −f_u(ω,v)/|f_u(ω,v)|.
        let s = surface();
        let omega = s.family().lame().omega();
        let r = s.r_omega();
        for v in [0.3, 1.2, 2.1] {
            let lhs = s.position(omega, v).unwrap() / r;
            let fu = s.d_u(omega, v).unwrap();
            let rhs = fu / (-fu.norm());
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn inversion_involution() {
        // f(2ω−u, v) = R(ω)² f(u,v)/|f(u,v)|²  (i.e. −R²f⁻¹ as quaternions).
        let s = surface();
        let omega = s.family().lame().omega();
        let r2 = s.r_omega() * s.r_omega();
        for (u, v) in [(0.5, 0.4), (1.6, 1.3), (2.8, 2.2)] {
            let f = s.position(u, v).unwrap();
            let lhs = s.position(2.0 * omega - u, v).unwrap();
            let rhs = f * (r2 / f.norm_sqr());
            assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0), "at ({u},{v})");
        }
    }

    #[test]
    fn dual_shift_derivative_identities() {
        // The dual candidate f*(u,v) = −f(π−u, v) satisfies the Christoffel
        // relations (f*)_u = e^{−2h} f_u, (f*)_v = −e^{−2h} f_v pointwise.
        let s = surface();
        for (u, v) in [(0.4, 0.6), (1.2, 1.8)] {
            let eh2 = s.metric(u, v).unwrap().powi(2);
            let star_u = s.d_u(PI - u, v).unwrap();
            let fu = s.d_u(u, v).unwrap();
            assert!((star_u - fu / eh2).norm() < 1e-9 / eh2);
            let star_v = s.d_v(PI - u, v).unwrap() * (-1.0);
            let fv = s.d_v(u, v).unwrap();
            assert!((star_v - fv * (-1.0 / eh2)).norm() < 1e-9 / eh2);
        }
    }

    #[test]
    fn isothermic_integrability_residuals() {
        // Gauss–Codazzi in curvature-line form: with p = ⟨n_u, f_u⟩(−e^{−h}),
        // q = ⟨n_v, f_v⟩(−e^{−h}): h_uu + h_vv = −pq, p_v = h_v q, q_u = h_u p.
        let s = surface();
        let d = 1e-4;
        let (u, v) = (0.8, 1.1);
        let p_at = |u: f64, v: f64| {
            let n_u = (s.normal(u + d, v).unwrap() - s.normal(u - d, v).unwrap()) / (2.0 * d);
            let fu = s.d_u(u, v).unwrap();
            let eh = s.metric(u, v).unwrap();
            -n_u.dot(fu) / (eh * eh) * eh
        };
        let q_at = |u: f64, v: f64| {
            let n_v = (s.normal(u, v + d).unwrap() - s.normal(u, v - d).unwrap()) / (2.0 * d);
            let fv = s.d_v(u, v).unwrap();
            let eh = s.metric(u, v).unwrap();
            -n_v.dot(fv) / (eh * eh) * eh
        };
        let h_at = |u: f64, v: f64| s.metric(u, v).unwrap().ln();
        let lap = (h_at(u + d, v) + h_at(u - d, v) + h_at(u, v + d) + h_at(u, v - d)
            - 4.0 * h_at(u, v))
            / (d * d);
        assert_abs_diff_eq!(lap, -p_at(u, v) * q_at(u, v), epsilon = 1e-5);
        let p_v = (p_at(u, v + d) - p_at(u, v - d)) / (2.0 * d);
        let h_v = (h_at(u, v + d) - h_at(u, v - d)) / (2.0 * d);
        assert_abs_diff_eq!(p_v, h_v * q_at(u, v), epsilon = 1e-5);
        let q_u = (q_at(u + d, v) - q_at(u - d, v)) / (2.0 * d);
        let h_u = (h_at(u + d, v) - h_at(u - d, v)) / (2.0 * d);
        assert_abs_diff_eq!(q_u, h_u * p_at(u, v), epsilon = 1e-5);
    }
}
