//! Coefficient functions U(u), U₁(u) of the Riccati equation
//! h_u = U e^h + U₁ e^{−h} satisfied by the metric of the planar-curvature-
//! line family, their derivatives, the constants at the critical point ω,
//! and the cubic Q₃(s) that governs the spherical reparametrization.
//!
//! At the critical point both functions are plain theta quotients
//!
//! ```text
//! U(u)  = −c · θ₁(u + ω) / θ₂(u),      U₁(u) = +c · θ₁(u − ω) / θ₂(u),
//! c     = θ₁′(0) / (2 θ₂(ω)),
//! ```
//!
//! real-valued for real u because every θ₁/θ₂ value at real argument on the
//! rhombic lattice carries the same constant phase. (Away from the critical
//! point the quotients acquire exponential factors e^{∓u·θ₂′(ω)/θ₂(ω)};
//! criticality of ω makes those identically one, which is why this module
//! always locates ω itself.)
//!
//! U and U₁ solve the same integer Lamé equation y″ = (C₁ − 8UU₁)·…
//! normalized so that U″/U = U₁″/U₁; the shared constant C₁ equals
//! U″(ω)/U(ω) since U₁(ω) = 0. These identities are exercised in tests and
//! anchor the cubic
//!
//! ```text
//! Q₃(s) = 2U₁′(ω)s³ − U₂(ω)s² − 2U′(ω)s − U(ω)²,
//! ```
//!
//! whose positive root s₀ = θ₁(ω)²/θ₂(0)² bounds the admissible range of
//! s = e^{−h(ω,w)}.

use crate::error::{Error, Result};
use crate::numerics::poly_eval;
use crate::theta::{RhombicLattice, ThetaKind};
use num_complex::Complex64;

/// Tolerance for the residual imaginary part of theta quotients that are
/// real by the lattice symmetry; exceeding it indicates a programming error
/// upstream, so it is asserted, not returned.
const IM_TOL: f64 = 1e-9;

/// Minimum distance from a real evaluation point to a zero of θ₂ (pole of
/// U, U₁).
const POLE_TOL: f64 = 1e-6;

/// Lamé-type coefficient data at the critical point ω of a rhombic lattice.
#[derive(Debug, Clone)]
pub struct LameData {
    lattice: RhombicLattice,
    omega: f64,
    prefactor: f64,
    u_omega: f64,
    u_prime_omega: f64,
    u1_prime_omega: f64,
    u2_omega: f64,
    r_omega: f64,
    s0: f64,
}

impl LameData {
    /// Build from a lattice, locating the critical ω and caching the
    /// constants entering the periodicity integrals.
    pub fn new(lattice: RhombicLattice) -> Result<Self> {
        let omega = lattice.critical_omega()?;
        let theta1_d0 = |z: f64, d: u8| lattice.theta(ThetaKind::One, Complex64::new(z, 0.0), d);
        let theta2_d0 = |z: f64, d: u8| lattice.theta(ThetaKind::Two, Complex64::new(z, 0.0), d);

        let t1p0 = theta1_d0(0.0, 1)?;
        let t2w = theta2_d0(omega, 0)?;
        let prefactor = real_part((t1p0 / t2w) * 0.5, "prefactor");

        let mut data = LameData {
            lattice,
            omega,
            prefactor,
            u_omega: 0.0,
            u_prime_omega: 0.0,
            u1_prime_omega: 0.0,
            u2_omega: 0.0,
            r_omega: 0.0,
            s0: 0.0,
        };
        data.u_omega = data.u_d(omega, 0)?;
        data.u_prime_omega = data.u_d(omega, 1)?;
        data.u1_prime_omega = data.u1_d(omega, 1)?;
        data.u2_omega = data.u_d(omega, 2)? / data.u_omega;
        data.r_omega = -1.0 / data.u_omega;

        // Positive root of Q₃ from the closed form, polished on the cubic.
        let t1w = data.theta_c(ThetaKind::One, omega, 0)?;
        let t20 = data.theta_c(ThetaKind::Two, 0.0, 0)?;
        let mut s0 = real_part(t1w / t20, "s0 quotient").powi(2);
        let coeffs = data.q3_coeffs();
        for _ in 0..4 {
            let f = poly_eval(&coeffs, s0);
            let df = poly_eval(&[coeffs[1], 2.0 * coeffs[2], 3.0 * coeffs[3]], s0);
            if df != 0.0 {
                s0 -= f / df;
            }
        }
        data.s0 = s0;
        Ok(data)
    }

    pub fn from_lambda(lambda: f64) -> Result<Self> {
        LameData::new(RhombicLattice::new(lambda)?)
    }

    pub fn lattice(&self) -> &RhombicLattice {
        &self.lattice
    }

    /// The critical point ω ∈ (0, π/4).
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// θ₁′(0)/(2θ₂(ω)), the common scale of U and U₁.
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn u_omega(&self) -> f64 {
        self.u_omega
    }

    pub fn u_prime_omega(&self) -> f64 {
        self.u_prime_omega
    }

    pub fn u1_prime_omega(&self) -> f64 {
        self.u1_prime_omega
    }

    /// U₂(ω) = U″(ω)/U(ω), the Lamé constant.
    pub fn u2_omega(&self) -> f64 {
        self.u2_omega
    }

    /// Radius R(ω) = −1/U(ω) of the sphere carrying the v-curve at u = ω.
    pub fn r_omega(&self) -> f64 {
        self.r_omega
    }

    /// Positive root of Q₃; the admissible range of s = e^{−h(ω,w)} is
    /// [s₀, ∞).
    pub fn s0(&self) -> f64 {
        self.s0
    }

    /// Theta value at real argument. Raw values carry the constant lattice
    /// phase; only quotients of them are real.
    fn theta_c(&self, kind: ThetaKind, z: f64, d: u8) -> Result<Complex64> {
        self.lattice.theta(kind, Complex64::new(z, 0.0), d)
    }

    fn guard_theta2_pole(&self, u: f64) -> Result<()> {
        // θ₂(u) = θ₁(u + π/2): poles of U, U₁ sit at u = π/2 mod π.
        let shifted = Complex64::new(u + std::f64::consts::FRAC_PI_2, 0.0);
        let dist = self.lattice.theta1_zero_distance(shifted);
        if dist < POLE_TOL {
            return Err(Error::PoleProximity { dist, tol: POLE_TOL });
        }
        Ok(())
    }

    /// k-th derivative (k ≤ 2) of U at real u.
    pub fn u_d(&self, u: f64, k: u8) -> Result<f64> {
        self.guard_theta2_pole(u)?;
        let v = self.quotient_d(u + self.omega, u, k)?;
        Ok(-self.prefactor * v)
    }

    /// k-th derivative (k ≤ 2) of U₁ at real u.
    pub fn u1_d(&self, u: f64, k: u8) -> Result<f64> {
        self.guard_theta2_pole(u)?;
        let v = self.quotient_d(u - self.omega, u, k)?;
        Ok(self.prefactor * v)
    }

    /// d^k/du^k [θ₁(a)/θ₂(b)] for a = u ± ω, b = u (real output).
    fn quotient_d(&self, a: f64, b: f64, k: u8) -> Result<f64> {
        let t1 = |d: u8| self.lattice.theta(ThetaKind::One, Complex64::new(a, 0.0), d);
        let t2 = |d: u8| self.lattice.theta(ThetaKind::Two, Complex64::new(b, 0.0), d);
        let value = match k {
            0 => t1(0)? / t2(0)?,
            1 => {
                let (n, np) = (t1(0)?, t1(1)?);
                let (d, dp) = (t2(0)?, t2(1)?);
                (np * d - n * dp) / (d * d)
            }
            2 => {
                let (n, np, npp) = (t1(0)?, t1(1)?, t1(2)?);
                let (d, dp, dpp) = (t2(0)?, t2(1)?, t2(2)?);
                (npp * d * d - n * dpp * d - 2.0 * np * dp * d + 2.0 * n * dp * dp) / (d * d * d)
            }
            _ => {
                return Err(Error::Domain(format!(
                    "coefficient derivative order {k} not supported (max 2)"
                )))
            }
        };
        Ok(real_part(value, "U/U1 quotient"))
    }

    /// Ascending coefficients of Q₃(s) = 2U₁′(ω)s³ − U₂(ω)s² − 2U′(ω)s − U(ω)².
    pub fn q3_coeffs(&self) -> [f64; 4] {
        [
            -self.u_omega * self.u_omega,
            -2.0 * self.u_prime_omega,
            -self.u2_omega,
            2.0 * self.u1_prime_omega,
        ]
    }

    pub fn q3(&self, s: f64) -> f64 {
        poly_eval(&self.q3_coeffs(), s)
    }

    pub fn q3_deriv(&self, s: f64) -> f64 {
        let c = self.q3_coeffs();
        poly_eval(&[c[1], 2.0 * c[2], 3.0 * c[3]], s)
    }
}

fn real_part(v: Complex64, what: &str) -> f64 {
    debug_assert!(
        v.im.abs() <= IM_TOL * v.re.abs().max(1.0),
        "{what} should be real, got {v}"
    );
    v.re
}
