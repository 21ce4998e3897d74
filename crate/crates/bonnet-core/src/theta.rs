//! Jacobi theta functions θ₁…θ₄ and their z-derivatives on the rhombic
//! lattice τ = 1/2 + iλ.
//!
//! Series (nome q = e^{iπτ}):
//!
//! ```text
//! θ₁(z) = 2 Σ_{n≥0} (−1)ⁿ q^{(n+1/2)²} sin((2n+1)z)
//! θ₂(z) = 2 Σ_{n≥0}        q^{(n+1/2)²} cos((2n+1)z)
//! θ₃(z) = 1 + 2 Σ_{n≥1}        q^{n²} cos(2nz)
//! θ₄(z) = 1 + 2 Σ_{n≥1} (−1)ⁿ  q^{n²} cos(2nz)
//! ```
//!
//! On the rhombic lattice q = i·e^{−πλ}, so q^{(n+1/2)²} =
//! e^{iπ/8}·(−1)^{n(n+1)/2}·e^{−πλ(n+1/2)²} and q^{n²} = iⁿ²·e^{−πλn²}:
//! every θ₁/θ₂ coefficient shares the constant phase e^{iπ/8} (this is why
//! ratios of θ₁/θ₂ values at real arguments are real, which the surface
//! formulas rely on throughout).
//!
//! Terms are accumulated with incremental products T±ₙ = cₙ e^{±i(2n+1)z}
//! (never splitting the decaying coefficient from the growing exponential),
//! so partial terms stay bounded by e^{(Im z)²/(πλ)} and the evaluation
//! cannot overflow inside its validity strip. The strip itself is enforced:
//! the relative tail of the truncated series after N terms is
//! exp(−πλ·(N + 3/2 − |Im z|/(πλ))²), and evaluation fails with a
//! truncation error instead of silently degrading.

use crate::error::{Error, Result};
use crate::numerics::brent_root;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Which of the four Jacobi theta functions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaKind {
    One,
    Two,
    Three,
    Four,
}

impl ThetaKind {
    /// Classical index 1–4.
    pub fn index(self) -> u8 {
        match self {
            ThetaKind::One => 1,
            ThetaKind::Two => 2,
            ThetaKind::Three => 3,
            ThetaKind::Four => 4,
        }
    }

    pub fn from_index(index: u8) -> Option<Self> {
        match index {
            1 => Some(ThetaKind::One),
            2 => Some(ThetaKind::Two),
            3 => Some(ThetaKind::Three),
            4 => Some(ThetaKind::Four),
            _ => None,
        }
    }
}

/// Relative tail target: series are truncated only when the remainder is
/// below this fraction of the largest partial term (≈ f64 round-off).
const TAIL_GOAL_LOG: f64 = -41.45; // ln(1e-18)

/// Theta-function evaluator for the rhombic lattice τ = 1/2 + iλ.
#[derive(Debug, Clone)]
pub struct RhombicLattice {
    lambda: f64,
    n_terms: usize,
    q: Complex64,
    q_sq: Complex64,
    /// q^{(n+1/2)²} for n = 0..=n_terms (θ₁/θ₂ coefficients).
    coef_half: Vec<Complex64>,
    /// q^{n²} for n = 0..=n_terms (θ₃/θ₄ coefficients).
    coef_square: Vec<Complex64>,
}

impl RhombicLattice {
    /// Create an evaluator for τ = 1/2 + iλ.
    ///
    /// The term count is chosen so that real-axis evaluations have relative
    /// tails below 1e-18, with eight terms of margin for excursions into the
    /// complex strip.
    pub fn new(lambda: f64) -> Result<Self> {
        if !(1e-3..=50.0).contains(&lambda) {
            return Err(Error::Domain(format!(
                "lattice parameter Im τ = {lambda} outside supported range [1e-3, 50]"
            )));
        }
        let pl = PI * lambda;
        let n_terms = 24usize.max(((-TAIL_GOAL_LOG) / pl).sqrt().ceil() as usize + 8);
        let p = (-pl).exp();
        let q = Complex64::new(0.0, p);
        let phase8 = Complex64::from_polar(1.0, PI / 8.0);
        let mut coef_half = Vec::with_capacity(n_terms + 1);
        let mut coef_square = Vec::with_capacity(n_terms + 1);
        for n in 0..=n_terms {
            // (−1)^{n(n+1)/2} has period 4 in n: +, −, −, +.
            let sigma = if n % 4 == 0 || n % 4 == 3 { 1.0 } else { -1.0 };
            let half_exp = {
                let m = n as f64 + 0.5;
                (-pl * m * m).exp()
            };
            coef_half.push(phase8 * sigma * half_exp);
            let sq_exp = (-pl * (n * n) as f64).exp();
            coef_square.push(if n % 2 == 0 {
                Complex64::new(sq_exp, 0.0)
            } else {
                Complex64::new(0.0, sq_exp)
            });
        }
        Ok(RhombicLattice { lambda, n_terms, q, q_sq: q * q, coef_half, coef_square })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn tau(&self) -> Complex64 {
        Complex64::new(0.5, self.lambda)
    }

    /// Nome q = e^{iπτ} = i e^{−πλ}.
    pub fn nome(&self) -> Complex64 {
        self.q
    }

    pub fn terms(&self) -> usize {
        self.n_terms
    }

    /// Fail unless `z` lies in the strip where N terms reach the tail goal
    /// (and where no partial term can overflow).
    fn check_strip(&self, z: Complex64) -> Result<()> {
        let pl = PI * self.lambda;
        let im = z.im.abs();
        let n = self.n_terms as f64;
        // Partial terms are bounded by e^{im²/pl}; stay far below overflow.
        let peak_ok = im * im <= 600.0 * pl;
        let margin = (n + 1.5) - im / pl;
        let tail_ok = margin >= ((-TAIL_GOAL_LOG) / pl).sqrt();
        if peak_ok && tail_ok {
            Ok(())
        } else {
            let tail = if margin > 0.0 { (-pl * margin * margin).exp() } else { 1.0 };
            Err(Error::TruncationTail { terms: self.n_terms, tail, im_z: z.im })
        }
    }

    /// Evaluate θ_kind^{(deriv)}(z) for deriv ∈ {0, 1, 2, 3}.
    pub fn theta(&self, kind: ThetaKind, z: Complex64, deriv: u8) -> Result<Complex64> {
        if deriv > 3 {
            return Err(Error::Domain(format!(
                "theta derivative order {deriv} not supported (max 3)"
            )));
        }
        self.check_strip(z)?;
        let i = Complex64::new(0.0, 1.0);
        let e_p = (i * z).exp();
        let e_m = (-i * z).exp();
        let e2_p = e_p * e_p;
        let e2_m = e_m * e_m;
        let mut acc = Complex64::new(0.0, 0.0);
        // sin chain for θ₁ (s, c, −s, −c), cos chain for θ₂/θ₃/θ₄.
        let sin_chain = matches!(kind, ThetaKind::One);

        match kind {
            ThetaKind::One | ThetaKind::Two => {
                let mut t_p = self.coef_half[0] * e_p;
                let mut t_m = self.coef_half[0] * e_m;
                let mut run_q = self.q_sq;
                for n in 0..=self.n_terms {
                    let alt = matches!(kind, ThetaKind::One) && n % 2 == 1;
                    let a = (2 * n + 1) as f64;
                    let term = chain_term(t_p, t_m, a, deriv, sin_chain);
                    acc += if alt { -term } else { term };
                    if n < self.n_terms {
                        t_p = t_p * run_q * e2_p;
                        t_m = t_m * run_q * e2_m;
                        run_q *= self.q_sq;
                    }
                }
                Ok(acc * 2.0)
            }
            ThetaKind::Three | ThetaKind::Four => {
                // n = 0 contributes the constant 1 (derivatives: 0).
                if deriv == 0 {
                    acc += 1.0;
                }
                let mut t_p = self.coef_square[1] * e2_p;
                let mut t_m = self.coef_square[1] * e2_m;
                let mut run_q = self.q * self.q_sq; // q^{2n+1} at n = 1
                for n in 1..=self.n_terms {
                    let alt = matches!(kind, ThetaKind::Four) && n % 2 == 1;
                    let a = (2 * n) as f64;
                    let term = chain_term(t_p, t_m, a, deriv, false) * 2.0;
                    acc += if alt { -term } else { term };
                    if n < self.n_terms {
                        t_p = t_p * run_q * e2_p;
                        t_m = t_m * run_q * e2_m;
                        run_q *= self.q_sq;
                    }
                }
                Ok(acc)
            }
        }
    }

    /// Distance from `z` to the nearest zero of θ₁ (the period lattice
    /// πm + πτn). Zeros of θ₂ are these shifted by π/2.
    pub fn theta1_zero_distance(&self, z: Complex64) -> f64 {
        let e2 = Complex64::new(0.5 * PI, PI * self.lambda); // πτ
        let n0 = (z.im / e2.im).round();
        let mut best = f64::INFINITY;
        for dn in -1..=1 {
            let n = n0 + dn as f64;
            let rem = z - e2 * n;
            let m0 = (rem.re / PI).round();
            for dm in -1..=1 {
                let d = (rem - PI * (m0 + dm as f64)).norm();
                best = best.min(d);
            }
        }
        best
    }

    /// Error out when `z` is within `tol` of a θ₁ zero (a pole of the
    /// downstream surface formulas).
    pub fn guard_theta1_zero(&self, z: Complex64, tol: f64) -> Result<()> {
        let dist = self.theta1_zero_distance(z);
        if dist < tol {
            Err(Error::PoleProximity { dist, tol })
        } else {
            Ok(())
        }
    }

    /// The critical point ω ∈ (0, π/4): the unique zero of
    /// Re(θ₂′(x)/θ₂(x)) on that interval. Exists precisely for λ < λ₀.
    pub fn critical_omega(&self) -> Result<f64> {
        let g = |x: f64| -> Result<f64> {
            let z = Complex64::new(x, 0.0);
            let t = self.theta(ThetaKind::Two, z, 0)?;
            let td = self.theta(ThetaKind::Two, z, 1)?;
            Ok((td / t).re)
        };
        // θ₂ is even, so g(0) = 0 identically; scan the open interval for
        // the interior sign change.
        const SAMPLES: usize = 256;
        let xs = |k: usize| 0.25 * PI * k as f64 / SAMPLES as f64;
        let mut prev_x = xs(1);
        let mut prev_g = g(prev_x)?;
        for k in 2..=SAMPLES {
            let x = xs(k);
            let gx = g(x)?;
            if prev_g == 0.0 {
                return Ok(prev_x);
            }
            if prev_g * gx < 0.0 {
                return brent_root(g, prev_x, x, 1e-13, 200);
            }
            prev_x = x;
            prev_g = gx;
        }
        Err(Error::NoCriticalOmega { lambda: self.lambda, lambda0: lambda0() })
    }
}

/// One series term with the derivative applied: for the sin chain
/// (sin, cos, −sin, −cos) or the cos chain (cos, −sin, −cos, sin), where
/// sin·c = (T⁺ − T⁻)/(2i) and cos·c = (T⁺ + T⁻)/2 for T± = c·e^{±iaz/…}.
fn chain_term(t_p: Complex64, t_m: Complex64, a: f64, deriv: u8, sin_chain: bool) -> Complex64 {
    let half = Complex64::new(0.5, 0.0);
    let minus_i_half = Complex64::new(0.0, -0.5);
    let sin_part = (t_p - t_m) * minus_i_half;
    let cos_part = (t_p + t_m) * half;
    let ak = a.powi(deriv as i32);
    let (value, flip) = if sin_chain {
        match deriv {
            0 => (sin_part, false),
            1 => (cos_part, false),
            2 => (sin_part, true),
            _ => (cos_part, true),
        }
    } else {
        match deriv {
            0 => (cos_part, false),
            1 => (sin_part, true),
            2 => (cos_part, true),
            _ => (sin_part, false),
        }
    };
    let v = value * ak;
    if flip {
        -v
    } else {
        v
    }
}

/// The lattice parameter λ₀ at which the critical point of log θ₂
/// degenerates to 0: the unique root of Re(θ₂″(0)/θ₂(0)) in λ. A critical
/// ω ∈ (0, π/4) exists exactly for 0 < λ < λ₀.
pub fn lambda0() -> f64 {
    static CACHE: OnceLock<f64> = OnceLock::new();
    *CACHE.get_or_init(|| {
        let f = |lam: f64| -> Result<f64> {
            let lat = RhombicLattice::new(lam)?;
            let z = Complex64::new(0.0, 0.0);
            let t = lat.theta(ThetaKind::Two, z, 0)?;
            let tdd = lat.theta(ThetaKind::Two, z, 2)?;
            Ok((tdd / t).re)
        };
        // Scan for a bracket, then polish. The root is a structural
        // constant of the rhombic family; the scan range is generous.
        let mut lo = 0.05;
        let mut flo = f(lo).expect("theta series converges at real z");
        let mut lam = lo;
        loop {
            lam *= 1.2;
            assert!(lam < 50.0, "no curvature sign change of log theta2 found");
            let fl = f(lam).expect("theta series converges at real z");
            if flo * fl <= 0.0 {
                break;
            }
            lo = lam;
            flo = fl;
        }
        brent_root(f, lo, lam, 1e-14, 200).expect("bracketed root")
    })
}
