//! Error type shared by every module of the crate.
//!
//! Construction of the tori is a pipeline — theta series → Lamé coefficients
//! → planar family → spherical reparametrization → periodicity solve →
//! pair assembly — and a failure at any stage is meaningful to the caller
//! (wrong parameter regime, evaluation too close to a pole, a solver that
//! stalled). Each failure mode gets its own variant carrying the numbers
//! needed to understand it, plus a stable machine-readable code for the CLI.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or evaluating the surfaces.
#[derive(Debug, Error)]
pub enum Error {
    /// The theta series was truncated before its tail dropped below the
    /// accuracy goal, i.e. the argument strayed too far from the real axis
    /// for the configured number of terms.
    #[error(
        "theta series tail {tail:.3e} at {terms} terms exceeds the accuracy goal \
         (argument too far from the real axis; |Im z| = {im_z:.3})"
    )]
    TruncationTail { terms: usize, tail: f64, im_z: f64 },

    /// No critical point of log θ2 exists in (0, π/4); this happens exactly
    /// when the lattice parameter is outside (0, λ0).
    #[error(
        "no critical point of log θ2 in (0, π/4) for Im τ = {lambda}: \
         one exists only for 0 < Im τ < {lambda0}"
    )]
    NoCriticalOmega { lambda: f64, lambda0: f64 },

    /// A surface formula was evaluated within `dist` of a zero of the theta
    /// function in its denominator.
    #[error("evaluation {dist:.3e} away from a pole of the surface formulas (tolerance {tol:.1e})")]
    PoleProximity { dist: f64, tol: f64 },

    /// The reparametrization quartic has no real roots, so there is no real
    /// oval to traverse.
    #[error("reparametrization quartic has no real oval for δ = {delta}, s1 = {s1}, s2 = {s2}")]
    NoRealOval { delta: f64, s1: f64, s2: f64 },

    /// The quartic has four real roots instead of the required two.
    #[error(
        "reparametrization quartic has four real roots; the construction needs exactly \
         two (one oval) — parameters are outside the intended regime"
    )]
    WrongOvalType,

    /// The quartic's oval must sit strictly inside the set where the cubic
    /// is positive, otherwise w(v) leaves its domain.
    #[error(
        "quartic oval [{lo:.6}, {hi:.6}] is not strictly inside the cubic's positivity \
         region (starts at {s0:.6})"
    )]
    OvalOutsideCubic { lo: f64, hi: f64, s0: f64 },

    /// The denominator polynomial of the angle differential vanishes on the
    /// oval, so the rotation-angle integral does not exist.
    #[error("angle-integral denominator vanishes on the oval near s = {s:.6}")]
    DegenerateAngleIntegrand { s: f64 },

    /// An iterative solver ran out of iterations.
    #[error("solver did not converge after {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    /// Newton step could not be computed because the Jacobian is singular.
    #[error("Jacobian is numerically singular at the current iterate")]
    DegenerateJacobian,

    /// Adaptive quadrature exhausted its subdivision budget above tolerance.
    #[error("quadrature stalled at error estimate {estimate:.3e} (tolerance {tol:.1e})")]
    QuadratureTolerance { estimate: f64, tol: f64 },

    /// A parameter is outside the domain where the construction is defined.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// A discrete quad could not be closed to tolerance.
    #[error("discrete quad closure residual {residual:.3e} exceeds {tol:.1e}")]
    QuadClosure { residual: f64, tol: f64 },

    /// The discrete optimizer stopped making progress above its target.
    #[error("optimization stalled at residual {residual:.3e} after {iters} iterations")]
    StalledOptimization { iters: usize, residual: f64 },

    /// Mesh/grid dimensions do not match what an operation expects.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Underlying I/O failure while reading or writing meshes/reports.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Malformed JSON in a report or net file.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, used by the CLI to report failures in a
    /// scriptable way (one kebab-case token per failure class).
    pub fn code(&self) -> &'static str {
        match self {
            Error::TruncationTail { .. } => "truncation-tail",
            Error::NoCriticalOmega { .. } => "no-critical-omega",
            Error::PoleProximity { .. } => "pole-proximity",
            Error::NoRealOval { .. } => "no-real-oval",
            Error::WrongOvalType => "wrong-oval-type",
            Error::OvalOutsideCubic { .. } => "oval-outside-cubic",
            Error::DegenerateAngleIntegrand { .. } => "degenerate-angle-integrand",
            Error::NoConvergence { .. } => "no-convergence",
            Error::DegenerateJacobian => "degenerate-jacobian",
            Error::QuadratureTolerance { .. } => "quadrature-tolerance",
            Error::Domain(_) => "domain",
            Error::QuadClosure { .. } => "quad-closure",
            Error::StalledOptimization { .. } => "stalled-optimization",
            Error::GridMismatch(_) => "grid-mismatch",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
