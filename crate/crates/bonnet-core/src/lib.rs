//! Isothermic tori with one family of planar curvature lines, and compact
//! Bonnet pairs built from them.
//!
//! The crate constructs a three-parameter family of immersed tori whose
//! u-coordinate lines are planar curvature lines, expressed in closed form
//! through Jacobi theta functions on a rhombic lattice. For parameters
//! solving two periodicity conditions (an angle condition making the planar
//! family close up with k-fold symmetry, and a translational condition),
//! the construction yields pairs of compact immersions f⁺, f⁻ that are
//! isometric and have equal mean curvature at corresponding points, yet are
//! not congruent — compact Bonnet pairs.
//!
//! Modules build on each other roughly bottom-up:
//!
//! * [`quat`] — quaternion algebra used for frames and surface points;
//! * [`numerics`] — root finding, quadrature, interpolation, polynomials;
//! * [`theta`] — Jacobi theta functions with derivatives on τ = 1/2 + iλ;
//! * [`lame`] — Lamé-type coefficients of the underlying Riccati equation;
//! * [`planar`] — the planar-curvature-line family: curve, frame, surface;
//! * [`spherical`] — arclength reparametrization on the spherical curve;
//! * [`periodicity`] — the two closing conditions and their solvers;
//! * [`bonnet`] — assembly of the Bonnet mates f± and their invariants;
//! * [`congruence`] — rigid-motion fitting used to certify non-congruence;
//! * [`discrete`] — cross-ratio −1 nets, dual nets, discrete Bonnet pairs;
//! * [`mesh`] — OBJ / PLY / JSON net export.

pub mod bonnet;
pub mod congruence;
pub mod discrete;
pub mod error;
pub mod lame;
pub mod mesh;
pub mod numerics;
pub mod periodicity;
pub mod planar;
pub mod quat;
pub mod spherical;
pub mod theta;

pub use bonnet::{BonnetPair, PairReport};
pub use congruence::{best_rigid_rms, congruence_score, CongruenceScore};
pub use discrete::{
    cross_ratio, diagnose, discrete_pair, dual_net, optimize_torus, DiscreteNet, DiscretePair,
    NetDiagnostics, OptimizeOptions, OptimizeWeights, OptimizedTorus,
};
pub use error::{Error, Result};
pub use lame::LameData;
pub use mesh::Mesh;
pub use periodicity::{
    bpart_integral, monodromy_report, rotation_axis_angle, solve_family, solve_spherical,
    theta_integral, PeriodicityReport,
};
pub use planar::{
    BasisFamily, CoefficientFamily, FourierSeries, FrameCurve, HarmonicTerm, IsothermicSurface,
    PlanarFamily, Reparametrization,
};
pub use quat::{Quat, Vec3};
pub use spherical::{QuarticQ, ReparamCurve, SphericalParams};
pub use theta::{lambda0, RhombicLattice, ThetaKind};
