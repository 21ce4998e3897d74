//! Small numerical toolbox: bracketed root finding, adaptive quadrature,
//! cubic Hermite tables, a damped two-dimensional Newton iteration and real
//! root isolation for low-degree polynomials.
//!
//! Everything here is deliberately self-contained: each routine owns its
//! error policy (what happens on non-convergence, how error estimates are
//! formed) because those policies are part of this crate's contract.

pub mod brent;
pub mod hermite;
pub mod newton;
pub mod poly;
pub mod quadrature;

pub use brent::brent_root;
pub use hermite::HermiteTable;
pub use newton::newton2;
pub use poly::{eval as poly_eval, eval_deriv as poly_eval_deriv, real_roots, real_roots_in};
pub use quadrature::{integrate, integrate_vec3};
