//! Zero-norm regularized and constrained composite quadratic objectives
//!
//! The objective handled throughout the crate is
//!
//! ```text
//! Θ(x) = xᵀAx + θ(x) + h(x),   h = ν‖x‖₀  or  h = δ_Ω,  Ω = {‖x‖₀ ≤ κ}
//! ```
//!
//! with `θ` the indicator of one of a few permutation-symmetric sets (nothing,
//! the unit sphere, the probability simplex, the nonnegative orthant, or the
//! nonnegative part of the sphere).
//!
//! The modules are layered bottom-up:
//!
//! * [`linalg`]: dense symmetric matrices, a cyclic Jacobi eigensolver and
//!   index utilities.
//! * [`sets`]: projections and normal/tangent cone queries for the sets above.
//! * [`subdiff`]: the objective, exact `dist(0, ∂Θ(x))`, criticality tests.
//! * [`sphere_quadratic`]: critical sets and closed-form constants for
//!   `zᵀHz + δ_S(z)`.
//! * [`certify`]: empirical KL-exponent estimation around critical points.
//! * [`solver`]: exact prox operators and a proximal-gradient method.
//! * [`oracle`]: brute-force ground truth by support enumeration.

pub mod certify;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod sets;
pub mod solver;
pub mod sphere_quadratic;
pub mod subdiff;

pub use error::{Error, Result};
pub use linalg::{sym_eig, EigDecomposition, SymMatrix};
pub use sets::SupportSet;
pub use subdiff::{HKind, ProblemSpec, SubdiffResult, ThetaKind};
