//! Nyström-type solvers for nonlinear second-kind integral equations
//!
//! ```text
//! f(y) - ∫ k1(x,y) f(x) dx - ∫ k2(x,y) h(x, f(x)) dx = g(y),   y in [-1,1]
//! ```
//!
//! with smooth `k2`, weakly singular `k2 = ψ(x) k*(|x-y|)`, or the mixed
//! `k2 = ρ(x,y) + ψ(x) log|x-y|` that arises when the interior Neumann
//! problem for the Laplace equation with a nonlinear boundary condition is
//! rewritten as a boundary integral equation.
//!
//! The pieces, bottom-up:
//!
//! * [`gauss_legendre`]: orthonormal Legendre polynomials and Gauss rules.
//! * [`adaptive`]: adaptive Gauss–Kronrod integration used as an independent
//!   check on the moment recurrences.
//! * [`singular_moments`]: modified moments and product-rule weights.
//! * [`nystrom`]: collocation system, damped Newton, Nyström interpolant,
//!   error metrics.
//! * [`laplace_bie`]: curves, smoothing maps, kernels, right-hand side and
//!   potential reconstruction for the Laplace application.

pub mod adaptive;
pub mod error;
pub mod gauss_legendre;
pub mod laplace_bie;
pub mod linalg;
pub mod newton;
pub mod nystrom;
pub mod singular_moments;

pub use error::{Error, Result};
pub use gauss_legendre::{gauss_rule, legendre_eval, QuadratureRule};
pub use nystrom::{
    eoc, relative_error, solve, HammersteinProblem, Nemytskii, NystromSolution, SecondKernel,
};
pub use singular_moments::{KernelKind, SingularKernel};
