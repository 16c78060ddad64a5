//! Intrusive polynomial chaos for Burgers' equation.
//!
//! The stochastic Galerkin projection of `u_t + (u^2/2)_x = 0` onto normalized
//! Hermite polynomials yields a symmetric hyperbolic system for the chaos
//! coefficients. This crate provides the pieces needed to discretize it:
//!
//! * [`pc_basis`]: Hermite/Jacobi/Laguerre evaluation and the exact triple-product tensor.
//! * [`galerkin`]: pointwise algebra of the truncated system (flux, potential, entropy, eigenvalues).
//! * [`sbp`]: diagonal-norm summation-by-parts operators on Gauss-Lobatto-Legendre nodes.
//! * [`flux`]: entropy-conservative and entropy-stable interface fluxes.
//! * [`cpr`]: the split-form SBP CPR semidiscretization with entropy/mass audits.
//! * [`comparison`]: first-order finite volume and global SBP finite difference solvers.
//! * [`reference`]: closed-form chaos coefficients of the exact Riemann solutions.
//! * [`time`]: explicit SSPRK(3,3) and classical RK4.
//! * [`experiment`]: configuration, presets, batch runs and CSV output.

pub mod comparison;
pub mod cpr;
pub mod error;
pub mod experiment;
pub mod flux;
pub mod galerkin;
pub mod linalg;
pub mod pc_basis;
pub mod reference;
pub mod sbp;
pub mod time;

pub use cpr::{BoundaryCondition, Mesh1D, SolutionField};
pub use error::{Error, Result};
pub use flux::{FluxKind, InterfacePair};
pub use galerkin::{ModeVector, Moments, SystemMatrix};
pub use pc_basis::{OrthogonalFamily, TripleProductTensor};
pub use sbp::{FilterMatrix, SbpOperators};
pub use time::Stepper;
