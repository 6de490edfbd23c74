//! Two-phase Stefan problem toolkit for traveling free-boundary solutions.
//!
//! The library models melting/evaporation of a half-space under an energy
//! flux. A nonlinear two-phase heat-conduction problem with two unknown
//! phase-division surfaces is converted to divergence (enthalpy) form, its
//! invariance group is classified from the structure of the flux vector,
//! and for a constant flux along the symmetry axis the problem reduces to a
//! two-point ODE system on the invariant coordinate `ω = z + √(z² + r²)`,
//! whose level sets are paraboloids of revolution. The crate provides:
//!
//! - [`specialfn`]: Lambert W, the exponential integral E₁ and adaptive
//!   quadrature used by the closed-form solutions;
//! - [`material`]: material descriptions and the enthalpy (Kirchhoff-type)
//!   substitution `u = ∫ C(T) dT`, `d = λ/C`;
//! - [`symmetry`]: invariance-group classification tables for the
//!   diffusivity pair and the flux vector, the finite group actions, and the
//!   equivalence-scaling normalizer;
//! - [`reduction`]: the admissible subalgebra catalog, ansatz construction,
//!   the invariant coordinate and surface geometry, and field reconstruction;
//! - [`solver`]: closed-form (constant and fast-diffusion) and shooting
//!   solvers for the reduced ODE system, plus a planar traveling-wave solver;
//! - [`verify`]: an independent finite-difference audit of the reconstructed
//!   3-D fields against the governing equations and boundary conditions.

// `!(x > 0.0)` is used instead of `x <= 0.0` throughout the validation
// paths: the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod material;
pub mod profile;
pub mod reduction;
pub mod solver;
pub mod specialfn;
pub mod symmetry;
pub mod verify;
