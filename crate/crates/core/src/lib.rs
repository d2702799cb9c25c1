//! Desk-scale numerics for the causal action principle.
//!
//! The crate is organised bottom-up:
//!
//! * [`operator`]: Hermitian operators, correlation points and spectra of
//!   operator products.
//! * [`kernel`]: the causal Lagrangian, action, constraint functionals and
//!   the causal classification of point pairs for arbitrary discrete measures.
//! * [`sphere`]: the closed-form variational principle on the two-sphere.
//! * [`solver`]: minimization over weighted counting measures on the sphere.
//! * [`jets`]: jets, Euler–Lagrange diagnostics and the linearized Laplacian.
//! * [`surface`]: surface-layer integrals (symplectic form, inner product).
//! * [`lattice`]: the lattice wave-function pipeline feeding correlation points.

pub mod error;
pub mod jets;
pub mod kernel;
pub mod lattice;
pub mod operator;
pub mod solver;
pub mod sphere;
pub mod sum;
pub mod surface;

pub use error::{Error, Result};
pub use num_complex::Complex64;
