//! Isometries of the complex hyperbolic ball `B` in `C^n`.
//!
//! * [`linalg`]: dense complex vectors and matrices, a Jacobi Hermitian
//!   eigensolver, seeded Haar unitaries.
//! * [`ball`]: points of `B`, the Möbius maps `U ∘ f_{x0}`, Poincaré and
//!   Carathéodory distances.
//! * [`group`]: the group `G` of operators on `C^n + C` preserving
//!   `<x, y> - λ conj(μ)`, stored in canonical form, and its action on `B`.
//! * [`classify`]: structural predicates, closed-form spectra on the reducing
//!   subspace `<ξ> + C`, fixed points and elliptic/hyperbolic/parabolic type.
//! * [`families`]: seeded generators for the special classes above.
//! * [`cli`]: the `hyperball` command-line front end and verification catalog.

pub mod ball;
pub mod classify;
pub mod cli;
pub mod error;
pub mod families;
pub mod group;
pub mod linalg;

pub use error::{Error, Result};
pub use linalg::{Complex, ComplexMatrix, ComplexVector};
