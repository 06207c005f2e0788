//! Supertrace heat-kernel densities for the twisted de Rham complex.
//!
//! The crate evaluates the local index densities of a Witten-deformed de Rham
//! complex on manifolds with boundary, and checks them against independent
//! numerical experiments: direct exterior-algebra supertraces, Gauss–Bonnet
//! integrals, invariant-theory rank computations and spectral heat traces.

pub mod contraction;
pub mod error;
pub mod exterior;
pub mod geometry;
pub mod heat;
pub mod invariance;
pub mod special;
pub mod spectral;

pub use error::{Error, Result, Symmetry};
pub use exterior::{clifford_op, degree_projection, graded_tensor_product, interior_op, wedge_op, ExteriorOperator, FormBasisIndex};
