//! Existence of Dunkl metrics for weighted complex hyperplane arrangements.
//!
//! The pipeline: enumerate the intersection poset of an arrangement
//! ([`arrangement`]), test stability of the weights ([`stability`]), evaluate
//! the Hirzebruch quadratic form and its critical-point system
//! ([`hirzebruch`]), compute the balanced metric ([`balance`]), and check the
//! commutator condition on its residues ([`dunkl`]). [`weightfinder`] searches
//! the weight space for Dunkl weights by linear programming.

pub mod arrangement;
pub mod balance;
pub mod catalog;
pub mod dunkl;
pub mod error;
pub mod hirzebruch;
pub mod io;
pub mod scalar;
pub mod simplex;
pub mod span;
pub mod stability;
pub mod weightfinder;

pub use arrangement::{Arrangement, Flat, FlatClass, IntersectionPoset, Normals};
pub use error::{Error, Result};
pub use num_rational::BigRational;
pub use scalar::{GaussianRational, Real, ScalarMode};
pub use stability::WeightVector;
