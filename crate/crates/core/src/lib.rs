//! Exact computations on central hyperplane arrangements over Q: intersection
//! lattices, characteristic polynomials, logarithmic derivation modules, free
//! resolutions and a rule engine bounding projective dimension.

pub mod arrangement;
pub mod catalog;
pub mod derivation;
pub mod engine;
pub mod error;
pub mod graded;
pub mod lattice;
pub mod matrix;
pub mod modular;
pub mod monomial;
pub mod multib2;
pub mod poly;
pub mod rational;
pub mod upoly;

pub use arrangement::{Arrangement, Flat, LinearForm, Multiarrangement};
pub use error::{ArrError, Result};
pub use poly::Poly;
pub use rational::Rational;
