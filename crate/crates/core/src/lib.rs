//! Dirichlet characters and L-functions: evaluation, zeros, pre-image
//! geometry and figure rendering.

pub mod arith;
pub mod characters;
pub mod error;
pub mod lfunction;
pub mod preimage;
pub mod render;
pub mod report;
pub mod special;
pub mod suite;
pub mod zeros;

pub use characters::{enumerate_characters, DirichletCharacter};
pub use error::{Error, Result};
pub use lfunction::{EvalResult, Method, Target};

/// The universal scalar.
pub type ComplexValue = num_complex::Complex64;
