//! Computation in the variable-exponent sequence spaces `l^(p_n)`.
//!
//! The crate covers the modular and Luxemburg norm ([`space`]), regular set
//! isomorphisms of the positive integers ([`set_iso`]), the Lamperti-form,
//! injection-induced and truncated matrix operators with isomodularity and
//! isometry checkers ([`operators`]), and randomized verification suites
//! ([`verify`]).

pub mod error;
pub mod operators;
pub mod sample;
pub mod set_iso;
pub mod space;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
