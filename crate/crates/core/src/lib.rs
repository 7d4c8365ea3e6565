//! Spectrum, zero modes and supersymmetry checks for a spin-½ particle in a
//! 2D harmonic trap threaded by a finite-radius magnetic flux tube.

pub mod ab;
pub mod analysis;
pub mod error;
pub mod finite_tube;
pub mod quadrature;
pub mod radial;
pub mod specfun;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
