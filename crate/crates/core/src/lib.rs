//! Numerics for a quadrature-compatible approximate unitary 2-design on a
//! discretised single bosonic mode, and a one-bit unclonable encryption
//! scheme built from it.

pub mod cvdisc;
pub mod design;
pub mod error;
pub mod opalg;
pub mod rng;
pub mod ue;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
