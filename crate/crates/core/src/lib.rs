//! Numerics for general bosonic attenuator channels on truncated Fock space.
//!
//! A channel `Φ_{λ,σ}` mixes a single-mode input with an environment state `σ`
//! on a beam splitter of transmissivity `λ` and discards the environment.
//! Everything here is dense and exact up to rounding: photon number is
//! conserved by the beam splitter, so finite-support inputs never need
//! clipping.

pub mod attenuator;
pub mod beamsplitter;
pub mod entropy;
pub mod error;
pub mod fock_core;
pub mod linalg;
pub mod majorization;
pub mod phase_space;
pub mod schemes;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
