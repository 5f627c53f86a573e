//! Piecewise-inertial detector trajectories whose vacuum noise cancels
//! ("transparent" cycles), the single-qubit gates a coherent drive induces
//! on them, and the two-qubit entanglement they harvest from the field.
//!
//! The pipeline runs bottom-up:
//!
//! - [`trajectory`] builds periodic four-segment cycles,
//! - [`phase_integrals`] evaluates the detector/field phase integrals,
//! - [`search`] finds cycles with a vanishing noise integral,
//! - [`gates`] turns drive amplitudes into rotations and back,
//! - [`entanglement`] assembles the final two-qubit state,
//! - [`tradeoff`] compares gate time with decoherence time,
//! - [`oracle`] integrates the full Schrödinger equation for validation.
//!
//! [`cli`] wires these into the `tdq` binary.

pub mod cli;
pub mod config;
pub mod entanglement;
pub mod error;
pub mod fmt;
pub mod gates;
pub mod linalg;
pub mod oracle;
pub mod phase_integrals;
pub mod quadrature;
pub mod search;
pub mod tradeoff;
pub mod trajectory;

pub use error::{Error, Result};
pub use num_complex::Complex64;
