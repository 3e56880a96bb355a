//! Synthesis of binomial bosonic code states with multiphoton Jaynes-Cummings
//! (MPJC) dynamics.
//!
//! The numerical core is generic over the real scalar type (see [`Real`]); the
//! aliases at the crate root fix it to `f64`, which is what the scans, the
//! brute-force oracle and the master-equation solver run on.

// `!(x > 0)` guards are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod codes;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod open_system;
pub mod scalar;
pub mod scan;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex = num_complex::Complex<f64>;

pub type OscillatorState = hilbert::OscillatorState<f64>;
pub type JointState = hilbert::JointState<f64>;
pub type DensityMatrix = hilbert::DensityMatrix<f64>;
pub type PhaseVector = hilbert::PhaseVector<f64>;
pub type MpjcConfig = dynamics::MpjcConfig<f64>;
pub type ClosedFormCoefficients = dynamics::ClosedFormCoefficients<f64>;

pub use codes::CodewordSpec;
pub use open_system::LindbladConfig;
pub use scan::{GridSpec, ScanRecord};
