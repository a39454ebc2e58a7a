//! Sequential 2→1 quantum random access codes with unsharp measurements.
//!
//! A sender encodes two bits into one qubit; a chain of receivers each try
//! to recover one randomly requested bit and pass the disturbed qubit on.
//! This crate provides the qubit algebra, the single-round code, the
//! measurement channels, the multi-receiver propagation, unsharpness
//! schedule synthesis with its exact small-angle polynomials, and a
//! shot-level Monte Carlo simulator.

pub mod channel;
pub mod error;
pub mod monte_carlo;
pub mod poly;
pub mod qubit;
pub mod rac;
pub mod schedule;
pub mod sequential;

pub use error::{Error, Result};
