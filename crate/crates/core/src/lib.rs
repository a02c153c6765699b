//! Ostrowski numeration for irrational `α = [0; a_1, a_2, …]`, α-multiplicative
//! functions, and the correlation and exponential-sum machinery used to study
//! their pseudorandomness.

pub mod alphafun;
pub mod cfrac;
pub mod error;
pub mod harness;
pub mod numeration;
pub mod phase;
pub mod spectral;

pub use error::{Error, Result};
