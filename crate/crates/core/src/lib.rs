//! Gamma-minimax wavelet shrinkage with three-point priors.
//!
//! The crate is organised bottom-up:
//!
//! - [`wavelet`]: periodic orthogonal DWT and the shipped filter banks.
//! - [`shrinkage`]: the two Gamma-minimax rules and their level-wise application.
//! - [`elicitation`]: data-driven choice of `sigma`, `m(j)`, `eps(j)` and `mu`.
//! - [`risk`]: frequentist/Bayes risk, least favorability, `m*`.
//! - [`signals`]: the standard test-signal battery and noise injection.
//! - [`bench`]: the denoising pipeline and the Monte-Carlo harness.

pub mod bench;
pub mod elicitation;
mod error;
pub mod risk;
pub mod shrinkage;
pub mod signals;
pub mod wavelet;

pub use error::{Error, Result};
