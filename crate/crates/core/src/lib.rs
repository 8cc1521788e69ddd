//! Gaussian differentially private e-values, end to end: the canonical
//! multiplicative mechanism, noise-calibrated single-test thresholds,
//! privacy composition, Gumbel-based peeling for private multiple testing,
//! e-BH, a seeded Monte-Carlo experiment harness, and a privacy audit of
//! Gaussian versus Gumbel argmax selection.

pub mod aggregation;
pub mod audit;
pub mod calibration;
pub mod ebh;
pub mod error;
pub mod experiments;
pub mod mechanism;
pub mod normal;
pub mod peeling;
pub mod rng;
pub mod selection;
pub mod stats;

pub use error::Error;
pub use mechanism::{EValue, PrivacyBudget, PrivateEValue, Sensitivity};
pub use rng::RngSeed;
