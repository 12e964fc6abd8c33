//! Experiment runner, spectrum export and verification suites for `singcov`.

pub mod config;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod spectrum;
pub mod verify;
