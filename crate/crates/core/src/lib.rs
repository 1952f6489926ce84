//! Bayesian reciprocal graphical models for Mendelian randomization with
//! correlated errors.

pub mod baselines;
pub mod benchmark;
pub mod distributions;
pub mod error;
pub mod evaluate;
pub mod io;
pub mod linalg;
pub mod mcmc;
pub mod metrics;
pub mod model;
pub mod parallel;
pub mod seed;
pub mod simulation;
pub mod summary;

pub use error::{Result, RgmError};
