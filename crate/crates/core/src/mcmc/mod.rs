//! Metropolis-within-Gibbs sampler for the reciprocal graphical model.

mod chain;
mod config;
mod state;
pub mod steps;

pub use chain::{initial_state, run_chain, run_chain_observed, AcceptanceRates, Chain, Sample, Sampler};
pub use config::{Hyperparameters, InstrumentMode, McmcConfig};
pub use state::{ChainState, LatentState};
