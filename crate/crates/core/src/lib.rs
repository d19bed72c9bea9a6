//! Simulation and analysis of one- and two-way distributed quantum sensing
//! protocols with threshold-based faithfulness checks.

pub mod adversary;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod protocol;
pub mod quantum;
pub mod stats;

pub use error::{DqsError, Result};
