//! Eavesdropper strategies acting on the probe in transit.
//!
//! An [`Attack`] is a shareable description; the engine asks it for fresh
//! [`Interceptor`]s, one per independent unit of work (a chunk of rounds for
//! memoryless attacks, a block for block-collective ones, the whole run for
//! sequential ones). Interceptors only ever see the probe, their own
//! ancilla and their own random stream.

mod calibrate;
mod memory;
mod simple;
mod spec;
mod swap_leak;

pub use calibrate::{calibrate_depolarizing, exact_check_fidelity, expected_check_fidelity};
pub use memory::{EntanglingMemory, Readout, MAX_BLOCK_LENGTH};
pub use simple::{Depolarizing, Identity, InterceptResend, InterceptStrategy, UnitaryTamper};
pub use spec::AttackSpec;
pub use swap_leak::TwoWaySwapLeak;

use std::fmt;

use rand::RngCore;
use serde::Serialize;

use crate::error::Result;
use crate::protocol::{Direction, ProtocolConfig, RoundState};
use crate::quantum::{Axis, DensityMatrix};

/// How rounds depend on each other through Eve's memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correlation {
    /// Every round is attacked independently.
    Memoryless,
    /// Consecutive blocks of this many rounds share Eve's memory.
    Blocks(usize),
    /// Every round may depend on every earlier one.
    Sequential,
}

/// Something Eve wrote down in one round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EveObservation {
    pub axis: Option<Axis>,
    pub outcome: f64,
}

/// Eve's own estimate of the phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EveEstimate {
    pub phi_hat: Option<f64>,
    pub standard_error: f64,
    pub samples_used: u64,
}

pub trait Attack: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn correlation(&self) -> Correlation {
        Correlation::Memoryless
    }

    fn check_compatible(&self, _direction: Direction, _n: usize) -> Result<()> {
        Ok(())
    }

    fn interceptor(&self) -> Box<dyn Interceptor + '_>;

    /// Eve's phase estimate from the observations collected during a run,
    /// for attacks that try to learn the phase.
    fn eve_estimate(&self, _log: &[(u64, EveObservation)], _config: &ProtocolConfig) -> Option<EveEstimate> {
        None
    }
}

/// Per-worker attack state.
pub trait Interceptor: Send {
    fn begin_block(&mut self) {}

    /// Alice → Bob leg.
    fn forward(&mut self, round: &mut RoundState, rng: &mut dyn RngCore) -> Result<()>;

    /// Bob → Alice leg (two-way runs only).
    fn backward(&mut self, _round: &mut RoundState, _rng: &mut dyn RngCore) -> Result<()> {
        Ok(())
    }

    /// Called after the round's measurements with the state of Eve's ancilla
    /// (if she held one) conditioned on what happened to the probe.
    fn end_round(&mut self, _eve: Option<DensityMatrix>, _rng: &mut dyn RngCore) -> Result<Option<EveObservation>> {
        Ok(None)
    }

    /// Called once after the last round of a block.
    fn end_block(&mut self, _rng: &mut dyn RngCore) -> Result<Option<EveObservation>> {
        Ok(None)
    }
}
