use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{DqsError, Result};

/// Largest probe register simulated with dense matrices.
pub const MAX_PROBE_QUBITS: usize = 4;

const PROBABILITY_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Alice keeps a reference qubit entangled with the probe.
    Entanglement,
    /// Alice sends a random logical Pauli eigenstate.
    Mub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Alice → Bob; Bob encodes and measures.
    OneWay,
    /// Alice → Bob → Alice; Bob only encodes, Alice measures.
    TwoWay,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Entanglement => "entanglement",
            Variant::Mub => "mub",
        })
    }
}

impl FromStr for Variant {
    type Err = DqsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entanglement" => Ok(Variant::Entanglement),
            "mub" => Ok(Variant::Mub),
            other => Err(DqsError::InvalidConfig(format!("unknown protocol variant `{other}`"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::OneWay => "one_way",
            Direction::TwoWay => "two_way",
        })
    }
}

impl FromStr for Direction {
    type Err = DqsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one_way" => Ok(Direction::OneWay),
            "two_way" => Ok(Direction::TwoWay),
            other => Err(DqsError::InvalidConfig(format!("unknown direction `{other}`"))),
        }
    }
}

/// Every knob of a single protocol execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub variant: Variant,
    pub direction: Direction,
    /// Probe qubits.
    pub n: usize,
    /// Total rounds `T`.
    pub rounds: u64,
    /// Probability that Bob leaves the probe unencoded (check round).
    pub p_check: f64,
    /// Probability that Bob encodes the phase (estimation round).
    pub p_estimate: f64,
    /// Probability that the probe is discarded.
    pub p_discard: f64,
    /// Safety threshold: ε for the entanglement variant, ε̄ for the MUB variant.
    pub epsilon: f64,
    pub true_phi: f64,
    pub seed: u64,
}

impl ProtocolConfig {
    /// Entanglement-based one-way run with `p_check = p_estimate = ½` and no
    /// discards.
    pub fn new(n: usize, rounds: u64, true_phi: f64, seed: u64) -> Self {
        Self {
            variant: Variant::Entanglement,
            direction: Direction::OneWay,
            n,
            rounds,
            p_check: 0.5,
            p_estimate: 0.5,
            p_discard: 0.0,
            epsilon: 0.1,
            true_phi,
            seed,
        }
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_probabilities(mut self, p_check: f64, p_estimate: f64, p_discard: f64) -> Self {
        self.p_check = p_check;
        self.p_estimate = p_estimate;
        self.p_discard = p_discard;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_PROBE_QUBITS {
            return Err(DqsError::InvalidConfig(format!(
                "probe size n = {} outside 1..={MAX_PROBE_QUBITS}",
                self.n
            )));
        }
        if self.rounds == 0 {
            return Err(DqsError::InvalidConfig("at least one round is required".into()));
        }
        for (name, value) in [("p_check", self.p_check), ("p_estimate", self.p_estimate), ("p_discard", self.p_discard)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(DqsError::InvalidProbability { name, value });
            }
        }
        let sum = self.p_check + self.p_estimate + self.p_discard;
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(DqsError::InvalidConfig(format!("p_check + p_estimate + p_discard = {sum}, expected 1")));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(DqsError::InvalidConfig(format!("threshold must be finite and non-negative, got {}", self.epsilon)));
        }
        if !self.true_phi.is_finite() {
            return Err(DqsError::InvalidConfig("true_phi must be finite".into()));
        }
        Ok(())
    }
}
