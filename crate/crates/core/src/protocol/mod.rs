//! Round-based execution of the one- and two-way sensing protocols.

mod analysis;
mod config;
mod engine;
mod equivalence;
mod round;
mod transcript;

pub use analysis::{
    check_fidelity, epsilon_from_fidelity_estimate, estimate_phase, estimation_values, evaluate, windowed_estimate,
    CheckResult, CorrelatorStat, EstimateResult, Evaluation, WindowedEstimate,
};
pub use config::{Direction, ProtocolConfig, Variant, MAX_PROBE_QUBITS};
pub use engine::{run, sift, RoundChoices, Run};
pub use equivalence::{run_mub_equivalence, EquivalenceReport};
pub use round::RoundState;
pub use transcript::{config_hash, BobAction, Observation, RoundCounts, RoundRecord, SiftStatus, Transcript};
