use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CliError, CliResult};
use crate::adversary::{AttackSpec, EveEstimate};
use crate::metrics::AttackMode;
use crate::protocol::{config_hash, evaluate, run, ProtocolConfig, RoundCounts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// The true phase.
    Phi,
    /// The attack's tunable strength.
    Parameter,
}

fn default_windows() -> usize {
    20
}

fn default_mode() -> AttackMode {
    AttackMode::OneWayIndividual
}

/// Evenly spaced grid `start, …, stop` with `steps` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    /// Attack mode whose bounds fill the bound columns.
    #[serde(default = "default_mode")]
    pub mode: AttackMode,
    /// Detection windows per run for the variance columns.
    #[serde(default = "default_windows")]
    pub windows: usize,
}

impl SweepSpec {
    pub fn grid(&self) -> CliResult<Vec<f64>> {
        if self.steps == 0 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Schema("sweep needs finite bounds and at least one step".into()));
        }
        if self.steps == 1 {
            return Ok(vec![self.start]);
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        Ok((0..self.steps).map(|i| self.start + h * i as f64).collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub transcript: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub protocol: ProtocolConfig,
    pub attack: AttackSpec,
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let s: ScenarioFile = toml::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        s.protocol.validate()?;
        if let Some(sweep) = &s.sweep {
            sweep.grid()?;
            if sweep.windows == 0 {
                return Err(CliError::Schema("sweep.windows must be positive".into()));
            }
            if sweep.variable == SweepVariable::Parameter && s.attack.parameter().is_none() {
                return Err(CliError::Schema(format!("attack `{}` has no parameter to sweep", s.attack.name())));
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub attack: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub counts: RoundCounts,
    pub fidelity: f64,
    pub fidelity_by_label: Vec<(String, f64)>,
    pub threshold: f64,
    pub passed: bool,
    pub aborted: bool,
    pub epsilon_implied: f64,
    /// Reported even when the check aborts; it is then untrusted.
    pub phi_hat: f64,
    pub standard_error: f64,
    pub eve_estimate: Option<EveEstimate>,
}

/// Runs the scenario's protocol once, writing the transcript if requested.
pub fn run_scenario(scenario: &ScenarioFile) -> CliResult<RunSummary> {
    let config = &scenario.protocol;
    let attack = scenario.attack.build(config)?;
    let out = run(config, attack.as_ref())?;
    if let Some(path) = &scenario.output.transcript {
        fs::write(path, out.transcript.to_text()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let eval = evaluate(&out.transcript)?;
    Ok(RunSummary {
        attack: out.attack,
        config_hash: config_hash(config),
        seed: config.seed,
        counts: out.transcript.counts(),
        fidelity: eval.check.fidelity,
        fidelity_by_label: eval.check.fidelity_by_label,
        threshold: eval.check.threshold,
        passed: eval.check.passed,
        aborted: eval.aborted,
        epsilon_implied: eval.check.epsilon_implied,
        phi_hat: eval.estimate.phi_hat,
        standard_error: eval.estimate.standard_error,
        eve_estimate: out.eve_estimate,
    })
}
