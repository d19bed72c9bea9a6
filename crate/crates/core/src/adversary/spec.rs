use serde::{Deserialize, Serialize};

use super::{
    calibrate_depolarizing, Attack, Depolarizing, EntanglingMemory, Identity, InterceptResend, InterceptStrategy,
    Readout, TwoWaySwapLeak, UnitaryTamper,
};
use crate::error::{DqsError, Result};
use crate::protocol::ProtocolConfig;
use crate::quantum::Axis;

fn default_readout() -> Readout {
    Readout::Trace
}

/// Serializable attack selection: a `name` plus that attack's parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackSpec {
    Identity,
    Depolarizing {
        p: f64,
    },
    /// Depolarizing noise tuned so the long-run check fidelity hits a target.
    CalibratedDepolarizing {
        target_fidelity: f64,
    },
    UnitaryTamper {
        axis: Axis,
        angle: f64,
    },
    /// Without `axis` Eve picks a random logical axis each round.
    InterceptResend {
        #[serde(default)]
        axis: Option<Axis>,
    },
    EntanglingMemory {
        coupling: f64,
        block_length: usize,
        #[serde(default = "default_readout")]
        readout: Readout,
    },
    TwoWaySwapLeak,
}

impl AttackSpec {
    pub fn build(&self, config: &ProtocolConfig) -> Result<Box<dyn Attack>> {
        let attack: Box<dyn Attack> = match *self {
            AttackSpec::Identity => Box::new(Identity),
            AttackSpec::Depolarizing { p } => Box::new(Depolarizing::new(p)?),
            AttackSpec::CalibratedDepolarizing { target_fidelity } => {
                Box::new(Depolarizing::new(calibrate_depolarizing(target_fidelity, config.n)?)?)
            }
            AttackSpec::UnitaryTamper { axis, angle } => Box::new(UnitaryTamper::new(axis, angle)?),
            AttackSpec::InterceptResend { axis } => Box::new(InterceptResend::new(match axis {
                Some(a) => InterceptStrategy::Fixed(a),
                None => InterceptStrategy::Random,
            })),
            AttackSpec::EntanglingMemory { coupling, block_length, readout } => {
                Box::new(EntanglingMemory::new(coupling, block_length, readout)?)
            }
            AttackSpec::TwoWaySwapLeak => Box::new(TwoWaySwapLeak::new(config)?),
        };
        attack.check_compatible(config.direction, config.n)?;
        Ok(attack)
    }

    /// The attack's single tunable strength, if it has one.
    pub fn parameter(&self) -> Option<f64> {
        match *self {
            AttackSpec::Depolarizing { p } => Some(p),
            AttackSpec::CalibratedDepolarizing { target_fidelity } => Some(target_fidelity),
            AttackSpec::UnitaryTamper { angle, .. } => Some(angle),
            AttackSpec::EntanglingMemory { coupling, .. } => Some(coupling),
            _ => None,
        }
    }

    /// Copy with the tunable strength replaced.
    pub fn with_parameter(&self, value: f64) -> Result<AttackSpec> {
        let mut out = self.clone();
        match &mut out {
            AttackSpec::Depolarizing { p } => *p = value,
            AttackSpec::CalibratedDepolarizing { target_fidelity } => *target_fidelity = value,
            AttackSpec::UnitaryTamper { angle, .. } => *angle = value,
            AttackSpec::EntanglingMemory { coupling, .. } => *coupling = value,
            _ => {
                return Err(DqsError::InvalidConfig(format!("attack `{}` has no sweepable parameter", self.name())))
            }
        }
        Ok(out)
    }

    pub fn name(&self) -> &'static str {
        match self {
            AttackSpec::Identity => "identity",
            AttackSpec::Depolarizing { .. } => "depolarizing",
            AttackSpec::CalibratedDepolarizing { .. } => "calibrated_depolarizing",
            AttackSpec::UnitaryTamper { .. } => "unitary_tamper",
            AttackSpec::InterceptResend { .. } => "intercept_resend",
            AttackSpec::EntanglingMemory { .. } => "entangling_memory",
            AttackSpec::TwoWaySwapLeak => "two_way_swap_leak",
        }
    }
}
