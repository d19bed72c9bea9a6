use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{Attack, Correlation, EveObservation, Interceptor};
use crate::error::{DqsError, Result};
use crate::protocol::{Direction, RoundState};
use crate::quantum::{c, measure, outer, pauli, Axis, CMatrix, CVector, DensityMatrix, I};

/// Longest block simulated exactly.
pub const MAX_BLOCK_LENGTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    /// The ancilla is traced out at the end of the block.
    Trace,
    /// The ancilla is measured in the X basis at the end of the block.
    Measure,
}

/// Block-collective attack on a single-qubit probe. At the start of each
/// block Eve prepares one ancilla in `|+⟩`; in every round of the block she
/// applies `e^{−icY}` to the probe controlled on the ancilla being `|1⟩`,
/// and keeps the ancilla for the next round.
#[derive(Debug, Clone, Copy)]
pub struct EntanglingMemory {
    pub coupling: f64,
    pub block_length: usize,
    pub readout: Readout,
}

impl EntanglingMemory {
    pub fn new(coupling: f64, block_length: usize, readout: Readout) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(DqsError::Domain(format!("coupling must be finite, got {coupling}")));
        }
        if block_length == 0 || block_length > MAX_BLOCK_LENGTH {
            return Err(DqsError::DimensionLimit(format!(
                "block length {block_length} outside 1..={MAX_BLOCK_LENGTH}"
            )));
        }
        Ok(Self { coupling, block_length, readout })
    }

    /// The probe ⊗ ancilla interaction.
    pub fn interaction(&self) -> CMatrix {
        let rot = CMatrix::identity(2, 2) * c(self.coupling.cos(), 0.0) - Axis::Y.matrix() * (I * self.coupling.sin());
        let p0 = outer(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
        let p1 = outer(&CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]));
        CMatrix::identity(2, 2).kronecker(&p0) + rot.kronecker(&p1)
    }

    pub fn initial_ancilla() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::new(outer(&CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]))).expect("|+⟩ is a state")
    }
}

struct MemoryInterceptor {
    attack: EntanglingMemory,
    interaction: CMatrix,
    ancilla: Option<DensityMatrix>,
}

impl Interceptor for MemoryInterceptor {
    fn begin_block(&mut self) {
        self.ancilla = Some(EntanglingMemory::initial_ancilla());
    }

    fn forward(&mut self, round: &mut RoundState, _rng: &mut dyn RngCore) -> Result<()> {
        let ancilla = self.ancilla.take().unwrap_or_else(EntanglingMemory::initial_ancilla);
        round.attach_eve(&ancilla)?;
        round.apply_probe_eve_unitary(&self.interaction)
    }

    fn end_round(&mut self, eve: Option<DensityMatrix>, _rng: &mut dyn RngCore) -> Result<Option<EveObservation>> {
        self.ancilla = eve;
        Ok(None)
    }

    fn end_block(&mut self, rng: &mut dyn RngCore) -> Result<Option<EveObservation>> {
        let Some(ancilla) = self.ancilla.take() else {
            return Ok(None);
        };
        match self.attack.readout {
            Readout::Trace => Ok(None),
            Readout::Measure => {
                let m = measure(&pauli(Axis::X), &ancilla, rng)?;
                Ok(Some(EveObservation { axis: Some(Axis::X), outcome: m.eigenvalue }))
            }
        }
    }
}

impl Attack for EntanglingMemory {
    fn name(&self) -> &'static str {
        "entangling_memory"
    }

    fn correlation(&self) -> Correlation {
        Correlation::Blocks(self.block_length)
    }

    fn check_compatible(&self, _direction: Direction, n: usize) -> Result<()> {
        if n != 1 {
            return Err(DqsError::IncompatibleAttack {
                attack: self.name().into(),
                reason: format!("needs a single-qubit probe, got n = {n}"),
            });
        }
        Ok(())
    }

    fn interceptor(&self) -> Box<dyn Interceptor + '_> {
        Box::new(MemoryInterceptor { attack: *self, interaction: self.interaction(), ancilla: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{max_abs_diff, unitarity_defect};

    #[test]
    fn zero_coupling_is_identity() {
        let m = EntanglingMemory::new(0.0, 2, Readout::Trace).unwrap();
        assert!(max_abs_diff(&m.interaction(), &CMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn interaction_is_unitary() {
        for cpl in [0.3, 1.0, std::f64::consts::FRAC_PI_2] {
            let m = EntanglingMemory::new(cpl, 3, Readout::Measure).unwrap();
            assert!(unitarity_defect(&m.interaction()) < 1e-14);
        }
    }

    #[test]
    fn block_limits() {
        assert!(matches!(EntanglingMemory::new(0.1, 4, Readout::Trace), Err(DqsError::DimensionLimit(_))));
        assert!(EntanglingMemory::new(0.1, 0, Readout::Trace).is_err());
        let m = EntanglingMemory::new(0.1, 2, Readout::Trace).unwrap();
        assert!(m.check_compatible(Direction::OneWay, 2).is_err());
        assert_eq!(m.correlation(), Correlation::Blocks(2));
    }
}
