use rand::RngCore;

use super::{Attack, Correlation, EveEstimate, EveObservation, Interceptor};
use crate::error::{DqsError, Result};
use crate::protocol::{Direction, ProtocolConfig, RoundState};
use crate::quantum::{bold_pauli, c, encoding_unitary, mub_probe, Axis, CMatrix, DensityMatrix, LogicalFrame, Observable, SignedAxis};

/// Two-way leak: on the way to Bob, Eve swaps the probe for her own
/// `|X̄,+⟩` decoy and keeps the original; on the way back she swaps again,
/// measures X̄ on the returned decoy and forwards the original, encoding it
/// with her running estimate whenever the decoy came back as `−1` (which
/// only happens when Bob encoded).
#[derive(Debug, Clone)]
pub struct TwoWaySwapLeak {
    n: usize,
    p_estimate: f64,
}

impl TwoWaySwapLeak {
    pub fn new(config: &ProtocolConfig) -> Result<Self> {
        let attack = Self { n: config.n, p_estimate: config.p_estimate };
        attack.check_compatible(config.direction, config.n)?;
        Ok(attack)
    }

    /// Phase estimate from the mean X̄ outcome `m` over all returned decoys.
    /// With probability `p_e` the decoy was encoded (mean `cos 2nφ`) and
    /// otherwise it returns untouched (mean 1), so `cos 2nφ` is estimated
    /// by `(m − (1 − p_e)) / p_e`.
    pub fn estimate(&self, sum: f64, count: u64) -> EveEstimate {
        if count == 0 || self.p_estimate <= 0.0 {
            return EveEstimate { phi_hat: None, standard_error: f64::INFINITY, samples_used: count };
        }
        let m = sum / count as f64;
        let cosine = ((m - (1.0 - self.p_estimate)) / self.p_estimate).clamp(-1.0, 1.0);
        let two_n = 2.0 * self.n as f64;
        let phi_hat = cosine.acos() / two_n;
        let se_mean = ((1.0 - m * m).max(0.0) / count as f64).sqrt();
        let sine = (1.0 - cosine * cosine).sqrt();
        let standard_error = if sine > 0.0 {
            se_mean / self.p_estimate / (two_n * sine)
        } else {
            f64::INFINITY
        };
        EveEstimate { phi_hat: Some(phi_hat), standard_error, samples_used: count }
    }
}

fn swap(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(i * d + j, j * d + i)] = c(1.0, 0.0);
        }
    }
    s
}

struct LeakInterceptor<'a> {
    attack: &'a TwoWaySwapLeak,
    swap: CMatrix,
    decoy: DensityMatrix,
    readout: Observable,
    sum: f64,
    count: u64,
    pending: Option<EveObservation>,
}

impl Interceptor for LeakInterceptor<'_> {
    fn forward(&mut self, round: &mut RoundState, _rng: &mut dyn RngCore) -> Result<()> {
        round.attach_eve(&self.decoy)?;
        round.apply_probe_eve_unitary(&self.swap)
    }

    fn backward(&mut self, round: &mut RoundState, rng: &mut dyn RngCore) -> Result<()> {
        round.apply_probe_eve_unitary(&self.swap)?;
        let outcome = round.measure_eve(&self.readout, rng)?;
        round.detach_eve();
        if outcome < 0.0 {
            if let Some(phi) = self.attack.estimate(self.sum, self.count).phi_hat {
                round.apply_probe_unitary(&encoding_unitary(self.attack.n, phi))?;
            }
        }
        self.sum += outcome;
        self.count += 1;
        self.pending = Some(EveObservation { axis: Some(Axis::X), outcome });
        Ok(())
    }

    fn end_round(&mut self, _eve: Option<DensityMatrix>, _rng: &mut dyn RngCore) -> Result<Option<EveObservation>> {
        Ok(self.pending.take())
    }
}

impl Attack for TwoWaySwapLeak {
    fn name(&self) -> &'static str {
        "two_way_swap_leak"
    }

    fn correlation(&self) -> Correlation {
        Correlation::Sequential
    }

    fn check_compatible(&self, direction: Direction, n: usize) -> Result<()> {
        if direction != Direction::TwoWay {
            return Err(DqsError::IncompatibleAttack {
                attack: self.name().into(),
                reason: "the probe never returns in one-way mode".into(),
            });
        }
        if n != self.n {
            return Err(DqsError::IncompatibleAttack {
                attack: self.name().into(),
                reason: format!("built for n = {}, run uses n = {n}", self.n),
            });
        }
        Ok(())
    }

    fn interceptor(&self) -> Box<dyn Interceptor + '_> {
        let frame = LogicalFrame::phase_aligned(self.n);
        Box::new(LeakInterceptor {
            attack: self,
            swap: swap(frame.dim()),
            decoy: mub_probe(&frame, SignedAxis::plus(Axis::X)).to_density(),
            readout: bold_pauli(&frame, Axis::X),
            sum: 0.0,
            count: 0,
            pending: None,
        })
    }

    fn eve_estimate(&self, log: &[(u64, EveObservation)], _config: &ProtocolConfig) -> Option<EveEstimate> {
        let sum = log.iter().map(|(_, o)| o.outcome).sum();
        Some(self.estimate(sum, log.len() as u64))
    }
}
