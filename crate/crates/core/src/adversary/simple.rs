use rand::{Rng, RngCore};

use super::{Attack, EveObservation, Interceptor};
use crate::error::{DqsError, Result};
use crate::protocol::RoundState;
use crate::quantum::{bold_pauli, c, kron_all, Axis, CMatrix, LogicalFrame, Observable, I};

/// Leaves the probe alone.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

struct PassThrough;

impl Interceptor for PassThrough {
    fn forward(&mut self, _round: &mut RoundState, _rng: &mut dyn RngCore) -> Result<()> {
        Ok(())
    }
}

impl Attack for Identity {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn interceptor(&self) -> Box<dyn Interceptor + '_> {
        Box::new(PassThrough)
    }
}

/// Depolarizing channel of strength `p` on the whole probe register,
/// applied on the forward leg.
#[derive(Debug, Clone, Copy)]
pub struct Depolarizing {
    p: f64,
}

impl Depolarizing {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(DqsError::InvalidProbability { name: "depolarizing p", value: p });
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

impl Interceptor for Depolarizing {
    fn forward(&mut self, round: &mut RoundState, _rng: &mut dyn RngCore) -> Result<()> {
        round.depolarize_probe(self.p)
    }
}

impl Attack for Depolarizing {
    fn name(&self) -> &'static str {
        "depolarizing"
    }

    fn interceptor(&self) -> Box<dyn Interceptor + '_> {
        Box::new(*self)
    }
}

/// `(e^{iθσ})^{⊗n}` applied to every probe qubit on the forward leg.
#[derive(Debug, Clone, Copy)]
pub struct UnitaryTamper {
    pub axis: Axis,
    pub angle: f64,
}

impl UnitaryTamper {
    pub fn new(axis: Axis, angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(DqsError::Domain(format!("tamper angle must be finite, got {angle}")));
        }
        Ok(Self { axis, angle })
    }

    pub fn unitary(&self, n: usize) -> CMatrix {
        let single = CMatrix::identity(2, 2) * c(self.angle.cos(), 0.0) + self.axis.matrix() * (I * self.angle.sin());
        kron_all(std::iter::repeat_n(&single, n))
    }
}

struct TamperInterceptor {
    cache: Option<(usize, CMatrix)>,
    attack: UnitaryTamper,
}

impl Interceptor for TamperInterceptor {
    fn forward(&mut self, round: &mut RoundState, _rng: &mut dyn RngCore) -> Result<()> {
        let n = round.n();
        if self.cache.as_ref().is_none_or(|(m, _)| *m != n) {
            self.cache = Some((n, self.attack.unitary(n)));
        }
        round.apply_probe_unitary(&self.cache.as_ref().expect("filled above").1)
    }
}

impl Attack for UnitaryTamper {
    fn name(&self) -> &'static str {
        "unitary_tamper"
    }

    fn interceptor(&self) -> Box<dyn Interceptor + '_> {
        Box::new(TamperInterceptor { cache: None, attack: *self })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterceptStrategy {
    Fixed(Axis),
    /// A uniformly random logical axis in every round.
    Random,
}

/// Eve measures a logical Pauli of the probe, records the outcome and
/// forwards the collapsed state.
#[derive(Debug, Clone, Copy)]
pub struct InterceptResend {
    pub strategy: InterceptStrategy,
}

impl InterceptResend {
    pub fn new(strategy: InterceptStrategy) -> Self {
        Self { strategy }
    }
}

struct InterceptInterceptor {
    strategy: InterceptStrategy,
    observables: Option<(usize, Vec<Observable>)>,
    pending: Option<EveObservation>,
}

impl Interceptor for InterceptInterceptor {
    fn forward(&mut self, round: &mut RoundState, rng: &mut dyn RngCore) -> Result<()> {
        let n = round.n();
        if self.observables.as_ref().is_none_or(|(m, _)| *m != n) {
            let frame = LogicalFrame::phase_aligned(n);
            self.observables = Some((n, Axis::ALL.iter().map(|&a| bold_pauli(&frame, a)).collect()));
        }
        let axis = match self.strategy {
            InterceptStrategy::Fixed(a) => a,
            InterceptStrategy::Random => Axis::ALL[rng.random_range(0..3)],
        };
        let idx = Axis::ALL.iter().position(|&a| a == axis).expect("axis listed");
        let obs = &self.observables.as_ref().expect("filled above").1[idx];
        let outcome = round.measure_probe(obs, rng)?;
        self.pending = Some(EveObservation { axis: Some(axis), outcome });
        Ok(())
    }

    fn end_round(&mut self, _eve: Option<crate::quantum::DensityMatrix>, _rng: &mut dyn RngCore) -> Result<Option<EveObservation>> {
        Ok(self.pending.take())
    }
}

impl Attack for InterceptResend {
    fn name(&self) -> &'static str {
        "intercept_resend"
    }

    fn interceptor(&self) -> Box<dyn Interceptor + '_> {
        Box::new(InterceptInterceptor { strategy: self.strategy, observables: None, pending: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{encoding_unitary, max_abs_diff, resource_state};
    use rand::SeedableRng;

    fn bell() -> RoundState {
        RoundState::new(resource_state(1).to_density().matrix(), 2, 1)
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let mut s = bell();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        Identity.interceptor().forward(&mut s, &mut rng).unwrap();
        assert!(max_abs_diff(s.joint(), resource_state(1).to_density().matrix()) < 1e-15);
        assert_eq!(Identity.correlation(), super::super::Correlation::Memoryless);
    }

    #[test]
    fn depolarizing_range_is_checked() {
        assert!(Depolarizing::new(-0.1).is_err());
        assert!(Depolarizing::new(1.1).is_err());
        assert!(Depolarizing::new(0.0).is_ok());
    }

    #[test]
    fn tamper_about_y_is_an_extra_encoding() {
        for n in 1..=3 {
            let t = UnitaryTamper::new(Axis::Y, 0.17).unwrap();
            assert!(max_abs_diff(&t.unitary(n), &encoding_unitary(n, 0.17)) < 1e-14);
        }
        let zero = UnitaryTamper::new(Axis::X, 0.0).unwrap();
        assert!(max_abs_diff(&zero.unitary(2), &CMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn intercept_records_an_outcome_each_round() {
        let attack = InterceptResend::new(InterceptStrategy::Random);
        let mut it = attack.interceptor();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut s = bell();
            it.forward(&mut s, &mut rng).unwrap();
            let o = it.end_round(None, &mut rng).unwrap().unwrap();
            assert!(o.outcome == 1.0 || o.outcome == -1.0);
            assert!(o.axis.is_some());
        }
    }
}
