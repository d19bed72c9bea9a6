use rand::RngCore;

use crate::error::{DqsError, Result};
use crate::quantum::{
    c, embed, kron_all, measure, partial_trace, Channel, CMatrix, DensityMatrix, Observable,
};

/// Joint state of one protocol round: Alice's reference register (dimension
/// 1 in the MUB variant), the probe in transit and Eve's ancilla (dimension
/// 1 when she holds none), in that tensor order.
///
/// Attacks only get the operations below. None of them touch Alice's
/// register or reveal any party's classical data.
#[derive(Debug, Clone)]
pub struct RoundState {
    rho: CMatrix,
    dims: [usize; 3],
    n: usize,
}

impl RoundState {
    pub(crate) fn new(alice_probe: &CMatrix, alice_dim: usize, n: usize) -> Self {
        let probe_dim = 1 << n;
        debug_assert_eq!(alice_probe.nrows(), alice_dim * probe_dim);
        Self { rho: alice_probe.clone(), dims: [alice_dim, probe_dim, 1], n }
    }

    /// Probe qubits.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probe_dim(&self) -> usize {
        self.dims[1]
    }

    pub fn eve_dim(&self) -> usize {
        self.dims[2]
    }

    pub(crate) fn joint(&self) -> &CMatrix {
        &self.rho
    }

    /// Reduced probe state.
    #[cfg(test)]
    pub(crate) fn probe_state(&self) -> DensityMatrix {
        DensityMatrix::from_raw(partial_trace(&self.rho, &self.dims, &[1]))
    }

    fn conjugate(&mut self, full: &CMatrix) {
        self.rho = full * &self.rho * full.adjoint();
    }

    fn check_dim(expected: usize, m: &CMatrix) -> Result<()> {
        if m.nrows() != expected || m.ncols() != expected {
            return Err(DqsError::DimensionMismatch { expected, actual: m.nrows() });
        }
        Ok(())
    }

    /// `ρ → (1⊗U⊗1) ρ (1⊗U⊗1)†`
    pub fn apply_probe_unitary(&mut self, u: &CMatrix) -> Result<()> {
        Self::check_dim(self.dims[1], u)?;
        let full = embed(u, &self.dims, 1);
        self.conjugate(&full);
        Ok(())
    }

    /// Unitary on probe ⊗ Eve (probe factor first).
    pub fn apply_probe_eve_unitary(&mut self, u: &CMatrix) -> Result<()> {
        Self::check_dim(self.dims[1] * self.dims[2], u)?;
        let full = CMatrix::identity(self.dims[0], self.dims[0]).kronecker(u);
        self.conjugate(&full);
        Ok(())
    }

    /// Unitary on Eve's ancilla alone.
    pub fn apply_eve_unitary(&mut self, u: &CMatrix) -> Result<()> {
        Self::check_dim(self.dims[2], u)?;
        let full = embed(u, &self.dims, 2);
        self.conjugate(&full);
        Ok(())
    }

    pub fn apply_probe_channel(&mut self, channel: &Channel) -> Result<()> {
        if channel.dim_in() != self.dims[1] || channel.dim_out() != self.dims[1] {
            return Err(DqsError::DimensionMismatch { expected: self.dims[1], actual: channel.dim_in() });
        }
        let mut out = CMatrix::zeros(self.rho.nrows(), self.rho.ncols());
        for k in channel.kraus_operators() {
            let full = embed(k, &self.dims, 1);
            out += &full * &self.rho * full.adjoint();
        }
        self.rho = out;
        Ok(())
    }

    /// `ρ → (1 − p) ρ + p · Tr_probe[ρ] ⊗ 1/d` with the identity inserted in
    /// the probe slot.
    pub fn depolarize_probe(&mut self, p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(DqsError::InvalidProbability { name: "depolarizing p", value: p });
        }
        if p == 0.0 {
            return Ok(());
        }
        let [a, b, e] = self.dims;
        let rest = partial_trace(&self.rho, &self.dims, &[0, 2]);
        let weight = c(p / b as f64, 0.0);
        let keep = c(1.0 - p, 0.0);
        let mut out = &self.rho * keep;
        // row index (ia, ib, ie) = (ia * b + ib) * e + ie
        for ia in 0..a {
            for ie in 0..e {
                for ja in 0..a {
                    for je in 0..e {
                        let v = rest[(ia * e + ie, ja * e + je)] * weight;
                        for ib in 0..b {
                            out[((ia * b + ib) * e + ie, (ja * b + ib) * e + je)] += v;
                        }
                    }
                }
            }
        }
        self.rho = out;
        Ok(())
    }

    /// Append a fresh ancilla in `state`. Eve must not already hold one.
    pub fn attach_eve(&mut self, state: &DensityMatrix) -> Result<()> {
        if self.dims[2] != 1 {
            return Err(DqsError::InvalidState("Eve already holds an ancilla in this round".into()));
        }
        self.rho = self.rho.kronecker(state.matrix());
        self.dims[2] = state.dim();
        Ok(())
    }

    /// Trace out Eve's ancilla and hand its reduced state back.
    pub fn detach_eve(&mut self) -> DensityMatrix {
        let eve = self.eve_state();
        self.rho = partial_trace(&self.rho, &self.dims, &[0, 1]);
        self.dims[2] = 1;
        eve
    }

    pub(crate) fn eve_state(&self) -> DensityMatrix {
        DensityMatrix::from_raw(partial_trace(&self.rho, &self.dims, &[2]))
    }

    fn measure_slot<R: RngCore + ?Sized>(&mut self, obs: &Observable, slot: usize, rng: &mut R) -> Result<f64> {
        if obs.dim() != self.dims[slot] {
            return Err(DqsError::DimensionMismatch { expected: self.dims[slot], actual: obs.dim() });
        }
        let full_obs = Observable::from_spectral(
            obs.eigenvalues().to_vec(),
            obs.projectors().iter().map(|p| embed(p, &self.dims, slot)).collect(),
        )?;
        let outcome = measure(&full_obs, &DensityMatrix::from_raw(self.rho.clone()), rng)?;
        self.rho = outcome.post_state.into_matrix();
        Ok(outcome.eigenvalue)
    }

    /// Projective measurement of the probe; the state collapses.
    pub fn measure_probe<R: RngCore + ?Sized>(&mut self, obs: &Observable, rng: &mut R) -> Result<f64> {
        self.measure_slot(obs, 1, rng)
    }

    /// Projective measurement of Eve's ancilla; the state collapses.
    pub fn measure_eve<R: RngCore + ?Sized>(&mut self, obs: &Observable, rng: &mut R) -> Result<f64> {
        self.measure_slot(obs, 2, rng)
    }

    pub(crate) fn alice_probe_state(&self) -> CMatrix {
        if self.dims[2] == 1 {
            self.rho.clone()
        } else {
            partial_trace(&self.rho, &self.dims, &[0, 1])
        }
    }

    /// Eve's normalised state conditioned on the outcome `Π ⊗ 1_E` of
    /// probability `probability`, when she holds an ancilla.
    pub(crate) fn eve_conditional(&self, projector: &CMatrix, probability: f64) -> Option<DensityMatrix> {
        if self.dims[2] == 1 || probability <= 0.0 {
            return None;
        }
        let e = self.dims[2];
        let full = projector.kronecker(&CMatrix::identity(e, e));
        let weighted = &full * &self.rho;
        let eve = partial_trace(&weighted, &self.dims, &[2]) * c(1.0 / probability, 0.0);
        Some(DensityMatrix::from_raw(eve))
    }
}

/// `|a⟩⟨a| ⊗ |b⟩⟨b|`-style product of projectors on Alice ⊗ probe.
pub(crate) fn product_projector(alice: &CMatrix, probe: &CMatrix) -> CMatrix {
    kron_all([alice, probe])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{apply_unitary, bold_pauli, expectation, pauli, resource_state, Axis, LogicalFrame, PureState};
    use rand::SeedableRng;

    fn bell_round() -> RoundState {
        RoundState::new(resource_state(1).to_density().matrix(), 2, 1)
    }

    #[test]
    fn probe_unitary_matches_direct_conjugation() {
        let mut s = bell_round();
        let u = Axis::Y.matrix();
        s.apply_probe_unitary(&u).unwrap();
        let full = CMatrix::identity(2, 2).kronecker(&u);
        let direct = apply_unitary(&full, &resource_state(1).to_density()).unwrap();
        assert!(crate::quantum::max_abs_diff(s.joint(), direct.matrix()) < 1e-14);
    }

    #[test]
    fn depolarizing_closed_form_matches_kraus_channel() {
        for p in [0.0, 0.3, 1.0] {
            let mut a = bell_round();
            let mut b = bell_round();
            a.attach_eve(&PureState::basis(2, 1).to_density()).unwrap();
            b.attach_eve(&PureState::basis(2, 1).to_density()).unwrap();
            a.depolarize_probe(p).unwrap();
            b.apply_probe_channel(&Channel::depolarizing(1, p).unwrap()).unwrap();
            assert!(crate::quantum::max_abs_diff(a.joint(), b.joint()) < 1e-14, "p = {p}");
        }
        assert!(bell_round().depolarize_probe(1.5).is_err());
    }

    #[test]
    fn full_depolarization_gives_maximally_mixed_probe() {
        let mut s = bell_round();
        s.depolarize_probe(1.0).unwrap();
        let probe = s.probe_state();
        assert!(crate::quantum::max_abs_diff(probe.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-14);
    }

    #[test]
    fn attach_and_detach_round_trip() {
        let mut s = bell_round();
        let anc = PureState::basis(2, 1).to_density();
        s.attach_eve(&anc).unwrap();
        assert_eq!(s.eve_dim(), 2);
        assert!(s.attach_eve(&anc).is_err());
        let back = s.detach_eve();
        assert!(crate::quantum::max_abs_diff(back.matrix(), anc.matrix()) < 1e-14);
        assert_eq!(s.eve_dim(), 1);
        assert!(crate::quantum::max_abs_diff(s.joint(), resource_state(1).to_density().matrix()) < 1e-14);
    }

    #[test]
    fn measuring_the_probe_collapses_it() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut s = bell_round();
        let z = bold_pauli(&LogicalFrame::phase_aligned(1), Axis::Z);
        let v = s.measure_probe(&z, &mut rng).unwrap();
        let after = expectation(&z, &s.probe_state()).unwrap();
        assert!((after - v).abs() < 1e-12);
        assert!(s.measure_probe(&pauli(Axis::X), &mut rng).is_ok());
    }

    #[test]
    fn conditional_eve_state_is_normalised() {
        let mut s = bell_round();
        let plus = PureState::normalized(crate::quantum::CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
        s.attach_eve(&plus.to_density()).unwrap();
        let p0 = product_projector(&pauli(Axis::Z).projectors()[1], &CMatrix::identity(2, 2));
        let w = crate::quantum::trace_of_product(&p0, &s.alice_probe_state()).re;
        assert!((w - 0.5).abs() < 1e-12);
        let eve = s.eve_conditional(&p0, w).unwrap();
        assert!((eve.trace() - 1.0).abs() < 1e-12);
    }
}
