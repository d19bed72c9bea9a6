use crate::error::{DqsError, Result};
use crate::protocol::RoundState;
use crate::quantum::{bold_pauli, kron_all, pauli, resource_state, trace_of_product, Axis, CMatrix, LogicalFrame};

const BISECTION_TOL: f64 = 1e-12;

/// Long-run value of the check-round fidelity estimator for a joint
/// reference ⊗ probe state: `(1 + ⟨X⊗Z̄⟩ + ⟨Z⊗X̄⟩ + ⟨Y⊗Ȳ⟩)/4`, each correlator
/// taken over outcomes inside the logical subspace.
pub fn exact_check_fidelity(joint: &CMatrix, n: usize) -> Result<f64> {
    let frame = LogicalFrame::phase_aligned(n);
    let d = frame.dim();
    if joint.nrows() != 2 * d {
        return Err(DqsError::DimensionMismatch { expected: 2 * d, actual: joint.nrows() });
    }
    let support = CMatrix::identity(2, 2).kronecker(&frame.support_projector());
    let kept = trace_of_product(&support, joint).re;
    if kept <= 0.0 {
        return Err(DqsError::Domain("probe never lands in the logical subspace".into()));
    }
    let mut sum = 0.0;
    for (a, b) in [(Axis::X, Axis::Z), (Axis::Z, Axis::X), (Axis::Y, Axis::Y)] {
        let op = kron_all([pauli(a).matrix(), bold_pauli(&frame, b).matrix()]);
        sum += trace_of_product(&op, joint).re / kept;
    }
    Ok((1.0 + sum) / 4.0)
}

/// Long-run check fidelity when the probe of the resource state passes a
/// depolarizing channel of strength `p`.
pub fn expected_check_fidelity(n: usize, p: f64) -> Result<f64> {
    let mut round = RoundState::new(resource_state(n).to_density().matrix(), 2, n);
    round.depolarize_probe(p)?;
    exact_check_fidelity(round.joint(), n)
}

/// Depolarizing strength whose long-run check fidelity equals `target`, by
/// bisection on `[0, 1]` (the fidelity decreases monotonically in `p`).
pub fn calibrate_depolarizing(target: f64, n: usize) -> Result<f64> {
    let (hi_f, lo_f) = (expected_check_fidelity(n, 0.0)?, expected_check_fidelity(n, 1.0)?);
    if !(lo_f..=hi_f).contains(&target) {
        return Err(DqsError::Domain(format!("target fidelity {target} outside [{lo_f}, {hi_f}]")));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if expected_check_fidelity(n, mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
