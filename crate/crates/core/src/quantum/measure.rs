use rand::Rng;

use super::{c, trace_of_product, DensityMatrix, Observable};
use crate::error::{DqsError, Result};

/// Outcome of a projective measurement.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub eigenvalue: f64,
    /// Index into [`Observable::eigenvalues`].
    pub index: usize,
    pub probability: f64,
    pub post_state: DensityMatrix,
}

fn check_dims(obs: &Observable, state: &DensityMatrix) -> Result<()> {
    if obs.dim() != state.dim() {
        return Err(DqsError::DimensionMismatch { expected: obs.dim(), actual: state.dim() });
    }
    Ok(())
}

/// `Tr[Π_k ρ]` for every eigenspace, clipped at zero.
pub fn born_probabilities(obs: &Observable, state: &DensityMatrix) -> Result<Vec<f64>> {
    check_dims(obs, state)?;
    Ok(obs
        .projectors()
        .iter()
        .map(|p| trace_of_product(p, state.matrix()).re.max(0.0))
        .collect())
}

/// `Tr[O ρ]`
pub fn expectation(obs: &Observable, state: &DensityMatrix) -> Result<f64> {
    check_dims(obs, state)?;
    Ok(trace_of_product(obs.matrix(), state.matrix()).re)
}

/// Sample an outcome with Born probabilities and return the collapsed state.
///
/// A single uniform draw is consumed and mapped through the cumulative
/// distribution in ascending-eigenvalue order, so results are reproducible
/// for a given generator state.
pub fn measure<R: Rng + ?Sized>(obs: &Observable, state: &DensityMatrix, rng: &mut R) -> Result<Measurement> {
    let probs = born_probabilities(obs, state)?;
    let index = sample_index(&probs, rng.random::<f64>());
    let p = probs[index];
    let proj = &obs.projectors()[index];
    let post = proj * state.matrix() * proj * c(1.0 / p, 0.0);
    Ok(Measurement {
        eigenvalue: obs.eigenvalues()[index],
        index,
        probability: p,
        post_state: DensityMatrix::from_raw(post),
    })
}

/// Inverse-CDF lookup that never lands on a zero-probability entry.
pub(crate) fn sample_index(probs: &[f64], u: f64) -> usize {
    let total: f64 = probs.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last_nonzero = k;
        acc += p;
        if target < acc {
            return k;
        }
    }
    last_nonzero
}
