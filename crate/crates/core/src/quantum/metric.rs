use super::{hermitian_eigen, hermitian_function, CMatrix, DensityMatrix, PureState};
use crate::error::{DqsError, Result};

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(DqsError::DimensionMismatch { expected: a.dim(), actual: b.dim() });
    }
    Ok(())
}

/// Schatten 1-norm of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.iter().map(|l| l.abs()).sum()
}

/// `F(ρ, σ) = ‖√ρ √σ‖₁²`, computed as `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dim(a, b)?;
    let sqrt_a = hermitian_function(a.matrix(), |l| l.max(0.0).sqrt());
    let inner = &sqrt_a * b.matrix() * &sqrt_a;
    let root_trace: f64 = hermitian_eigen(&inner).0.iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// `|⟨a|b⟩|²`
pub fn fidelity_pure(a: &PureState, b: &PureState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(DqsError::DimensionMismatch { expected: a.dim(), actual: b.dim() });
    }
    Ok(a.inner(b).norm_sqr().clamp(0.0, 1.0))
}

/// `D(ρ, σ) = ½‖ρ − σ‖₁`
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dim(a, b)?;
    Ok((0.5 * trace_norm(&(a.matrix() - b.matrix()))).clamp(0.0, 1.0))
}
