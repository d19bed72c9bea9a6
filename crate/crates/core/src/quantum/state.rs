use super::{c, hermitian_eigen, outer, CMatrix, CVector, NORM_TOL, STATE_TOL};
use crate::error::{DqsError, Result};

/// Normalised state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    /// Wrap an amplitude vector that must already have unit norm.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || (norm - 1.0).abs() > NORM_TOL {
            return Err(DqsError::InvalidState(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalise an arbitrary nonzero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 1e-300) {
            return Err(DqsError::InvalidState("cannot normalise the zero vector".into()));
        }
        Ok(Self { amplitudes: amplitudes / c(norm, 0.0) })
    }

    /// Computational basis state `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = c(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        Self { amplitudes: self.amplitudes.kronecker(&other.amplitudes) }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &PureState) -> num_complex::Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { data: outer(&self.amplitudes) }
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: CMatrix,
}

impl DensityMatrix {
    /// Validate and wrap a matrix.
    pub fn new(data: CMatrix) -> Result<Self> {
        let rho = Self { data };
        rho.check(STATE_TOL)?;
        Ok(rho)
    }

    /// Wrap a matrix produced by an internal, invariant-preserving
    /// computation. The matrix is re-symmetrised to scrub rounding drift.
    pub(crate) fn from_raw(data: CMatrix) -> Self {
        let herm = (&data + data.adjoint()) * c(0.5, 0.0);
        Self { data: herm }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { data: CMatrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn purity(&self) -> f64 {
        super::trace_of_product(&self.data, &self.data).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.data).0
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self { data: self.data.kronecker(&other.data) }
    }

    /// Reduced state on the subsystems listed in `keep`.
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
        let total: usize = dims.iter().product();
        if total != self.dim() {
            return Err(DqsError::DimensionMismatch { expected: self.dim(), actual: total });
        }
        if keep.iter().any(|&k| k >= dims.len()) {
            return Err(DqsError::InvalidState("partial trace keeps a nonexistent subsystem".into()));
        }
        Ok(Self::from_raw(super::partial_trace(&self.data, dims, keep)))
    }

    /// Check Hermiticity, unit trace and positivity at tolerance `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        let d = &self.data;
        if !d.is_square() || d.nrows() == 0 {
            return Err(DqsError::InvalidState("density matrix must be square and nonempty".into()));
        }
        let herm = super::max_abs_diff(d, &d.adjoint());
        if herm > tol {
            return Err(DqsError::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = d.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(DqsError::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(DqsError::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.to_density()
    }
}
