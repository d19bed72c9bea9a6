use super::{c, hermitian_eigen, max_abs_diff, outer, CMatrix, STATE_TOL};
use crate::error::{DqsError, Result};

/// Hermitian operator together with its spectral decomposition.
///
/// Eigenvalues are distinct and stored in ascending order; each comes with
/// the orthogonal projector onto its eigenspace.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    projectors: Vec<CMatrix>,
}

impl Observable {
    /// Build from a spectral decomposition. The projectors must be
    /// orthogonal and sum to the identity.
    pub fn from_spectral(eigenvalues: Vec<f64>, projectors: Vec<CMatrix>) -> Result<Self> {
        if eigenvalues.len() != projectors.len() || projectors.is_empty() {
            return Err(DqsError::InvalidState("eigenvalue/projector count mismatch".into()));
        }
        let d = projectors[0].nrows();
        let mut pairs: Vec<(f64, CMatrix)> = eigenvalues.into_iter().zip(projectors).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut sum = CMatrix::zeros(d, d);
        let mut matrix = CMatrix::zeros(d, d);
        for (k, (lambda, p)) in pairs.iter().enumerate() {
            if p.nrows() != d || p.ncols() != d {
                return Err(DqsError::DimensionMismatch { expected: d, actual: p.nrows() });
            }
            if max_abs_diff(&(p * p), p) > STATE_TOL || max_abs_diff(p, &p.adjoint()) > STATE_TOL {
                return Err(DqsError::InvalidState("eigenprojector is not an orthogonal projector".into()));
            }
            for (other, q) in pairs.iter().skip(k + 1) {
                if (other - lambda).abs() < 1e-12 {
                    return Err(DqsError::InvalidState("repeated eigenvalue in spectral data".into()));
                }
                if (p * q).iter().any(|z| z.norm() > STATE_TOL) {
                    return Err(DqsError::InvalidState("eigenprojectors are not orthogonal".into()));
                }
            }
            sum += p;
            matrix += p * c(*lambda, 0.0);
        }
        if max_abs_diff(&sum, &CMatrix::identity(d, d)) > STATE_TOL {
            return Err(DqsError::InvalidState("eigenprojectors are not complete".into()));
        }
        let (eigenvalues, projectors) = pairs.into_iter().unzip();
        Ok(Self { matrix, eigenvalues, projectors })
    }

    /// Diagonalise a Hermitian matrix numerically. Eigenvalues closer than
    /// `1e-9` are merged into one eigenspace.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(DqsError::InvalidState("observable must be square".into()));
        }
        let dev = max_abs_diff(&matrix, &matrix.adjoint());
        if dev > STATE_TOL {
            return Err(DqsError::InvalidState(format!("observable not Hermitian ({dev:.3e})")));
        }
        let d = matrix.nrows();
        let (values, vectors) = hermitian_eigen(&matrix);
        let mut eigenvalues: Vec<f64> = Vec::new();
        let mut projectors: Vec<CMatrix> = Vec::new();
        for (lambda, v) in values.into_iter().zip(vectors) {
            match eigenvalues.last() {
                Some(prev) if (lambda - prev).abs() < 1e-9 => {
                    *projectors.last_mut().unwrap() += outer(&v);
                }
                _ => {
                    eigenvalues.push(lambda);
                    projectors.push(outer(&v));
                }
            }
        }
        debug_assert_eq!(projectors.iter().map(|p| p.trace().re).sum::<f64>().round() as usize, d);
        Ok(Self { matrix, eigenvalues, projectors })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    /// Dimension of each eigenspace, aligned with [`Self::eigenvalues`].
    pub fn multiplicities(&self) -> Vec<usize> {
        self.projectors.iter().map(|p| p.trace().re.round() as usize).collect()
    }

    /// Projector for the eigenvalue closest to `value`, if within `1e-9`.
    pub fn projector_for(&self, value: f64) -> Option<&CMatrix> {
        self.eigenvalues
            .iter()
            .position(|l| (l - value).abs() < 1e-9)
            .map(|k| &self.projectors[k])
    }

    /// Operator norm, the largest eigenvalue modulus.
    pub fn operator_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    pub fn negated(&self) -> Observable {
        let mut eigenvalues: Vec<f64> = self.eigenvalues.iter().map(|l| -l).collect();
        let mut projectors = self.projectors.clone();
        eigenvalues.reverse();
        projectors.reverse();
        Self { matrix: -&self.matrix, eigenvalues, projectors }
    }
}
