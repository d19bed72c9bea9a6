use super::{c, max_abs_diff, CMatrix, DensityMatrix, STATE_TOL};
use crate::error::{DqsError, Result};

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
}

impl Channel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| DqsError::InvalidState("channel needs at least one Kraus operator".into()))?;
        let (dim_out, dim_in) = first.shape();
        let mut sum = CMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            if k.shape() != (dim_out, dim_in) {
                return Err(DqsError::DimensionMismatch { expected: dim_in, actual: k.ncols() });
            }
            sum += k.adjoint() * k;
        }
        let dev = max_abs_diff(&sum, &CMatrix::identity(dim_in, dim_in));
        if dev > STATE_TOL {
            return Err(DqsError::InvalidState(format!("Kraus operators not complete ({dev:.3e})")));
        }
        Ok(Self { dim_in, dim_out, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim_in: dim, dim_out: dim, kraus: vec![CMatrix::identity(dim, dim)] }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        let defect = super::unitarity_defect(&u);
        if defect > STATE_TOL {
            return Err(DqsError::NotUnitary { deviation: defect });
        }
        Self::new(vec![u])
    }

    /// `ρ ↦ (1-p) ρ + p Tr[ρ] I/d` on `num_qubits` qubits, written with the
    /// Pauli-string Kraus decomposition.
    pub fn depolarizing(num_qubits: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(DqsError::InvalidProbability { name: "p", value: p });
        }
        let d = 1usize << num_qubits;
        let d2 = (d * d) as f64;
        let singles = [pauli_matrix(0), pauli_matrix(1), pauli_matrix(2), pauli_matrix(3)];
        let mut kraus = Vec::with_capacity(d * d);
        for word in 0..d * d {
            let mut op = CMatrix::from_element(1, 1, c(1.0, 0.0));
            let mut rest = word;
            for _ in 0..num_qubits {
                op = op.kronecker(&singles[rest % 4]);
                rest /= 4;
            }
            let weight = if word == 0 { 1.0 - p + p / d2 } else { p / d2 };
            if weight > 0.0 {
                kraus.push(op * c(weight.sqrt(), 0.0));
            }
        }
        Self::new(kraus)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus_operators(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim_in {
            return Err(DqsError::DimensionMismatch { expected: self.dim_in, actual: rho.dim() });
        }
        Ok(DensityMatrix::from_raw(self.apply_matrix(rho.matrix())))
    }

    pub(crate) fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * m * k.adjoint();
        }
        out
    }

    /// `Φ ∘ self`
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if next.dim_in != self.dim_out {
            return Err(DqsError::DimensionMismatch { expected: self.dim_out, actual: next.dim_in });
        }
        let kraus = next
            .kraus
            .iter()
            .flat_map(|b| self.kraus.iter().map(move |a| b * a))
            .collect();
        Channel::new(kraus)
    }
}

/// `UρU†`
pub fn apply_unitary(u: &CMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if u.nrows() != rho.dim() || u.ncols() != rho.dim() {
        return Err(DqsError::DimensionMismatch { expected: rho.dim(), actual: u.ncols() });
    }
    Ok(DensityMatrix::from_raw(u * rho.matrix() * u.adjoint()))
}

/// I, X, Y, Z by index.
pub(crate) fn pauli_matrix(k: usize) -> CMatrix {
    use super::{I, ONE, ZERO};
    match k {
        0 => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
        1 => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        2 => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        3 => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => unreachable!("pauli index out of range"),
    }
}
