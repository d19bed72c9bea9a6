//! Dense linear-algebra substrate for small qubit registers.
//!
//! Everything here works on full complex matrices. That is plenty for the
//! registers the protocols need (a single reference qubit plus an `n <= 4`
//! qubit probe, occasionally an eavesdropper ancilla) and keeps every
//! quantity exact up to floating point.

mod channel;
mod measure;
mod metric;
mod observable;
mod pauli;
mod random;
mod state;

pub use channel::{apply_unitary, Channel};
pub use measure::{born_probabilities, expectation, measure, Measurement};
pub(crate) use measure::sample_index;
pub use metric::{fidelity, fidelity_pure, trace_distance, trace_norm};
pub use observable::Observable;
pub use pauli::{
    bold_pauli, encoding_unitary, mub_probe, pauli, resource_state, resource_state_in, Axis,
    LogicalFrame, SignedAxis,
};
pub use random::{random_density_matrix, random_pure_state, random_unitary};
pub use state::{DensityMatrix, PureState};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance used for Hermiticity, trace and positivity checks.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance on the norm of a pure state.
pub const NORM_TOL: f64 = 1e-12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Kronecker product of a sequence of matrices, left factor most significant.
pub fn kron_all<'a, It>(factors: It) -> CMatrix
where
    It: IntoIterator<Item = &'a CMatrix>,
{
    factors
        .into_iter()
        .fold(CMatrix::from_element(1, 1, ONE), |acc, f| acc.kronecker(f))
}

/// `|v⟩⟨v|`
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Distance of `u` from unitarity, measured as `max |U†U - I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let d = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(d, d))
}

/// Hermitian eigendecomposition with ascending eigenvalues and eigenvector
/// phases fixed so the first non-negligible component is real and positive.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, Vec<CVector>) {
    let herm = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| fix_phase(eig.eigenvectors.column(k).into_owned()))
        .collect();
    (values, vectors)
}

/// Multiply by a global phase so the first component with modulus above
/// `1e-12` is real and positive.
pub fn fix_phase(mut v: CVector) -> CVector {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = first.conj() / first.norm();
        v *= phase;
    }
    v
}

/// Apply a scalar function to the spectrum of a Hermitian matrix.
pub(crate) fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let d = m.nrows();
    let mut out = CMatrix::zeros(d, d);
    for (lambda, v) in values.iter().zip(vectors.iter()) {
        out += outer(v) * c(f(*lambda), 0.0);
    }
    out
}

/// Partial trace of an operator on a tensor product of subsystems with the
/// given dimensions, keeping the listed subsystems in their original order.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let total: usize = dims.iter().product();
    assert_eq!(m.nrows(), total, "partial_trace: operator/dims mismatch");
    let k = dims.len();
    let kept: Vec<bool> = (0..k).map(|i| keep.contains(&i)).collect();
    let keep_dims: Vec<usize> = (0..k).filter(|&i| kept[i]).map(|i| dims[i]).collect();
    let out_dim: usize = keep_dims.iter().product();

    // strides for the full register (row-major, subsystem 0 most significant)
    let mut strides = vec![1usize; k];
    for i in (0..k.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let split = |idx: usize| -> Vec<usize> { (0..k).map(|i| (idx / strides[i]) % dims[i]).collect() };
    let kept_index = |digits: &[usize]| -> usize {
        let mut acc = 0;
        for i in 0..k {
            if kept[i] {
                acc = acc * dims[i] + digits[i];
            }
        }
        acc
    };

    let mut out = CMatrix::zeros(out_dim, out_dim);
    for row in 0..total {
        let rd = split(row);
        let r = kept_index(&rd);
        for col in 0..total {
            let cd = split(col);
            // traced subsystems must agree
            if (0..k).any(|i| !kept[i] && rd[i] != cd[i]) {
                continue;
            }
            out[(r, kept_index(&cd))] += m[(row, col)];
        }
    }
    out
}

/// Embed an operator acting on subsystem `target` of a tensor product.
pub fn embed(op: &CMatrix, dims: &[usize], target: usize) -> CMatrix {
    let factors: Vec<CMatrix> = dims
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if i == target {
                op.clone()
            } else {
                CMatrix::identity(d, d)
            }
        })
        .collect();
    kron_all(factors.iter())
}

/// `Tr[A B]` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let d = a.nrows();
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}
