//! Numerical checks of the gentle-measurement, uniform-continuity,
//! estimation-tampering and de Finetti inequalities.

use serde::Serialize;

use super::locc::{locc1_lower_bound, Locc1Options, Locc1Result};
use crate::error::{DqsError, Result};
use crate::quantum::{
    c, hermitian_eigen, kron_all, max_abs_diff, mub_probe, partial_trace, trace_distance, trace_of_product,
    CMatrix, DensityMatrix, LogicalFrame, SignedAxis, STATE_TOL,
};

/// Slack allowed on the right-hand side of every check.
pub const INEQUALITY_TOL: f64 = 1e-9;

/// An inequality of the form `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, holds: lhs <= rhs + INEQUALITY_TOL }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

fn same_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(DqsError::DimensionMismatch { expected: a, actual: b });
    }
    Ok(())
}

fn check_effect(e: &CMatrix) -> Result<()> {
    if !e.is_square() || max_abs_diff(e, &e.adjoint()) > STATE_TOL {
        return Err(DqsError::Domain("measurement operator must be Hermitian".into()));
    }
    let (values, _) = hermitian_eigen(e);
    if values.iter().any(|&l| !(-STATE_TOL..=1.0 + STATE_TOL).contains(&l)) {
        return Err(DqsError::Domain("measurement operator must satisfy 0 ≤ E ≤ 1".into()));
    }
    Ok(())
}

/// `Tr[Eτ] − Tr[Eσ] ≤ 2D(τ, σ)`, with the trace distance standing in for
/// the LOCC₁ distance it dominates.
pub fn gentle_measurement_check(e: &CMatrix, tau: &DensityMatrix, sigma: &DensityMatrix) -> Result<InequalityReport> {
    check_effect(e)?;
    same_dims(e.nrows(), tau.dim())?;
    let d = trace_distance(tau, sigma)?;
    let lhs = trace_of_product(e, tau.matrix()).re - trace_of_product(e, sigma.matrix()).re;
    Ok(InequalityReport::new(lhs, 2.0 * d))
}

/// `2aK · distance`
pub fn uniform_continuity_bound(a: f64, k: usize, distance: f64) -> Result<f64> {
    if !(a >= 0.0) || k == 0 || !(distance >= 0.0) {
        return Err(DqsError::Domain(format!("need a ≥ 0, K ≥ 1, distance ≥ 0 (got a={a}, K={k}, distance={distance})")));
    }
    Ok(2.0 * a * k as f64 * distance)
}

fn operator_norm(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.iter().fold(0.0, |acc, l| acc.max(l.abs()))
}

/// `|Tr[A(σ − σ′)]| ≤ 2aK·D(σ, σ′)` for `A = Σ_k ⊗_j A_{j,k}`, each term
/// given as its list of local Hermitian factors.
pub fn uniform_continuity_check(
    terms: &[Vec<CMatrix>],
    sigma: &DensityMatrix,
    sigma_prime: &DensityMatrix,
) -> Result<InequalityReport> {
    if terms.is_empty() {
        return Err(DqsError::Domain("observable needs at least one product term".into()));
    }
    let mut a_total = CMatrix::zeros(sigma.dim(), sigma.dim());
    let mut a_bound: f64 = 0.0;
    for term in terms {
        let product = kron_all(term.iter());
        same_dims(sigma.dim(), product.nrows())?;
        a_bound = a_bound.max(term.iter().map(operator_norm).product());
        a_total += product;
    }
    let diff = sigma.matrix() - sigma_prime.matrix();
    let lhs = trace_of_product(&a_total, &diff).re.abs();
    let rhs = uniform_continuity_bound(a_bound, terms.len(), trace_distance(sigma, sigma_prime)?)?;
    Ok(InequalityReport::new(lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TamperingReport {
    pub bias: InequalityReport,
    pub variance: InequalityReport,
}

/// Mean and variance deviations of the `m`-party average `Ō` of a local
/// observable `o`, bounded by `2‖O‖ε` and `4‖O‖²(2ε + ε²)` with
/// `ε = D(σ, σ′)`.
pub fn estimation_tampering_check(o: &CMatrix, m: usize, sigma: &DensityMatrix, sigma_prime: &DensityMatrix) -> Result<TamperingReport> {
    if m == 0 {
        return Err(DqsError::Domain("need at least one party".into()));
    }
    let d = o.nrows();
    let total = d.pow(m as u32);
    same_dims(total, sigma.dim())?;
    same_dims(total, sigma_prime.dim())?;
    let id = CMatrix::identity(d, d);
    let mut avg = CMatrix::zeros(total, total);
    for j in 0..m {
        let factors: Vec<&CMatrix> = (0..m).map(|k| if k == j { o } else { &id }).collect();
        avg += kron_all(factors);
    }
    avg /= c(m as f64, 0.0);

    let mean = |s: &DensityMatrix| trace_of_product(&avg, s.matrix()).re;
    let (m_ideal, m_tampered) = (mean(sigma), mean(sigma_prime));
    let centred = &avg - CMatrix::identity(total, total) * c(m_ideal, 0.0);
    let centred_sq = &centred * &centred;
    let var_ideal = trace_of_product(&centred_sq, sigma.matrix()).re;
    let var_cross = trace_of_product(&centred_sq, sigma_prime.matrix()).re;

    let eps = trace_distance(sigma, sigma_prime)?;
    let o_norm = operator_norm(o);
    Ok(TamperingReport {
        bias: InequalityReport::new((m_ideal - m_tampered).abs(), 2.0 * o_norm * eps),
        variance: InequalityReport::new((var_ideal - var_cross).abs(), 4.0 * o_norm * o_norm * (2.0 * eps + eps * eps)),
    })
}

/// `(k − 1) √(log₂ d / (2(m − k)))`; zero for `k = 1`, unbounded for
/// `k = m > 1`.
pub fn definetti_bound(m: usize, k: usize, d: usize) -> Result<f64> {
    if k == 0 || k > m || d < 2 {
        return Err(DqsError::Domain(format!("need 1 ≤ k ≤ m and d ≥ 2 (got m={m}, k={k}, d={d})")));
    }
    if k == 1 {
        return Ok(0.0);
    }
    if k == m {
        return Ok(f64::INFINITY);
    }
    Ok((k - 1) as f64 * ((d as f64).log2() / (2.0 * (m - k) as f64)).sqrt())
}

fn permutation_matrix(d: usize, m: usize, swap: usize) -> CMatrix {
    let total = d.pow(m as u32);
    let mut p = CMatrix::zeros(total, total);
    for idx in 0..total {
        let mut digits: Vec<usize> = (0..m).map(|j| (idx / d.pow((m - 1 - j) as u32)) % d).collect();
        digits.swap(swap, swap + 1);
        let target = digits.iter().fold(0, |acc, &x| acc * d + x);
        p[(target, idx)] = c(1.0, 0.0);
    }
    p
}

/// Invariance under every adjacent transposition of the `m` parties.
pub fn is_permutation_invariant(sigma: &DensityMatrix, m: usize, d: usize) -> bool {
    if sigma.dim() != d.pow(m as u32) {
        return false;
    }
    (0..m.saturating_sub(1)).all(|j| {
        let p = permutation_matrix(d, m, j);
        max_abs_diff(&(&p * sigma.matrix() * p.adjoint()), sigma.matrix()) < STATE_TOL
    })
}

/// The six single-qubit Pauli eigenstates.
pub fn pauli_dictionary() -> Vec<DensityMatrix> {
    let frame = LogicalFrame::computational(1);
    SignedAxis::ALL.iter().map(|&l| mub_probe(&frame, l).to_density()).collect()
}

fn tensor_power(rho: &DensityMatrix, k: usize) -> CMatrix {
    kron_all(std::iter::repeat_n(rho.matrix(), k))
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            shift = t;
        }
    }
    v.iter().map(|x| (x - shift).max(0.0)).collect()
}

/// Least-squares mixture `Σ w_i ρ_i^{⊗k}` over a fixed dictionary (weights
/// on the simplex, Frobenius distance to `target`), by projected gradient.
/// Weights below `1e-12` are dropped from the result.
pub fn fit_product_mixture(target: &DensityMatrix, k: usize, dictionary: &[DensityMatrix]) -> Result<Vec<(f64, DensityMatrix)>> {
    if dictionary.is_empty() || k == 0 {
        return Err(DqsError::Domain("mixture fit needs a non-empty dictionary and k ≥ 1".into()));
    }
    let atoms: Vec<CMatrix> = dictionary.iter().map(|r| tensor_power(r, k)).collect();
    same_dims(target.dim(), atoms[0].nrows())?;
    let n = atoms.len();
    let gram: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| trace_of_product(&atoms[i], &atoms[j]).re).collect()).collect();
    let rhs: Vec<f64> = atoms.iter().map(|a| trace_of_product(a, target.matrix()).re).collect();
    let lipschitz = gram.iter().map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 1.0 / lipschitz.max(1e-12);
    let mut w = vec![1.0 / n as f64; n];
    for _ in 0..20_000 {
        let grad: Vec<f64> = (0..n).map(|i| (0..n).map(|j| gram[i][j] * w[j]).sum::<f64>() - rhs[i]).collect();
        let next = project_simplex(&w.iter().zip(&grad).map(|(x, g)| x - step * g).collect::<Vec<_>>());
        let moved = next.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        w = next;
        if moved < 1e-15 {
            break;
        }
    }
    // Gradient steps approach the simplex faces only geometrically; snap
    // negligible weights to zero and renormalise.
    w.iter_mut().filter(|x| **x < 1e-12).for_each(|x| *x = 0.0);
    let total: f64 = w.iter().sum();
    Ok(w.into_iter()
        .zip(dictionary.iter().cloned())
        .filter(|(weight, _)| *weight > 0.0)
        .map(|(weight, rho)| (weight / total, rho))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeFinettiReport {
    pub inequality: InequalityReport,
    pub locc1: Locc1Result,
}

/// Compares the `k`-party marginal of a permutation-invariant `m`-party state
/// with `Σ w ρ^{⊗k}`: the LOCC₁ lower-bound estimate between them must not
/// exceed `(k − 1)√(log₂ d / (2(m − k)))`.
pub fn definetti_inequality_check(
    sigma: &DensityMatrix,
    m: usize,
    k: usize,
    d: usize,
    mixture: &[(f64, DensityMatrix)],
    opts: &Locc1Options,
) -> Result<DeFinettiReport> {
    if m > 4 || d > 4 || k > super::locc::MAX_PARTIES {
        return Err(DqsError::DimensionLimit(format!("de Finetti check supports m ≤ 4, d ≤ 4, k ≤ 3 (got m={m}, d={d}, k={k})")));
    }
    let bound = definetti_bound(m, k, d)?;
    same_dims(d.pow(m as u32), sigma.dim())?;
    if !is_permutation_invariant(sigma, m, d) {
        return Err(DqsError::InvalidState("state is not permutation invariant".into()));
    }
    if mixture.is_empty() {
        return Err(DqsError::Domain("mixture must contain at least one product state".into()));
    }
    let total_weight: f64 = mixture.iter().map(|(w, _)| w).sum();
    if mixture.iter().any(|(w, _)| *w < 0.0) || (total_weight - 1.0).abs() > 1e-9 {
        return Err(DqsError::Domain(format!("mixture weights must be non-negative and sum to 1 (sum {total_weight})")));
    }
    let dims = vec![d; m];
    let keep: Vec<usize> = (0..k).collect();
    let marginal = DensityMatrix::from_raw(partial_trace(sigma.matrix(), &dims, &keep));
    let mut mix = CMatrix::zeros(marginal.dim(), marginal.dim());
    for (w, rho) in mixture {
        same_dims(d, rho.dim())?;
        mix += tensor_power(rho, k) * c(*w, 0.0);
    }
    let mix = DensityMatrix::from_raw(mix);
    let locc1 = locc1_lower_bound(&marginal, &mix, &vec![d; k], opts)?;
    Ok(DeFinettiReport { inequality: InequalityReport::new(locc1.lower_bound, bound), locc1 })
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `m` qubits.
#[cfg(test)]
pub(crate) fn ghz(m: usize) -> DensityMatrix {
    use crate::quantum::{CVector, PureState};
    let dim = 1 << m;
    let mut v = CVector::zeros(dim);
    v[0] = c(1.0, 0.0);
    v[dim - 1] = c(1.0, 0.0);
    PureState::normalized(v).unwrap().to_density()
}
