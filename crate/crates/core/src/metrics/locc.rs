//! Lower bounds on the LOCC₁ distance by direct search over sequential
//! adaptive local projective measurements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{DqsError, Result};
use crate::quantum::{c, CMatrix, CVector, DensityMatrix, ONE};

pub const MAX_PARTIES: usize = 3;
pub const MAX_PARTY_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Locc1Options {
    pub restarts: usize,
    /// Pattern-search step size at which a restart is declared converged.
    pub tolerance: f64,
    /// Hard cap on full coordinate sweeps per restart.
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for Locc1Options {
    fn default() -> Self {
        Self { restarts: 32, tolerance: 1e-7, max_sweeps: 20_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Locc1Result {
    pub lower_bound: f64,
    pub best_measurement_parameters: Vec<f64>,
    pub restarts_used: usize,
    /// Whether the best restart reached the step tolerance.
    pub converged: bool,
}

/// Layout of the adaptive measurement tree: party `j` holds one basis per
/// outcome string of parties `0..j`.
struct Tree {
    dims: Vec<usize>,
    /// First basis index of each party.
    basis_offset: Vec<usize>,
    /// Parameter offset of each basis.
    param_offset: Vec<usize>,
    param_count: usize,
}

fn params_per_basis(d: usize) -> usize {
    if d == 2 {
        2
    } else {
        2 * d * d
    }
}

impl Tree {
    fn new(dims: &[usize]) -> Self {
        let mut basis_offset = Vec::with_capacity(dims.len());
        let mut param_offset = Vec::new();
        let mut bases = 0;
        let mut params = 0;
        let mut prefixes = 1;
        for &d in dims {
            basis_offset.push(bases);
            for _ in 0..prefixes {
                param_offset.push(params);
                params += params_per_basis(d);
            }
            bases += prefixes;
            prefixes *= d;
        }
        Self { dims: dims.to_vec(), basis_offset, param_offset, param_count: params }
    }

    fn basis(&self, party: usize, prefix: usize, params: &[f64]) -> Vec<CVector> {
        let d = self.dims[party];
        let start = self.param_offset[self.basis_offset[party] + prefix];
        basis_from_params(d, &params[start..start + params_per_basis(d)])
    }
}

/// Orthonormal basis of `C^d`: Bloch angles for `d = 2`, the unitary factor
/// of a free complex `d × d` matrix otherwise.
fn basis_from_params(d: usize, p: &[f64]) -> Vec<CVector> {
    if d == 2 {
        let (theta, phase) = (p[0], p[1]);
        let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let e = num_complex::Complex64::from_polar(1.0, phase);
        return vec![
            CVector::from_vec(vec![c(cos, 0.0), e * sin]),
            CVector::from_vec(vec![-e.conj() * sin, c(cos, 0.0)]),
        ];
    }
    // Householder QR keeps the columns orthonormal to machine precision even
    // for nearly dependent parameter vectors.
    let q = CMatrix::from_fn(d, d, |i, k| c(p[2 * (k * d + i)], p[2 * (k * d + i) + 1])).qr().q();
    (0..d).map(|k| q.column(k).into_owned()).collect()
}

/// `½ Σ_outcomes |⟨ψ|Δ|ψ⟩|` for the product vectors selected by the tree.
fn objective(tree: &Tree, delta: &CMatrix, params: &[f64]) -> f64 {
    fn walk(tree: &Tree, delta: &CMatrix, params: &[f64], party: usize, prefix: usize, psi: &CVector) -> f64 {
        if party == tree.dims.len() {
            return (psi.dotc(&(delta * psi))).re.abs();
        }
        let d = tree.dims[party];
        tree.basis(party, prefix, params)
            .iter()
            .enumerate()
            .map(|(k, v)| walk(tree, delta, params, party + 1, prefix * d + k, &psi.kronecker(v)))
            .sum()
    }
    0.5 * walk(tree, delta, params, 0, 0, &CVector::from_element(1, ONE))
}

struct Restart {
    value: f64,
    params: Vec<f64>,
    converged: bool,
}

fn pattern_search(tree: &Tree, delta: &CMatrix, mut params: Vec<f64>, opts: &Locc1Options) -> Restart {
    let mut value = objective(tree, delta, &params);
    let mut step = 0.5;
    let mut sweeps = 0;
    while step >= opts.tolerance && sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut improved = false;
        for i in 0..params.len() {
            for dir in [1.0, -1.0] {
                let old = params[i];
                params[i] = old + dir * step;
                let trial = objective(tree, delta, &params);
                if trial > value {
                    value = trial;
                    improved = true;
                    break;
                }
                params[i] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Restart { value, params, converged: step < opts.tolerance }
}

fn validate(rho: &DensityMatrix, sigma: &DensityMatrix, parties: &[usize]) -> Result<()> {
    if parties.is_empty() || parties.len() > MAX_PARTIES {
        return Err(DqsError::DimensionLimit(format!("LOCC₁ search supports 1..={MAX_PARTIES} parties, got {}", parties.len())));
    }
    if let Some(&d) = parties.iter().find(|&&d| !(2..=MAX_PARTY_DIM).contains(&d)) {
        return Err(DqsError::DimensionLimit(format!("party dimension {d} outside 2..={MAX_PARTY_DIM}")));
    }
    let total: usize = parties.iter().product();
    for s in [rho, sigma] {
        if s.dim() != total {
            return Err(DqsError::DimensionMismatch { expected: total, actual: s.dim() });
        }
    }
    Ok(())
}

/// Best distinguishing advantage found over sequential adaptive local
/// projective measurements on `parties` (subsystem dimensions, first party
/// measured first). Every returned value is achieved by an explicit LOCC₁
/// channel, so it is a lower bound on the LOCC₁ distance.
///
/// Restarts run in parallel with per-restart seeded streams; the best value
/// wins, ties going to the lower restart index.
pub fn locc1_lower_bound(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    parties: &[usize],
    opts: &Locc1Options,
) -> Result<Locc1Result> {
    validate(rho, sigma, parties)?;
    let restarts = opts.restarts.max(1);
    let tree = Tree::new(parties);
    let delta = rho.matrix() - sigma.matrix();
    let runs: Vec<Restart> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            let start: Vec<f64> = (0..tree.param_count).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
            pattern_search(&tree, &delta, start, opts)
        })
        .collect();
    let best = runs
        .into_iter()
        .reduce(|best, next| if next.value > best.value { next } else { best })
        .expect("at least one restart");
    Ok(Locc1Result {
        lower_bound: best.value.clamp(0.0, 1.0),
        best_measurement_parameters: best.params,
        restarts_used: restarts,
        converged: best.converged,
    })
}
