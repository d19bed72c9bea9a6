//! Finite-sample estimators: coincidence-count correlators, error
//! propagation for the arccos phase estimator and batch statistics.

use serde::Serialize;

use crate::error::{DqsError, Result};

/// Pairwise (cascade) summation. The result depends only on the order of
/// `values`, never on how a caller parallelised the work that produced them.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(pairwise_sum(values) / values.len() as f64)
    }
}

/// Unbiased sample variance (denominator `len - 1`).
pub fn sample_variance(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    let dev: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
    Some(pairwise_sum(&dev) / (values.len() - 1) as f64)
}

/// Coincidence counts `N[i][j]`; index 0 is the +1 outcome, 1 the −1 outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CountsTable {
    pub counts: [[u64; 2]; 2],
}

impl CountsTable {
    pub fn new(counts: [[u64; 2]; 2]) -> Self {
        Self { counts }
    }

    /// Record one coincidence of two ±1 outcomes.
    pub fn record(&mut self, a: i8, b: i8) {
        let idx = |v: i8| usize::from(v < 0);
        self.counts[idx(a)][idx(b)] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// `Σ (−1)^{i+j} N_ij / Σ N_ij`
    pub fn correlator(&self) -> Result<f64> {
        let total = self.total();
        if total == 0 {
            return Err(DqsError::InsufficientRounds {
                kind: "coincidence",
                detail: "correlator of an empty counts table".into(),
            });
        }
        let [[n00, n01], [n10, n11]] = self.counts;
        let signed = (n00 + n11) as f64 - (n01 + n10) as f64;
        Ok(signed / total as f64)
    }
}

/// Error propagation for the two-correlator estimator
/// `φ̂ = ½ arccos(s/2)`, `s = ⟨Z⊗X⟩ + ⟨X⊗Z⟩`:
/// `Δ²φ̂ = (Δ²₁ + Δ²₂) / (4 (4 − s̄²))`.
///
/// Returns `+∞` when `|s̄| = 2` exactly, where the derivative diverges.
pub fn phase_variance(correlator_variances: (f64, f64), mean_sum: f64) -> Result<f64> {
    let (v1, v2) = correlator_variances;
    if v1 < 0.0 || v2 < 0.0 || !v1.is_finite() || !v2.is_finite() {
        return Err(DqsError::Domain(format!("correlator variances must be finite and non-negative, got ({v1}, {v2})")));
    }
    if !(mean_sum.abs() <= 2.0) {
        return Err(DqsError::Domain(format!("|mean correlator sum| = {} exceeds 2", mean_sum.abs())));
    }
    let denom = 4.0 * (4.0 - mean_sum * mean_sum);
    if denom == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((v1 + v2) / denom)
}

/// Variance of `arccos(m̂)/(2n)` for a mean `m̂` of `samples` pooled ±1
/// outcomes with per-sample variance `sample_var`.
///
/// Near `|m| = 1` the first-order propagation degenerates to 0/0; for ±1 data
/// `sample_var = 1 − m²` and the ratio tends to `1/(4n²N)`, which is used
/// there.
pub fn pooled_phase_variance(mean: f64, sample_var: f64, samples: usize, n: usize) -> Result<f64> {
    if samples == 0 || n == 0 {
        return Err(DqsError::Domain("phase variance needs at least one sample and one qubit".into()));
    }
    let m = mean.clamp(-1.0, 1.0);
    let slope = 1.0 - m * m;
    let scale = 4.0 * (n * n) as f64 * samples as f64;
    if slope < 1e-12 {
        return Ok(1.0 / scale);
    }
    Ok(sample_var.max(0.0) / (scale * slope))
}

/// Which spread is reported as the correlator variance Δ² when windows are
/// available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceConvention {
    /// Spread of the per-window values across windows.
    #[default]
    AcrossWindow,
    /// Mean of the within-window sampling variances.
    PerWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchStatistics {
    pub batches: usize,
    pub batch_size: usize,
    /// Values left over when `batches` does not divide the sample.
    pub dropped: usize,
    pub batch_means: Vec<f64>,
    pub mean: f64,
    /// Sample variance of the batch means (denominator `batches − 1`).
    pub batch_variance: f64,
    /// `batch_variance / batches`
    pub variance_of_mean: f64,
}

/// Split `values` into `batches` equal consecutive windows (the remainder is
/// dropped and reported) and summarise the per-window means.
pub fn batch_statistics(values: &[f64], batches: usize) -> Result<BatchStatistics> {
    if batches == 0 {
        return Err(DqsError::Domain("batch count must be positive".into()));
    }
    if values.len() < batches {
        return Err(DqsError::InsufficientRounds {
            kind: "batch",
            detail: format!("{} values cannot fill {batches} batches", values.len()),
        });
    }
    let batch_size = values.len() / batches;
    let used = batch_size * batches;
    let batch_means: Vec<f64> = values[..used]
        .chunks_exact(batch_size)
        .map(|chunk| pairwise_sum(chunk) / batch_size as f64)
        .collect();
    let mean = pairwise_sum(&batch_means) / batches as f64;
    let batch_variance = sample_variance(&batch_means).unwrap_or(0.0);
    Ok(BatchStatistics {
        batches,
        batch_size,
        dropped: values.len() - used,
        batch_means,
        mean,
        batch_variance,
        variance_of_mean: batch_variance / batches as f64,
    })
}

/// One row of a bias/variance sweep, before report formatting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    /// Swept attack parameter, or `φ/2` for phase sweeps.
    pub theta: f64,
    pub phi: f64,
    pub phi_hat_mean: f64,
    pub phi_hat_var: f64,
    /// `E φ̂′ − E φ̂` against the ideal twin run.
    pub bias_vs_ideal: f64,
    /// `|Δ²φ̂′ − Δ²φ̂|` against the ideal twin run.
    pub var_discrepancy: f64,
    pub bound_bias: f64,
    pub bound_var: f64,
}
