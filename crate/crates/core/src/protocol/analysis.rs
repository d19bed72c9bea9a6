use serde::Serialize;

use super::transcript::{RoundRecord, SiftStatus, Transcript};
use super::Variant;
use crate::error::{DqsError, Result};
use crate::quantum::{Axis, SignedAxis};
use crate::stats::{batch_statistics, mean, pooled_phase_variance, sample_variance, BatchStatistics};

/// Empirical mean of one correlator (or signed MUB expectation).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatorStat {
    pub label: String,
    pub mean: f64,
    pub samples: u64,
    /// Rounds whose probe outcome fell outside the logical subspace.
    pub leaks: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    /// `F̂` (entanglement variant) or `min_P F̂_P` (MUB variant).
    pub fidelity: f64,
    /// `F̂_P` for each probe label (MUB variant only).
    pub fidelity_by_label: Vec<(String, f64)>,
    pub correlators: Vec<CorrelatorStat>,
    /// Smallest fidelity that passes.
    pub threshold: f64,
    pub passed: bool,
    /// `√(1 − F̂)` clamped to `[0, 1]`.
    pub epsilon_implied: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateResult {
    /// `arccos(m̄)/(2n)` for the pooled mean `m̄`, in `[0, π/(2n)]`.
    pub phi_hat: f64,
    pub pooled_mean: f64,
    pub correlators: Vec<CorrelatorStat>,
    pub samples: u64,
    pub leaks: u64,
    pub standard_error: f64,
    pub variance: f64,
}

/// Check and estimate of one transcript. When the check fails the run is
/// marked aborted and the estimate is still reported, flagged untrusted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub check: CheckResult,
    pub estimate: EstimateResult,
    pub aborted: bool,
}

/// Per-round ±1 product accumulated for one correlator.
#[derive(Default)]
struct Accumulator {
    values: Vec<f64>,
    leaks: u64,
}

impl Accumulator {
    fn push(&mut self, value: Option<f64>) {
        match value {
            Some(v) => self.values.push(v),
            None => self.leaks += 1,
        }
    }

    fn stat(&self, label: String, kind: &'static str) -> Result<CorrelatorStat> {
        let m = mean(&self.values).ok_or_else(|| DqsError::InsufficientRounds {
            kind,
            detail: format!("no usable rounds for {label}"),
        })?;
        Ok(CorrelatorStat { label, mean: m, samples: self.values.len() as u64, leaks: self.leaks })
    }
}

/// `a·b` for the entanglement variant, `sign(P)·b` for the MUB variant;
/// `None` for a leak.
fn round_value(r: &RoundRecord) -> Option<f64> {
    let bob = r.bob?;
    if bob.is_leak() {
        return None;
    }
    let b = f64::from(bob.outcome);
    match (r.alice, r.probe_label) {
        (Some(a), _) => Some(f64::from(a.outcome) * b),
        (None, Some(label)) => Some(label.sign() * b),
        (None, None) => None,
    }
}

const ENT_CHECK: [(Axis, Axis); 3] = [(Axis::X, Axis::Z), (Axis::Z, Axis::X), (Axis::Y, Axis::Y)];
const ENT_ESTIMATE: [(Axis, Axis); 2] = [(Axis::X, Axis::Z), (Axis::Z, Axis::X)];

fn ent_correlators(t: &Transcript, status: SiftStatus, pairs: &[(Axis, Axis)], kind: &'static str) -> Result<Vec<CorrelatorStat>> {
    let mut acc: Vec<Accumulator> = pairs.iter().map(|_| Accumulator::default()).collect();
    for r in t.kept(status) {
        let (Some(a), Some(b)) = (r.alice, r.bob) else { continue };
        if let Some(k) = pairs.iter().position(|&p| p == (a.axis, b.axis)) {
            acc[k].push(round_value(r));
        }
    }
    pairs.iter().zip(&acc).map(|(&(a, b), acc)| acc.stat(format!("{a}{b}"), kind)).collect()
}

fn mub_correlators(t: &Transcript, status: SiftStatus, labels: &[SignedAxis], kind: &'static str) -> Result<Vec<CorrelatorStat>> {
    let mut acc: Vec<Accumulator> = labels.iter().map(|_| Accumulator::default()).collect();
    for r in t.kept(status) {
        if let Some(k) = r.probe_label.and_then(|l| labels.iter().position(|&x| x == l)) {
            acc[k].push(round_value(r));
        }
    }
    labels.iter().zip(&acc).map(|(l, acc)| acc.stat(l.to_string(), kind)).collect()
}

/// `√(1 − F)` clamped to `[0, 1]`.
pub fn epsilon_from_fidelity_estimate(f: f64) -> f64 {
    (1.0 - f).clamp(0.0, 1.0).sqrt()
}

/// Fidelity check on the kept check rounds.
pub fn check_fidelity(t: &Transcript) -> Result<CheckResult> {
    let eps = t.config.epsilon;
    let threshold = 1.0 - eps * eps;
    let (fidelity, fidelity_by_label, correlators) = match t.config.variant {
        Variant::Entanglement => {
            let cs = ent_correlators(t, SiftStatus::KeptCheck, &ENT_CHECK, "check")?;
            let f = (1.0 + cs.iter().map(|c| c.mean).sum::<f64>()) / 4.0;
            (f, Vec::new(), cs)
        }
        Variant::Mub => {
            let cs = mub_correlators(t, SiftStatus::KeptCheck, &SignedAxis::ALL, "check")?;
            let by_label: Vec<(String, f64)> = cs.iter().map(|c| (c.label.clone(), (c.mean + 1.0) / 2.0)).collect();
            let min = by_label.iter().map(|(_, f)| *f).fold(f64::INFINITY, f64::min);
            (min, by_label, cs)
        }
    };
    Ok(CheckResult {
        fidelity,
        fidelity_by_label,
        correlators,
        threshold,
        passed: fidelity >= threshold,
        epsilon_implied: epsilon_from_fidelity_estimate(fidelity),
    })
}

/// Values entering the phase estimate, in round order: `a·b` on the kept
/// `X⊗Z̄` and `Z⊗X̄` rounds, or the sign-corrected outcome on the kept `±X̄`,
/// `±Z̄` rounds. Leaks are skipped.
pub fn estimation_values(t: &Transcript) -> Vec<f64> {
    t.kept(SiftStatus::KeptEstimation).filter_map(round_value).collect()
}

fn phi_from_mean(m: f64, n: usize) -> f64 {
    m.clamp(-1.0, 1.0).acos() / (2.0 * n as f64)
}

/// Phase estimate from the kept estimation rounds, pooling every ±1 value.
pub fn estimate_phase(t: &Transcript) -> Result<EstimateResult> {
    let n = t.config.n;
    let correlators = match t.config.variant {
        Variant::Entanglement => ent_correlators(t, SiftStatus::KeptEstimation, &ENT_ESTIMATE, "estimation")?,
        Variant::Mub => {
            let labels = [Axis::X, Axis::Z].into_iter().flat_map(|a| [SignedAxis::plus(a), SignedAxis::minus(a)]);
            mub_correlators(t, SiftStatus::KeptEstimation, &labels.collect::<Vec<_>>(), "estimation")?
        }
    };
    let values = estimation_values(t);
    let pooled = mean(&values).ok_or_else(|| DqsError::InsufficientRounds {
        kind: "estimation",
        detail: "no usable estimation rounds".into(),
    })?;
    let var = sample_variance(&values).unwrap_or(0.0);
    let variance = pooled_phase_variance(pooled.clamp(-1.0, 1.0), var, values.len(), n)?;
    let leaks = correlators.iter().map(|c| c.leaks).sum();
    Ok(EstimateResult {
        phi_hat: phi_from_mean(pooled, n),
        pooled_mean: pooled,
        correlators,
        samples: values.len() as u64,
        leaks,
        standard_error: variance.sqrt(),
        variance,
    })
}

pub fn evaluate(t: &Transcript) -> Result<Evaluation> {
    let check = check_fidelity(t)?;
    let estimate = estimate_phase(t)?;
    Ok(Evaluation { aborted: !check.passed, check, estimate })
}

/// Phase estimates over consecutive windows of the estimation values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowedEstimate {
    pub windows: usize,
    pub per_window: Vec<f64>,
    /// Mean of the per-window estimates.
    pub phi_hat_mean: f64,
    /// Spread of the per-window estimates across windows.
    pub phi_hat_variance: f64,
    pub dropped: usize,
}

/// Split the estimation values into `windows` equal consecutive windows,
/// estimate the phase in each and summarise across windows.
pub fn windowed_estimate(t: &Transcript, windows: usize) -> Result<WindowedEstimate> {
    let n = t.config.n;
    let values = estimation_values(t);
    let batches: BatchStatistics = batch_statistics(&values, windows)?;
    let per_window: Vec<f64> = batches.batch_means.iter().map(|&m| phi_from_mean(m, n)).collect();
    let phi_hat_mean = mean(&per_window).expect("at least one window");
    let phi_hat_variance = sample_variance(&per_window).unwrap_or(0.0);
    Ok(WindowedEstimate { windows, per_window, phi_hat_mean, phi_hat_variance, dropped: batches.dropped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::transcript::{BobAction, Observation};
    use crate::protocol::ProtocolConfig;

    fn rec(i: u64, action: BobAction, a: (Axis, i8), b: (Axis, i8), sift: SiftStatus) -> RoundRecord {
        RoundRecord {
            index: i,
            action,
            probe_label: None,
            alice: Some(Observation { axis: a.0, outcome: a.1 }),
            bob: Some(Observation { axis: b.0, outcome: b.1 }),
            sift,
        }
    }

    fn checks(values: [i8; 3]) -> Vec<RoundRecord> {
        ENT_CHECK
            .iter()
            .zip(values)
            .enumerate()
            .map(|(i, (&(a, b), v))| rec(i as u64, BobAction::Check, (a, 1), (b, v), SiftStatus::KeptCheck))
            .collect()
    }

    #[test]
    fn perfect_correlators_give_unit_fidelity() {
        let t = Transcript { config: ProtocolConfig::new(1, 3, 0.0, 0), records: checks([1, 1, 1]) };
        let c = check_fidelity(&t).unwrap();
        assert_eq!(c.fidelity, 1.0);
        assert!(c.passed);
        assert_eq!(c.epsilon_implied, 0.0);
    }

    #[test]
    fn zero_correlators_give_quarter() {
        let mut records = checks([1, 1, 1]);
        records.extend(checks([-1, -1, -1]).into_iter().map(|mut r| {
            r.index += 3;
            r
        }));
        let t = Transcript { config: ProtocolConfig::new(1, 6, 0.0, 0), records };
        let c = check_fidelity(&t).unwrap();
        assert!((c.fidelity - 0.25).abs() < 1e-15);
        assert!(!c.passed);
    }

    #[test]
    fn implied_epsilon_matches_operating_point() {
        assert!((epsilon_from_fidelity_estimate(0.937) - 0.251).abs() < 5e-4);
        assert_eq!(epsilon_from_fidelity_estimate(1.2), 0.0);
    }

    #[test]
    fn missing_correlator_is_reported() {
        let t = Transcript { config: ProtocolConfig::new(1, 2, 0.0, 0), records: checks([1, 1, 1])[..2].to_vec() };
        assert!(matches!(check_fidelity(&t), Err(DqsError::InsufficientRounds { kind: "check", .. })));
    }

    #[test]
    fn estimate_from_known_correlators() {
        // pooled mean 0 → φ̂ = π/4 at n = 1
        let records = vec![
            rec(0, BobAction::Encode, (Axis::X, 1), (Axis::Z, 1), SiftStatus::KeptEstimation),
            rec(1, BobAction::Encode, (Axis::Z, 1), (Axis::X, -1), SiftStatus::KeptEstimation),
            rec(2, BobAction::Encode, (Axis::Y, 1), (Axis::X, -1), SiftStatus::SiftedOut),
        ];
        let t = Transcript { config: ProtocolConfig::new(1, 3, 0.0, 0), records };
        let e = estimate_phase(&t).unwrap();
        assert!((e.phi_hat - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(e.samples, 2);
    }

    #[test]
    fn estimate_in_range_and_clamped() {
        let records = vec![
            rec(0, BobAction::Encode, (Axis::X, 1), (Axis::Z, 1), SiftStatus::KeptEstimation),
            rec(1, BobAction::Encode, (Axis::Z, -1), (Axis::X, -1), SiftStatus::KeptEstimation),
        ];
        let t = Transcript { config: ProtocolConfig::new(2, 2, 0.0, 0), records: records.clone() };
        let e = estimate_phase(&t).unwrap();
        assert_eq!(e.phi_hat, 0.0);
        let half = Transcript { config: ProtocolConfig::new(2, 1, 0.0, 0), records: records[..1].to_vec() };
        assert!(matches!(estimate_phase(&half), Err(DqsError::InsufficientRounds { kind: "estimation", .. })));
    }

    #[test]
    fn mub_signs_are_corrected() {
        let mk = |i, label: SignedAxis, out: i8, sift| RoundRecord {
            index: i,
            action: BobAction::Check,
            probe_label: Some(label),
            alice: None,
            bob: Some(Observation { axis: label.axis, outcome: out }),
            sift,
        };
        let records: Vec<RoundRecord> = SignedAxis::ALL
            .iter()
            .enumerate()
            .map(|(i, &l)| mk(i as u64, l, l.sign() as i8, SiftStatus::KeptCheck))
            .collect();
        let t = Transcript { config: ProtocolConfig::new(1, 6, 0.0, 0).with_variant(Variant::Mub), records };
        let c = check_fidelity(&t).unwrap();
        assert_eq!(c.fidelity, 1.0);
        assert_eq!(c.fidelity_by_label.len(), 6);
        assert!(c.fidelity_by_label.iter().all(|(_, f)| *f == 1.0));
    }

    #[test]
    fn leaks_are_counted_not_averaged() {
        let mut records = checks([1, 1, 1]);
        records.push(rec(3, BobAction::Check, (Axis::X, 1), (Axis::Z, 0), SiftStatus::KeptCheck));
        let t = Transcript { config: ProtocolConfig::new(2, 4, 0.0, 0), records };
        let c = check_fidelity(&t).unwrap();
        assert_eq!(c.fidelity, 1.0);
        assert_eq!(c.correlators[0].leaks, 1);
    }
}
