//! Faithfulness bounds, the de Finetti error term, unitary arc lengths, the
//! LOCC₁ distance optimiser and numerical checks of the supporting
//! inequalities.

mod arc;
mod inequality;
mod locc;
mod suites;

pub use arc::{acin_min_fidelity, delta_arc, eigenphases, two_way_sine_term};
pub use inequality::{
    definetti_bound, definetti_inequality_check, estimation_tampering_check, fit_product_mixture,
    gentle_measurement_check, is_permutation_invariant, pauli_dictionary, uniform_continuity_bound,
    uniform_continuity_check, DeFinettiReport, InequalityReport, TamperingReport, INEQUALITY_TOL,
};
pub use locc::{locc1_lower_bound, Locc1Options, Locc1Result};
pub use suites::{run_all_suites, run_suite, Suite, SuiteOptions, SuiteReport};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{DqsError, Result};
use crate::protocol::{Direction, Variant};
use crate::quantum::encoding_unitary;

/// Below this `|sin 2nφ|` the bias and variance bounds are reported as
/// unbounded.
pub const SIN_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackMode {
    OneWayGc,
    OneWayIndividual,
    TwoWayGc,
}

impl AttackMode {
    pub const ALL: [AttackMode; 3] = [AttackMode::OneWayGc, AttackMode::OneWayIndividual, AttackMode::TwoWayGc];

    pub fn direction(self) -> Direction {
        match self {
            AttackMode::TwoWayGc => Direction::TwoWay,
            _ => Direction::OneWay,
        }
    }
}

impl fmt::Display for AttackMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackMode::OneWayGc => "one_way_gc",
            AttackMode::OneWayIndividual => "one_way_individual",
            AttackMode::TwoWayGc => "two_way_gc",
        })
    }
}

impl FromStr for AttackMode {
    type Err = DqsError;

    fn from_str(s: &str) -> Result<Self> {
        AttackMode::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| DqsError::InvalidModeCombination(format!("unknown attack mode `{s}`")))
    }
}

/// The de Finetti error term `f(T, N_d, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeFinettiTerm {
    Value(f64),
    /// `N_d = 0`: the term is undefined and only the individual-attack bounds
    /// (which take it as zero) apply.
    NotApplicable,
}

impl DeFinettiTerm {
    pub fn value(self) -> Option<f64> {
        match self {
            DeFinettiTerm::Value(v) => Some(v),
            DeFinettiTerm::NotApplicable => None,
        }
    }
}

/// `f(T, N_d, n) = (T − N_d − 1) √(n / (2 N_d))`
pub fn f_definetti(rounds: u64, discarded: u64, n: usize) -> Result<DeFinettiTerm> {
    if rounds == 0 {
        return Err(DqsError::Domain("T must be at least 1".into()));
    }
    if discarded >= rounds {
        return Err(DqsError::Domain(format!("N_d = {discarded} must be smaller than T = {rounds}")));
    }
    if discarded == 0 {
        return Ok(DeFinettiTerm::NotApplicable);
    }
    let kept = (rounds - discarded - 1) as f64;
    Ok(DeFinettiTerm::Value(kept * (n as f64 / (2.0 * discarded as f64)).sqrt()))
}

/// Everything the faithfulness bounds depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundParams {
    pub mode: AttackMode,
    pub variant: Variant,
    /// ε for the entanglement variant, ε̄ for the MUB variant.
    pub threshold: f64,
    pub rounds: u64,
    pub discarded: u64,
    pub estimation_rounds: u64,
    pub n: usize,
    pub phi: f64,
}

/// Multiplier of `f` under the square root: 2 for two-way MUB bounds, 4
/// everywhere else.
pub fn f_coefficient(mode: AttackMode, variant: Variant) -> f64 {
    match (mode, variant) {
        (AttackMode::TwoWayGc, Variant::Mub) => 2.0,
        _ => 4.0,
    }
}

/// Squared threshold as it enters ε₀: `⅔ε²` (entanglement) or `ε̄²` (MUB).
fn scaled_threshold_sq(variant: Variant, threshold: f64) -> f64 {
    match variant {
        Variant::Entanglement => 2.0 / 3.0 * threshold * threshold,
        Variant::Mub => threshold * threshold,
    }
}

/// ε₀ for the requested attack mode and protocol variant.
pub fn epsilon0(p: &BoundParams) -> Result<f64> {
    if !(p.threshold >= 0.0 && p.threshold.is_finite()) {
        return Err(DqsError::Domain(format!("threshold must be finite and non-negative, got {}", p.threshold)));
    }
    if p.n == 0 {
        return Err(DqsError::Domain("n must be at least 1".into()));
    }
    let base = scaled_threshold_sq(p.variant, p.threshold);
    match p.mode {
        AttackMode::OneWayIndividual => Ok(base.sqrt()),
        AttackMode::OneWayGc | AttackMode::TwoWayGc => {
            let f = match f_definetti(p.rounds, p.discarded, p.n)? {
                DeFinettiTerm::Value(f) => f,
                DeFinettiTerm::NotApplicable => {
                    return Err(DqsError::InvalidModeCombination(format!(
                        "{} bounds need discarded rounds (N_d > 0)",
                        p.mode
                    )))
                }
            };
            let root = (base + f_coefficient(p.mode, p.variant) * f).sqrt();
            if p.mode == AttackMode::TwoWayGc {
                Ok(root + two_way_sine_term(&encoding_unitary(p.n, p.phi))?)
            } else {
                Ok(root)
            }
        }
    }
}

fn sin_2n_phi(n: usize, phi: f64) -> Option<f64> {
    let s = (2.0 * n as f64 * phi).sin().abs();
    (s > SIN_ZERO_TOL).then_some(s)
}

/// `ε₀ / (n |sin 2nφ|)`, or `+∞` where the sine vanishes.
pub fn bias_bound(epsilon0: f64, n: usize, phi: f64) -> f64 {
    match sin_2n_phi(n, phi) {
        Some(s) => epsilon0 / (n as f64 * s),
        None => f64::INFINITY,
    }
}

/// Variance bound; the individual-attack form divides the linear term by
/// `N_e`.
pub fn variance_bound(epsilon0: f64, n: usize, phi: f64, mode: AttackMode, estimation_rounds: u64) -> Result<f64> {
    let numerator = match mode {
        AttackMode::OneWayIndividual => {
            if estimation_rounds == 0 {
                return Err(DqsError::InsufficientRounds {
                    kind: "estimation",
                    detail: "individual-attack variance bound needs N_e ≥ 1".into(),
                });
            }
            2.0 * epsilon0 / estimation_rounds as f64 + epsilon0 * epsilon0
        }
        AttackMode::OneWayGc | AttackMode::TwoWayGc => 2.0 * epsilon0 + epsilon0 * epsilon0,
    };
    Ok(match sin_2n_phi(n, phi) {
        Some(s) => numerator / ((n * n) as f64 * s * s),
        None => f64::INFINITY,
    })
}

fn serialize_bound<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

/// Evaluated theoretical quantities for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub mode: AttackMode,
    pub variant: Variant,
    /// `None` when `N_d = 0` (not applicable).
    pub f_value: Option<f64>,
    pub epsilon0: f64,
    #[serde(serialize_with = "serialize_bound")]
    pub bias_bound: f64,
    #[serde(serialize_with = "serialize_bound")]
    pub variance_bound: f64,
    pub phi: f64,
    pub n: usize,
    pub rounds: u64,
    pub discarded: u64,
    pub estimation_rounds: u64,
}

pub fn bound_report(p: &BoundParams) -> Result<BoundReport> {
    let eps0 = epsilon0(p)?;
    let f_value = match p.mode {
        AttackMode::OneWayIndividual => None,
        _ => f_definetti(p.rounds, p.discarded, p.n)?.value(),
    };
    Ok(BoundReport {
        mode: p.mode,
        variant: p.variant,
        f_value,
        epsilon0: eps0,
        bias_bound: bias_bound(eps0, p.n, p.phi),
        variance_bound: variance_bound(eps0, p.n, p.phi, p.mode, p.estimation_rounds)?,
        phi: p.phi,
        n: p.n,
        rounds: p.rounds,
        discarded: p.discarded,
        estimation_rounds: p.estimation_rounds,
    })
}

/// `ε = √(1 − F̂)`, clamped to `[0, 1]`.
pub fn epsilon_from_fidelity(fidelity: f64) -> f64 {
    (1.0 - fidelity).clamp(0.0, 1.0).sqrt()
}

/// ε̄ equivalent to an entanglement-variant threshold: `ε̄² = ⅔ ε²`.
pub fn mub_threshold_from_entanglement(epsilon: f64) -> f64 {
    (2.0f64 / 3.0).sqrt() * epsilon
}
