use serde::Serialize;

use super::analysis::{check_fidelity, estimate_phase, CorrelatorStat};
use super::engine::run;
use super::{ProtocolConfig, Variant};
use crate::adversary::Attack;
use crate::error::Result;

/// Side-by-side run of both protocol variants with the same seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub entanglement_fidelity: f64,
    pub entanglement_fidelity_se: f64,
    pub mub_fidelity_by_label: Vec<(String, f64)>,
    /// `¼(1 + ½ Σ_P (2F̂_P − 1))`
    pub predicted_fidelity: f64,
    pub predicted_fidelity_se: f64,
    /// `|F̂ − predicted| / √(SE² + SE_pred²)`
    pub z_score: f64,
    /// Whether the two agree within four standard errors.
    pub identity_holds: bool,
    pub entanglement_phi_hat: f64,
    pub mub_phi_hat: f64,
    pub epsilon: f64,
    /// `√(2/3) ε`
    pub epsilon_bar: f64,
    pub entanglement_passed: bool,
    pub mub_passed: bool,
}

impl EquivalenceReport {
    pub fn decisions_agree(&self) -> bool {
        self.entanglement_passed == self.mub_passed
    }
}

/// Variance of the mean of ±1 values with the given empirical mean.
fn mean_variance(c: &CorrelatorStat) -> f64 {
    (1.0 - c.mean * c.mean).max(0.0) / c.samples as f64
}

/// Runs the entanglement variant with threshold `config.epsilon` and the MUB
/// variant with `√(2/3)·config.epsilon`, both from `config.seed`, and
/// compares the entanglement fidelity with the one predicted from the MUB
/// label fidelities.
pub fn run_mub_equivalence(config: &ProtocolConfig, attack: &dyn Attack) -> Result<EquivalenceReport> {
    let epsilon = config.epsilon;
    let epsilon_bar = (2.0f64 / 3.0).sqrt() * epsilon;
    let ent_cfg = config.clone().with_variant(Variant::Entanglement).with_epsilon(epsilon);
    let mub_cfg = config.clone().with_variant(Variant::Mub).with_epsilon(epsilon_bar);
    let ent = run(&ent_cfg, attack)?.transcript;
    let mub = run(&mub_cfg, attack)?.transcript;

    let ent_check = check_fidelity(&ent)?;
    let mub_check = check_fidelity(&mub)?;
    let entanglement_fidelity_se = ent_check.correlators.iter().map(mean_variance).sum::<f64>().sqrt() / 4.0;
    let label_sum: f64 = mub_check.correlators.iter().map(|c| c.mean).sum();
    let predicted_fidelity = (1.0 + 0.5 * label_sum) / 4.0;
    let predicted_fidelity_se = mub_check.correlators.iter().map(mean_variance).sum::<f64>().sqrt() / 8.0;
    let sigma = entanglement_fidelity_se.hypot(predicted_fidelity_se);
    let diff = (ent_check.fidelity - predicted_fidelity).abs();
    let z_score = if sigma > 0.0 {
        diff / sigma
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };

    Ok(EquivalenceReport {
        entanglement_fidelity: ent_check.fidelity,
        entanglement_fidelity_se,
        mub_fidelity_by_label: mub_check.fidelity_by_label.clone(),
        predicted_fidelity,
        predicted_fidelity_se,
        z_score,
        identity_holds: z_score <= 4.0,
        entanglement_phi_hat: estimate_phase(&ent)?.phi_hat,
        mub_phi_hat: estimate_phase(&mub)?.phi_hat,
        epsilon,
        epsilon_bar,
        entanglement_passed: ent_check.passed,
        mub_passed: mub_check.passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::Identity;

    #[test]
    fn identity_attack_gives_unit_fidelities() {
        let cfg = ProtocolConfig::new(1, 4000, 0.3, 2);
        let r = run_mub_equivalence(&cfg, &Identity).unwrap();
        assert_eq!(r.entanglement_fidelity, 1.0);
        assert!(r.mub_fidelity_by_label.iter().all(|(_, f)| *f == 1.0));
        assert_eq!(r.predicted_fidelity, 1.0);
        assert!(r.identity_holds && r.decisions_agree());
        assert!((r.epsilon_bar * r.epsilon_bar * 1.5 - r.epsilon * r.epsilon).abs() < 1e-15);
    }
}
