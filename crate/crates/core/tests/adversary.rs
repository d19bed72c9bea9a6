use dqs_core::adversary::{
    AttackSpec, Depolarizing, EntanglingMemory, Identity, InterceptResend, InterceptStrategy, Readout, TwoWaySwapLeak,
};
use dqs_core::protocol::{check_fidelity, run, Direction, ProtocolConfig, RoundRecord, SiftStatus, Variant};
use dqs_core::quantum::{resource_state, Axis, CMatrix, SignedAxis};
use num_complex::Complex64;

fn check_sigma(c: &dqs_core::protocol::CheckResult, floor: f64) -> f64 {
    c.correlators.iter().map(|s| (1.0 - s.mean * s.mean).max(floor) / s.samples as f64).sum::<f64>().sqrt() / 4.0
}

/// Overlap with the resource state after Eve measures the probe in a
/// uniformly random Pauli basis, averaged over bases and outcomes.
fn intercept_resend_oracle() -> f64 {
    let phi = resource_state(1);
    let v = phi.amplitudes();
    let rho = v * v.adjoint();
    let id2 = CMatrix::identity(2, 2);
    let mut avg = CMatrix::zeros(4, 4);
    for axis in Axis::ALL {
        for sign in [1.0, -1.0] {
            let proj = (&id2 + axis.matrix() * Complex64::new(sign, 0.0)) * Complex64::new(0.5, 0.0);
            let k = id2.kronecker(&proj);
            avg += &k * &rho * &k / Complex64::new(3.0, 0.0);
        }
    }
    (v.adjoint() * avg * v)[(0, 0)].re
}

#[test]
fn intercept_resend_oracle_is_one_half() {
    assert!((intercept_resend_oracle() - 0.5).abs() < 1e-12);
}

#[test]
fn random_intercept_resend_matches_oracle() {
    let cfg = ProtocolConfig::new(1, 60_000, 0.3, 91);
    let tr = run(&cfg, &InterceptResend::new(InterceptStrategy::Random)).unwrap().transcript;
    let c = check_fidelity(&tr).unwrap();
    let oracle = intercept_resend_oracle();
    assert!((c.fidelity - oracle).abs() <= 4.0 * check_sigma(&c, 0.5), "{} vs {oracle}", c.fidelity);
    assert!(!c.passed);
}

#[test]
fn fixed_z_intercept_spares_only_z_probes() {
    let cfg = ProtocolConfig::new(1, 60_000, 0.3, 4).with_variant(Variant::Mub);
    let tr = run(&cfg, &InterceptResend::new(InterceptStrategy::Fixed(Axis::Z))).unwrap().transcript;
    let c = check_fidelity(&tr).unwrap();
    for ((label, f), stat) in c.fidelity_by_label.iter().zip(&c.correlators) {
        let label: SignedAxis = label.parse().unwrap();
        if label.axis == Axis::Z {
            assert_eq!(*f, 1.0, "{label}");
        } else {
            let sigma = (1.0 / stat.samples as f64).sqrt() / 2.0;
            assert!((f - 0.5).abs() <= 4.0 * sigma, "{label}: {f}");
        }
    }
}

#[test]
fn entangling_memory_fidelity_follows_coupling() {
    let mut previous = 1.0 + 1e-12;
    for (i, coupling) in [0.0, 0.3, 0.6, 1.0, 1.5].into_iter().enumerate() {
        let cfg = ProtocolConfig::new(1, 40_000, 0.3, 70 + i as u64);
        let attack = EntanglingMemory::new(coupling, 2, Readout::Trace).unwrap();
        let c = check_fidelity(&run(&cfg, &attack).unwrap().transcript).unwrap();
        // with the ancilla in |+⟩ the probe sees 1 or R = e^{−icY} with equal weight
        let oracle = (3.0 + (2.0 * coupling).cos()) / 4.0;
        assert!((c.fidelity - oracle).abs() <= 4.0 * check_sigma(&c, 1e-3), "c={coupling}: {} vs {oracle}", c.fidelity);
        assert!(oracle < previous);
        previous = oracle;
    }
}

#[test]
fn zero_coupling_memory_is_invisible() {
    let cfg = ProtocolConfig::new(1, 3000, 0.3, 9);
    let a = run(&cfg, &Identity).unwrap().transcript;
    let b = run(&cfg, &EntanglingMemory::new(0.0, 3, Readout::Trace).unwrap()).unwrap().transcript;
    assert_eq!(check_fidelity(&a).unwrap().fidelity, 1.0);
    assert_eq!(check_fidelity(&b).unwrap().fidelity, 1.0);
}

fn flip_sensitive_parity(r: &RoundRecord) -> Option<i8> {
    let (a, b) = (r.alice?, r.bob?);
    (r.sift == SiftStatus::KeptCheck && a.axis != Axis::Y).then_some(a.outcome * b.outcome)
}

#[test]
fn full_coupling_memory_correlates_rounds_within_a_block() {
    let cfg = ProtocolConfig::new(1, 200_000, 0.3, 15).with_probabilities(1.0, 0.0, 0.0);
    let tr = run(&cfg, &EntanglingMemory::new(std::f64::consts::FRAC_PI_2, 2, Readout::Trace).unwrap()).unwrap().transcript;
    let parities: Vec<Option<i8>> = tr.records.iter().map(flip_sensitive_parity).collect();
    let mut within = Vec::new();
    let mut across = Vec::new();
    for i in 0..parities.len() - 1 {
        if let (Some(p), Some(q)) = (parities[i], parities[i + 1]) {
            if i % 2 == 0 { within.push(p * q) } else { across.push(p * q) }
        }
    }
    assert!(within.iter().all(|&x| x == 1), "block partners disagree");
    let mean = across.iter().map(|&x| x as f64).sum::<f64>() / across.len() as f64;
    assert!(mean.abs() <= 4.0 / (across.len() as f64).sqrt(), "{mean}");
}

#[test]
fn depolarized_outcomes_are_exchangeable_across_halves() {
    let cfg = ProtocolConfig::new(1, 60_000, 0.3, 27);
    let tr = run(&cfg, &Depolarizing::new(0.3).unwrap()).unwrap().transcript;
    let half = cfg.rounds / 2;
    let mut table = [[0f64; 2]; 2];
    for r in tr.kept(SiftStatus::KeptCheck) {
        let (a, b) = (r.alice.unwrap().outcome, r.bob.unwrap().outcome);
        table[(r.index >= half) as usize][(a * b == 1) as usize] += 1.0;
    }
    let total: f64 = table.iter().flatten().sum();
    let mut chi2 = 0.0;
    let columns = [table[0][0] + table[1][0], table[0][1] + table[1][1]];
    for row in &table {
        for (cell, column) in row.iter().zip(columns) {
            let expected = row.iter().sum::<f64>() * column / total;
            chi2 += (cell - expected).powi(2) / expected;
        }
    }
    // one degree of freedom; 15.1 is the 1e-4 upper quantile
    assert!(chi2 < 15.1, "{chi2}");
}

#[test]
fn swap_leak_reveals_the_phase_without_tripping_the_check() {
    let phi = 0.3;
    let cfg = ProtocolConfig::new(1, 12_500, phi, 33)
        .with_direction(Direction::TwoWay)
        .with_probabilities(0.1, 0.8, 0.1);
    let attack = TwoWaySwapLeak::new(&cfg).unwrap();
    let out = run(&cfg, &attack).unwrap();
    let est = out.eve_estimate.unwrap();
    let phi_hat = est.phi_hat.unwrap();
    assert!((phi_hat - phi).abs() <= 3.0 * est.standard_error, "{phi_hat} ± {}", est.standard_error);
    assert_eq!(est.samples_used, cfg.rounds);
    assert_eq!(check_fidelity(&out.transcript).unwrap().fidelity, 1.0);
}

#[test]
fn one_way_runs_refuse_the_swap_leak() {
    let one_way = ProtocolConfig::new(1, 100, 0.3, 0);
    assert!(TwoWaySwapLeak::new(&one_way).is_err());
    let two_way = one_way.clone().with_direction(Direction::TwoWay);
    let attack = TwoWaySwapLeak::new(&two_way).unwrap();
    assert!(run(&one_way, &attack).is_err());
    assert!(AttackSpec::TwoWaySwapLeak.build(&one_way).is_err());
}
