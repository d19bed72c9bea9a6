//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints its own PASS/FAIL line; exits non-zero if any criterion fails.

use std::f64::consts::FRAC_PI_4;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dqs_core::adversary::{calibrate_depolarizing, AttackSpec, Depolarizing, Identity, InterceptResend, InterceptStrategy, TwoWaySwapLeak};
use dqs_core::cli::{run_sweep, write_csv, ScenarioFile};
use dqs_core::metrics::{
    acin_min_fidelity, delta_arc, epsilon0, epsilon_from_fidelity, mub_threshold_from_entanglement, run_all_suites,
    AttackMode, BoundParams, Suite, SuiteOptions,
};
use dqs_core::protocol::{check_fidelity, evaluate, run, run_mub_equivalence, Direction, ProtocolConfig, Variant};
use dqs_core::quantum::{encoding_unitary, random_unitary, resource_state, Axis, CMatrix, CVector};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let eps = epsilon_from_fidelity(0.937);
    let eps0_arith = mub_threshold_from_entanglement(0.251);
    let params = BoundParams {
        mode: AttackMode::OneWayIndividual,
        variant: Variant::Entanglement,
        threshold: 0.251,
        rounds: 1,
        discarded: 0,
        estimation_rounds: 1,
        n: 1,
        phi: FRAC_PI_4,
    };
    let eps0_bound = epsilon0(&params).map_err(err)?;
    let ok = (eps - 0.251).abs() <= 5e-4
        && (eps0_arith - 0.20494).abs() <= 1e-5
        && (eps0_bound - 0.20494).abs() <= 1e-5
        && (eps0_arith - eps0_bound).abs() < 1e-15;
    ensure(ok, format!("eps_implied(0.937) = {eps:.5}, eps0 = {eps0_bound:.6}"))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut min_f: f64 = 1.0;
    for (i, phi) in [0.2, 0.4, 0.6, FRAC_PI_4].into_iter().enumerate() {
        let cfg = ProtocolConfig::new(1, 100_000, phi, 100 + i as u64);
        let e = evaluate(&run(&cfg, &Identity).map_err(err)?.transcript).map_err(err)?;
        min_f = min_f.min(e.check.fidelity);
        worst = worst.max((e.estimate.phi_hat - phi).abs() / e.estimate.standard_error);
    }
    ensure(min_f >= 0.999 && worst <= 3.0, format!("min F_hat = {min_f}, worst |phi_hat - phi| = {worst:.2} SE"))
}

fn criterion_3() -> Outcome {
    let mut worst_z: f64 = 0.0;
    for (i, p) in [0.05, 0.2].into_iter().enumerate() {
        let cfg = ProtocolConfig::new(1, 100_000, 0.4, 300 + i as u64).with_epsilon(0.251);
        let r = run_mub_equivalence(&cfg, &Depolarizing::new(p).map_err(err)?).map_err(err)?;
        if !r.identity_holds {
            return Err(format!("p = {p}: z = {:.2}", r.z_score));
        }
        worst_z = worst_z.max(r.z_score);
    }
    let grid = [0.0, 0.01, 0.02, 0.03, 0.04, 0.13, 0.16, 0.2, 0.3, 0.5];
    let mut agree = 0;
    let mut passes = 0;
    for (i, p) in grid.into_iter().enumerate() {
        let cfg = ProtocolConfig::new(1, 100_000, 0.4, 400 + i as u64).with_epsilon(0.251);
        let r = run_mub_equivalence(&cfg, &Depolarizing::new(p).map_err(err)?).map_err(err)?;
        if (r.epsilon_bar.powi(2) * 1.5 - r.epsilon.powi(2)).abs() > 1e-15 {
            return Err("threshold mapping violated".into());
        }
        agree += usize::from(r.decisions_agree());
        passes += usize::from(r.entanglement_passed);
    }
    ensure(
        agree == grid.len(),
        format!("identity worst z = {worst_z:.2}; decisions agree at {agree}/{} grid points ({passes} pass)", grid.len()),
    )
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, p) in [0.084, 0.2, 0.5].into_iter().enumerate() {
        let oracle = 1.0 - 0.75 * p;
        let cfg = ProtocolConfig::new(1, 100_000, 0.3, 500 + i as u64);
        let c = check_fidelity(&run(&cfg, &Depolarizing::new(p).map_err(err)?).map_err(err)?.transcript).map_err(err)?;
        let m = 1.0 - p;
        let sigma = c.correlators.iter().map(|s| (1.0 - m * m) / s.samples as f64).sum::<f64>().sqrt() / 4.0;
        worst = worst.max((c.fidelity - oracle).abs() / sigma);
    }
    let p_star = calibrate_depolarizing(0.937, 1).map_err(err)?;
    ensure(worst <= 4.0 && (p_star - 0.084).abs() <= 1e-6, format!("worst deviation {worst:.2} sigma, p* = {p_star:.9}"))
}

const SWEEP_SCENARIO: &str = r#"
[protocol]
variant = "entanglement"
direction = "one_way"
n = 1
rounds = 100000
p_check = 0.5
p_estimate = 0.5
p_discard = 0.0
epsilon = 0.3
true_phi = 0.5
seed = 2024

[attack]
name = "calibrated_depolarizing"
target_fidelity = 0.937

[sweep]
variable = "phi"
start = 0.1
stop = 1.4707963267948966
steps = 15
mode = "one_way_individual"
windows = 20
"#;

fn criterion_5() -> Outcome {
    let scenario = ScenarioFile::parse(SWEEP_SCENARIO).map_err(err)?;
    let rows = run_sweep(&scenario).map_err(err)?;
    let dominated = rows.iter().all(|r| r.bias_emp.abs() <= r.bias_bound && r.var_discrepancy <= r.var_bound);
    let mean = |f: &dyn Fn(&dqs_core::cli::ReportRow) -> f64| rows.iter().map(f).sum::<f64>() / rows.len() as f64;
    let bias_ratio = mean(&|r| r.bias_bound) / mean(&|r| r.bias_emp.abs());
    let var_ratio = mean(&|r| r.var_bound) / mean(&|r| r.var_discrepancy);
    ensure(
        rows.len() == 15 && dominated && bias_ratio > 3.0,
        format!("{} points, bounds dominate: {dominated}, mean bound/empirical bias {bias_ratio:.1}, variance {var_ratio:.0}", rows.len()),
    )
}

fn criterion_6() -> Outcome {
    let reports = run_all_suites(&SuiteOptions::default()).map_err(err)?;
    let expected = |s: Suite| match s {
        Suite::FuchsVanDeGraaf => 200,
        Suite::GentleMeasurement | Suite::UniformContinuity => 100,
        Suite::Locc1BelowTrace => 50,
        Suite::DeFinettiIid => 10,
        Suite::EstimationTampering => 200,
    };
    let counts_ok = reports.iter().all(|r| r.cases == expected(r.suite));
    let violations: usize = reports.iter().map(|r| r.violations).sum();
    let cases: usize = reports.iter().map(|r| r.cases).sum();
    ensure(counts_ok && violations == 0, format!("{} suites, {cases} cases, {violations} violations", reports.len()))
}

/// `min |⟨v|(U⊗1)|v⟩|²` over unit `v` by restarted pattern search.
fn min_fidelity_search(u: &CMatrix, seed: u64) -> f64 {
    let d = u.nrows();
    let big = u.kronecker(&CMatrix::identity(d, d));
    let objective = |x: &[f64]| {
        let v = CVector::from_fn(d * d, |i, _| Complex64::new(x[2 * i], x[2 * i + 1]));
        let norm = v.norm_squared();
        (v.adjoint() * &big * &v)[(0, 0)].norm_sqr() / (norm * norm)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..12 {
        let mut x: Vec<f64> = (0..2 * d * d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut fx = objective(&x);
        let mut step = 0.5;
        while step > 1e-11 {
            let mut improved = false;
            for k in 0..x.len() {
                for s in [step, -step] {
                    x[k] += s;
                    let f = objective(&x);
                    if f < fx {
                        fx = f;
                        improved = true;
                        break;
                    }
                    x[k] -= s;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.min(fx);
    }
    best
}

fn criterion_7() -> Outcome {
    let mut worst_arc: f64 = 0.0;
    for n in 1..=3usize {
        for phi in [0.1, 0.3] {
            assert!(n as f64 * phi < std::f64::consts::PI);
            let arc = delta_arc(&encoding_unitary(n, phi)).map_err(err)?;
            worst_arc = worst_arc.max((arc - 2.0 * n as f64 * phi).abs());
        }
    }
    let mut worst_acin: f64 = 0.0;
    let mut unitaries: Vec<CMatrix> = [0.1, 0.3, 1.0, 1.4].iter().map(|&phi| encoding_unitary(1, phi)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    unitaries.extend((0..4).map(|_| random_unitary(2, &mut rng)));
    for (i, u) in unitaries.iter().enumerate() {
        let closed = acin_min_fidelity(u).map_err(err)?;
        worst_acin = worst_acin.max((closed - min_fidelity_search(u, i as u64)).abs());
    }
    ensure(worst_arc <= 1e-9 && worst_acin <= 1e-6, format!("arc error {worst_arc:.1e}, min-fidelity error {worst_acin:.1e}"))
}

fn criterion_8() -> Outcome {
    let phi = 0.3;
    let cfg = ProtocolConfig::new(1, 12_500, phi, 800).with_direction(Direction::TwoWay).with_probabilities(0.1, 0.8, 0.1);
    let out = run(&cfg, &TwoWaySwapLeak::new(&cfg).map_err(err)?).map_err(err)?;
    let encoded = out.transcript.records.iter().filter(|r| r.action == dqs_core::protocol::BobAction::Encode).count();
    let est = out.eve_estimate.ok_or("no Eve estimate")?;
    let phi_hat = est.phi_hat.ok_or("Eve has no phase estimate")?;
    let within = (phi_hat - phi).abs() <= 3.0 * est.standard_error;
    let one_way = ProtocolConfig::new(1, 12_500, phi, 800);
    let denied = TwoWaySwapLeak::new(&one_way).is_err() && AttackSpec::TwoWaySwapLeak.build(&one_way).is_err();
    ensure(
        within && denied && encoded >= 9_500,
        format!("Eve phi_hat = {phi_hat:.4} ± {:.4} over {encoded} encoded rounds; one-way denied: {denied}", est.standard_error),
    )
}

/// Overlap with the resource state after a uniformly random Pauli
/// measurement on the probe, averaged exhaustively over bases and outcomes.
fn intercept_resend_oracle() -> f64 {
    let v = resource_state(1).amplitudes().clone();
    let rho = &v * v.adjoint();
    let id = CMatrix::identity(2, 2);
    let mut avg = CMatrix::zeros(4, 4);
    for axis in Axis::ALL {
        for sign in [1.0, -1.0] {
            let k = id.kronecker(&((&id + axis.matrix() * Complex64::new(sign, 0.0)) * Complex64::new(0.5, 0.0)));
            avg += &k * &rho * &k / Complex64::new(3.0, 0.0);
        }
    }
    (v.adjoint() * avg * &v)[(0, 0)].re
}

fn criterion_9() -> Outcome {
    let oracle = intercept_resend_oracle();
    let attack = InterceptResend::new(InterceptStrategy::Random);
    let cfg = ProtocolConfig::new(1, 100_000, 0.3, 900);
    let c = check_fidelity(&run(&cfg, &attack).map_err(err)?.transcript).map_err(err)?;
    let sigma = c.correlators.iter().map(|s| (1.0 - s.mean * s.mean).max(0.5) / s.samples as f64).sum::<f64>().sqrt() / 4.0;
    let mc_ok = (c.fidelity - oracle).abs() <= 4.0 * sigma;

    let trials = 200;
    let mut rejected = 0;
    for t in 0..trials {
        let cfg = ProtocolConfig::new(1, 4_000, 0.3, 10_000 + t).with_epsilon(0.251);
        let tr = run(&cfg, &attack).map_err(err)?.transcript.prefix_with_checks(500);
        let check = check_fidelity(&tr).map_err(err)?;
        if tr.counts().check != 500 {
            return Err(format!("trial {t} has only {} checks", tr.counts().check));
        }
        rejected += usize::from(!check.passed);
    }
    let freq = rejected as f64 / trials as f64;
    ensure(
        (oracle - 0.5).abs() < 1e-12 && mc_ok && freq >= 0.99,
        format!("oracle F = {oracle}, Monte Carlo F_hat = {:.4}, rejection {rejected}/{trials}", c.fidelity),
    )
}

const DETERMINISM_SCENARIO: &str = r#"
[protocol]
variant = "mub"
direction = "one_way"
n = 2
rounds = 20000
p_check = 0.4
p_estimate = 0.4
p_discard = 0.2
epsilon = 0.2
true_phi = 0.3
seed = 99

[attack]
name = "depolarizing"
p = 0.05

[sweep]
variable = "parameter"
start = 0.0
stop = 0.2
steps = 6
windows = 10
"#;

fn criterion_10() -> Outcome {
    let scenario = ScenarioFile::parse(DETERMINISM_SCENARIO).map_err(err)?;
    let csv = || -> Result<Vec<u8>, String> {
        let mut buf = Vec::new();
        write_csv(&run_sweep(&scenario).map_err(err)?, &mut buf).map_err(err)?;
        Ok(buf)
    };
    let library_same = csv()? == csv()?;

    let dir = tempfile::tempdir().map_err(err)?;
    let path = dir.path().join("scenario.toml");
    std::fs::write(&path, DETERMINISM_SCENARIO).map_err(err)?;
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out_path = dir.path().join(format!("out_{threads}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_dqs"))
            .args(["--threads", threads, "sweep"])
            .arg(&path)
            .arg("--out")
            .arg(&out_path)
            .status()
            .map_err(err)?;
        if !status.success() {
            return Err(format!("dqs sweep exited with {status}"));
        }
        outputs.push(std::fs::read(&out_path).map_err(err)?);
    }
    let binary_same = outputs[0] == outputs[1] && outputs[0] == csv()?;
    ensure(library_same && binary_same, format!("{} CSV bytes, library repeat identical: {library_same}, CLI runs identical: {binary_same}", outputs[0].len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("fidelity-to-threshold arithmetic", criterion_1),
        ("ideal protocol consistency", criterion_2),
        ("entanglement/MUB check equivalence", criterion_3),
        ("depolarizing noise oracle and calibration", criterion_4),
        ("bias and variance bound dominance", criterion_5),
        ("inequality property suites", criterion_6),
        ("arc length and minimum fidelity", criterion_7),
        ("two-way phase leak", criterion_8),
        ("intercept-resend detection", criterion_9),
        ("deterministic CSV output", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{name}] {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{name}] {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
