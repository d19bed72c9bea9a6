//! Randomised property suites over the inequalities the faithfulness bounds
//! rest on. Every suite is seeded, so a given seed always checks the same
//! cases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::inequality::{
    definetti_inequality_check, estimation_tampering_check, gentle_measurement_check, uniform_continuity_check,
    InequalityReport, INEQUALITY_TOL,
};
use super::locc::{locc1_lower_bound, Locc1Options};
use crate::error::Result;
use crate::quantum::{c, fidelity, random_density_matrix, random_unitary, trace_distance, CMatrix, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    FuchsVanDeGraaf,
    GentleMeasurement,
    UniformContinuity,
    DeFinettiIid,
    Locc1BelowTrace,
    EstimationTampering,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::FuchsVanDeGraaf,
        Suite::GentleMeasurement,
        Suite::UniformContinuity,
        Suite::DeFinettiIid,
        Suite::Locc1BelowTrace,
        Suite::EstimationTampering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::FuchsVanDeGraaf => "fuchs_van_de_graaf",
            Suite::GentleMeasurement => "gentle_measurement",
            Suite::UniformContinuity => "uniform_continuity",
            Suite::DeFinettiIid => "de_finetti_iid",
            Suite::Locc1BelowTrace => "locc1_below_trace",
            Suite::EstimationTampering => "estimation_tampering",
        }
    }

    /// Number of random cases drawn.
    pub fn cases(self) -> usize {
        match self {
            Suite::FuchsVanDeGraaf => 200,
            Suite::GentleMeasurement => 100,
            Suite::UniformContinuity => 100,
            Suite::DeFinettiIid => 10,
            Suite::Locc1BelowTrace => 50,
            Suite::EstimationTampering => 100,
        }
    }

    fn stream(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).expect("listed") as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Negate the Fuchs–van de Graaf check so every case fails; exercises
    /// the failure path.
    pub inject_violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub name: &'static str,
    pub cases: usize,
    pub violations: usize,
    /// Smallest `rhs − lhs` seen.
    pub min_slack: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Tally {
    cases: usize,
    violations: usize,
    min_slack: f64,
}

impl Tally {
    fn new() -> Self {
        Self { cases: 0, violations: 0, min_slack: f64::INFINITY }
    }

    fn add(&mut self, r: InequalityReport) {
        self.cases += 1;
        self.violations += usize::from(!r.holds);
        self.min_slack = self.min_slack.min(r.slack());
    }
}

/// Hermitian `U diag(λ) U†` with eigenvalues drawn from `range`.
fn random_hermitian(dim: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> CMatrix {
    let u = random_unitary(dim, rng);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |_, _| c(rng.random_range(lo..=hi), 0.0)));
    &u * d * u.adjoint()
}

fn fuchs_van_de_graaf(rng: &mut ChaCha8Rng, inject: bool, tally: &mut Tally) -> Result<()> {
    for i in 0..Suite::FuchsVanDeGraaf.cases() {
        let dim = [2, 4, 8][i % 3];
        let a = random_density_matrix(dim, rng);
        let b = random_density_matrix(dim, rng);
        let f = fidelity(&a, &b)?;
        let d = trace_distance(&a, &b)?;
        let lower = InequalityReport::new(1.0 - f.sqrt(), d);
        let mut upper = InequalityReport::new(d, (1.0 - f).sqrt());
        if inject {
            upper = InequalityReport { holds: !upper.holds, ..upper };
        }
        let holds = lower.holds && upper.holds;
        let slack = lower.slack().min(upper.slack());
        tally.add(InequalityReport { lhs: -slack, rhs: 0.0, holds });
    }
    Ok(())
}

fn gentle_measurement(rng: &mut ChaCha8Rng, tally: &mut Tally) -> Result<()> {
    for i in 0..Suite::GentleMeasurement.cases() {
        let dim = [2, 4][i % 2];
        let e = random_hermitian(dim, 0.0, 1.0, rng);
        let tau = random_density_matrix(dim, rng);
        let sigma = random_density_matrix(dim, rng);
        tally.add(gentle_measurement_check(&e, &tau, &sigma)?);
    }
    Ok(())
}

fn uniform_continuity(rng: &mut ChaCha8Rng, tally: &mut Tally) -> Result<()> {
    for _ in 0..Suite::UniformContinuity.cases() {
        let k = rng.random_range(1..=3);
        let terms: Vec<Vec<CMatrix>> =
            (0..k).map(|_| (0..2).map(|_| random_hermitian(2, -1.0, 1.0, rng)).collect()).collect();
        let sigma = random_density_matrix(4, rng);
        let sigma_prime = random_density_matrix(4, rng);
        tally.add(uniform_continuity_check(&terms, &sigma, &sigma_prime)?);
    }
    Ok(())
}

fn definetti_iid(rng: &mut ChaCha8Rng, tally: &mut Tally) -> Result<()> {
    let opts = Locc1Options { restarts: 4, seed: rng.random(), ..Default::default() };
    for _ in 0..Suite::DeFinettiIid.cases() {
        let rho = random_density_matrix(2, rng);
        let sigma = rho.tensor(&rho).tensor(&rho);
        let r = definetti_inequality_check(&sigma, 3, 2, 2, &[(1.0, rho)], &opts)?;
        // the iid case must also be tight: the marginal is exactly ρ⊗ρ
        let tight = r.inequality.lhs <= INEQUALITY_TOL;
        tally.add(InequalityReport { holds: r.inequality.holds && tight, ..r.inequality });
    }
    Ok(())
}

fn locc1_below_trace(rng: &mut ChaCha8Rng, tally: &mut Tally) -> Result<()> {
    for _ in 0..Suite::Locc1BelowTrace.cases() {
        let a = random_density_matrix(4, rng);
        let b = random_density_matrix(4, rng);
        let opts = Locc1Options { restarts: 4, seed: rng.random(), ..Default::default() };
        let locc = locc1_lower_bound(&a, &b, &[2, 2], &opts)?;
        tally.add(InequalityReport::new(locc.lower_bound, trace_distance(&a, &b)?));
    }
    Ok(())
}

fn estimation_tampering(rng: &mut ChaCha8Rng, tally: &mut Tally) -> Result<()> {
    for _ in 0..Suite::EstimationTampering.cases() {
        let o = random_hermitian(2, -1.0, 1.0, rng);
        let sigma = random_density_matrix(4, rng);
        // mix towards σ so small distances are covered too
        let w: f64 = rng.random();
        let other = random_density_matrix(4, rng);
        let sigma_prime = DensityMatrix::from_raw(sigma.matrix() * c(1.0 - w, 0.0) + other.matrix() * c(w, 0.0));
        let r = estimation_tampering_check(&o, 2, &sigma, &sigma_prime)?;
        tally.add(r.bias);
        tally.add(r.variance);
    }
    Ok(())
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(suite.stream());
    let mut tally = Tally::new();
    match suite {
        Suite::FuchsVanDeGraaf => fuchs_van_de_graaf(&mut rng, opts.inject_violation, &mut tally)?,
        Suite::GentleMeasurement => gentle_measurement(&mut rng, &mut tally)?,
        Suite::UniformContinuity => uniform_continuity(&mut rng, &mut tally)?,
        Suite::DeFinettiIid => definetti_iid(&mut rng, &mut tally)?,
        Suite::Locc1BelowTrace => locc1_below_trace(&mut rng, &mut tally)?,
        Suite::EstimationTampering => estimation_tampering(&mut rng, &mut tally)?,
    }
    Ok(SuiteReport {
        suite,
        name: suite.name(),
        cases: tally.cases,
        violations: tally.violations,
        min_slack: tally.min_slack,
    })
}

pub fn run_all_suites(opts: &SuiteOptions) -> Result<Vec<SuiteReport>> {
    Suite::ALL.iter().map(|&s| run_suite(s, opts)).collect()
}
