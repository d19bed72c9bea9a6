use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::round::{product_projector, RoundState};
use super::transcript::{BobAction, Observation, RoundRecord, SiftStatus, Transcript};
use super::{Direction, ProtocolConfig, Variant};
use crate::adversary::{Attack, Correlation, EveEstimate, EveObservation, Interceptor};
use crate::error::Result;
use crate::quantum::{
    bold_pauli, encoding_unitary, mub_probe, pauli, resource_state, sample_index, trace_of_product, Axis, CMatrix,
    LogicalFrame, SignedAxis,
};

type Played = (RoundRecord, Option<EveObservation>);

/// Rounds handed to one worker when the attack is memoryless.
const CHUNK: u64 = 512;

/// Outcome of one protocol execution.
#[derive(Debug, Clone)]
pub struct Run {
    pub transcript: Transcript,
    pub attack: &'static str,
    /// Everything Eve recorded, keyed by round index.
    pub eve_log: Vec<(u64, EveObservation)>,
    pub eve_estimate: Option<EveEstimate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundChoices {
    pub action: BobAction,
    pub probe_label: SignedAxis,
    pub alice_axis: Axis,
    pub bob_axis: Axis,
}

/// The round's random choices, drawn from five uniforms in a fixed order
/// (action, probe label, Alice's axis, Bob's axis, outcome) whatever the
/// variant, so every variant and direction consumes the same stream.
fn draw_choices(config: &ProtocolConfig, u: &[f64; 5]) -> RoundChoices {
    let pick = |x: f64, k: usize| ((x * k as f64) as usize).min(k - 1);
    let action = if u[0] < config.p_check {
        BobAction::Check
    } else if u[0] < config.p_check + config.p_estimate {
        BobAction::Encode
    } else {
        BobAction::Discard
    };
    let bob_axis = match action {
        BobAction::Encode => [Axis::X, Axis::Z][pick(u[3], 2)],
        _ => Axis::ALL[pick(u[3], 3)],
    };
    RoundChoices {
        action,
        probe_label: SignedAxis::ALL[pick(u[1], 6)],
        alice_axis: Axis::ALL[pick(u[2], 3)],
        bob_axis,
    }
}

/// Reconciliation and sifting for a measured round.
pub fn sift(variant: Variant, choices: &RoundChoices) -> SiftStatus {
    let kept = match (variant, choices.action) {
        (_, BobAction::Discard) => return SiftStatus::Discarded,
        (Variant::Entanglement, BobAction::Check) => matches!(
            (choices.alice_axis, choices.bob_axis),
            (Axis::X, Axis::Z) | (Axis::Z, Axis::X) | (Axis::Y, Axis::Y)
        ),
        (Variant::Entanglement, BobAction::Encode) => {
            matches!((choices.alice_axis, choices.bob_axis), (Axis::X, Axis::Z) | (Axis::Z, Axis::X))
        }
        (Variant::Mub, _) => choices.probe_label.axis == choices.bob_axis,
    };
    match (kept, choices.action) {
        (false, _) => SiftStatus::SiftedOut,
        (true, BobAction::Check) => SiftStatus::KeptCheck,
        (true, _) => SiftStatus::KeptEstimation,
    }
}

fn axis_index(a: Axis) -> usize {
    match a {
        Axis::X => 0,
        Axis::Y => 1,
        Axis::Z => 2,
    }
}

/// A joint outcome `(alice, bob)` and its projector on reference ⊗ probe.
type JointOutcome = (Option<i8>, i8, CMatrix);

struct Context<'a> {
    config: &'a ProtocolConfig,
    encoding: CMatrix,
    resource: CMatrix,
    probes: Vec<CMatrix>,
    /// Entanglement variant: indexed by `3·alice + bob`; MUB: by `bob`.
    outcomes: Vec<Vec<JointOutcome>>,
}

fn spectral(obs: &crate::quantum::Observable) -> Vec<(i8, CMatrix)> {
    obs.eigenvalues().iter().map(|&v| v.round() as i8).zip(obs.projectors().iter().cloned()).collect()
}

impl<'a> Context<'a> {
    fn new(config: &'a ProtocolConfig) -> Self {
        let n = config.n;
        let frame = LogicalFrame::phase_aligned(n);
        let bob: Vec<Vec<(i8, CMatrix)>> = Axis::ALL.iter().map(|&a| spectral(&bold_pauli(&frame, a))).collect();
        let outcomes = match config.variant {
            Variant::Entanglement => {
                let alice: Vec<Vec<(i8, CMatrix)>> = Axis::ALL.iter().map(|&a| spectral(&pauli(a))).collect();
                let mut table = Vec::with_capacity(9);
                for a in &alice {
                    for b in &bob {
                        let mut joint = Vec::new();
                        for (va, pa) in a {
                            for (vb, pb) in b {
                                joint.push((Some(*va), *vb, product_projector(pa, pb)));
                            }
                        }
                        table.push(joint);
                    }
                }
                table
            }
            Variant::Mub => bob.into_iter().map(|b| b.into_iter().map(|(v, p)| (None, v, p)).collect()).collect(),
        };
        Self {
            config,
            encoding: encoding_unitary(n, config.true_phi),
            resource: resource_state(n).to_density().into_matrix(),
            probes: SignedAxis::ALL.iter().map(|&l| mub_probe(&frame, l).to_density().into_matrix()).collect(),
            outcomes,
        }
    }

    fn rngs(&self, index: u64) -> (ChaCha8Rng, ChaCha8Rng) {
        let mut protocol = ChaCha8Rng::seed_from_u64(self.config.seed);
        protocol.set_stream(2 * index);
        let mut eve = ChaCha8Rng::seed_from_u64(self.config.seed);
        eve.set_stream(2 * index + 1);
        (protocol, eve)
    }

    fn play(
        &self,
        index: u64,
        eve: &mut dyn Interceptor,
        eve_rng: &mut ChaCha8Rng,
        rng: &mut ChaCha8Rng,
    ) -> Result<(RoundRecord, Option<EveObservation>)> {
        let cfg = self.config;
        let u: [f64; 5] = std::array::from_fn(|_| rng.random::<f64>());
        let choices = draw_choices(cfg, &u);
        let mut state = match cfg.variant {
            Variant::Entanglement => RoundState::new(&self.resource, 2, cfg.n),
            Variant::Mub => {
                let k = SignedAxis::ALL.iter().position(|&l| l == choices.probe_label).expect("label listed");
                RoundState::new(&self.probes[k], 1, cfg.n)
            }
        };

        eve.forward(&mut state, eve_rng)?;
        if choices.action == BobAction::Encode {
            state.apply_probe_unitary(&self.encoding)?;
        }
        if cfg.direction == Direction::TwoWay {
            eve.backward(&mut state, eve_rng)?;
        }

        let probe_label = (cfg.variant == Variant::Mub).then_some(choices.probe_label);
        if choices.action == BobAction::Discard {
            let eve_state = (state.eve_dim() > 1).then(|| state.eve_state());
            let seen = eve.end_round(eve_state, eve_rng)?;
            let record = RoundRecord {
                index,
                action: choices.action,
                probe_label,
                alice: None,
                bob: None,
                sift: SiftStatus::Discarded,
            };
            return Ok((record, seen));
        }

        let table = match cfg.variant {
            Variant::Entanglement => &self.outcomes[3 * axis_index(choices.alice_axis) + axis_index(choices.bob_axis)],
            Variant::Mub => &self.outcomes[axis_index(choices.bob_axis)],
        };
        let reduced = state.alice_probe_state();
        let weights: Vec<f64> = table.iter().map(|(_, _, p)| trace_of_product(p, &reduced).re.max(0.0)).collect();
        let k = sample_index(&weights, u[4]);
        let (alice_out, bob_out, projector) = &table[k];
        let eve_state = state.eve_conditional(projector, weights[k]);
        let seen = eve.end_round(eve_state, eve_rng)?;

        let record = RoundRecord {
            index,
            action: choices.action,
            probe_label,
            alice: alice_out.map(|o| Observation { axis: choices.alice_axis, outcome: o }),
            bob: Some(Observation { axis: choices.bob_axis, outcome: *bob_out }),
            sift: sift(cfg.variant, &choices),
        };
        Ok((record, seen))
    }

    fn play_unit(&self, attack: &dyn Attack, range: Range<u64>) -> Result<Vec<(RoundRecord, Option<EveObservation>)>> {
        let mut eve = attack.interceptor();
        eve.begin_block();
        let mut out = Vec::with_capacity((range.end - range.start) as usize);
        let mut last_eve_rng = None;
        for index in range {
            let (mut rng, mut eve_rng) = self.rngs(index);
            out.push(self.play(index, eve.as_mut(), &mut eve_rng, &mut rng)?);
            last_eve_rng = Some(eve_rng);
        }
        if let Some(mut eve_rng) = last_eve_rng {
            if let Some(obs) = eve.end_block(&mut eve_rng)? {
                let last = out.last_mut().expect("unit is non-empty");
                last.1 = Some(obs);
            }
        }
        Ok(out)
    }
}

fn units(rounds: u64, correlation: Correlation) -> Vec<Range<u64>> {
    let size = match correlation {
        Correlation::Memoryless => CHUNK,
        Correlation::Blocks(k) => k.max(1) as u64,
        Correlation::Sequential => rounds,
    };
    (0..rounds.div_ceil(size)).map(|i| i * size..((i + 1) * size).min(rounds)).collect()
}

/// Execute `config.rounds` rounds of the protocol against `attack`.
///
/// Round `i` draws its choices and outcomes from ChaCha8 stream `2i` and
/// gives the attack stream `2i + 1`, both keyed by `config.seed`, so the
/// transcript does not depend on how rounds are spread over threads.
pub fn run(config: &ProtocolConfig, attack: &dyn Attack) -> Result<Run> {
    config.validate()?;
    attack.check_compatible(config.direction, config.n)?;
    let ctx = Context::new(config);
    let chunks: Vec<Result<Vec<Played>>> = units(config.rounds, attack.correlation())
        .into_par_iter()
        .map(|range| ctx.play_unit(attack, range))
        .collect();

    let mut records = Vec::with_capacity(config.rounds as usize);
    let mut eve_log = Vec::new();
    for chunk in chunks {
        for (record, seen) in chunk? {
            if let Some(o) = seen {
                eve_log.push((record.index, o));
            }
            records.push(record);
        }
    }
    let eve_estimate = attack.eve_estimate(&eve_log, config);
    Ok(Run { transcript: Transcript { config: config.clone(), records }, attack: attack.name(), eve_log, eve_estimate })
}
