//! Agent behavior: trend detection, invention, imitation, adoption and the
//! self-regulated invention probability.

use crate::fitness::{FitnessContext, FitnessTerms, OptimumSet};
use crate::model::{Action, BodyPart, Chain, Fitness, Position};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Regenerations attempted before the degenerate-input guard kicks in when an
/// extension proposal keeps coming out equal to the step it extends.
const MAX_REJECTION_RETRIES: usize = 100;

/// The two learned trend biases. Both live in [-1, +1] and start at 0.
///
/// `beta_move` biases invention toward (+) or away from (-) overall movement;
/// `beta_sym` likewise for placing a limb to match its active counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrendDetector {
    beta_move: f64,
    beta_sym: f64,
}

impl TrendDetector {
    pub fn new(beta_move: f64, beta_sym: f64) -> Self {
        TrendDetector {
            beta_move: beta_move.clamp(-1.0, 1.0),
            beta_sym: beta_sym.clamp(-1.0, 1.0),
        }
    }

    pub fn beta_move(self) -> f64 {
        self.beta_move
    }

    pub fn beta_sym(self) -> f64 {
        self.beta_sym
    }

    /// Bias update applied on each adoption: each bias moves by `eta` in the
    /// direction its term changed (no change, no movement), then clamps.
    pub fn updated(self, old: &FitnessTerms, new: &FitnessTerms, eta: f64) -> TrendDetector {
        let movement_trend = (i16::from(new.movement) - i16::from(old.movement)).signum();
        let symmetry_trend =
            (i16::from(new.symmetry_count()) - i16::from(old.symmetry_count())).signum();
        TrendDetector {
            beta_move: (self.beta_move + eta * f64::from(movement_trend)).clamp(-1.0, 1.0),
            beta_sym: (self.beta_sym + eta * f64::from(symmetry_trend)).clamp(-1.0, 1.0),
        }
    }
}

/// Activations of the seven abstract feature nodes for one action.
///
/// Computed as fixed feature detectors; only the movement/symmetry trends
/// feed back into invention (via [`TrendDetector`]). `opposite` is computed
/// and exposed but drives no behavior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenActivations {
    /// Fraction of active parts, in [0, 1].
    pub movement: f64,
    /// Half per limb pair placed actively in the same direction.
    pub symmetry: f64,
    /// Half per limb pair placed actively in opposing directions.
    pub opposite: f64,
    pub left: bool,
    pub right: bool,
    pub arm: bool,
    pub leg: bool,
}

pub fn hidden_activations(action: Action) -> HiddenActivations {
    let active = |part: BodyPart| action.position(part).is_active();
    let same = |a: BodyPart, b: BodyPart| active(a) && action.position(a) == action.position(b);
    let opposed = |a: BodyPart, b: BodyPart| {
        active(a) && active(b) && action.position(a) != action.position(b)
    };
    let half = |flag: bool| if flag { 0.5 } else { 0.0 };
    HiddenActivations {
        movement: action.active_count() as f64 / 6.0,
        symmetry: half(same(BodyPart::LeftArm, BodyPart::RightArm))
            + half(same(BodyPart::LeftLeg, BodyPart::RightLeg)),
        opposite: half(opposed(BodyPart::LeftArm, BodyPart::RightArm))
            + half(opposed(BodyPart::LeftLeg, BodyPart::RightLeg)),
        left: active(BodyPart::LeftArm) || active(BodyPart::LeftLeg),
        right: active(BodyPart::RightArm) || active(BodyPart::RightLeg),
        arm: active(BodyPart::LeftArm) || active(BodyPart::RightArm),
        leg: active(BodyPart::LeftLeg) || active(BodyPart::RightLeg),
    }
}

/// One agent: its implemented chain, cached fitness, invention probability
/// and learned biases.
///
/// The cached fitness always equals the context fitness of the chain, and
/// never decreases: adoption requires strict improvement.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    chain: Chain,
    fitness: Fitness,
    p_create: f64,
    detector: TrendDetector,
}

impl AgentState {
    pub fn new(chain: Chain, ctx: &FitnessContext, p_create: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p_create));
        let fitness = ctx.chain(&chain);
        AgentState {
            chain,
            fitness,
            p_create,
            detector: TrendDetector::default(),
        }
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn fitness(&self) -> Fitness {
        self.fitness
    }

    pub fn p_create(&self) -> f64 {
        self.p_create
    }

    pub fn detector(&self) -> TrendDetector {
        self.detector
    }

    /// Multiplies the invention probability by the agent's relative fitness.
    pub fn self_regulate(&mut self, relative_fitness: f64) {
        self.p_create = update_p_create(self.p_create, relative_fitness);
    }

    /// Adopts `candidate` iff it is strictly fitter than the current chain.
    /// On adoption the terms of the old and new final steps are reported so
    /// the caller can feed them to the trend update.
    pub fn try_adopt(&mut self, candidate: Chain, ctx: &FitnessContext) -> AdoptionOutcome {
        let candidate_fitness = ctx.chain(&candidate);
        if candidate_fitness > self.fitness {
            let old_terms = FitnessTerms::of(self.chain.last());
            let new_terms = FitnessTerms::of(candidate.last());
            self.chain = candidate;
            self.fitness = candidate_fitness;
            AdoptionOutcome::Adopted {
                old_terms,
                new_terms,
            }
        } else {
            AdoptionOutcome::Rejected
        }
    }

    pub fn learn(&mut self, old: &FitnessTerms, new: &FitnessTerms, eta: f64) {
        self.detector = self.detector.updated(old, new, eta);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdoptionOutcome {
    Adopted {
        old_terms: FitnessTerms,
        new_terms: FitnessTerms,
    },
    Rejected,
}

impl AdoptionOutcome {
    pub fn is_adopted(&self) -> bool {
        matches!(self, AdoptionOutcome::Adopted { .. })
    }
}

/// Generates a candidate chain by perturbing the current one.
///
/// If chaining is enabled, the final step is a global optimum, and it differs
/// from its predecessor (vacuous for length-1 chains), the proposal appends a
/// fresh step derived from the final one (never equal to it). Otherwise the
/// proposal replaces the final step with a perturbed copy: each part changes
/// with probability `p_change`, the replacement position drawn by the learned
/// bias rule. The proposal is not adopted here.
pub fn invent<R: Rng>(
    state: &AgentState,
    p_change: f64,
    chaining_enabled: bool,
    optima: &OptimumSet,
    rng: &mut R,
) -> Chain {
    let last = state.chain().last();
    let extension_permitted = chaining_enabled
        && optima.contains(last)
        && state.chain().penultimate().is_none_or(|prev| prev != last);
    if extension_permitted {
        let appended = perturbed_differing(last, state.detector(), p_change, rng);
        state.chain().extended(appended)
    } else {
        let replacement = perturbed(last, state.detector(), p_change, rng);
        state.chain().with_last_replaced(replacement)
    }
}

fn perturbed<R: Rng>(seed: Action, detector: TrendDetector, p_change: f64, rng: &mut R) -> Action {
    let mut out = seed;
    for part in BodyPart::ALL {
        if rng.random::<f64>() < p_change {
            // decisions are per-part independent: replacement positions are
            // always drawn against the unmodified seed
            out = out.with_position(part, replacement_position(seed, part, detector, rng));
        }
    }
    out
}

fn perturbed_differing<R: Rng>(
    seed: Action,
    detector: TrendDetector,
    p_change: f64,
    rng: &mut R,
) -> Action {
    for _ in 0..MAX_REJECTION_RETRIES {
        let candidate = perturbed(seed, detector, p_change, rng);
        if candidate != seed {
            return candidate;
        }
    }
    // degenerate-input guard (e.g. p_change ~ 0): force one part to change
    let part = BodyPart::ALL[rng.random_range(0..BodyPart::ALL.len())];
    seed.with_position(part, replacement_position(seed, part, detector, rng))
}

/// Picks one of the two positions the part does not currently occupy.
///
/// From an active position the choice is between the opposite active position
/// and neutral, taken with probability (1 + beta_move)/2 in favor of staying
/// active. From neutral both alternatives are active: a limb whose
/// counterpart is active matches it with probability (1 + beta_sym)/2,
/// anything else picks uniformly.
fn replacement_position<R: Rng>(
    seed: Action,
    part: BodyPart,
    detector: TrendDetector,
    rng: &mut R,
) -> Position {
    let current = seed.position(part);
    if current.is_active() {
        if rng.random_bool(bias_probability(detector.beta_move())) {
            current.flipped()
        } else {
            Position::Neutral
        }
    } else {
        let active_counterpart = part
            .counterpart()
            .map(|cp| seed.position(cp))
            .filter(|pos| pos.is_active());
        match active_counterpart {
            Some(cp_pos) => {
                if rng.random_bool(bias_probability(detector.beta_sym())) {
                    cp_pos
                } else {
                    cp_pos.flipped()
                }
            }
            None => {
                if rng.random_bool(0.5) {
                    Position::Up
                } else {
                    Position::Down
                }
            }
        }
    }
}

fn bias_probability(beta: f64) -> f64 {
    (1.0 + beta) / 2.0
}

/// Lazy (non-greedy) neighbor search: visits the neighbors in a uniformly
/// random order and returns the first chain strictly fitter than the agent's
/// own; `None` when no neighbor improves on it.
pub fn imitate<'a, R: Rng>(
    state: &AgentState,
    neighbors: &[(&'a Chain, Fitness)],
    rng: &mut R,
) -> Option<&'a Chain> {
    let mut order: Vec<usize> = (0..neighbors.len()).collect();
    order.shuffle(rng);
    order
        .into_iter()
        .map(|i| neighbors[i])
        .find(|(_, fitness)| *fitness > state.fitness())
        .map(|(chain, _)| chain)
}

/// Multiplicative self-regulation update, clamped into [0, 1].
pub fn update_p_create(p_prev: f64, rf_prev: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p_prev));
    debug_assert!(rf_prev >= 0.0);
    (p_prev * rf_prev).clamp(0.0, 1.0)
}

/// An agent's fitness relative to the society mean. A zero mean carries no
/// information and maps to the neutral value 1.0 (unreachable under the
/// default head rule, where fitness is at least 1).
pub fn relative_fitness(agent_fitness: Fitness, mean_fitness: f64) -> f64 {
    debug_assert!(mean_fitness >= 0.0);
    if mean_fitness == 0.0 {
        1.0
    } else {
        agent_fitness.value() / mean_fitness
    }
}
