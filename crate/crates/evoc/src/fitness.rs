//! Action scoring: the single-step fitness rule, geometric discounting for
//! multi-step chains, and an exhaustive oracle over the full action space.

use crate::model::{Action, BodyPart, Chain, Fitness, ACTION_SPACE};
use serde::{Deserialize, Serialize};

/// Weight of each satisfied limb-symmetry indicator.
pub const SYMMETRY_BONUS: f64 = 1.5;
/// Weight of the head term.
pub const HEAD_BONUS: f64 = 2.0;
/// Geometric discount base for successive chain steps.
pub const CHAIN_DISCOUNT_BASE: f64 = 1.2;

/// How the +2 head term is awarded.
///
/// The two variants disagree on which head state earns the bonus. `Prose`
/// (the default) rewards keeping the head stationary, which is what makes the
/// all-neutral starting action score 2 and the best single actions score 10.
/// `Literal` rewards moving the head instead and is kept selectable so the
/// discrepancy between the two readings stays observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadRule {
    #[default]
    Prose,
    Literal,
}

/// How successive chain steps are discounted.
///
/// `PerStep` (the default) divides step k (1-based) by 1.2^(k-1), so every
/// appended step strictly increases the total. `Literal` divides every step
/// by the same 1.2^(n-1) for a length-n chain, under which appending a weak
/// step can lower the total; it is kept selectable for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscountRule {
    #[default]
    PerStep,
    Literal,
}

/// Bundle of the two rule switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FitnessRules {
    pub head: HeadRule,
    pub discount: DiscountRule,
}

/// The indicator terms the single-step rule is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitnessTerms {
    /// Number of active body parts (0-6), head included.
    pub movement: u8,
    /// Both arms active in the same position.
    pub arm_symmetry: bool,
    /// Both legs active in the same position.
    pub leg_symmetry: bool,
    /// Head in the neutral position.
    pub head_stationary: bool,
}

impl FitnessTerms {
    pub fn of(action: Action) -> Self {
        FitnessTerms {
            movement: action.active_count() as u8,
            arm_symmetry: pair_symmetric(action, BodyPart::LeftArm, BodyPart::RightArm),
            leg_symmetry: pair_symmetric(action, BodyPart::LeftLeg, BodyPart::RightLeg),
            head_stationary: !action.position(BodyPart::Head).is_active(),
        }
    }

    /// Number of satisfied symmetry indicators (0-2).
    pub fn symmetry_count(&self) -> u8 {
        self.arm_symmetry as u8 + self.leg_symmetry as u8
    }
}

fn pair_symmetric(action: Action, a: BodyPart, b: BodyPart) -> bool {
    let pa = action.position(a);
    pa.is_active() && pa == action.position(b)
}

/// Score of a single action: movement + 1.5 per symmetric limb pair + the
/// head bonus per `head_rule`.
pub fn single_fitness(action: Action, head_rule: HeadRule) -> Fitness {
    let terms = FitnessTerms::of(action);
    let head_bonus_earned = match head_rule {
        HeadRule::Prose => terms.head_stationary,
        HeadRule::Literal => !terms.head_stationary,
    };
    Fitness::new(
        f64::from(terms.movement)
            + SYMMETRY_BONUS * f64::from(terms.symmetry_count())
            + HEAD_BONUS * f64::from(u8::from(head_bonus_earned)),
    )
}

/// Score of a multi-step chain: discounted sum of its step scores.
pub fn chain_fitness(chain: &Chain, rules: FitnessRules) -> Fitness {
    let n = chain.len();
    let mut total = 0.0;
    for (k, step) in chain.steps().iter().enumerate() {
        let discount = match rules.discount {
            DiscountRule::PerStep => CHAIN_DISCOUNT_BASE.powi(k as i32),
            DiscountRule::Literal => CHAIN_DISCOUNT_BASE.powi(n as i32 - 1),
        };
        total += single_fitness(*step, rules.head).value() / discount;
    }
    Fitness::new(total)
}

/// Exhaustively evaluates all 729 actions and returns the maximum single-step
/// fitness together with every maximizer, in enumeration order.
pub fn oracle_max_and_argmax(head_rule: HeadRule) -> (Fitness, Vec<Action>) {
    let mut max = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    for action in crate::model::enumerate_actions() {
        let f = single_fitness(action, head_rule).value();
        // fitness values are multiples of 0.5, so exact comparison is sound
        if f > max {
            max = f;
            argmax.clear();
            argmax.push(action);
        } else if f == max {
            argmax.push(action);
        }
    }
    (Fitness::new(max), argmax)
}

/// Membership set of the globally optimal single actions under one head rule.
#[derive(Debug, Clone)]
pub struct OptimumSet {
    flags: Box<[bool; ACTION_SPACE]>,
    max: Fitness,
    count: usize,
}

impl OptimumSet {
    pub fn for_rule(head_rule: HeadRule) -> Self {
        let (max, argmax) = oracle_max_and_argmax(head_rule);
        let mut flags = Box::new([false; ACTION_SPACE]);
        for action in &argmax {
            flags[action.index()] = true;
        }
        OptimumSet {
            flags,
            max,
            count: argmax.len(),
        }
    }

    pub fn contains(&self, action: Action) -> bool {
        self.flags[action.index()]
    }

    pub fn max(&self) -> Fitness {
        self.max
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// Precomputed per-action scores plus the rule switches; one per run.
///
/// Lookup-table twin of [`single_fitness`] / [`chain_fitness`] for the
/// simulation hot path.
#[derive(Debug, Clone)]
pub struct FitnessContext {
    rules: FitnessRules,
    table: Box<[f64; ACTION_SPACE]>,
}

impl FitnessContext {
    pub fn new(rules: FitnessRules) -> Self {
        let mut table = Box::new([0.0; ACTION_SPACE]);
        for action in crate::model::enumerate_actions() {
            table[action.index()] = single_fitness(action, rules.head).value();
        }
        FitnessContext { rules, table }
    }

    pub fn rules(&self) -> FitnessRules {
        self.rules
    }

    pub fn single(&self, action: Action) -> Fitness {
        Fitness::new(self.table[action.index()])
    }

    pub fn chain(&self, chain: &Chain) -> Fitness {
        let n = chain.len();
        let mut total = 0.0;
        let mut discount = match self.rules.discount {
            DiscountRule::PerStep => 1.0,
            DiscountRule::Literal => CHAIN_DISCOUNT_BASE.powi(n as i32 - 1),
        };
        for step in chain.steps() {
            total += self.table[step.index()] / discount;
            if self.rules.discount == DiscountRule::PerStep {
                discount *= CHAIN_DISCOUNT_BASE;
            }
        }
        Fitness::new(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::enumerate_actions;
    use crate::model::Position;
    use approx::assert_relative_eq;

    fn prose(action: Action) -> f64 {
        single_fitness(action, HeadRule::Prose).value()
    }

    #[test]
    fn neutral_action_scores_two_under_prose_rule() {
        assert_eq!(prose(Action::neutral()), 2.0);
    }

    #[test]
    fn head_only_action_scores_one_under_prose_rule() {
        let head_up = Action::neutral().with_position(BodyPart::Head, Position::Up);
        assert_eq!(prose(head_up), 1.0);
        assert_eq!(single_fitness(head_up, HeadRule::Literal).value(), 3.0);
    }

    #[test]
    fn full_symmetric_action_scores_ten() {
        let a = Action::decode("UUUUNU").unwrap();
        assert_eq!(prose(a), 10.0); // m=5, both symmetries, head stationary
    }

    // Independent exhaustive scan; the expected values below were computed by
    // this oracle and then frozen.
    fn brute_force_max(head_rule: HeadRule) -> (f64, Vec<Action>) {
        let mut best = f64::NEG_INFINITY;
        let mut argmax = Vec::new();
        for action in enumerate_actions() {
            let f = single_fitness(action, head_rule).value();
            if f > best {
                best = f;
                argmax = vec![action];
            } else if f == best {
                argmax.push(action);
            }
        }
        (best, argmax)
    }

    #[test]
    fn prose_rule_has_eight_optima_at_ten() {
        let (max, argmax) = brute_force_max(HeadRule::Prose);
        assert_eq!(max, 10.0);
        assert_eq!(argmax.len(), 8);
        for a in &argmax {
            assert!(!a.position(BodyPart::Head).is_active());
            // arms and legs each symmetric, hips active
            let t = FitnessTerms::of(*a);
            assert!(t.arm_symmetry && t.leg_symmetry);
            assert!(a.position(BodyPart::Hips).is_active());
        }
        // the API oracle agrees with the local scan
        let (api_max, api_argmax) = oracle_max_and_argmax(HeadRule::Prose);
        assert_eq!(api_max.value(), max);
        assert_eq!(api_argmax, argmax);
    }

    #[test]
    fn literal_rule_maxes_at_eleven() {
        let (max, argmax) = brute_force_max(HeadRule::Literal);
        assert_eq!(max, 11.0);
        assert_eq!(argmax.len(), 16); // the 8 prose optima x head up/down
        let (api_max, _) = oracle_max_and_argmax(HeadRule::Literal);
        assert_eq!(api_max.value(), 11.0);
    }

    #[test]
    fn prose_fitness_spans_one_to_ten() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for action in enumerate_actions() {
            let f = prose(action);
            lo = lo.min(f);
            hi = hi.max(f);
        }
        assert_eq!(lo, 1.0);
        assert_eq!(hi, 10.0);
    }

    #[test]
    fn fitness_invariant_under_flipping_a_symmetric_pair() {
        for action in enumerate_actions() {
            let flipped = action
                .with_position(
                    BodyPart::LeftArm,
                    action.position(BodyPart::LeftArm).flipped(),
                )
                .with_position(
                    BodyPart::RightArm,
                    action.position(BodyPart::RightArm).flipped(),
                );
            assert_eq!(prose(action), prose(flipped), "action {action}");
        }
    }

    #[test]
    fn length_one_chain_equals_single_fitness() {
        let rules = FitnessRules::default();
        for action in enumerate_actions() {
            assert_eq!(
                chain_fitness(&Chain::single(action), rules).value(),
                single_fitness(action, rules.head).value()
            );
        }
    }

    #[test]
    fn chain_of_optimal_steps_matches_geometric_sum() {
        let rules = FitnessRules::default();
        let opt = oracle_max_and_argmax(HeadRule::Prose).1[0];
        let other_opt = oracle_max_and_argmax(HeadRule::Prose).1[1];
        let two = Chain::single(opt).extended(other_opt);
        // 10 + 10/1.2 = 55/3
        assert_relative_eq!(
            chain_fitness(&two, rules).value(),
            55.0 / 3.0,
            epsilon = 1e-12
        );
        let three = two.extended(opt);
        // 10 + 10/1.2 + 10/1.44 = 455/18
        assert_relative_eq!(
            chain_fitness(&three, rules).value(),
            455.0 / 18.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn per_step_extension_always_strictly_gains() {
        let rules = FitnessRules::default();
        let base = Chain::single(Action::decode("UUUUNU").unwrap());
        let mut prev = chain_fitness(&base, rules).value();
        let mut chain = base;
        for step in enumerate_actions().take(20) {
            chain = chain.extended(step);
            let next = chain_fitness(&chain, rules).value();
            assert!(next > prev);
            prev = next;
        }
    }

    #[test]
    fn literal_discount_can_lose_fitness_on_extension() {
        let rules = FitnessRules {
            head: HeadRule::Prose,
            discount: DiscountRule::Literal,
        };
        let opt = Chain::single(Action::decode("UUUUNU").unwrap());
        let weak = Action::neutral().with_position(BodyPart::Head, Position::Up);
        let extended = opt.extended(weak);
        // (10 + 1) / 1.2 < 10: the reading the default rule rejects
        assert!(chain_fitness(&extended, rules).value() < chain_fitness(&opt, rules).value());
    }

    #[test]
    fn context_table_matches_direct_evaluation() {
        for rules in [
            FitnessRules::default(),
            FitnessRules {
                head: HeadRule::Literal,
                discount: DiscountRule::PerStep,
            },
            FitnessRules {
                head: HeadRule::Prose,
                discount: DiscountRule::Literal,
            },
        ] {
            let ctx = FitnessContext::new(rules);
            let mut chain = Chain::single(Action::neutral());
            for action in enumerate_actions().step_by(37) {
                assert_eq!(
                    ctx.single(action).value(),
                    single_fitness(action, rules.head).value()
                );
                chain = chain.extended(action);
                assert_relative_eq!(
                    ctx.chain(&chain).value(),
                    chain_fitness(&chain, rules).value(),
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn optimum_set_flags_exactly_the_argmax() {
        let set = OptimumSet::for_rule(HeadRule::Prose);
        assert_eq!(set.max().value(), 10.0);
        assert_eq!(set.count(), 8);
        let (_, argmax) = oracle_max_and_argmax(HeadRule::Prose);
        for action in enumerate_actions() {
            assert_eq!(set.contains(action), argmax.contains(&action));
        }
    }
}
