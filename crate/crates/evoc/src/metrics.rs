//! Per-iteration measurement (mean fitness, diversity, invention-probability
//! distribution) and aggregation across replicate runs.

use crate::agent::AgentState;
use crate::model::Chain;
use crate::world::SimParams;
use serde::Serialize;
use std::collections::HashSet;

pub const HISTOGRAM_BINS: usize = 10;
/// Agents with p(C) at or below this are counted as imitators.
pub const IMITATOR_THRESHOLD: f64 = 0.1;
/// Agents with p(C) at or above this are counted as creators.
pub const CREATOR_THRESHOLD: f64 = 0.9;

/// Histogram bin of an invention probability: bins are [0.0,0.1), ...,
/// [0.9,1.0], i.e. floor(p*10) with p = 1.0 folded into the last bin.
pub fn histogram_bin(p: f64) -> usize {
    debug_assert!((0.0..=1.0).contains(&p));
    ((p * HISTOGRAM_BINS as f64).floor() as usize).min(HISTOGRAM_BINS - 1)
}

/// Society-wide metrics of one iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub mean_fitness: f64,
    /// Number of structurally distinct implemented chains.
    pub diversity: usize,
    pub mean_p_create: f64,
    pub frac_imitators: f64,
    pub frac_creators: f64,
    pub p_create_histogram: [u32; HISTOGRAM_BINS],
}

impl IterationRecord {
    pub fn measure(iteration: usize, agents: &[AgentState]) -> Self {
        assert!(!agents.is_empty());
        let n = agents.len() as f64;
        let mut histogram = [0u32; HISTOGRAM_BINS];
        let mut imitators = 0usize;
        let mut creators = 0usize;
        let mut p_sum = 0.0;
        for agent in agents {
            let p = agent.p_create();
            histogram[histogram_bin(p)] += 1;
            if p <= IMITATOR_THRESHOLD {
                imitators += 1;
            }
            if p >= CREATOR_THRESHOLD {
                creators += 1;
            }
            p_sum += p;
        }
        IterationRecord {
            iteration,
            mean_fitness: mean_fitness(agents),
            diversity: diversity(agents.iter().map(|a| a.chain())),
            mean_p_create: p_sum / n,
            frac_imitators: imitators as f64 / n,
            frac_creators: creators as f64 / n,
            p_create_histogram: histogram,
        }
    }
}

/// Count of structurally distinct chains.
pub fn diversity<'a>(chains: impl IntoIterator<Item = &'a Chain>) -> usize {
    chains.into_iter().collect::<HashSet<_>>().len()
}

/// Arithmetic mean of the cached agent fitnesses.
pub fn mean_fitness(agents: &[AgentState]) -> f64 {
    assert!(!agents.is_empty());
    agents.iter().map(|a| a.fitness().value()).sum::<f64>() / agents.len() as f64
}

/// Everything one run produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub params: SimParams,
    /// Records indexed 0..=iterations; record 0 is the initial state.
    pub records: Vec<IterationRecord>,
    pub final_p_create: Vec<f64>,
}

impl TimeSeries {
    /// Canonical serialization of the full parameter set.
    pub fn params_digest(&self) -> String {
        serde_json::to_string(&self.params).expect("params serialize")
    }

    /// Canonical serialization with the seed masked out; replicates of one
    /// batch must agree on this.
    pub fn batch_digest(&self) -> String {
        let masked = SimParams {
            seed: 0,
            ..self.params
        };
        serde_json::to_string(&masked).expect("params serialize")
    }
}

/// Mean and sample standard deviation of one metric across replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        assert!(!values.is_empty());
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        MeanStd { mean, std }
    }
}

/// One iteration's metrics aggregated across replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRecord {
    pub iteration: usize,
    pub mean_fitness: MeanStd,
    pub diversity: MeanStd,
    pub mean_p_create: MeanStd,
    pub frac_imitators: MeanStd,
    pub frac_creators: MeanStd,
    pub p_create_histogram: [MeanStd; HISTOGRAM_BINS],
}

/// Per-iteration aggregate of a replicate batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateSeries {
    pub replicates: usize,
    pub records: Vec<AggregateRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AggregateError {
    #[error("cannot aggregate an empty batch")]
    EmptyBatch,
    #[error("replicate {index} has {got} records, expected {expected}")]
    LengthMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("replicate {index} was run with different non-seed parameters")]
    ParamsMismatch { index: usize },
}

/// Per-iteration mean and sample standard deviation over replicate runs.
///
/// All replicates must share every parameter except the seed and have equal
/// length; anything else signals an invalid batch.
pub fn aggregate(series: &[TimeSeries]) -> Result<AggregateSeries, AggregateError> {
    let first = series.first().ok_or(AggregateError::EmptyBatch)?;
    let expected_digest = first.batch_digest();
    let expected_len = first.records.len();
    for (index, s) in series.iter().enumerate() {
        if s.batch_digest() != expected_digest {
            return Err(AggregateError::ParamsMismatch { index });
        }
        if s.records.len() != expected_len {
            return Err(AggregateError::LengthMismatch {
                index,
                got: s.records.len(),
                expected: expected_len,
            });
        }
    }

    let column = |f: &dyn Fn(&IterationRecord) -> f64, t: usize| -> Vec<f64> {
        series.iter().map(|s| f(&s.records[t])).collect()
    };
    let records = (0..expected_len)
        .map(|t| AggregateRecord {
            iteration: first.records[t].iteration,
            mean_fitness: MeanStd::of(&column(&|r| r.mean_fitness, t)),
            diversity: MeanStd::of(&column(&|r| r.diversity as f64, t)),
            mean_p_create: MeanStd::of(&column(&|r| r.mean_p_create, t)),
            frac_imitators: MeanStd::of(&column(&|r| r.frac_imitators, t)),
            frac_creators: MeanStd::of(&column(&|r| r.frac_creators, t)),
            p_create_histogram: std::array::from_fn(|bin| {
                MeanStd::of(&column(&|r| f64::from(r.p_create_histogram[bin]), t))
            }),
        })
        .collect();
    Ok(AggregateSeries {
        replicates: series.len(),
        records,
    })
}

/// Iteration index and value of the highest mean diversity; earliest index on
/// ties.
pub fn diversity_peak(series: &AggregateSeries) -> (usize, f64) {
    assert!(!series.records.is_empty());
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, record) in series.records.iter().enumerate() {
        if record.diversity.mean > best.1 {
            best = (i, record.diversity.mean);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitness::{FitnessContext, FitnessRules};
    use crate::model::Action;
    use crate::world::Simulation;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn agents_with_p(ps: &[f64]) -> Vec<AgentState> {
        let ctx = FitnessContext::new(FitnessRules::default());
        ps.iter()
            .map(|&p| AgentState::new(Chain::single(Action::neutral()), &ctx, p))
            .collect()
    }

    #[test]
    fn diversity_counts_distinct_chains() {
        let a = Chain::single(Action::decode("UUNNNN").unwrap());
        let b = Chain::single(Action::decode("DDNNNN").unwrap());
        let copies: Vec<Chain> = std::iter::repeat_n(a.clone(), 1024).collect();
        assert_eq!(diversity(copies.iter()), 1);
        assert_eq!(diversity([&a, &a, &b].into_iter()), 2);
        let distinct: Vec<Chain> = crate::model::enumerate_actions()
            .take(50)
            .map(Chain::single)
            .collect();
        assert_eq!(diversity(distinct.iter()), 50);
    }

    #[test]
    fn mean_fitness_is_the_arithmetic_mean() {
        let ctx = FitnessContext::new(FitnessRules::default());
        let mk =
            |code: &str| AgentState::new(Chain::single(Action::decode(code).unwrap()), &ctx, 0.5);
        let agents = vec![mk("UUNNNN"), mk("UUNNNN")];
        assert_eq!(mean_fitness(&agents), 5.5);
        let mixed = vec![mk("NNNNNN"), mk("UUUUNU")]; // 2 and 10
        assert_eq!(mean_fitness(&mixed), 6.0);
        assert_eq!(mean_fitness(&mixed[..1]), 2.0);
    }

    #[test]
    fn histogram_bins_partition_the_unit_interval() {
        assert_eq!(histogram_bin(0.0), 0);
        assert_eq!(histogram_bin(0.05), 0);
        assert_eq!(histogram_bin(0.1), 1);
        assert_eq!(histogram_bin(0.95), 9);
        assert_eq!(histogram_bin(1.0), 9);
    }

    #[test]
    fn record_measures_histogram_and_role_fractions() {
        let agents = agents_with_p(&[0.0, 0.1, 0.5, 0.9, 1.0]);
        let record = IterationRecord::measure(3, &agents);
        assert_eq!(record.iteration, 3);
        assert_eq!(record.p_create_histogram.iter().sum::<u32>(), 5);
        assert_eq!(record.p_create_histogram[0], 1);
        assert_eq!(record.p_create_histogram[1], 1);
        assert_eq!(record.p_create_histogram[5], 1);
        assert_eq!(record.p_create_histogram[9], 2);
        // closed thresholds: 0.1 and 0.9 count toward the fractions
        assert_eq!(record.frac_imitators, 2.0 / 5.0);
        assert_eq!(record.frac_creators, 2.0 / 5.0);
        assert_relative_eq!(record.mean_p_create, 0.5);
    }

    fn small_series(seed: u64) -> TimeSeries {
        let params = crate::world::SimParams {
            grid_width: 4,
            grid_height: 4,
            iterations: 5,
            seed,
            ..Default::default()
        };
        Simulation::run(params).unwrap()
    }

    #[test]
    fn aggregate_of_one_replicate_has_zero_deviation() {
        let s = small_series(1);
        let agg = aggregate(std::slice::from_ref(&s)).unwrap();
        assert_eq!(agg.replicates, 1);
        for (agg_record, record) in agg.records.iter().zip(&s.records) {
            assert_eq!(agg_record.mean_fitness.mean, record.mean_fitness);
            assert_eq!(agg_record.mean_fitness.std, 0.0);
            assert_eq!(agg_record.diversity.mean, record.diversity as f64);
        }
    }

    #[test]
    fn two_point_statistics_match_by_hand_values() {
        let stats = MeanStd::of(&[4.0, 8.0]);
        assert_eq!(stats.mean, 6.0);
        assert_relative_eq!(stats.std, 2.8284271247461903, epsilon = 1e-12);
    }

    #[test]
    fn aggregate_rejects_invalid_batches() {
        assert_eq!(aggregate(&[]), Err(AggregateError::EmptyBatch));

        let a = small_series(1);
        let mut b = small_series(2);
        b.records.pop();
        assert!(matches!(
            aggregate(&[a.clone(), b]),
            Err(AggregateError::LengthMismatch {
                index: 1,
                got: 5,
                expected: 6
            })
        ));

        let mut c = small_series(3);
        c.params.eta = 0.2;
        assert!(matches!(
            aggregate(&[a.clone(), c]),
            Err(AggregateError::ParamsMismatch { index: 1 })
        ));

        // same params, different seeds: a valid batch
        assert!(aggregate(&[a, small_series(2)]).is_ok());
    }

    fn diversity_only_series(means: &[f64]) -> AggregateSeries {
        let zero = MeanStd {
            mean: 0.0,
            std: 0.0,
        };
        AggregateSeries {
            replicates: 1,
            records: means
                .iter()
                .enumerate()
                .map(|(i, &m)| AggregateRecord {
                    iteration: i,
                    mean_fitness: zero,
                    diversity: MeanStd { mean: m, std: 0.0 },
                    mean_p_create: zero,
                    frac_imitators: zero,
                    frac_creators: zero,
                    p_create_histogram: [zero; HISTOGRAM_BINS],
                })
                .collect(),
        }
    }

    #[test]
    fn diversity_peak_picks_earliest_maximum() {
        assert_eq!(
            diversity_peak(&diversity_only_series(&[1.0, 5.0, 9.0, 4.0, 2.0])),
            (2, 9.0)
        );
        assert_eq!(
            diversity_peak(&diversity_only_series(&[7.0, 5.0, 3.0])),
            (0, 7.0)
        );
        assert_eq!(
            diversity_peak(&diversity_only_series(&[1.0, 9.0, 9.0, 2.0])),
            (1, 9.0)
        );
    }

    proptest! {
        #[test]
        fn role_fractions_never_overlap(ps in proptest::collection::vec(0.0f64..=1.0, 1..200)) {
            let record = IterationRecord::measure(0, &agents_with_p(&ps));
            prop_assert!(record.frac_imitators + record.frac_creators <= 1.0 + 1e-12);
            prop_assert_eq!(record.p_create_histogram.iter().sum::<u32>() as usize, ps.len());
        }

        #[test]
        fn aggregation_is_permutation_invariant(swap in 0usize..4, seeds in proptest::collection::vec(0u64..50, 2..5)) {
            let series: Vec<TimeSeries> = seeds.iter().map(|&s| small_series(s)).collect();
            let mut shuffled = series.clone();
            let len = shuffled.len();
            shuffled.rotate_left(swap % len);
            let a = aggregate(&series).unwrap();
            let b = aggregate(&shuffled).unwrap();
            for (ra, rb) in a.records.iter().zip(&b.records) {
                prop_assert!((ra.mean_fitness.mean - rb.mean_fitness.mean).abs() < 1e-9);
                prop_assert!((ra.mean_fitness.std - rb.mean_fitness.std).abs() < 1e-9);
                prop_assert!((ra.diversity.mean - rb.diversity.mean).abs() < 1e-9);
            }
        }
    }
}
