//! The artificial world: a toroidal lattice of stationary agents, the
//! synchronous per-iteration pipeline, and deterministic seeded execution of
//! a full run.

use crate::agent::{imitate, invent, relative_fitness, AdoptionOutcome, AgentState};
use crate::fitness::{DiscountRule, FitnessContext, FitnessRules, HeadRule, OptimumSet};
use crate::metrics::{mean_fitness, IterationRecord, TimeSeries};
use crate::model::{Action, Chain, Fitness};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Full parameter set of one run. A run is a pure function of this value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    pub grid_width: usize,
    pub grid_height: usize,
    pub iterations: usize,
    pub sr_enabled: bool,
    pub chaining_enabled: bool,
    /// Per-part change probability during invention.
    pub p_change: f64,
    /// Trend-bias learning step.
    pub eta: f64,
    /// Initial invention probability for every agent.
    pub p_create_init: f64,
    pub fitness_head_rule: HeadRule,
    pub chain_discount_rule: DiscountRule,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            grid_width: 32,
            grid_height: 32,
            iterations: 100,
            sr_enabled: false,
            chaining_enabled: true,
            p_change: 1.0 / 6.0,
            eta: 0.1,
            p_create_init: 0.5,
            fitness_head_rule: HeadRule::default(),
            chain_discount_rule: DiscountRule::default(),
            seed: 42,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<(), InvalidParams> {
        if self.grid_width == 0 || self.grid_height == 0 || self.grid_width * self.grid_height < 2 {
            return Err(InvalidParams::Grid {
                width: self.grid_width,
                height: self.grid_height,
            });
        }
        if !(self.p_change > 0.0 && self.p_change <= 1.0) {
            return Err(InvalidParams::PChange(self.p_change));
        }
        if self.eta.is_nan() || self.eta <= 0.0 {
            return Err(InvalidParams::Eta(self.eta));
        }
        if !(0.0..=1.0).contains(&self.p_create_init) {
            return Err(InvalidParams::PCreateInit(self.p_create_init));
        }
        Ok(())
    }

    pub fn agent_count(&self) -> usize {
        self.grid_width * self.grid_height
    }

    pub fn rules(&self) -> FitnessRules {
        FitnessRules {
            head: self.fitness_head_rule,
            discount: self.chain_discount_rule,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum InvalidParams {
    #[error("grid {width}x{height} must hold at least 2 agents")]
    Grid { width: usize, height: usize },
    #[error("p_change must be in (0, 1], got {0}")]
    PChange(f64),
    #[error("eta must be positive, got {0}")]
    Eta(f64),
    #[error("p_create_init must be in [0, 1], got {0}")]
    PCreateInit(f64),
}

/// Lattice cell address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coord {
    pub x: usize,
    pub y: usize,
}

/// The four orthogonal neighbors with toroidal wraparound, in fixed
/// N, E, S, W order. Random visiting order is the imitator's business.
pub fn neighbors(c: Coord, width: usize, height: usize) -> [Coord; 4] {
    [
        Coord {
            x: c.x,
            y: (c.y + height - 1) % height,
        },
        Coord {
            x: (c.x + 1) % width,
            y: c.y,
        },
        Coord {
            x: c.x,
            y: (c.y + 1) % height,
        },
        Coord {
            x: (c.x + width - 1) % width,
            y: c.y,
        },
    ]
}

/// One live run: the lattice of agents plus everything derived from the
/// parameters (scoring table, optimum set, seeded random stream).
///
/// All randomness flows through the single run-level stream, consumed in
/// fixed row-major agent order, so a run is bit-reproducible from its params.
pub struct Simulation {
    params: SimParams,
    ctx: FitnessContext,
    optima: OptimumSet,
    neighbor_indices: Vec<[usize; 4]>,
    agents: Vec<AgentState>,
    iteration: usize,
    rng: ChaCha8Rng,
    prev_mean_fitness: f64,
}

impl Simulation {
    /// Initializes the immobile society: every agent implements the
    /// single-step neutral chain with zeroed biases.
    pub fn new(params: SimParams) -> Result<Self, InvalidParams> {
        params.validate()?;
        let ctx = FitnessContext::new(params.rules());
        let optima = OptimumSet::for_rule(params.fitness_head_rule);
        let (w, h) = (params.grid_width, params.grid_height);
        let neighbor_indices = (0..w * h)
            .map(|i| {
                let c = Coord { x: i % w, y: i / w };
                neighbors(c, w, h).map(|n| n.y * w + n.x)
            })
            .collect();
        let agents: Vec<AgentState> = (0..w * h)
            .map(|_| AgentState::new(Chain::single(Action::neutral()), &ctx, params.p_create_init))
            .collect();
        let prev_mean_fitness = mean_fitness(&agents);
        Ok(Simulation {
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            params,
            ctx,
            optima,
            neighbor_indices,
            agents,
            iteration: 0,
            prev_mean_fitness,
        })
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn fitness_context(&self) -> &FitnessContext {
        &self.ctx
    }

    /// Metrics of the current state.
    pub fn record(&self) -> IterationRecord {
        IterationRecord::measure(self.iteration, &self.agents)
    }

    /// Executes one synchronous iteration and returns its metrics.
    ///
    /// Pipeline: self-regulation against the previous mean, snapshot of all
    /// implemented chains, then one invent-or-imitate turn per agent in
    /// row-major order. Neighbor lookups go through the snapshot, so
    /// adoptions commit synchronously: nothing an agent does this iteration
    /// is visible to its neighbors until the next one.
    pub fn step(&mut self) -> IterationRecord {
        if self.params.sr_enabled {
            for agent in &mut self.agents {
                let rf = relative_fitness(agent.fitness(), self.prev_mean_fitness);
                agent.self_regulate(rf);
            }
        }

        let snapshot: Vec<(Chain, Fitness)> = self
            .agents
            .iter()
            .map(|a| (a.chain().clone(), a.fitness()))
            .collect();

        for i in 0..self.agents.len() {
            let u: f64 = self.rng.random();
            let candidate = if u < self.agents[i].p_create() {
                Some(invent(
                    &self.agents[i],
                    self.params.p_change,
                    self.params.chaining_enabled,
                    &self.optima,
                    &mut self.rng,
                ))
            } else {
                let around = &self.neighbor_indices[i];
                let neighbor_chains: Vec<(&Chain, Fitness)> = around
                    .iter()
                    .map(|&j| (&snapshot[j].0, snapshot[j].1))
                    .collect();
                imitate(&self.agents[i], &neighbor_chains, &mut self.rng).cloned()
            };
            if let Some(candidate) = candidate {
                if let AdoptionOutcome::Adopted {
                    old_terms,
                    new_terms,
                } = self.agents[i].try_adopt(candidate, &self.ctx)
                {
                    self.agents[i].learn(&old_terms, &new_terms, self.params.eta);
                }
            }
        }

        self.prev_mean_fitness = mean_fitness(&self.agents);
        self.iteration += 1;
        self.record()
    }

    /// Runs `params.iterations` steps from a fresh world and collects the
    /// full time series (the initial state is record 0).
    pub fn run(params: SimParams) -> Result<TimeSeries, InvalidParams> {
        let mut sim = Simulation::new(params)?;
        let mut records = Vec::with_capacity(params.iterations + 1);
        records.push(sim.record());
        for _ in 0..params.iterations {
            records.push(sim.step());
        }
        let final_p_create = sim.agents.iter().map(|a| a.p_create()).collect();
        Ok(TimeSeries {
            params,
            records,
            final_p_create,
        })
    }
}
