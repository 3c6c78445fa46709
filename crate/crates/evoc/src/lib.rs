//! Deterministic agent-based simulator of invention/imitation cultural
//! dynamics on a toroidal lattice.
//!
//! Agents implement actions (six body parts, three positions each), invent
//! variations biased by learned movement/symmetry trends, imitate fitter
//! neighbors, and optionally self-regulate how often they invent based on
//! how their output compares to the society mean. The [`harness`] module
//! runs seeded replicate batches and writes aggregate CSV/JSON/SVG outputs.

pub mod agent;
pub mod chart;
pub mod fitness;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod world;

pub use fitness::{DiscountRule, FitnessRules, HeadRule};
pub use model::{Action, BodyPart, Chain, Fitness, Position};
pub use world::{SimParams, Simulation};
