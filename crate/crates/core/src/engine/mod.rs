//! The generic pyramidal coevolutionary GA.

pub mod config;
pub mod individual;
pub mod mask;
pub mod operators;
pub mod penalty;
pub mod problem;
pub mod pyramid;
pub mod state;

pub use config::{PenaltyParams, PyramidConfig};
pub use individual::{best_index, quality_cmp, Evaluation, Individual};
pub use mask::GeneMask;
pub use operators::{
    cross_level_crossover, mutate, one_point_crossover, rank_roulette_select, rank_weights,
    uniform_crossover, RankTable,
};
pub use penalty::PenaltyController;
pub use problem::{MigrantCrossover, PopulationSpec, Problem, Scope, Topology};
pub use pyramid::{Breeding, Engine, Refiner, RunResult, TraceRow};
pub use state::{PyramidState, SubPopulation};
