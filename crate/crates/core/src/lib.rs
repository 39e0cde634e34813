//! Hierarchical ("pyramidal") coevolutionary genetic algorithm.
//!
//! Sub-populations optimise nested portions of a multiple-choice assignment
//! string and pass partial solutions upwards through cross-level crossover.
//! Recombination and evaluation partners are chosen by interchangeable
//! strategies. Two problems ship with the crate: nurse scheduling
//! ([`nurse`]) and mall tenant selection ([`mall`]).
//!
//! The engine is generic over the fitness [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`.

pub mod engine;
pub mod error;
pub mod mall;
pub mod nurse;
pub mod partnering;
pub mod scalar;
pub mod selftest;

pub use engine::{
    Engine, Evaluation, GeneMask, Individual, MigrantCrossover, PenaltyController, PenaltyParams,
    PopulationSpec, Problem, PyramidConfig, PyramidState, Refiner, RunResult, Scope, SubPopulation,
    Topology,
};
pub use error::{PyramidError, Result};
pub use partnering::{EvalKind, EvalMode, MatingKind, MatingStrategy, Strategies, ToroidalGrid};
pub use scalar::{Scalar, Sense};

pub type Individual64 = Individual<f64>;
pub type Config64 = PyramidConfig<f64>;
pub type State64 = PyramidState<f64>;
pub type RunResult64 = RunResult<f64>;
pub type Individual32 = Individual<f32>;
pub type Config32 = PyramidConfig<f32>;
pub type State32 = PyramidState<f32>;
