use serde::{Deserialize, Serialize};

use crate::error::{PyramidError, Result};
use crate::scalar::Scalar;

/// Constants of the adaptive penalty rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct PenaltyParams<F> {
    /// Starting weight. `None` falls back to the problem's hint, then to the
    /// mean per-gene objective magnitude of the initial population.
    pub initial: Option<F>,
    pub growth: F,
    pub decay: F,
    pub delta: F,
    pub min: F,
    pub max: F,
}

impl<F: Scalar> Default for PenaltyParams<F> {
    fn default() -> Self {
        Self {
            initial: None,
            growth: F::of(1.1),
            decay: F::of(0.99),
            delta: F::one(),
            min: F::one(),
            max: F::of(1e6),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct PyramidConfig<F> {
    pub total_population: usize,
    pub sub_population_size: usize,
    pub top_population_size: usize,
    /// Probability that a gene of the first child comes from the first parent.
    pub uniform_p: f64,
    pub mutation_rate: f64,
    /// Fraction of each population replaced by offspring every generation.
    pub replacement_fraction: f64,
    pub stagnation_limit: usize,
    /// Hard cap on generations, on top of the stagnation rule.
    pub max_generations: Option<usize>,
    /// Wall-clock safety valve in seconds. Runs stopped by it are flagged.
    pub time_limit_secs: Option<f64>,
    /// Rejections tolerated by the attractiveness strategy before it accepts.
    pub attract_retries: usize,
    pub rng_seed: u64,
    pub penalty: PenaltyParams<F>,
}

impl<F: Scalar> PyramidConfig<F> {
    /// Seven populations of 100 plus a top population of 300.
    pub fn nurse() -> Self {
        Self::with_sizes(1000, 100, 300)
    }

    /// Five area populations of 100 plus a top population of 500.
    pub fn mall() -> Self {
        Self::with_sizes(1000, 100, 500)
    }

    /// A single population holding everything.
    pub fn single(total: usize) -> Self {
        Self::with_sizes(total, 0, total)
    }

    pub fn with_sizes(total: usize, sub: usize, top: usize) -> Self {
        Self {
            total_population: total,
            sub_population_size: sub,
            top_population_size: top,
            uniform_p: 0.66,
            mutation_rate: 0.01,
            replacement_fraction: 0.90,
            stagnation_limit: 50,
            max_generations: None,
            time_limit_secs: None,
            attract_retries: 20,
            rng_seed: 0,
            penalty: PenaltyParams::default(),
        }
    }

    /// Sizes for a topology of `populations` populations (one of them the top),
    /// giving the top roughly `top_share` of the total.
    pub fn scaled(total: usize, populations: usize, top_share: f64) -> Self {
        if populations <= 1 {
            return Self::single(total);
        }
        let top_guess = ((total as f64 * top_share).round() as usize).min(total);
        let sub = (total - top_guess) / (populations - 1);
        Self::with_sizes(total, sub, total - sub * (populations - 1))
    }

    /// Number of survivors kept unchanged in a population of `size`.
    pub fn elite_count(&self, size: usize) -> usize {
        let keep = (1.0 - self.replacement_fraction) * size as f64;
        ((keep - 1e-9).ceil().max(0.0) as usize).min(size)
    }

    pub fn validate(&self, populations: usize) -> Result<()> {
        if !(self.uniform_p > 0.0 && self.uniform_p <= 1.0) {
            return Err(PyramidError::Config(format!("uniform_p {} not in (0, 1]", self.uniform_p)));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(PyramidError::Config(format!(
                "mutation_rate {} not in [0, 1]",
                self.mutation_rate
            )));
        }
        if !(self.replacement_fraction > 0.0 && self.replacement_fraction < 1.0) {
            return Err(PyramidError::Config(format!(
                "replacement_fraction {} not in (0, 1)",
                self.replacement_fraction
            )));
        }
        if populations == 0 {
            return Err(PyramidError::Config("topology has no populations".into()));
        }
        let sum = self.sub_population_size * (populations - 1) + self.top_population_size;
        if sum != self.total_population {
            return Err(PyramidError::Config(format!(
                "population sizes sum to {sum}, expected total {}",
                self.total_population
            )));
        }
        if self.top_population_size == 0 || (populations > 1 && self.sub_population_size == 0) {
            return Err(PyramidError::Config("population sizes must be positive".into()));
        }
        let p = &self.penalty;
        if !(p.min > F::zero() && p.min <= p.max) {
            return Err(PyramidError::Config("penalty bounds must satisfy 0 < min <= max".into()));
        }
        Ok(())
    }
}
