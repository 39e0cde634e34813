use serde::{Deserialize, Serialize};

use super::config::PenaltyParams;
use super::individual::Individual;
use crate::scalar::{Scalar, Sense};

/// Per-population adaptive penalty weight.
///
/// Each generation the weight moves towards the value that makes the best
/// infeasible individual just worse than the best feasible one: it grows when
/// no feasible individual exists, decays when the raw-best individual is
/// already feasible, and is otherwise reset to the raw gap per unit of
/// violation plus `delta`. The weight always stays in `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct PenaltyController<F> {
    weight: F,
    params: PenaltyParams<F>,
    /// Raw objectives of the best feasible and best overall individuals seen
    /// at the last update.
    pub history: Option<(Option<F>, F)>,
}

impl<F: Scalar> PenaltyController<F> {
    pub fn new(initial: F, params: PenaltyParams<F>) -> Self {
        Self { weight: clamp(initial, params.min, params.max), params, history: None }
    }

    pub fn weight(&self) -> F {
        self.weight
    }

    pub fn params(&self) -> &PenaltyParams<F> {
        &self.params
    }

    /// Adjusts the weight from the current population and returns it.
    pub fn update(&mut self, sense: Sense, individuals: &[Individual<F>]) -> F {
        if individuals.is_empty() {
            return self.weight;
        }
        let best_overall = individuals
            .iter()
            .reduce(|a, b| if sense.better(b.raw, a.raw) { b } else { a })
            .expect("non-empty");
        let best_feasible = individuals
            .iter()
            .filter(|i| i.is_feasible())
            .reduce(|a, b| if sense.better(b.raw, a.raw) { b } else { a });

        let p = &self.params;
        let next = match best_feasible {
            None => self.weight * p.growth,
            Some(_) if best_overall.is_feasible() => self.weight * p.decay,
            Some(bf) => (bf.raw - best_overall.raw).abs() / best_overall.violation + p.delta,
        };
        self.history = Some((best_feasible.map(|i| i.raw), best_overall.raw));
        self.weight = clamp(next, p.min, p.max);
        self.weight
    }
}

fn clamp<F: Scalar>(v: F, lo: F, hi: F) -> F {
    if v.is_nan() {
        hi
    } else {
        v.max(lo).min(hi)
    }
}
