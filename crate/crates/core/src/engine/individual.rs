use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::scalar::{Scalar, Sense};

/// Raw objective and total constraint violation of a (partial) solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation<F> {
    pub raw: F,
    pub violation: F,
}

impl<F: Scalar> Evaluation<F> {
    pub fn new(raw: F, violation: F) -> Self {
        Self { raw, violation }
    }

    pub fn is_feasible(&self) -> bool {
        self.violation <= F::zero()
    }

    pub fn penalized(&self, sense: Sense, weight: F) -> F {
        sense.penalize(self.raw, weight, self.violation)
    }
}

/// An allele string over its population's gene mask plus cached fitness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual<F> {
    pub genes: Vec<u32>,
    pub raw: F,
    pub violation: F,
    pub penalized: F,
}

impl<F: Scalar> Individual<F> {
    pub fn evaluated(genes: Vec<u32>, eval: Evaluation<F>, sense: Sense, weight: F) -> Self {
        Self {
            genes,
            raw: eval.raw,
            violation: eval.violation,
            penalized: eval.penalized(sense, weight),
        }
    }

    pub fn evaluation(&self) -> Evaluation<F> {
        Evaluation::new(self.raw, self.violation)
    }

    pub fn is_feasible(&self) -> bool {
        self.violation <= F::zero()
    }

    pub fn repenalize(&mut self, sense: Sense, weight: F) {
        self.penalized = sense.penalize(self.raw, weight, self.violation);
    }
}

/// Weight-independent quality order: feasible beats infeasible, feasible
/// solutions compare on raw objective, infeasible ones on violation first.
/// `Less` means `a` is better.
pub fn quality_cmp<F: Scalar>(sense: Sense, a: &Individual<F>, b: &Individual<F>) -> Ordering {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => sense.compare(a.raw, b.raw),
        (false, false) => Sense::Minimize
            .compare(a.violation, b.violation)
            .then_with(|| sense.compare(a.raw, b.raw)),
    }
}

/// Index of the best individual by penalized fitness, lowest index on ties.
pub fn best_index<F: Scalar>(sense: Sense, individuals: &[Individual<F>]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, ind) in individuals.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if sense.better(ind.penalized, individuals[b].penalized) => best = Some(i),
            _ => {}
        }
    }
    best
}
