use rand::seq::index::sample;
use rand::Rng;

use super::MatingKind;
use crate::engine::{Breeding, Engine, Evaluation, Problem};
use crate::scalar::{Scalar, Sense};

/// The second parent picked for a cross-level crossover.
///
/// Strategies that judge a pairing by its child (attractiveness, choice)
/// hand back that child and its evaluation so the engine does not rebuild it.
#[derive(Debug, Clone, PartialEq)]
pub struct MateChoice<F> {
    pub partner: usize,
    pub child: Option<Vec<u32>>,
    pub child_eval: Option<Evaluation<F>>,
}

impl<F> MateChoice<F> {
    fn plain(partner: usize) -> Self {
        Self { partner, child: None, child_eval: None }
    }
}

/// Probability of accepting a pairing whose child scores `combined` when the
/// best known score is `best`. Pairings that match or beat the best are
/// always accepted; otherwise the ratio of the two, oriented so it is below
/// one. Non-positive scores cannot form a meaningful ratio and give 0.
pub fn acceptance_probability<F: Scalar>(sense: Sense, combined: F, best: F) -> f64 {
    if !sense.better(best, combined) {
        return 1.0;
    }
    let (num, den) = match sense {
        Sense::Minimize => (best, combined),
        Sense::Maximize => (combined, best),
    };
    if num <= F::zero() || den <= F::zero() {
        return 0.0;
    }
    (num / den).as_f64().clamp(0.0, 1.0)
}

/// Chooses the partner in `partner_pop` for member `first.1` of population
/// `first.0`.
pub fn select_mate<F, P, R>(
    engine: &Engine<'_, F, P>,
    breeding: &Breeding<'_, F>,
    first: (usize, usize),
    partner_pop: usize,
    rng: &mut R,
) -> MateChoice<F>
where
    F: Scalar,
    P: Problem<F> + ?Sized,
    R: Rng + ?Sized,
{
    let state = breeding.state;
    let (upper, first_idx) = first;
    let partners = &state.populations[partner_pop];
    let size = partners.individuals.len();
    let sense = engine.sense();
    match engine.strategies.mating.kind {
        MatingKind::RankSelection | MatingKind::Joined => {
            MateChoice::plain(breeding.ranks[partner_pop].sample(rng))
        }
        MatingKind::Random => MateChoice::plain(rng.random_range(0..size)),
        MatingKind::Best => MateChoice::plain(breeding.best[partner_pop]),
        MatingKind::Distributed => {
            let grid = state.grid.as_ref().expect("distributed mating runs with a grid");
            let cell = grid.cell_of(first_idx);
            let occupants: Vec<usize> = grid.slots_on(cell, size).collect();
            let partner = if occupants.is_empty() {
                rng.random_range(0..size)
            } else {
                occupants[rng.random_range(0..occupants.len())]
            };
            MateChoice::plain(partner)
        }
        MatingKind::Attractiveness => {
            let weight = state.populations[upper].penalty.weight();
            let best = state.populations[upper].best_penalized_seen;
            let retries = engine.config.attract_retries;
            let mut attempt = 0;
            loop {
                let candidate = breeding.ranks[partner_pop].sample(rng);
                let child = engine.combine(state, partner_pop, candidate, upper, first_idx, rng);
                let eval = engine.evaluate_in(breeding, upper, first_idx, &child, rng);
                let combined = eval.penalized(sense, weight);
                let p = best.map_or(1.0, |b| acceptance_probability(sense, combined, b));
                if attempt >= retries || p >= 1.0 || rng.random::<f64>() < p {
                    return MateChoice { partner: candidate, child: Some(child), child_eval: Some(eval) };
                }
                attempt += 1;
            }
        }
        MatingKind::Choice => {
            let weight = state.populations[upper].penalty.weight();
            let k = engine.strategies.mating.choice_candidates.min(size);
            let mut best: Option<(usize, Vec<u32>, Evaluation<F>, F)> = None;
            for candidate in sample(rng, size, k).into_vec() {
                let child = engine.combine(state, partner_pop, candidate, upper, first_idx, rng);
                let eval = engine.evaluate_in(breeding, upper, first_idx, &child, rng);
                let score = eval.penalized(sense, weight);
                if best.as_ref().is_none_or(|b| sense.better(score, b.3)) {
                    best = Some((candidate, child, eval, score));
                }
            }
            let (partner, child, eval, _) = best.expect("at least one candidate");
            MateChoice { partner, child: Some(child), child_eval: Some(eval) }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_or_better_is_accepted() {
        assert_eq!(acceptance_probability(Sense::Minimize, 10.0, 10.0), 1.0);
        assert_eq!(acceptance_probability(Sense::Minimize, 8.0, 10.0), 1.0);
        assert_eq!(acceptance_probability(Sense::Maximize, 2640.0, 2640.0), 1.0);
    }

    #[test]
    fn ratio_follows_sense() {
        assert_eq!(acceptance_probability(Sense::Maximize, 1320.0, 2640.0), 0.5);
        assert_eq!(acceptance_probability(Sense::Minimize, 40.0, 10.0), 0.25);
        assert_eq!(acceptance_probability(Sense::Maximize, -5.0, 10.0), 0.0);
    }
}
