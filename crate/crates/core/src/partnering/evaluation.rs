use rand::Rng;

use super::{EvalKind, Picker};
use crate::engine::{Breeding, Engine, Evaluation, Problem, Scope};
use crate::scalar::{Scalar, Sense};

/// The better of two evaluations under `weight`; the first on ties.
pub fn better_of_two<F: Scalar>(
    sense: Sense,
    weight: F,
    first: Evaluation<F>,
    second: Evaluation<F>,
) -> Evaluation<F> {
    if sense.better(second.penalized(sense, weight), first.penalized(sense, weight)) {
        second
    } else {
        first
    }
}

/// Scores a partial solution by completing it with members of the bottom
/// populations that tile the rest of the string and evaluating the full
/// solution. Double strategies assemble two completions and keep the better.
pub fn evaluate_with_partners<F, P, R>(
    engine: &Engine<'_, F, P>,
    breeding: &Breeding<'_, F>,
    kind: EvalKind,
    subject_pop: usize,
    subject_slot: usize,
    genes: &[u32],
    rng: &mut R,
) -> Evaluation<F>
where
    F: Scalar,
    P: Problem<F> + ?Sized,
    R: Rng + ?Sized,
{
    let state = breeding.state;
    let sense = engine.sense();
    let subject = &state.populations[subject_pop];
    let full_mask = crate::engine::GeneMask::full(state.gene_count);

    let assemble = |picker: Picker, rng: &mut R| -> Evaluation<F> {
        let mut full = vec![0u32; state.gene_count];
        for (&g, &a) in subject.mask.members().iter().zip(genes) {
            full[g] = a;
        }
        for &c in &state.complements[subject_pop] {
            let pop = &state.populations[c];
            let size = pop.individuals.len();
            let idx = match picker {
                Picker::Rank => breeding.ranks[c].sample(rng),
                Picker::Random => rng.random_range(0..size),
                Picker::Best => breeding.best[c],
                Picker::Grid => {
                    let grid = state.grid.as_ref().expect("distributed evaluation runs with a grid");
                    let occupants: Vec<usize> =
                        grid.slots_on(grid.cell_of(subject_slot), size).collect();
                    if occupants.is_empty() {
                        rng.random_range(0..size)
                    } else {
                        occupants[rng.random_range(0..occupants.len())]
                    }
                }
            };
            for (&g, &a) in pop.mask.members().iter().zip(&pop.individuals[idx].genes) {
                full[g] = a;
            }
        }
        engine.problem.evaluate(Scope::Full, &full_mask, &full)
    };

    let (first, second) = kind.pickers();
    let a = assemble(first, rng);
    match second {
        None => a,
        Some(picker) => {
            let b = assemble(picker, rng);
            better_of_two(sense, subject.penalty.weight(), a, b)
        }
    }
}
