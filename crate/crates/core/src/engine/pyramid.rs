use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::PyramidConfig;
use super::individual::{best_index, quality_cmp, Evaluation, Individual};
use super::operators::{cross_level_crossover, mutate, one_point_crossover, uniform_crossover, RankTable};
use super::penalty::PenaltyController;
use super::problem::{MigrantCrossover, Problem, Scope, Topology};
use super::state::{PyramidState, SubPopulation};
use crate::error::{PyramidError, Result};
use crate::partnering::{
    evaluate_with_partners, joined_topology, select_mate, EvalMode, MatingKind, Strategies,
    ToroidalGrid,
};
use crate::scalar::{Scalar, Sense};

/// Local improvement applied to full solutions of the top population.
pub trait Refiner<F>: Sync {
    /// Improves `genes` in place. Returns `None` when the solution is not
    /// eligible, otherwise the number of improving moves made.
    fn refine(&self, genes: &mut Vec<u32>, weight: F) -> Option<usize>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct TraceRow<F> {
    pub generation: usize,
    pub top_best_penalized: F,
    pub top_best_raw: F,
    pub top_best_violation: F,
    pub best_feasible_raw: Option<F>,
    pub top_weight: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct RunResult<F> {
    /// Best feasible full solution, if any was found.
    pub best_feasible: Option<Individual<F>>,
    /// Best top-level individual under the quality order.
    pub best_overall: Individual<F>,
    pub generations: usize,
    pub trace: Vec<TraceRow<F>>,
    pub timed_out: bool,
    pub refine_moves: usize,
}

/// Genes of a child and its evaluation when the mating step already made one.
type Child<F> = (Vec<u32>, Option<Evaluation<F>>);

impl<F: Scalar> RunResult<F> {
    pub fn is_feasible(&self) -> bool {
        self.best_feasible.is_some()
    }
}

/// Per-generation lookup tables built from the parent generation.
pub struct Breeding<'s, F> {
    pub state: &'s PyramidState<F>,
    pub ranks: Vec<RankTable>,
    pub best: Vec<usize>,
}

impl<'s, F: Scalar> Breeding<'s, F> {
    pub fn new(sense: Sense, state: &'s PyramidState<F>) -> Self {
        let ranks = state
            .populations
            .iter()
            .map(|p| RankTable::new(sense, &p.individuals))
            .collect();
        let best = state
            .populations
            .iter()
            .map(|p| best_index(sense, &p.individuals).unwrap_or(0))
            .collect();
        Self { state, ranks, best }
    }
}

/// The pyramidal coevolutionary GA bound to one problem and strategy pair.
pub struct Engine<'p, F, P: ?Sized> {
    pub problem: &'p P,
    pub config: PyramidConfig<F>,
    pub strategies: Strategies,
}

impl<'p, F: Scalar, P: Problem<F> + ?Sized> Engine<'p, F, P> {
    pub fn new(problem: &'p P, config: PyramidConfig<F>, strategies: Strategies) -> Self {
        Self { problem, config, strategies }
    }

    pub fn sense(&self) -> Sense {
        self.problem.sense()
    }

    /// Builds and evaluates the initial populations.
    ///
    /// Under the joined strategy the given topology is first rewritten so
    /// every population works on the full problem.
    pub fn init<R: Rng + ?Sized>(&self, topology: &Topology, rng: &mut R) -> Result<PyramidState<F>> {
        let joined;
        let topology = if self.strategies.mating.kind == MatingKind::Joined {
            joined = joined_topology(topology);
            &joined
        } else {
            topology
        };
        let gene_count = self.problem.gene_count();
        topology.validate(gene_count)?;
        self.config.validate(topology.populations.len())?;
        for gene in 0..gene_count {
            if self.problem.alleles(gene).is_empty() {
                return Err(PyramidError::InvalidInstance(format!(
                    "gene {gene} has no feasible allele"
                )));
            }
        }
        if self.strategies.mating.choice_candidates == 0 {
            return Err(PyramidError::Config("choice strategy needs at least one candidate".into()));
        }

        let grid = if self.strategies.uses_grid() {
            let cells = if topology.populations.len() > 1 {
                self.config.sub_population_size
            } else {
                self.config.top_population_size
            };
            Some(ToroidalGrid::for_size(cells)?)
        } else {
            None
        };

        let levels = topology.levels();
        let sense = self.sense();
        let mut populations = Vec::with_capacity(topology.populations.len());
        for (id, spec) in topology.populations.iter().enumerate() {
            let size = if id == topology.top {
                self.config.top_population_size
            } else {
                self.config.sub_population_size
            };
            let individuals = (0..size)
                .map(|_| {
                    let genes: Vec<u32> = spec
                        .mask
                        .members()
                        .iter()
                        .map(|&g| {
                            let range = self.problem.alleles(g);
                            range[rng.random_range(0..range.len())]
                        })
                        .collect();
                    let eval = self.problem.evaluate(spec.scope, &spec.mask, &genes);
                    Individual::evaluated(genes, eval, sense, F::one())
                })
                .collect();
            populations.push(SubPopulation {
                id,
                mask: spec.mask.clone(),
                scope: spec.scope,
                level: levels[id],
                lower_partners: spec.lower_partners.clone(),
                individuals,
                size,
                penalty: PenaltyController::new(F::one(), self.config.penalty),
                best_ever: None,
                best_penalized_seen: None,
                stale_generations: 0,
            });
        }

        let mut state = PyramidState {
            populations,
            top: topology.top,
            gene_count,
            migrant_crossover: topology.migrant_crossover,
            generation: 0,
            grid,
            complements: vec![Vec::new(); topology.populations.len()],
            best_feasible: None,
            refine_moves: 0,
            last_refined: None,
        };

        if let EvalMode::Partnered(_) = self.strategies.evaluation {
            state.complements = complements(&state)?;
            // Partners are ranked by their provisional substitute fitness.
            for pop in &mut state.populations {
                let w = initial_weight(&self.config, self.problem, pop, gene_count);
                pop.penalty = PenaltyController::new(w, self.config.penalty);
                for ind in &mut pop.individuals {
                    ind.repenalize(sense, w);
                }
            }
            let fresh: Vec<Vec<Evaluation<F>>> = {
                let breeding = Breeding::new(sense, &state);
                state
                    .populations
                    .iter()
                    .map(|pop| {
                        pop.individuals
                            .iter()
                            .enumerate()
                            .map(|(slot, ind)| {
                                self.evaluate_in(&breeding, pop.id, slot, &ind.genes, rng)
                            })
                            .collect()
                    })
                    .collect()
            };
            for (pop, evals) in state.populations.iter_mut().zip(fresh) {
                for (ind, eval) in pop.individuals.iter_mut().zip(evals) {
                    ind.raw = eval.raw;
                    ind.violation = eval.violation;
                }
            }
        }

        for pop in &mut state.populations {
            let w = initial_weight(&self.config, self.problem, pop, gene_count);
            pop.penalty = PenaltyController::new(w, self.config.penalty);
            for ind in &mut pop.individuals {
                ind.repenalize(sense, w);
            }
        }
        for id in 0..state.populations.len() {
            self.record_progress(&mut state, id);
        }
        for pop in &mut state.populations {
            pop.stale_generations = 0;
        }
        Ok(state)
    }

    /// The scope an individual of `pop` is actually scored with.
    pub fn effective_scope(&self, state: &PyramidState<F>, pop: usize) -> Scope {
        let p = &state.populations[pop];
        match self.strategies.evaluation {
            EvalMode::Partnered(_) if p.mask.is_full(state.gene_count) => Scope::Full,
            _ => p.scope,
        }
    }

    /// Scores a string destined for population `pop` at `slot`.
    pub fn evaluate_in<R: Rng + ?Sized>(
        &self,
        breeding: &Breeding<'_, F>,
        pop: usize,
        slot: usize,
        genes: &[u32],
        rng: &mut R,
    ) -> Evaluation<F> {
        let state = breeding.state;
        let p = &state.populations[pop];
        match self.strategies.evaluation {
            EvalMode::Partnered(kind) if !p.mask.is_full(state.gene_count) => {
                evaluate_with_partners(self, breeding, kind, pop, slot, genes, rng)
            }
            _ => self.problem.evaluate(self.effective_scope(state, pop), &p.mask, genes),
        }
    }

    /// Recombines member `lower_idx` of `lower_pop` into member `upper_idx`
    /// of `upper_pop`; the child carries the upper mask.
    pub fn combine<R: Rng + ?Sized>(
        &self,
        state: &PyramidState<F>,
        lower_pop: usize,
        lower_idx: usize,
        upper_pop: usize,
        upper_idx: usize,
        rng: &mut R,
    ) -> Vec<u32> {
        let lower = &state.populations[lower_pop];
        let upper = &state.populations[upper_pop];
        let lg = &lower.individuals[lower_idx].genes;
        let ug = &upper.individuals[upper_idx].genes;
        if lower.mask == upper.mask {
            match state.migrant_crossover {
                MigrantCrossover::OnePoint => {
                    let cut = rng.random_range(0..=lg.len());
                    one_point_crossover(lg, ug, cut).expect("equal masks")
                }
                MigrantCrossover::Uniform => {
                    uniform_crossover(ug, lg, self.config.uniform_p, rng).expect("equal masks").0
                }
            }
        } else {
            cross_level_crossover(lg, &lower.mask, ug, &upper.mask)
                .expect("topology validated lower masks as subsets")
        }
    }

    /// One generational step.
    pub fn step<R: Rng + ?Sized>(&self, state: &mut PyramidState<F>, rng: &mut R) {
        self.step_with(state, rng, None);
    }

    /// One generational step, refining the top population's best solution
    /// before bookkeeping when a refiner is given.
    pub fn step_with<R: Rng + ?Sized>(
        &self,
        state: &mut PyramidState<F>,
        rng: &mut R,
        refiner: Option<&dyn Refiner<F>>,
    ) {
        let next: Vec<Vec<Individual<F>>> = {
            let breeding = Breeding::new(self.sense(), state);
            (0..state.populations.len()).map(|id| self.breed(&breeding, id, rng)).collect()
        };
        for (pop, individuals) in state.populations.iter_mut().zip(next) {
            pop.individuals = individuals;
        }
        if let Some(refiner) = refiner {
            self.refine_top(state, refiner);
        }
        let sense = self.sense();
        for id in 0..state.populations.len() {
            let pop = &mut state.populations[id];
            let w = pop.penalty.update(sense, &pop.individuals);
            for ind in &mut pop.individuals {
                ind.repenalize(sense, w);
            }
            self.record_progress(state, id);
        }
        state.generation += 1;
    }

    fn breed<R: Rng + ?Sized>(&self, breeding: &Breeding<'_, F>, id: usize, rng: &mut R) -> Vec<Individual<F>> {
        let state = breeding.state;
        let pop = &state.populations[id];
        let sense = self.sense();
        let n = pop.individuals.len();
        let weight = pop.penalty.weight();

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            sense.compare(pop.individuals[a].penalized, pop.individuals[b].penalized).then(a.cmp(&b))
        });
        let elite = self.config.elite_count(n);
        let mut slots: Vec<Option<Individual<F>>> = vec![None; n];
        for &i in &order[..elite] {
            slots[i] = Some(pop.individuals[i].clone());
        }
        let mut free: Vec<usize> = (0..n).filter(|&i| slots[i].is_none()).collect();

        while !free.is_empty() {
            let cross_level = !pop.is_bottom() && rng.random_bool(0.5);
            let (anchor, children): (usize, Vec<Child<F>>) = if cross_level {
                let partner_pop = pop.lower_partners[rng.random_range(0..pop.lower_partners.len())];
                let first = breeding.ranks[id].sample(rng);
                let choice = select_mate(self, breeding, (id, first), partner_pop, rng);
                let child = match choice.child {
                    Some(genes) => (genes, choice.child_eval),
                    None => (self.combine(state, partner_pop, choice.partner, id, first, rng), None),
                };
                (first, vec![child])
            } else {
                let a = breeding.ranks[id].sample(rng);
                let b = breeding.ranks[id].sample(rng);
                let (c1, c2) = uniform_crossover(
                    &pop.individuals[a].genes,
                    &pop.individuals[b].genes,
                    self.config.uniform_p,
                    rng,
                )
                .expect("same population, same mask");
                if free.len() >= 2 {
                    (a, vec![(c1, None), (c2, None)])
                } else {
                    (a, vec![(c1, None)])
                }
            };
            for (mut genes, pre_eval) in children {
                let slot = self.place(state, anchor, &mut free, rng);
                let changed = mutate(
                    &mut genes,
                    &pop.mask,
                    self.config.mutation_rate,
                    |g| self.problem.alleles(g),
                    rng,
                );
                let eval = match pre_eval {
                    Some(e) if !changed => e,
                    _ => self.evaluate_in(breeding, id, slot, &genes, rng),
                };
                slots[slot] = Some(Individual::evaluated(genes, eval, sense, weight));
            }
        }
        slots.into_iter().map(|s| s.expect("every slot filled")).collect()
    }

    /// Picks the slot for a child of the parent at `anchor`: next to the
    /// parent's grid cell under the distributed strategy, else the lowest
    /// free slot.
    fn place<R: Rng + ?Sized>(&self, state: &PyramidState<F>, anchor: usize, free: &mut Vec<usize>, rng: &mut R) -> usize {
        let pick = match &state.grid {
            Some(grid) => {
                let near = grid.neighbors(grid.cell_of(anchor));
                let candidates: Vec<usize> = (0..free.len())
                    .filter(|&k| near.contains(&grid.cell_of(free[k])))
                    .collect();
                if candidates.is_empty() {
                    rng.random_range(0..free.len())
                } else {
                    candidates[rng.random_range(0..candidates.len())]
                }
            }
            None => 0,
        };
        free.remove(pick)
    }

    fn refine_top(&self, state: &mut PyramidState<F>, refiner: &dyn Refiner<F>) {
        let sense = self.sense();
        let top = state.top;
        let pop = &state.populations[top];
        let Some(best) = best_index(sense, &pop.individuals) else { return };
        if state.last_refined.as_ref() == Some(&pop.individuals[best].genes) {
            return;
        }
        let weight = pop.penalty.weight();
        let mut genes = pop.individuals[best].genes.clone();
        if let Some(moves) = refiner.refine(&mut genes, weight) {
            if moves > 0 {
                let eval = self.problem.evaluate(Scope::Full, &pop.mask, &genes);
                state.populations[top].individuals[best] = Individual::evaluated(genes.clone(), eval, sense, weight);
                state.refine_moves += moves;
            }
            state.last_refined = Some(genes);
        }
    }

    fn record_progress(&self, state: &mut PyramidState<F>, id: usize) {
        let sense = self.sense();
        let full_fitness = self.effective_scope(state, id) == Scope::Full;
        let pop = &mut state.populations[id];
        let mut improved = false;
        for ind in &pop.individuals {
            if pop.best_penalized_seen.is_none_or(|b| sense.better(ind.penalized, b)) {
                pop.best_penalized_seen = Some(ind.penalized);
            }
            let better = match &pop.best_ever {
                None => true,
                Some(b) => quality_cmp(sense, ind, b).is_lt(),
            };
            if better {
                pop.best_ever = Some(ind.clone());
                improved = true;
            }
            if full_fitness
                && ind.is_feasible()
                && state.best_feasible.as_ref().is_none_or(|b| sense.better(ind.raw, b.raw))
            {
                state.best_feasible = Some(ind.clone());
            }
        }
        if improved {
            pop.stale_generations = 0;
        } else {
            pop.stale_generations += 1;
        }
    }

    /// Evolves until the top population stops improving.
    pub fn run<R: Rng + ?Sized>(
        &self,
        state: &mut PyramidState<F>,
        rng: &mut R,
        refiner: Option<&dyn Refiner<F>>,
    ) -> RunResult<F> {
        let started = Instant::now();
        let mut trace = Vec::new();
        let mut timed_out = false;
        let limit = self.config.stagnation_limit;
        loop {
            if state.populations[state.top].stale_generations >= limit {
                break;
            }
            if self.config.max_generations.is_some_and(|m| state.generation >= m) {
                break;
            }
            if self
                .config
                .time_limit_secs
                .is_some_and(|t| started.elapsed().as_secs_f64() >= t)
            {
                timed_out = true;
                break;
            }
            self.step_with(state, rng, refiner);
            trace.push(self.trace_row(state));
        }
        if let Some(refiner) = refiner {
            self.refine_final(state, refiner);
        }
        let sense = self.sense();
        let best_overall = state.populations[state.top]
            .best_ever
            .clone()
            .expect("initialised populations have a best");
        let best_overall = match &state.best_feasible {
            Some(bf) if quality_cmp(sense, bf, &best_overall).is_lt() => bf.clone(),
            _ => best_overall,
        };
        RunResult {
            best_feasible: state.best_feasible.clone(),
            best_overall,
            generations: state.generation,
            trace,
            timed_out,
            refine_moves: state.refine_moves,
        }
    }

    fn refine_final(&self, state: &mut PyramidState<F>, refiner: &dyn Refiner<F>) {
        let sense = self.sense();
        let top = &state.populations[state.top];
        let Some(best) = top.best_ever.clone() else { return };
        let weight = top.penalty.weight();
        let mask = top.mask.clone();
        let mut genes = best.genes.clone();
        if let Some(moves) = refiner.refine(&mut genes, weight) {
            if moves == 0 {
                return;
            }
            state.refine_moves += moves;
            let eval = self.problem.evaluate(Scope::Full, &mask, &genes);
            let refined = Individual::evaluated(genes, eval, sense, weight);
            if refined.is_feasible()
                && state.best_feasible.as_ref().is_none_or(|b| sense.better(refined.raw, b.raw))
            {
                state.best_feasible = Some(refined.clone());
            }
            let top = &mut state.populations[state.top];
            if quality_cmp(sense, &refined, &best).is_lt() {
                top.best_ever = Some(refined);
            }
        }
    }

    fn trace_row(&self, state: &PyramidState<F>) -> TraceRow<F> {
        let top = &state.populations[state.top];
        let best = &top.individuals[best_index(self.sense(), &top.individuals).unwrap_or(0)];
        TraceRow {
            generation: state.generation,
            top_best_penalized: best.penalized,
            top_best_raw: best.raw,
            top_best_violation: best.violation,
            best_feasible_raw: state.best_feasible.as_ref().map(|b| b.raw),
            top_weight: top.penalty.weight(),
        }
    }
}

fn initial_weight<F: Scalar, P: Problem<F> + ?Sized>(
    config: &PyramidConfig<F>,
    problem: &P,
    pop: &SubPopulation<F>,
    gene_count: usize,
) -> F {
    if let Some(w) = config.penalty.initial.or_else(|| problem.penalty_hint()) {
        return w;
    }
    let genes = if pop.scope == Scope::Full { gene_count } else { pop.mask.len() }.max(1);
    let n = pop.individuals.len().max(1);
    let total = pop.individuals.iter().fold(F::zero(), |acc, i| acc + i.raw.abs());
    total / F::of_count(n * genes)
}

/// For every population whose mask is a proper subset, the disjoint bottom
/// populations that together cover the rest of the string.
fn complements<F: Scalar>(state: &PyramidState<F>) -> Result<Vec<Vec<usize>>> {
    let n = state.gene_count;
    let mut out = Vec::with_capacity(state.populations.len());
    for pop in &state.populations {
        if pop.mask.is_full(n) {
            out.push(Vec::new());
            continue;
        }
        let mut covered = vec![false; n];
        for &g in pop.mask.members() {
            covered[g] = true;
        }
        let mut chosen = Vec::new();
        for other in &state.populations {
            if other.id == pop.id || !other.is_bottom() || other.mask.is_full(n) {
                continue;
            }
            if other.mask.members().iter().all(|&g| !covered[g]) {
                for &g in other.mask.members() {
                    covered[g] = true;
                }
                chosen.push(other.id);
            }
        }
        if covered.iter().any(|c| !c) {
            return Err(PyramidError::Config(format!(
                "no set of bottom populations completes population {}",
                pop.id
            )));
        }
        out.push(chosen);
    }
    Ok(out)
}
