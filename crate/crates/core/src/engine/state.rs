use serde::{Deserialize, Serialize};

use super::individual::Individual;
use super::mask::GeneMask;
use super::penalty::PenaltyController;
use super::problem::{MigrantCrossover, Scope};
use crate::partnering::ToroidalGrid;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct SubPopulation<F> {
    pub id: usize,
    pub mask: GeneMask,
    pub scope: Scope,
    /// 0 for bottom populations.
    pub level: usize,
    pub lower_partners: Vec<usize>,
    pub individuals: Vec<Individual<F>>,
    pub size: usize,
    pub penalty: PenaltyController<F>,
    /// Best individual ever held, under the weight-independent quality order.
    pub best_ever: Option<Individual<F>>,
    /// Best penalized fitness ever observed in this population.
    pub best_penalized_seen: Option<F>,
    pub stale_generations: usize,
}

impl<F: Scalar> SubPopulation<F> {
    pub fn is_bottom(&self) -> bool {
        self.lower_partners.is_empty()
    }
}

/// The whole hierarchy of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct PyramidState<F> {
    pub populations: Vec<SubPopulation<F>>,
    pub top: usize,
    pub gene_count: usize,
    pub migrant_crossover: MigrantCrossover,
    pub generation: usize,
    pub grid: Option<ToroidalGrid>,
    /// Bottom populations tiling the complement of each population's mask.
    /// Only filled under partnered evaluation.
    pub complements: Vec<Vec<usize>>,
    /// Best feasible full solution seen in any full-fitness population.
    pub best_feasible: Option<Individual<F>>,
    /// Total improving moves applied by a refiner.
    pub refine_moves: usize,
    pub(crate) last_refined: Option<Vec<u32>>,
}

impl<F: Scalar> PyramidState<F> {
    pub fn top_population(&self) -> &SubPopulation<F> {
        &self.populations[self.top]
    }

    pub fn total_individuals(&self) -> usize {
        self.populations.iter().map(|p| p.individuals.len()).sum()
    }
}
