//! Mall tenant selection: one shop type per location, rent driven by area
//! attractiveness, shop counts, shop sizes and neighbouring synergy.

mod generate;
mod instance;
mod rent;

pub use generate::{generate_mall_instance, MallGenParams};
pub use instance::{CountBounds, MallInstance, MallTables};
pub use rent::{area_sub_fitness, count_factor, full_rent, size_decompose, MallFitness, ShopMix};

use crate::engine::{Evaluation, GeneMask, MigrantCrossover, PopulationSpec, Problem, Scope, Topology};
use crate::error::{PyramidError, Result};
use crate::scalar::{Scalar, Sense};

/// `type_of[l]` is the shop type at location `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MallSolution {
    pub type_of: Vec<u32>,
}

impl MallSolution {
    pub fn new(instance: &MallInstance, type_of: Vec<u32>) -> Result<Self> {
        if type_of.len() != instance.locations() {
            return Err(PyramidError::Contract("one shop type per location required".into()));
        }
        if let Some(l) = type_of.iter().position(|&t| t as usize >= instance.types()) {
            return Err(PyramidError::Contract(format!("location {l} holds an unknown type")));
        }
        Ok(Self { type_of })
    }
}

impl<F: Scalar> Problem<F> for MallInstance {
    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn gene_count(&self) -> usize {
        self.locations()
    }

    fn alleles(&self, _gene: usize) -> &[u32] {
        self.type_ids()
    }

    fn evaluate(&self, scope: Scope, _mask: &GeneMask, genes: &[u32]) -> Evaluation<F> {
        let f = match scope {
            Scope::Full => full_rent(self, genes, 0.0),
            Scope::Partial(area) => rent::area_sub_fitness_unchecked(self, usize::from(area), genes, 0.0),
        };
        Evaluation::new(F::of(f.raw), F::of(f64::from(f.violation)))
    }

    fn penalty_hint(&self) -> Option<F> {
        Some(F::of(self.penalty_weight_init()))
    }
}

/// One population per area at the bottom and the whole mall on top.
pub fn pyramid_topology(instance: &MallInstance) -> Result<Topology> {
    let n = instance.locations();
    let areas = instance.areas();
    let mut populations = (0..areas)
        .map(|a| {
            Ok(PopulationSpec {
                mask: GeneMask::new(instance.area_range(a).collect(), n)?,
                scope: Scope::Partial(a as u16),
                lower_partners: Vec::new(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    populations.push(PopulationSpec { mask: GeneMask::full(n), scope: Scope::Full, lower_partners: (0..areas).collect() });
    Ok(Topology { populations, top: areas, migrant_crossover: MigrantCrossover::OnePoint })
}
