use serde::{Deserialize, Serialize};

use super::individual::Evaluation;
use super::mask::GeneMask;
use crate::error::{PyramidError, Result};
use crate::scalar::{Scalar, Sense};

/// Which fitness function a population is judged by.
///
/// `Partial(k)` is a problem-defined substitute fitness: grade set `k` for
/// nurses, area `k` for the mall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scope {
    Full,
    Partial(u16),
}

/// A multiple-choice assignment problem the pyramid can optimise.
pub trait Problem<F: Scalar>: Sync {
    fn sense(&self) -> Sense;

    /// Length of a full solution string.
    fn gene_count(&self) -> usize;

    /// Feasible alleles of a gene. Never empty for a valid instance.
    fn alleles(&self, gene: usize) -> &[u32];

    /// Scores `genes`, one allele per member of `mask`. With `Scope::Full`
    /// the mask is the full index set.
    fn evaluate(&self, scope: Scope, mask: &GeneMask, genes: &[u32]) -> Evaluation<F>;

    /// Suggested starting penalty weight, if the instance carries one.
    fn penalty_hint(&self) -> Option<F> {
        None
    }
}

/// How a population recombines with a partner that shares its whole mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MigrantCrossover {
    /// Single random cut point along the shared gene ordering.
    OnePoint,
    /// Parameterised uniform crossover, as between two members of one population.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub mask: GeneMask,
    pub scope: Scope,
    /// Populations this one may draw its second parent from.
    pub lower_partners: Vec<usize>,
}

/// Shape of the sub-population hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub populations: Vec<PopulationSpec>,
    /// The population that solves the full problem and drives termination.
    pub top: usize,
    pub migrant_crossover: MigrantCrossover,
}

impl Topology {
    /// A standard GA: one population over the whole string.
    pub fn single(gene_count: usize) -> Self {
        Self {
            populations: vec![PopulationSpec {
                mask: GeneMask::full(gene_count),
                scope: Scope::Full,
                lower_partners: vec![],
            }],
            top: 0,
            migrant_crossover: MigrantCrossover::OnePoint,
        }
    }

    /// Checks the subset rule and that the top population covers everything.
    pub fn validate(&self, gene_count: usize) -> Result<()> {
        let n = self.populations.len();
        if n == 0 || self.top >= n {
            return Err(PyramidError::Config("topology needs a valid top population".into()));
        }
        let top = &self.populations[self.top];
        if !top.mask.is_full(gene_count) || top.scope != Scope::Full {
            return Err(PyramidError::Config(
                "top population must cover the full string with the full fitness".into(),
            ));
        }
        for (id, spec) in self.populations.iter().enumerate() {
            if spec.mask.members().last().is_some_and(|&g| g >= gene_count) {
                return Err(PyramidError::Config(format!("population {id} mask out of range")));
            }
            for &p in &spec.lower_partners {
                if p >= n || p == id {
                    return Err(PyramidError::Config(format!(
                        "population {id} lists invalid partner {p}"
                    )));
                }
                if !self.populations[p].mask.is_subset_of(&spec.mask) {
                    return Err(PyramidError::Config(format!(
                        "partner {p} of population {id} is not a subset of its mask"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Depth of each population: 0 for bottom populations, otherwise one more
    /// than the deepest partner.
    pub fn levels(&self) -> Vec<usize> {
        let n = self.populations.len();
        let mut level = vec![0usize; n];
        // Partner graphs are small; relax until stable (bounded by n passes).
        for _ in 0..n {
            let mut changed = false;
            for id in 0..n {
                let l = self.populations[id]
                    .lower_partners
                    .iter()
                    .map(|&p| level[p] + 1)
                    .max()
                    .unwrap_or(0)
                    .min(n);
                if l != level[id] {
                    level[id] = l;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        level
    }
}
