//! Weekly nurse scheduling: one shift pattern per nurse, grade-cumulative
//! demand cover, preference costs.

mod fitness;
mod generate;
mod hillclimb;
mod instance;

pub use fitness::{
    cover, full_fitness, is_balanced, sub_fitness, sub_fitness_unchecked, NurseFitness, Tally,
    GRADE_SETS,
};
pub use generate::{generate_instance, pattern_universe, NurseGenParams, RegimeMix};
pub use hillclimb::{hillclimb, HillclimbOutcome, NurseHillclimber, DEFAULT_MOVE_BUDGET};
pub use instance::{Contract, NurseInstance, PatternKind, ShiftPattern, DAYS, SLOTS};

use crate::engine::{Evaluation, GeneMask, MigrantCrossover, PopulationSpec, Problem, Scope, Topology};
use crate::error::{PyramidError, Result};
use crate::scalar::{Scalar, Sense};

/// A full schedule: `pattern_of[i]` is the pattern worked by nurse `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NurseSolution {
    pub pattern_of: Vec<u32>,
}

impl NurseSolution {
    /// Accepts the schedule only if every nurse works a feasible pattern.
    pub fn new(instance: &NurseInstance, pattern_of: Vec<u32>) -> Result<Self> {
        if pattern_of.len() != instance.nurses() {
            return Err(PyramidError::Contract("one pattern per nurse required".into()));
        }
        if let Some(i) = (0..pattern_of.len())
            .find(|&i| instance.feasible(i).binary_search(&pattern_of[i]).is_err())
        {
            return Err(PyramidError::Contract(format!("nurse {i} works an infeasible pattern")));
        }
        Ok(Self { pattern_of })
    }

    /// `x_ij`: 1 when nurse `i` works pattern `j`.
    pub fn x(&self, i: usize, j: u32) -> u32 {
        u32::from(self.pattern_of[i] == j)
    }
}

/// Feasible pattern set of nurse `i`.
pub fn feasible_patterns(instance: &NurseInstance, i: usize) -> &[u32] {
    instance.feasible(i)
}

impl<F: Scalar> Problem<F> for NurseInstance {
    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn gene_count(&self) -> usize {
        self.nurses()
    }

    fn alleles(&self, gene: usize) -> &[u32] {
        self.feasible(gene)
    }

    fn evaluate(&self, scope: Scope, mask: &GeneMask, genes: &[u32]) -> Evaluation<F> {
        let f = match scope {
            Scope::Full => full_fitness(self, genes, 0.0),
            Scope::Partial(level) => {
                sub_fitness_unchecked(self, GRADE_SETS[usize::from(level)], mask.members(), genes, 0.0)
            }
        };
        Evaluation::new(F::of(f64::from(f.raw)), F::of(f64::from(f.violation)))
    }
}

/// The eight-population hierarchy: grades 1, 2, 3 at the bottom, the pairs
/// (1+2), (2+3), (3+1) above them, (1+2+3) with aggregate cover next, and
/// the full problem on top. Each population mates with every population
/// whose mask is a strict subset of its own; the top mates with all.
pub fn pyramid_topology(instance: &NurseInstance) -> Result<Topology> {
    if instance.grades() != 3 {
        return Err(PyramidError::Config(format!(
            "the nurse pyramid needs 3 grades, instance has {}",
            instance.grades()
        )));
    }
    let n = instance.nurses();
    let mut populations: Vec<PopulationSpec> = GRADE_SETS
        .iter()
        .enumerate()
        .map(|(level, &set)| {
            Ok(PopulationSpec {
                mask: GeneMask::new(instance.nurses_with_grades(set), n)?,
                scope: Scope::Partial(level as u16),
                lower_partners: Vec::new(),
            })
        })
        .collect::<Result<_>>()?;
    for (id, &set) in GRADE_SETS.iter().enumerate() {
        populations[id].lower_partners = GRADE_SETS
            .iter()
            .enumerate()
            .filter(|&(other, &o)| other != id && o & set == o && o != set)
            .map(|(other, _)| other)
            .collect();
    }
    populations.push(PopulationSpec {
        mask: GeneMask::full(n),
        scope: Scope::Full,
        lower_partners: (0..GRADE_SETS.len()).collect(),
    });
    Ok(Topology { populations, top: GRADE_SETS.len(), migrant_crossover: MigrantCrossover::OnePoint })
}
