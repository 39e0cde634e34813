use crate::engine::{GeneMask, MigrantCrossover, PopulationSpec, Scope, Topology};

/// Rewrites a topology so every population solves the whole problem with
/// the full fitness. The partner graph is kept; crossover with a partner
/// becomes ordinary uniform crossover with a migrant.
pub fn joined_topology(base: &Topology) -> Topology {
    let gene_count = base.populations[base.top].mask.len();
    Topology {
        populations: base
            .populations
            .iter()
            .map(|spec| PopulationSpec {
                mask: GeneMask::full(gene_count),
                scope: Scope::Full,
                lower_partners: spec.lower_partners.clone(),
            })
            .collect(),
        top: base.top,
        migrant_crossover: MigrantCrossover::Uniform,
    }
}
