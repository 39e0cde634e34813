//! Selection, crossover and mutation.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::individual::Individual;
use super::mask::GeneMask;
use crate::error::{PyramidError, Result};
use crate::scalar::{Scalar, Sense};

/// Linear-rank roulette over one population.
///
/// The best individual gets weight `size`, the worst weight 1. Individuals
/// with equal penalized fitness share the mean of the weights their tie
/// group spans, so equal individuals are equally likely.
#[derive(Debug, Clone)]
pub struct RankTable {
    dist: WeightedIndex<f64>,
}

impl RankTable {
    pub fn new<F: Scalar>(sense: Sense, individuals: &[Individual<F>]) -> Self {
        let weights = rank_weights(sense, individuals);
        let dist = WeightedIndex::new(&weights).expect("rank weights are positive and finite");
        Self { dist }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }
}

/// Linear rank weights, averaged over tie groups.
pub fn rank_weights<F: Scalar>(sense: Sense, individuals: &[Individual<F>]) -> Vec<f64> {
    let n = individuals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        sense.compare(individuals[a].penalized, individuals[b].penalized).then(a.cmp(&b))
    });
    let mut weights = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        let head = individuals[order[start]].penalized;
        while end < n && sense.compare(individuals[order[end]].penalized, head).is_eq() {
            end += 1;
        }
        // ranks start..end carry weights n-start down to n-end+1
        let mean = ((n - start) + (n - end + 1)) as f64 / 2.0;
        for &i in &order[start..end] {
            weights[i] = mean;
        }
        start = end;
    }
    weights
}

/// Draws one index by linear-rank roulette.
pub fn rank_roulette_select<F: Scalar, R: Rng + ?Sized>(
    sense: Sense,
    individuals: &[Individual<F>],
    rng: &mut R,
) -> Result<usize> {
    if individuals.is_empty() {
        return Err(PyramidError::Contract("selection from an empty population".into()));
    }
    Ok(RankTable::new(sense, individuals).sample(rng))
}

/// Two-parent, two-child parameterised uniform crossover. The first child
/// takes each gene from `a` with probability `p`; the second child takes the
/// complementary choice.
pub fn uniform_crossover<R: Rng + ?Sized>(
    a: &[u32],
    b: &[u32],
    p: f64,
    rng: &mut R,
) -> Result<(Vec<u32>, Vec<u32>)> {
    if a.len() != b.len() {
        return Err(PyramidError::Contract(format!(
            "uniform crossover of strings with lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut c1 = Vec::with_capacity(a.len());
    let mut c2 = Vec::with_capacity(a.len());
    for (&x, &y) in a.iter().zip(b) {
        if rng.random_bool(p) {
            c1.push(x);
            c2.push(y);
        } else {
            c1.push(y);
            c2.push(x);
        }
    }
    Ok((c1, c2))
}

/// Transplants a lower-level sub-solution into an upper-level string.
///
/// The child has the upper mask; genes on the lower mask come from `lower`,
/// all others from `upper`.
pub fn cross_level_crossover(
    lower: &[u32],
    lower_mask: &GeneMask,
    upper: &[u32],
    upper_mask: &GeneMask,
) -> Result<Vec<u32>> {
    if lower.len() != lower_mask.len() || upper.len() != upper_mask.len() {
        return Err(PyramidError::Contract("gene string does not match its mask".into()));
    }
    let positions = lower_mask.positions_in(upper_mask).ok_or_else(|| {
        PyramidError::Contract("lower mask is not a subset of the upper mask".into())
    })?;
    let mut child = upper.to_vec();
    for (pos, &allele) in positions.into_iter().zip(lower) {
        child[pos] = allele;
    }
    Ok(child)
}

/// Single-point crossover of two strings over the same mask: the child takes
/// `first[..cut]` followed by `second[cut..]`.
pub fn one_point_crossover(first: &[u32], second: &[u32], cut: usize) -> Result<Vec<u32>> {
    if first.len() != second.len() || cut > first.len() {
        return Err(PyramidError::Contract("one-point crossover on mismatched strings".into()));
    }
    let mut child = first[..cut].to_vec();
    child.extend_from_slice(&second[cut..]);
    Ok(child)
}

/// Re-initialises each gene with probability `rate` by a uniform draw from
/// its feasible alleles. Returns whether any allele changed.
pub fn mutate<'a, R, A>(
    genes: &mut [u32],
    mask: &GeneMask,
    rate: f64,
    alleles: A,
    rng: &mut R,
) -> bool
where
    R: Rng + ?Sized,
    A: Fn(usize) -> &'a [u32],
{
    if rate <= 0.0 {
        return false;
    }
    let mut changed = false;
    for (gene, &global) in genes.iter_mut().zip(mask.members()) {
        if rng.random_bool(rate) {
            let range = alleles(global);
            let fresh = range[rng.random_range(0..range.len())];
            changed |= fresh != *gene;
            *gene = fresh;
        }
    }
    changed
}
