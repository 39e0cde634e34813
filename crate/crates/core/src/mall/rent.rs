use serde::{Deserialize, Serialize};

use super::instance::MallInstance;
use crate::error::{PyramidError, Result};

/// Shops formed by `count` same-type locations in one area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ShopMix {
    pub small: u32,
    pub medium: u32,
    pub large: u32,
}

impl ShopMix {
    pub fn shops(&self) -> u32 {
        self.small + self.medium + self.large
    }

    pub fn locations(&self) -> u32 {
        self.small + 2 * self.medium + 3 * self.large
    }

    /// Counts in small, medium, large order.
    pub fn by_class(&self) -> [u32; 3] {
        [self.small, self.medium, self.large]
    }
}

/// Greedy largest-first: as many large shops as possible, then the
/// remainder as one medium or one small shop.
pub fn size_decompose(count: u32) -> ShopMix {
    let large = count / 3;
    match count % 3 {
        0 => ShopMix { small: 0, medium: 0, large },
        1 => ShopMix { small: 1, medium: 0, large },
        _ => ShopMix { small: 0, medium: 1, large },
    }
}

/// Rent share of a shop type given how many of its shops the mall holds.
pub fn count_factor(shops: u32, ideal: u32) -> f64 {
    let ideal = f64::from(ideal);
    (1.0 - (f64::from(shops) - ideal).abs() / ideal.max(1.0)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MallFitness {
    pub raw: f64,
    /// Shop-count shortfalls and excesses plus size-cap excesses.
    pub violation: u32,
    pub penalized: f64,
}

impl MallFitness {
    fn new(raw: f64, violation: u32, weight: f64) -> Self {
        Self { raw, violation, penalized: raw - weight * f64::from(violation) }
    }

    pub fn is_feasible(&self) -> bool {
        self.violation == 0
    }
}

/// Rent of the shops of one type in one area.
fn shop_rent(inst: &MallInstance, t: usize, area: usize, mix: ShopMix, count_factor: f64) -> f64 {
    let per_unit = inst.base_rent(t, area) + inst.revenue(t) * inst.attract(t, area) * count_factor;
    let [small, medium, large] = inst.size_factors();
    f64::from(mix.small) * small * per_unit + f64::from(mix.medium) * medium * per_unit + f64::from(mix.large) * large * per_unit
}

/// Adjacent location pairs whose types share a group.
fn synergy_pairs(inst: &MallInstance, genes: &[u32]) -> u32 {
    genes
        .windows(2)
        .filter(|w| inst.same_group(w[0] as usize, w[1] as usize))
        .count() as u32
}

/// Total rent of a full layout with weighted count and size violations
/// subtracted.
pub fn full_rent(inst: &MallInstance, solution: &[u32], weight: f64) -> MallFitness {
    const STACK: usize = 512;
    let t_count = inst.types();
    let areas = inst.areas();
    let cells = t_count * areas;
    let mut stack = [0u32; STACK];
    let mut heap = Vec::new();
    let scratch: &mut [u32] = if cells + t_count <= STACK {
        &mut stack[..cells + t_count]
    } else {
        heap.resize(cells + t_count, 0);
        &mut heap
    };
    let (counts, shops) = scratch.split_at_mut(cells);

    let mut pairs = 0u32;
    for a in 0..areas {
        let genes = &solution[inst.area_range(a)];
        for &t in genes {
            counts[t as usize * areas + a] += 1;
        }
        pairs += synergy_pairs(inst, genes);
    }
    let mut classes = [0u32; 3];
    for (row, n) in counts.chunks_exact(areas).zip(shops.iter_mut()) {
        for &c in row.iter().filter(|&&c| c > 0) {
            let mix = size_decompose(c);
            *n += mix.shops();
            for (total, k) in classes.iter_mut().zip(mix.by_class()) {
                *total += k;
            }
        }
    }
    let mut raw = 0.0;
    for (t, row) in counts.chunks_exact(areas).enumerate() {
        let cf = count_factor(shops[t], inst.bounds(t).ideal);
        for (a, &c) in row.iter().enumerate() {
            if c > 0 {
                raw += shop_rent(inst, t, a, size_decompose(c), cf);
            }
        }
    }
    raw += inst.synergy_bonus() * f64::from(pairs);

    let mut violation = 0;
    for (t, &n) in shops.iter().enumerate() {
        let b = inst.bounds(t);
        violation += b.min.saturating_sub(n) + n.saturating_sub(b.max);
    }
    for (total, cap) in classes.iter().zip(inst.size_caps()) {
        violation += total.saturating_sub(cap);
    }
    MallFitness::new(raw, violation, weight)
}

/// Rent of one area judged on its own: shop counts are the area's own, and
/// no constraint applies at this level.
pub fn area_sub_fitness(inst: &MallInstance, area: usize, partial: &[u32], weight: f64) -> Result<MallFitness> {
    if area >= inst.areas() {
        return Err(PyramidError::Contract(format!("area {area} does not exist")));
    }
    if partial.len() != inst.area_len(area) {
        return Err(PyramidError::Contract(format!(
            "area {area} has {} locations, got {}",
            inst.area_len(area),
            partial.len()
        )));
    }
    Ok(area_sub_fitness_unchecked(inst, area, partial, weight))
}

pub(crate) fn area_sub_fitness_unchecked(inst: &MallInstance, area: usize, partial: &[u32], weight: f64) -> MallFitness {
    let mut counts = vec![0u32; inst.types()];
    for &t in partial {
        counts[t as usize] += 1;
    }
    let mut raw = 0.0;
    for (t, &c) in counts.iter().enumerate() {
        if c > 0 {
            let mix = size_decompose(c);
            raw += shop_rent(inst, t, area, mix, count_factor(mix.shops(), inst.bounds(t).ideal));
        }
    }
    raw += inst.synergy_bonus() * f64::from(synergy_pairs(inst, partial));
    MallFitness::new(raw, 0, weight)
}
