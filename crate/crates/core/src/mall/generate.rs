use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::instance::{CountBounds, MallInstance, MallTables};
use crate::error::{PyramidError, Result};

const SIZE_FACTORS: [f64; 3] = [1.0, 1.9, 2.7];
const GROUP_SIZE: usize = 5;
const RETRIES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MallGenParams {
    pub locations: usize,
    pub areas: usize,
    pub types: usize,
    /// 0 leaves count bounds and size caps almost unbinding, 1 pins every
    /// type to its ideal count and every size class to its expected total.
    pub tightness: f64,
    pub synergy_bonus: f64,
}

impl Default for MallGenParams {
    fn default() -> Self {
        Self { locations: 100, areas: 5, types: 20, tightness: 0.5, synergy_bonus: 2.0 }
    }
}

impl MallGenParams {
    /// Nine locations in three areas, four types: small enough to enumerate.
    pub fn tiny() -> Self {
        Self { locations: 9, areas: 3, types: 4, tightness: 0.5, synergy_bonus: 2.0 }
    }
}

/// Loosens a bound from `tight` towards `loose` as tightness falls.
fn spread(tight: f64, loose: f64, tightness: f64) -> f64 {
    let slack = (1.0 - tightness).powi(2);
    tight + (loose - tight) * slack
}

pub fn generate_mall_instance(params: &MallGenParams, seed: u64) -> Result<MallInstance> {
    if !(0.0..=1.0).contains(&params.tightness) {
        return Err(PyramidError::Config("tightness must lie in [0, 1]".into()));
    }
    if params.types == 0 || params.areas == 0 || params.locations < params.areas {
        return Err(PyramidError::Config("need at least one type and one location per area".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RETRIES {
        if let Some(inst) = draw(params, &mut rng)? {
            return Ok(inst);
        }
    }
    Err(PyramidError::Generation(format!(
        "no count-bound set with total minimum within {} locations after {RETRIES} draws",
        params.locations
    )))
}

fn draw(params: &MallGenParams, rng: &mut ChaCha8Rng) -> Result<Option<MallInstance>> {
    let (l, a, t, tau) = (params.locations, params.areas, params.types, params.tightness);
    let area_sizes: Vec<usize> = (0..a).map(|k| l / a + usize::from(k < l % a)).collect();

    let group_count = t.div_ceil(GROUP_SIZE);
    let mut order: Vec<usize> = (0..t).collect();
    order.shuffle(rng);
    let mut groups = vec![Vec::new(); t];
    for (pos, &ty) in order.iter().enumerate() {
        groups[ty].push((pos % group_count) as u16);
    }

    let revenue: Vec<f64> = (0..t).map(|_| rng.random_range(10.0..30.0)).collect();
    let attract: Vec<Vec<f64>> = (0..t).map(|_| (0..a).map(|_| rng.random_range(0.5..=1.5)).collect()).collect();
    let base_rent: Vec<Vec<f64>> = revenue
        .iter()
        .map(|&r| {
            let scale = rng.random_range(0.1..0.3) * r;
            (0..a).map(|_| scale * rng.random_range(0.8..1.2)).collect()
        })
        .collect();

    // Bounds follow a hidden layout of shops of 1 to 3 locations (mean size
    // 2), with no type repeated inside an area while types last. The layout
    // meets every bound at any tightness.
    let mut counts = vec![vec![0u32; a]; t];
    for (area, &size) in area_sizes.iter().enumerate() {
        let mut unused: Vec<usize> = (0..t).collect();
        unused.shuffle(rng);
        let mut left = size;
        while left > 0 {
            let block = rng.random_range(1..=3usize).min(left);
            let ty = unused.pop().unwrap_or_else(|| rng.random_range(0..t));
            counts[ty][area] += block as u32;
            left -= block;
        }
    }
    let mut planned = vec![0u32; t];
    let mut class_totals = [0u32; 3];
    for (ty, row) in counts.iter().enumerate() {
        for &c in row {
            let mix = super::size_decompose(c);
            planned[ty] += mix.shops();
            for (total, k) in class_totals.iter_mut().zip(mix.by_class()) {
                *total += k;
            }
        }
    }
    let count_bounds: Vec<CountBounds> = planned
        .iter()
        .map(|&n| {
            let ideal = f64::from(n);
            let min = (ideal * tau).floor();
            let max = spread(ideal, l as f64, tau).ceil();
            CountBounds { min: min as u32, ideal: n, max: max as u32 }
        })
        .collect();
    if count_bounds.iter().map(|b| b.min as usize).sum::<usize>() > l {
        return Ok(None);
    }

    let mut size_caps = [0u32; 3];
    for (c, cap) in size_caps.iter_mut().enumerate() {
        let most = (l / (c + 1)) as f64;
        *cap = spread(f64::from(class_totals[c]), most, tau).ceil().min(most) as u32;
    }

    let penalty_weight_init = revenue.iter().sum::<f64>() / t as f64;
    MallInstance::new(MallTables {
        area_sizes,
        types: t,
        groups,
        attract,
        base_rent,
        revenue,
        count_bounds,
        size_caps,
        size_factors: SIZE_FACTORS,
        synergy_bonus: params.synergy_bonus,
        penalty_weight_init,
    })
    .map(Some)
}
