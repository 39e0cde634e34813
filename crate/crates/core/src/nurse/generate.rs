use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::instance::{Contract, NurseInstance, ShiftPattern, DAYS, SLOTS};
use crate::error::{PyramidError, Result};

/// Shares of nurses on each kind of contract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeMix {
    pub day_only: f64,
    pub night_only: f64,
    /// Days or nights, never both in one week.
    pub either: f64,
    /// Mixed day-and-night weeks.
    pub combined: f64,
}

impl Default for RegimeMix {
    fn default() -> Self {
        Self { day_only: 0.35, night_only: 0.15, either: 0.45, combined: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NurseGenParams {
    pub nurses: usize,
    /// Shares of grades 1, 2, 3.
    pub grade_mix: [f64; 3],
    pub regimes: RegimeMix,
    /// Demand as a fraction of the cover of a hidden random schedule.
    pub tightness: f64,
    /// Costs are `100 * u^cost_exponent`; larger exponents bias towards 0.
    pub cost_exponent: f64,
    /// Extra cost on night patterns.
    pub night_bias: u8,
    /// Patterns per nurse whose cost is forced to 0.
    pub requests_per_nurse: usize,
    /// Per-slot demand jitter, uniform in `1 ± demand_noise`.
    pub demand_noise: f64,
    /// Restrict the pattern universe to this many random day/night patterns.
    pub pattern_sample: Option<usize>,
}

impl Default for NurseGenParams {
    fn default() -> Self {
        Self {
            nurses: 30,
            grade_mix: [0.2, 0.3, 0.5],
            regimes: RegimeMix::default(),
            tightness: 0.8,
            cost_exponent: 2.0,
            night_bias: 20,
            requests_per_nurse: 3,
            demand_noise: 0.1,
            pattern_sample: None,
        }
    }
}

impl NurseGenParams {
    /// Four nurses, eight patterns: small enough to enumerate.
    pub fn tiny() -> Self {
        Self {
            nurses: 4,
            grade_mix: [0.25, 0.25, 0.5],
            regimes: RegimeMix { day_only: 0.3, night_only: 0.2, either: 0.5, combined: 0.0 },
            tightness: 0.8,
            requests_per_nurse: 1,
            pattern_sample: Some(8),
            ..Self::default()
        }
    }
}

/// Every way to pick `size` of the given slots.
fn combinations(slots: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(size);
    fn rec(slots: &[usize], size: usize, start: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pick.len() == size {
            out.push(pick.clone());
            return;
        }
        for i in start..slots.len() {
            pick.push(slots[i]);
            rec(slots, size, i + 1, pick, out);
            pick.pop();
        }
    }
    rec(slots, size, 0, &mut pick, &mut out);
    out
}

/// Day patterns of 4 and 5 shifts, night patterns of 3 and 4 shifts and,
/// if requested, two-day-two-night patterns that never work both shifts of
/// one day.
pub fn pattern_universe(with_combined: bool) -> Vec<ShiftPattern> {
    let days: Vec<usize> = (0..DAYS).collect();
    let nights: Vec<usize> = (DAYS..SLOTS).collect();
    let mut out = Vec::new();
    for size in [4, 5] {
        out.extend(combinations(&days, size).iter().map(|c| ShiftPattern::from_slots(c)));
    }
    for size in [3, 4] {
        out.extend(combinations(&nights, size).iter().map(|c| ShiftPattern::from_slots(c)));
    }
    if with_combined {
        for d in combinations(&days, 2) {
            for n in combinations(&nights, 2) {
                if n.iter().all(|&k| !d.contains(&(k - DAYS))) {
                    let slots: Vec<usize> = d.iter().chain(&n).copied().collect();
                    out.push(ShiftPattern::from_slots(&slots));
                }
            }
        }
    }
    out
}

/// Splits `n` by `shares` with largest remainders, giving every part at
/// least one when `n` allows.
fn apportion(n: usize, shares: &[f64]) -> Vec<usize> {
    let total: f64 = shares.iter().sum();
    let exact: Vec<f64> = shares.iter().map(|s| s / total * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let left = n - counts.iter().sum::<usize>();
    for &i in order.iter().cycle().take(left) {
        counts[i] += 1;
    }
    if n >= shares.len() {
        for i in 0..counts.len() {
            if counts[i] == 0 {
                let donor = (0..counts.len()).max_by_key(|&j| counts[j]).expect("non-empty");
                counts[donor] -= 1;
                counts[i] += 1;
            }
        }
    }
    counts
}

fn draw_contract<R: Rng>(mix: &RegimeMix, rng: &mut R) -> Contract {
    let weights = [mix.day_only, mix.night_only, mix.either, mix.combined];
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut regime = 0;
    for (r, w) in weights.iter().enumerate() {
        if u < *w {
            regime = r;
            break;
        }
        u -= w;
        regime = r;
    }
    let day = if rng.random_bool(0.5) { 5 } else { 4 };
    let night = if rng.random_bool(0.5) { 4 } else { 3 };
    match regime {
        0 => Contract { day: Some(day), ..Contract::default() },
        1 => Contract { night: Some(night), ..Contract::default() },
        2 => Contract { day: Some(day), night: Some(night), combined: None },
        _ => Contract { combined: Some(4), ..Contract::default() },
    }
}

/// Draws a synthetic ward. A pure function of `(params, seed)`.
pub fn generate_instance(params: &NurseGenParams, seed: u64) -> Result<NurseInstance> {
    let grades = params.grade_mix.len();
    if params.nurses < grades {
        return Err(PyramidError::Generation(format!(
            "{} nurses cannot staff {grades} grades",
            params.nurses
        )));
    }
    if !(0.0..=1.0).contains(&params.tightness) {
        return Err(PyramidError::Generation(format!("tightness {} not in [0, 1]", params.tightness)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let with_combined = params.regimes.combined > 0.0 && params.pattern_sample.is_none();
    let mut patterns = pattern_universe(with_combined);
    if let Some(k) = params.pattern_sample {
        let k = k.min(patterns.len());
        let mut picked = sample(&mut rng, patterns.len(), k).into_vec();
        picked.sort_unstable();
        patterns = picked.into_iter().map(|i| patterns[i]).collect();
    }

    let counts = apportion(params.nurses, &params.grade_mix);
    let grade_of: Vec<u8> = counts
        .iter()
        .enumerate()
        .flat_map(|(g, &c)| std::iter::repeat_n(g as u8 + 1, c))
        .collect();

    let mut contracts = Vec::with_capacity(params.nurses);
    for i in 0..params.nurses {
        // A few redraws so a restricted universe still gives every nurse a pattern.
        let mut contract = draw_contract(&params.regimes, &mut rng);
        let mut tries = 0;
        while !patterns.iter().any(|&p| contract.admits(p)) {
            tries += 1;
            if tries > 64 {
                return Err(PyramidError::Generation(format!(
                    "no contract with a feasible pattern for nurse {i}"
                )));
            }
            let fallback = RegimeMix { day_only: 1.0, night_only: 1.0, either: 1.0, combined: 0.0 };
            contract = draw_contract(&fallback, &mut rng);
        }
        contracts.push(contract);
    }

    let m = patterns.len();
    let mut pref = vec![vec![100u8; m]; params.nurses];
    for (i, contract) in contracts.iter().enumerate() {
        let feasible: Vec<usize> = (0..m).filter(|&j| contract.admits(patterns[j])).collect();
        for &j in &feasible {
            let u: f64 = rng.random();
            let mut cost = (100.0 * u.powf(params.cost_exponent)).floor() as u32;
            if patterns[j].night_count() > 0 {
                cost += u32::from(params.night_bias);
            }
            pref[i][j] = cost.min(100) as u8;
        }
        let requests = params.requests_per_nurse.min(feasible.len());
        for k in sample(&mut rng, feasible.len(), requests).into_vec() {
            pref[i][feasible[k]] = 0;
        }
    }

    // Demand follows the cover of a hidden schedule in which every nurse
    // works as many shifts as the contract allows. With no noise and
    // tightness <= 1 that schedule is feasible.
    let mut planted = vec![vec![0u32; grades]; SLOTS];
    for (i, contract) in contracts.iter().enumerate() {
        let mut feasible: Vec<ShiftPattern> = patterns.iter().copied().filter(|&p| contract.admits(p)).collect();
        let most = feasible.iter().map(|p| p.total()).max().expect("contract admits a pattern");
        feasible.retain(|p| p.total() == most);
        let pick = feasible[rng.random_range(0..feasible.len())];
        let g = usize::from(grade_of[i]) - 1;
        for k in pick.slots() {
            planted[k][g] += 1;
        }
    }
    let mut demand = vec![vec![0u32; grades]; SLOTS];
    for k in 0..SLOTS {
        let jitter = 1.0 + params.demand_noise * (2.0 * rng.random::<f64>() - 1.0);
        let mut cumulative = 0;
        for s in 0..grades {
            cumulative += planted[k][s];
            demand[k][s] = (params.tightness * f64::from(cumulative) * jitter + 1e-9).floor() as u32;
        }
    }

    NurseInstance::new(grades, patterns, grade_of, pref, contracts, demand)
        .map_err(|e| PyramidError::Generation(e.to_string()))
}
