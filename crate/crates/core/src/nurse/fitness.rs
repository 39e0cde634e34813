use serde::{Deserialize, Serialize};

use super::instance::{NurseInstance, DAYS, SLOTS};
use crate::error::{PyramidError, Result};

/// The seven grade sets scored below the top level, as bit sets
/// (bit `s - 1` for grade `s`): {1}, {2}, {3}, {1,2}, {2,3}, {3,1}, {1,2,3}.
pub const GRADE_SETS: [u8; 7] = [0b001, 0b010, 0b100, 0b011, 0b110, 0b101, 0b111];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NurseFitness {
    /// Preference-cost sum.
    pub raw: u32,
    /// Uncovered demand units.
    pub violation: u32,
    pub penalized: f64,
}

impl NurseFitness {
    fn new(raw: u32, violation: u32, weight: f64) -> Self {
        Self { raw, violation, penalized: f64::from(raw) + weight * f64::from(violation) }
    }

    pub fn is_feasible(&self) -> bool {
        self.violation == 0
    }
}

/// Nurses of grade `<= s` whose pattern covers slot `k`.
pub fn cover(instance: &NurseInstance, solution: &[u32], k: usize, s: usize) -> u32 {
    solution
        .iter()
        .enumerate()
        .filter(|&(i, &j)| instance.q(i, s) == 1 && instance.pattern(j).covers(k))
        .count() as u32
}

/// Per-slot, per-grade head counts of a full schedule, updatable one nurse
/// at a time.
#[derive(Debug, Clone)]
pub struct Tally {
    grades: usize,
    counts: [[u32; 8]; SLOTS],
    raw: u32,
}

impl Tally {
    pub fn new(instance: &NurseInstance, solution: &[u32]) -> Self {
        let mut t = Self { grades: instance.grades(), counts: [[0; 8]; SLOTS], raw: 0 };
        for (i, &j) in solution.iter().enumerate() {
            t.add(instance, i, j);
        }
        t
    }

    pub fn add(&mut self, instance: &NurseInstance, i: usize, j: u32) {
        let g = usize::from(instance.grade_of(i)) - 1;
        let mut bits = instance.pattern(j).0;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            self.counts[k][g] += 1;
            bits &= bits - 1;
        }
        self.raw += u32::from(instance.pref(i, j));
    }

    pub fn remove(&mut self, instance: &NurseInstance, i: usize, j: u32) {
        let g = usize::from(instance.grade_of(i)) - 1;
        let mut bits = instance.pattern(j).0;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            self.counts[k][g] -= 1;
            bits &= bits - 1;
        }
        self.raw -= u32::from(instance.pref(i, j));
    }

    pub fn raw(&self) -> u32 {
        self.raw
    }

    /// Cumulative cover at slot `k` for grade `s` (1-based).
    pub fn cover(&self, k: usize, s: usize) -> u32 {
        self.counts[k][..s].iter().sum()
    }

    pub fn violation(&self, instance: &NurseInstance) -> u32 {
        let mut v = 0;
        for k in 0..SLOTS {
            let mut cum = 0;
            for s in 0..self.grades {
                cum += self.counts[k][s];
                v += instance.demand(k, s + 1).saturating_sub(cum);
            }
        }
        v
    }

    pub fn fitness(&self, instance: &NurseInstance, weight: f64) -> NurseFitness {
        NurseFitness::new(self.raw, self.violation(instance), weight)
    }
}

/// Preference cost plus weighted uncovered demand over all slots and grades.
pub fn full_fitness(instance: &NurseInstance, solution: &[u32], weight: f64) -> NurseFitness {
    Tally::new(instance, solution).fitness(instance, weight)
}

/// Substitute fitness of the nurses in one grade set.
///
/// `partial` holds one pattern per nurse whose grade is in `grades`, in
/// nurse order. Demand is aggregated over the set (sum of per-grade demand)
/// and met by any nurse of the set, ignoring substitution inside it.
pub fn sub_fitness(
    instance: &NurseInstance,
    grades: u8,
    partial: &[u32],
    weight: f64,
) -> Result<NurseFitness> {
    if !GRADE_SETS.contains(&grades) || instance.grades() != 3 {
        return Err(PyramidError::Config(format!("grade set {grades:#05b} is not a pyramid level")));
    }
    let nurses = instance.nurses_with_grades(grades);
    if nurses.len() != partial.len() {
        return Err(PyramidError::Contract(format!(
            "partial schedule has {} patterns for {} nurses",
            partial.len(),
            nurses.len()
        )));
    }
    Ok(sub_fitness_unchecked(instance, grades, &nurses, partial, weight))
}

/// [`sub_fitness`] with the nurse list supplied by the caller.
pub fn sub_fitness_unchecked(
    instance: &NurseInstance,
    grades: u8,
    nurses: &[usize],
    partial: &[u32],
    weight: f64,
) -> NurseFitness {
    let mut supply = [0u32; SLOTS];
    let mut raw = 0u32;
    for (&i, &j) in nurses.iter().zip(partial) {
        raw += u32::from(instance.pref(i, j));
        let mut bits = instance.pattern(j).0;
        while bits != 0 {
            supply[bits.trailing_zeros() as usize] += 1;
            bits &= bits - 1;
        }
    }
    let mut violation = 0;
    for (k, &have) in supply.iter().enumerate() {
        let need: u32 = (1..=instance.grades())
            .filter(|&s| grades >> (s - 1) & 1 == 1)
            .map(|s| instance.grade_demand(k, s))
            .sum();
        violation += need.saturating_sub(have);
    }
    NurseFitness::new(raw, violation, weight)
}

/// Whether, separately for days and nights, the aggregate surplus is at
/// least the aggregate shortage.
pub fn is_balanced(instance: &NurseInstance, solution: &[u32]) -> bool {
    let tally = Tally::new(instance, solution);
    let p = instance.grades();
    [0..DAYS, DAYS..SLOTS].into_iter().all(|block| {
        let (mut surplus, mut shortage) = (0u32, 0u32);
        for k in block {
            let have = tally.cover(k, p);
            let need = instance.demand(k, p);
            surplus += have.saturating_sub(need);
            shortage += need.saturating_sub(have);
        }
        surplus >= shortage
    })
}
