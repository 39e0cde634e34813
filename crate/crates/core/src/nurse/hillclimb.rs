use super::fitness::{is_balanced, NurseFitness, Tally};
use super::instance::NurseInstance;
use crate::engine::Refiner;
use crate::scalar::Scalar;

pub const DEFAULT_MOVE_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct HillclimbOutcome {
    pub solution: Vec<u32>,
    pub fitness: NurseFitness,
    /// Improving moves applied.
    pub moves: usize,
    /// Candidate schedules evaluated.
    pub evaluations: usize,
}

struct Climber<'a> {
    instance: &'a NurseInstance,
    weight: f64,
    solution: Vec<u32>,
    tally: Tally,
    current: f64,
    evaluations: usize,
    budget: usize,
}

impl Climber<'_> {
    fn score(&self) -> f64 {
        f64::from(self.tally.raw()) + self.weight * f64::from(self.tally.violation(self.instance))
    }

    fn admits(&self, nurse: usize, pattern: u32) -> bool {
        self.instance.feasible(nurse).binary_search(&pattern).is_ok()
    }

    /// Tries reassigning `changes` at once; keeps them only on strict
    /// improvement. `None` once the budget is spent.
    fn attempt(&mut self, changes: &[(usize, u32)]) -> Option<bool> {
        if self.evaluations >= self.budget {
            return None;
        }
        self.evaluations += 1;
        let inst = self.instance;
        for &(i, j) in changes {
            self.tally.remove(inst, i, self.solution[i]);
            self.tally.add(inst, i, j);
        }
        let s = self.score();
        if s < self.current - 1e-9 {
            for &(i, j) in changes {
                self.solution[i] = j;
            }
            self.current = s;
            Some(true)
        } else {
            for &(i, j) in changes {
                self.tally.remove(inst, i, j);
                self.tally.add(inst, i, self.solution[i]);
            }
            Some(false)
        }
    }

    /// First improving move, scanning reassignments, then swaps, then chains.
    fn improve_once(&mut self) -> Option<bool> {
        let inst = self.instance;
        let n = inst.nurses();
        for i in 0..n {
            for &j in inst.feasible(i) {
                if j != self.solution[i] && self.attempt(&[(i, j)])? {
                    return Some(true);
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                let (pa, pb) = (self.solution[a], self.solution[b]);
                if pa != pb && self.admits(a, pb) && self.admits(b, pa) && self.attempt(&[(a, pb), (b, pa)])? {
                    return Some(true);
                }
            }
        }
        // a takes b's pattern, b takes a fresh one
        for a in 0..n {
            for b in 0..n {
                let pb = self.solution[b];
                if a == b || pb == self.solution[a] || !self.admits(a, pb) {
                    continue;
                }
                for &j in inst.feasible(b) {
                    if j != pb && self.attempt(&[(a, pb), (b, j)])? {
                        return Some(true);
                    }
                }
            }
        }
        // a takes b's, b takes c's, c takes a fresh one
        for a in 0..n {
            for b in 0..n {
                let pb = self.solution[b];
                if a == b || pb == self.solution[a] || !self.admits(a, pb) {
                    continue;
                }
                for c in 0..n {
                    let pc = self.solution[c];
                    if c == a || c == b || pc == pb || !self.admits(b, pc) {
                        continue;
                    }
                    for &j in inst.feasible(c) {
                        if j != pc && self.attempt(&[(a, pb), (b, pc), (c, j)])? {
                            return Some(true);
                        }
                    }
                }
            }
        }
        Some(false)
    }
}

/// First-improvement local search over pattern reassignments, pairwise
/// swaps and reassignment chains of up to three nurses. Every accepted move
/// strictly lowers the penalized fitness; stops at a local optimum or after
/// `budget` evaluations.
pub fn hillclimb(instance: &NurseInstance, solution: &[u32], weight: f64, budget: usize) -> HillclimbOutcome {
    let tally = Tally::new(instance, solution);
    let mut climber = Climber {
        instance,
        weight,
        solution: solution.to_vec(),
        current: 0.0,
        tally,
        evaluations: 0,
        budget,
    };
    climber.current = climber.score();
    let mut moves = 0;
    while let Some(true) = climber.improve_once() {
        moves += 1;
    }
    let fitness = climber.tally.fitness(instance, weight);
    HillclimbOutcome { solution: climber.solution, fitness, moves, evaluations: climber.evaluations }
}

/// Hillclimbs balanced schedules; other schedules are left alone.
#[derive(Debug, Clone, Copy)]
pub struct NurseHillclimber<'a> {
    pub instance: &'a NurseInstance,
    pub budget: usize,
}

impl<'a> NurseHillclimber<'a> {
    pub fn new(instance: &'a NurseInstance) -> Self {
        Self { instance, budget: DEFAULT_MOVE_BUDGET }
    }
}

impl<F: Scalar> Refiner<F> for NurseHillclimber<'_> {
    fn refine(&self, genes: &mut Vec<u32>, weight: F) -> Option<usize> {
        if !is_balanced(self.instance, genes) {
            return None;
        }
        let out = hillclimb(self.instance, genes, weight.as_f64(), self.budget);
        *genes = out.solution;
        Some(out.moves)
    }
}
