//! Independent reference evaluators and exhaustive search for tiny
//! instances. Nothing here calls the library's fitness code.

use std::cmp::Ordering;

use pyramid_ga::mall::MallInstance;
use pyramid_ga::nurse::{NurseInstance, SLOTS};

/// A solution with its objective and violation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub genes: Vec<u32>,
    pub raw: f64,
    pub violation: f64,
}

impl Scored {
    pub fn is_feasible(&self) -> bool {
        self.violation == 0.0
    }
}

/// Feasible first; then by objective; infeasible ones by violation, then
/// objective. `Less` means `a` is better.
pub fn oracle_order(minimize: bool, a: &Scored, b: &Scored) -> Ordering {
    let objective = |x: f64, y: f64| if minimize { x.total_cmp(&y) } else { y.total_cmp(&x) };
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => objective(a.raw, b.raw),
        (false, false) => a.violation.total_cmp(&b.violation).then(objective(a.raw, b.raw)),
    }
}

/// Nurse cost and uncovered demand from the explicit `x_ij` matrix.
pub fn nurse_recount(inst: &NurseInstance, solution: &[u32]) -> (f64, f64) {
    let n = inst.nurses();
    let m = inst.pattern_count();
    let mut x = vec![vec![0u32; m]; n];
    for (i, &j) in solution.iter().enumerate() {
        x[i][j as usize] = 1;
    }
    let mut cost = 0u64;
    for (i, row) in x.iter().enumerate() {
        for (j, &xij) in row.iter().enumerate() {
            cost += u64::from(xij) * u64::from(inst.pref(i, j as u32));
        }
    }
    let mut uncovered = 0u64;
    for k in 0..SLOTS {
        for s in 1..=inst.grades() {
            let mut cover = 0u64;
            for (i, row) in x.iter().enumerate() {
                let q = u64::from(usize::from(inst.grade_of(i)) <= s);
                for (j, &xij) in row.iter().enumerate() {
                    let a = u64::from(inst.pattern(j as u32).covers(k));
                    cover += q * a * u64::from(xij);
                }
            }
            uncovered += u64::from(inst.demand(k, s)).saturating_sub(cover);
        }
    }
    (cost as f64, uncovered as f64)
}

/// Mall rent and violation in one pass over the location string followed
/// by a pass over the collected runs.
pub fn mall_recount(inst: &MallInstance, solution: &[u32]) -> (f64, f64) {
    let types = inst.types();
    let areas = inst.areas();
    // counts[area][type], and same-group neighbour pairs.
    let mut counts = vec![vec![0u32; types]; areas];
    let mut pairs = 0u32;
    let mut previous: Option<(usize, usize)> = None;
    for (loc, &t) in solution.iter().enumerate() {
        let area = inst.area_of(loc);
        let t = t as usize;
        counts[area][t] += 1;
        if let Some((pa, pt)) = previous {
            let shares = inst.groups_of(pt).iter().any(|g| inst.groups_of(t).contains(g));
            if pa == area && shares {
                pairs += 1;
            }
        }
        previous = Some((area, t));
    }
    // blocks[type][area] holds the shop count of each size class.
    let mut blocks = vec![vec![[0u32; 3]; areas]; types];
    let mut shops = vec![0u32; types];
    let mut class_total = [0u32; 3];
    for (area, row) in counts.iter().enumerate() {
        for (t, &c) in row.iter().enumerate() {
            let mut left = c;
            while left > 0 {
                let size = left.min(3);
                left -= size;
                shops[t] += 1;
                class_total[size as usize - 1] += 1;
                blocks[t][area][size as usize - 1] += 1;
            }
        }
    }
    // Priced type by type, area by area, so the sum is taken in a fixed
    // order and compares bit for bit.
    let factors = inst.size_factors();
    let mut rent = 0.0;
    for (t, per_area) in blocks.iter().enumerate() {
        let ideal = f64::from(inst.bounds(t).ideal);
        let share = (1.0 - (f64::from(shops[t]) - ideal).abs() / ideal.max(1.0)).max(0.0);
        for (area, classes) in per_area.iter().enumerate() {
            if classes.iter().all(|&k| k == 0) {
                continue;
            }
            let unit = inst.base_rent(t, area) + inst.revenue(t) * inst.attract(t, area) * share;
            let mut block = 0.0;
            for (c, &k) in classes.iter().enumerate() {
                block += f64::from(k) * factors[c] * unit;
            }
            rent += block;
        }
    }
    rent += inst.synergy_bonus() * f64::from(pairs);
    let mut violation = 0u32;
    for (t, &n) in shops.iter().enumerate() {
        let b = inst.bounds(t);
        if n < b.min {
            violation += b.min - n;
        }
        if n > b.max {
            violation += n - b.max;
        }
    }
    for (c, &total) in class_total.iter().enumerate() {
        let cap = inst.size_caps()[c];
        if total > cap {
            violation += total - cap;
        }
    }
    (rent, f64::from(violation))
}

/// Walks every assignment in odometer order and keeps the best under
/// [`oracle_order`]; ties keep the first found.
fn enumerate(
    alleles: &[Vec<u32>],
    minimize: bool,
    mut score: impl FnMut(&[u32]) -> (f64, f64),
) -> Scored {
    let mut digits = vec![0usize; alleles.len()];
    let mut best: Option<Scored> = None;
    loop {
        let genes: Vec<u32> = digits.iter().zip(alleles).map(|(&d, a)| a[d]).collect();
        let (raw, violation) = score(&genes);
        let cand = Scored { genes, raw, violation };
        if best.as_ref().is_none_or(|b| oracle_order(minimize, &cand, b) == Ordering::Less) {
            best = Some(cand);
        }
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return best.expect("at least one assignment");
            }
            digits[pos] += 1;
            if digits[pos] < alleles[pos].len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

pub fn nurse_optimum(inst: &NurseInstance) -> Scored {
    let alleles: Vec<Vec<u32>> = (0..inst.nurses()).map(|i| inst.feasible(i).to_vec()).collect();
    enumerate(&alleles, true, |g| nurse_recount(inst, g))
}

pub fn mall_optimum(inst: &MallInstance) -> Scored {
    let all: Vec<u32> = (0..inst.types() as u32).collect();
    let alleles = vec![all; inst.locations()];
    enumerate(&alleles, false, |g| mall_recount(inst, g))
}
