//! Randomised invariant checks shared by the CLI `selftest` command and the
//! test suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::operators::{cross_level_crossover, rank_weights, uniform_crossover};
use crate::engine::{Evaluation, GeneMask, Individual};
use crate::mall::{self, size_decompose, MallGenParams};
use crate::nurse::{self, NurseGenParams};
use crate::partnering::{better_of_two, ToroidalGrid};
use crate::scalar::Sense;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

type Check = fn(&mut ChaCha8Rng) -> Result<(), String>;

const CHECKS: [(&str, Check); 9] = [
    ("rank weights", rank_weights_case),
    ("crossover provenance", provenance_case),
    ("mask discipline", mask_case),
    ("penalty consistency", penalty_case),
    ("size decomposition", decomposition_case),
    ("grid symmetry", grid_case),
    ("better of two", better_of_two_case),
    ("mall feasibility scan", mall_scan_case),
    ("hillclimb monotone", hillclimb_case),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs every check `cases` times from generators seeded by `seed`.
pub fn run_selftest(cases: usize, seed: u64) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(n, &(name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64 + 1) << 32));
            let mut out = CheckOutcome { name, cases, failures: 0, first_failure: None };
            for _ in 0..cases {
                if let Err(msg) = check(&mut rng) {
                    out.failures += 1;
                    out.first_failure.get_or_insert(msg);
                }
            }
            out
        })
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_individual(rng: &mut ChaCha8Rng, sense: Sense) -> Individual<f64> {
    let raw = f64::from(rng.random_range(0..20u32));
    let violation = if rng.random_bool(0.5) { 0.0 } else { f64::from(rng.random_range(1..5u32)) };
    Individual::evaluated(vec![0], Evaluation::new(raw, violation), sense, 3.0)
}

fn random_sense(rng: &mut ChaCha8Rng) -> Sense {
    if rng.random_bool(0.5) {
        Sense::Minimize
    } else {
        Sense::Maximize
    }
}

fn rank_weights_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let sense = random_sense(rng);
    let n = rng.random_range(1..30);
    let inds: Vec<_> = (0..n).map(|_| random_individual(rng, sense)).collect();
    let w = rank_weights(sense, &inds);
    let total: f64 = w.iter().sum();
    ensure((total - (n * (n + 1)) as f64 / 2.0).abs() < 1e-9, || format!("weights sum to {total}"))?;
    for a in 0..n {
        for b in 0..n {
            let ord = sense.compare(inds[a].penalized, inds[b].penalized);
            let consistent = match ord {
                std::cmp::Ordering::Less => w[a] > w[b],
                std::cmp::Ordering::Equal => w[a] == w[b],
                std::cmp::Ordering::Greater => w[a] < w[b],
            };
            ensure(consistent, || format!("weights {} and {} disagree with fitness order", w[a], w[b]))?;
        }
    }
    Ok(())
}

fn provenance_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let len = rng.random_range(0..40);
    let a: Vec<u32> = (0..len).map(|_| rng.random_range(0..6)).collect();
    let b: Vec<u32> = (0..len).map(|_| rng.random_range(0..6)).collect();
    let p = rng.random_range(0.0..=1.0);
    let (c1, c2) = uniform_crossover(&a, &b, p, rng).map_err(|e| e.to_string())?;
    for i in 0..len {
        let ok = (c1[i] == a[i] && c2[i] == b[i]) || (c1[i] == b[i] && c2[i] == a[i]);
        ensure(ok, || format!("gene {i} has no parent"))?;
    }
    Ok(())
}

fn random_mask(rng: &mut ChaCha8Rng, within: &[usize], n: usize) -> GeneMask {
    let members = within.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
    GeneMask::new(members, n).expect("members in range")
}

fn mask_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.random_range(1..30);
    let all: Vec<usize> = (0..n).collect();
    let upper = random_mask(rng, &all, n);
    let lower = random_mask(rng, upper.members(), n);
    let up: Vec<u32> = (0..upper.len()).map(|_| rng.random_range(0..4)).collect();
    let low: Vec<u32> = (0..lower.len()).map(|_| rng.random_range(4..8)).collect();
    let child = cross_level_crossover(&low, &lower, &up, &upper).map_err(|e| e.to_string())?;
    ensure(child.len() == upper.len(), || "child length differs from the upper mask".into())?;
    let mut from_lower = low.iter();
    for (pos, &gene) in upper.members().iter().enumerate() {
        let expect = if lower.contains(gene) { *from_lower.next().expect("lower gene") } else { up[pos] };
        ensure(child[pos] == expect, || format!("gene {gene} taken from the wrong parent"))?;
    }
    Ok(())
}

fn penalty_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let sense = random_sense(rng);
    let raw = rng.random_range(-100.0..100.0);
    let v = f64::from(rng.random_range(0..10u32));
    let w = rng.random_range(1.0..1e3);
    let eval = Evaluation::new(raw, v);
    let ind = Individual::evaluated(vec![], eval, sense, w);
    let expect = match sense {
        Sense::Minimize => raw + w * v,
        Sense::Maximize => raw - w * v,
    };
    ensure((ind.penalized - expect).abs() < 1e-9, || format!("penalized {} != {expect}", ind.penalized))?;
    let worse = Evaluation::new(raw, v + 1.0).penalized(sense, w);
    ensure(sense.better(ind.penalized, worse), || "extra violation did not worsen fitness".into())?;
    ensure(ind.is_feasible() == (v == 0.0), || "feasibility flag disagrees with violation".into())
}

fn decomposition_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let count = rng.random_range(0..1000);
    let mix = size_decompose(count);
    ensure(mix.locations() == count, || format!("{count} decomposes into {mix:?}"))?;
    ensure(mix.large == count / 3 && mix.small + mix.medium <= 1, || format!("{count} not greedy: {mix:?}"))?;
    ensure(mix == size_decompose(count), || "decomposition not deterministic".into())
}

fn grid_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let grid = ToroidalGrid::new(rng.random_range(3..15), rng.random_range(3..15)).map_err(|e| e.to_string())?;
    let a = grid.cell_of(rng.random_range(0..grid.cells()));
    for b in grid.neighbors(a) {
        ensure(grid.neighbors(b).contains(&a), || format!("{a:?} -> {b:?} is one-way"))?;
        ensure(b != a, || format!("{a:?} neighbours itself"))?;
    }
    Ok(())
}

fn better_of_two_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let sense = random_sense(rng);
    let w = rng.random_range(1.0..100.0);
    let a = Evaluation::new(rng.random_range(0.0..100.0), f64::from(rng.random_range(0..3u32)));
    let b = Evaluation::new(rng.random_range(0.0..100.0), f64::from(rng.random_range(0..3u32)));
    let best = better_of_two(sense, w, a, b);
    ensure(best == a || best == b, || "result is neither input".into())?;
    let (pa, pb, pbest) = (a.penalized(sense, w), b.penalized(sense, w), best.penalized(sense, w));
    ensure(!sense.better(pa, pbest) && !sense.better(pb, pbest), || "a better input was dropped".into())?;
    ensure(best == better_of_two(sense, w, b, a) || pa == pb, || "order dependent".into())
}

fn mall_scan_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let params = MallGenParams {
        locations: rng.random_range(3..25),
        areas: rng.random_range(1..4),
        types: rng.random_range(1..6),
        tightness: rng.random_range(0.0..=1.0),
        ..MallGenParams::default()
    };
    let inst = mall::generate_mall_instance(&params, rng.random()).map_err(|e| e.to_string())?;
    let sol: Vec<u32> = (0..inst.locations()).map(|_| rng.random_range(0..inst.types() as u32)).collect();
    let fit = mall::full_rent(&inst, &sol, 1.0);
    // Direct scan: shop counts per type and per size class.
    let mut shops = vec![0u32; inst.types()];
    let mut classes = [0u32; 3];
    for a in 0..inst.areas() {
        for (t, count) in shops.iter_mut().enumerate() {
            let c = sol[inst.area_range(a)].iter().filter(|&&x| x as usize == t).count() as u32;
            let mix = size_decompose(c);
            *count += mix.shops();
            for (total, k) in classes.iter_mut().zip(mix.by_class()) {
                *total += k;
            }
        }
    }
    let holds = (0..inst.types()).all(|t| inst.bounds(t).min <= shops[t] && shops[t] <= inst.bounds(t).max)
        && classes.iter().zip(inst.size_caps()).all(|(&n, cap)| n <= cap);
    ensure(fit.is_feasible() == holds, || format!("violation {} but scan says {holds}", fit.violation))
}

fn hillclimb_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let params = NurseGenParams { nurses: rng.random_range(3..8), tightness: rng.random_range(0.3..1.0), ..NurseGenParams::tiny() };
    let inst = nurse::generate_instance(&params, rng.random()).map_err(|e| e.to_string())?;
    let sol: Vec<u32> = (0..inst.nurses())
        .map(|i| {
            let f = inst.feasible(i);
            f[rng.random_range(0..f.len())]
        })
        .collect();
    let w = rng.random_range(1.0..50.0);
    let before = nurse::full_fitness(&inst, &sol, w);
    let out = nurse::hillclimb(&inst, &sol, w, 200);
    let after = nurse::full_fitness(&inst, &out.solution, w);
    ensure(after.penalized <= before.penalized, || format!("{} -> {}", before.penalized, after.penalized))?;
    ensure(after == out.fitness, || "reported fitness differs from a fresh evaluation".into())?;
    ensure(
        (0..inst.nurses()).all(|i| inst.feasible(i).contains(&out.solution[i])),
        || "hillclimb produced an infeasible pattern".into(),
    )
}
