use pyramid_ga::nurse::{
    cover, full_fitness, generate_instance, hillclimb, is_balanced, sub_fitness, Contract,
    NurseGenParams, NurseInstance, NurseSolution, ShiftPattern, DAYS, SLOTS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_solution(inst: &NurseInstance, rng: &mut impl Rng) -> Vec<u32> {
    (0..inst.nurses())
        .map(|i| {
            let f = inst.feasible(i);
            f[rng.random_range(0..f.len())]
        })
        .collect()
}

/// Straight from the model: build x_ij, then sum q_is * a_jk * x_ij.
fn recount(inst: &NurseInstance, sol: &[u32]) -> (u32, u32, Vec<Vec<u32>>) {
    let n = inst.nurses();
    let m = inst.pattern_count();
    let p = inst.grades();
    let mut x = vec![vec![0u32; m]; n];
    for i in 0..n {
        x[i][sol[i] as usize] = 1;
    }
    let mut raw = 0;
    for i in 0..n {
        for j in 0..m {
            raw += u32::from(inst.pref(i, j as u32)) * x[i][j];
        }
    }
    let mut covers = vec![vec![0u32; p]; SLOTS];
    let mut violation = 0;
    for k in 0..SLOTS {
        for s in 1..=p {
            let mut c = 0;
            for i in 0..n {
                let q = u32::from(usize::from(inst.grade_of(i)) <= s);
                for j in 0..m {
                    let a = u32::from(inst.patterns()[j].0 >> k & 1 == 1);
                    c += q * a * x[i][j];
                }
            }
            covers[k][s - 1] = c;
            violation += inst.demand(k, s).saturating_sub(c);
        }
    }
    (raw, violation, covers)
}

fn enumerate_optimum(inst: &NurseInstance, weight: f64) -> f64 {
    let n = inst.nurses();
    let mut idx = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let sol: Vec<u32> = (0..n).map(|i| inst.feasible(i)[idx[i]]).collect();
        best = best.min(full_fitness(inst, &sol, weight).penalized);
        let mut g = 0;
        loop {
            if g == n {
                return best;
            }
            idx[g] += 1;
            if idx[g] < inst.feasible(g).len() {
                break;
            }
            idx[g] = 0;
            g += 1;
        }
    }
}

fn day(slots: &[usize]) -> ShiftPattern {
    ShiftPattern::from_slots(slots)
}

#[test]
fn full_fitness_matches_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..20 {
        let params = if seed % 2 == 0 { NurseGenParams::tiny() } else { NurseGenParams::default() };
        let inst = generate_instance(&params, seed).unwrap();
        for _ in 0..50 {
            let sol = random_solution(&inst, &mut rng);
            let (raw, violation, covers) = recount(&inst, &sol);
            let f = full_fitness(&inst, &sol, 3.5);
            assert_eq!((f.raw, f.violation), (raw, violation), "seed {seed}");
            assert_eq!(f.penalized, f64::from(raw) + 3.5 * f64::from(violation));
            for k in 0..SLOTS {
                for s in 1..=3 {
                    assert_eq!(cover(&inst, &sol, k, s), covers[k][s - 1]);
                }
            }
        }
    }
}

#[test]
fn feasible_sets_follow_contracts() {
    let patterns = vec![
        day(&[0, 1, 2, 3, 4]),
        day(&[7, 8, 9]),
        day(&[7, 8, 9, 10]),
        day(&[0, 7]),
    ];
    let contracts = vec![
        Contract { day: Some(5), ..Default::default() },
        Contract { night: Some(4), ..Default::default() },
        Contract { combined: Some(2), ..Default::default() },
    ];
    let inst = NurseInstance::new(
        3,
        patterns,
        vec![1, 2, 3],
        vec![vec![0; 4]; 3],
        contracts,
        vec![vec![0; 3]; SLOTS],
    )
    .unwrap();
    assert_eq!(inst.feasible(0), &[0]);
    // three nights is not four
    assert_eq!(inst.feasible(1), &[2]);
    assert_eq!(inst.feasible(2), &[3]);
    assert!(NurseSolution::new(&inst, vec![0, 1, 3]).is_err());
    assert!(NurseSolution::new(&inst, vec![0, 2, 3]).is_ok());
}

#[test]
fn single_uncovered_unit_costs_the_weight() {
    let inst = NurseInstance::new(
        3,
        vec![day(&[0, 1, 2, 3, 4])],
        vec![1],
        vec![vec![7]],
        vec![Contract { day: Some(5), ..Default::default() }],
        (0..SLOTS).map(|k| if k == 6 { vec![0, 0, 1] } else { vec![0; 3] }).collect(),
    )
    .unwrap();
    let f = full_fitness(&inst, &[0], 10.0);
    assert_eq!((f.raw, f.violation, f.penalized), (7, 1, 17.0));
}

#[test]
fn zero_demand_is_always_feasible() {
    let params = NurseGenParams { tightness: 0.0, ..NurseGenParams::default() };
    let inst = generate_instance(&params, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let sol = random_solution(&inst, &mut rng);
        let f = full_fitness(&inst, &sol, 50.0);
        assert_eq!(f.violation, 0);
        assert_eq!(f.penalized, f64::from(f.raw));
    }
}

#[test]
fn top_grade_set_sees_only_aggregate_cover() {
    let inst = generate_instance(&NurseGenParams::default(), 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let sol = random_solution(&inst, &mut rng);
        let (_, _, covers) = recount(&inst, &sol);
        let expected: u32 = (0..SLOTS).map(|k| inst.demand(k, 3).saturating_sub(covers[k][2])).sum();
        let sub = sub_fitness(&inst, 0b111, &sol, 1.0).unwrap();
        assert_eq!(sub.violation, expected);
        assert_eq!(sub.raw, full_fitness(&inst, &sol, 1.0).raw);
    }
}

#[test]
fn two_grade_set_matches_recount() {
    let inst = generate_instance(&NurseGenParams::default(), 9).unwrap();
    let members = inst.nurses_with_grades(0b110);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let sol = random_solution(&inst, &mut rng);
        let partial: Vec<u32> = members.iter().map(|&i| sol[i]).collect();
        let mut raw = 0;
        let mut violation = 0;
        for &i in &members {
            raw += u32::from(inst.pref(i, sol[i]));
        }
        for k in 0..SLOTS {
            let supply = members.iter().filter(|&&i| inst.pattern(sol[i]).covers(k)).count() as u32;
            // grade 2 and grade 3 shares of the cumulative demand
            let need = (inst.demand(k, 2) - inst.demand(k, 1)) + (inst.demand(k, 3) - inst.demand(k, 2));
            violation += need.saturating_sub(supply);
        }
        let sub = sub_fitness(&inst, 0b110, &partial, 2.0).unwrap();
        assert_eq!((sub.raw, sub.violation), (raw, violation));
    }
}

#[test]
fn grade_raws_add_up_to_the_full_raw() {
    let inst = generate_instance(&NurseGenParams::default(), 10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..50 {
        let sol = random_solution(&inst, &mut rng);
        let total: u32 = [0b001u8, 0b010, 0b100]
            .iter()
            .map(|&g| {
                let partial: Vec<u32> = inst.nurses_with_grades(g).iter().map(|&i| sol[i]).collect();
                sub_fitness(&inst, g, &partial, 1.0).unwrap().raw
            })
            .sum();
        assert_eq!(total, full_fitness(&inst, &sol, 1.0).raw);
    }
}

#[test]
fn grade_one_without_demand_has_no_violation() {
    let params = NurseGenParams { tightness: 0.0, ..NurseGenParams::default() };
    let inst = generate_instance(&params, 1).unwrap();
    let members = inst.nurses_with_grades(0b001);
    let partial: Vec<u32> = members.iter().map(|&i| inst.feasible(i)[0]).collect();
    assert_eq!(sub_fitness(&inst, 0b001, &partial, 1.0).unwrap().violation, 0);
}

#[test]
fn unknown_grade_set_is_rejected() {
    let inst = generate_instance(&NurseGenParams::default(), 1).unwrap();
    assert!(sub_fitness(&inst, 0b1000, &[], 1.0).is_err());
    assert!(sub_fitness(&inst, 0b001, &[0], 1.0).is_err());
}

/// Two nurses on day patterns, demand of one nurse on every day.
fn balance_instance(demand_day: [u32; DAYS], demand_night: [u32; DAYS]) -> NurseInstance {
    let patterns = vec![day(&[0, 1, 2, 3]), day(&[0, 1, 2, 4]), day(&[7, 8, 9])];
    let demand = (0..SLOTS)
        .map(|k| {
            let d = if k < DAYS { demand_day[k] } else { demand_night[k - DAYS] };
            vec![0, 0, d]
        })
        .collect();
    NurseInstance::new(
        3,
        patterns,
        vec![3],
        vec![vec![0, 0, 0]],
        vec![Contract { day: Some(4), night: Some(3), combined: None }],
        demand,
    )
    .unwrap()
}

#[test]
fn balance_examples() {
    // feasible
    let inst = balance_instance([1, 1, 1, 1, 0, 0, 0], [0; DAYS]);
    assert!(is_balanced(&inst, &[0]));
    // surplus on day 4 (index 3), shortage on day 5 (index 4)
    let inst = balance_instance([1, 1, 1, 0, 1, 0, 0], [0; DAYS]);
    assert_eq!(full_fitness(&inst, &[0], 1.0).violation, 1);
    assert!(is_balanced(&inst, &[0]));
    // two nights short, nothing spare
    let inst = balance_instance([1, 1, 1, 1, 0, 0, 0], [1, 1, 0, 0, 0, 0, 0]);
    assert!(!is_balanced(&inst, &[0]));
}

#[test]
fn hillclimb_finds_the_free_cover() {
    // Nurse 2 starts on a pattern that leaves day 6 uncovered; a zero-cost
    // alternative covers it.
    let patterns = vec![day(&[0, 1, 2, 3, 4]), day(&[1, 2, 3, 4, 5]), day(&[0, 1, 2, 3, 5])];
    let mut demand = vec![vec![0, 0, 0]; SLOTS];
    demand[5] = vec![0, 0, 1];
    let pref = vec![vec![0, 40, 40], vec![0, 40, 40], vec![30, 60, 0]];
    let contract = Contract { day: Some(5), ..Default::default() };
    let inst = NurseInstance::new(3, patterns, vec![1, 2, 3], pref, vec![contract; 3], demand).unwrap();
    let start = [0, 0, 0];
    let before = full_fitness(&inst, &start, 20.0);
    assert_eq!(before.violation, 1);
    let out = hillclimb(&inst, &start, 20.0, 1000);
    let after = full_fitness(&inst, &out.solution, 20.0);
    assert!(after.penalized < before.penalized);
    assert_eq!(after, out.fitness);
    assert_eq!(after.violation, 0);
    assert_eq!(after.raw, 0);
}

#[test]
fn hillclimb_leaves_local_optima_alone() {
    let inst = generate_instance(&NurseGenParams::tiny(), 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sol = random_solution(&inst, &mut rng);
    let first = hillclimb(&inst, &sol, 30.0, 10_000);
    let second = hillclimb(&inst, &first.solution, 30.0, 10_000);
    assert_eq!(second.solution, first.solution);
    assert_eq!(second.moves, 0);
}

#[test]
fn hillclimb_never_beats_the_optimum() {
    for seed in 0..10 {
        let inst = generate_instance(&NurseGenParams::tiny(), seed).unwrap();
        let weight = 25.0;
        let optimum = enumerate_optimum(&inst, weight);
        let n = inst.nurses();
        let mut idx = vec![0usize; n];
        'all: loop {
            let sol: Vec<u32> = (0..n).map(|i| inst.feasible(i)[idx[i]]).collect();
            let start = full_fitness(&inst, &sol, weight).penalized;
            let out = hillclimb(&inst, &sol, weight, 10_000);
            assert!(out.fitness.penalized <= start);
            assert!(out.fitness.penalized >= optimum);
            let mut g = 0;
            loop {
                if g == n {
                    break 'all;
                }
                idx[g] += 1;
                if idx[g] < inst.feasible(g).len() {
                    break;
                }
                idx[g] = 0;
                g += 1;
            }
        }
    }
}

#[test]
fn instance_files_round_trip() {
    let inst = generate_instance(&NurseGenParams::default(), 21).unwrap();
    let text = inst.to_json();
    let back = NurseInstance::from_json(&text).unwrap();
    assert_eq!(back, inst);
    assert_eq!(back.to_json(), text);
}
