use pyramid_ga::engine::{
    cross_level_crossover, mutate, one_point_crossover, rank_roulette_select, uniform_crossover,
};
use pyramid_ga::{
    mall, nurse, Config64, Engine, Evaluation, GeneMask, Individual64, MatingKind, PenaltyController,
    PenaltyParams, PopulationSpec, Problem, Scope, Sense, Strategies, Topology,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Minimise the sum of the genes; every gene takes values `0..alleles`.
struct SumOfGenes {
    genes: usize,
    alleles: Vec<u32>,
    flat: bool,
}

impl SumOfGenes {
    fn new(genes: usize, alleles: u32) -> Self {
        Self { genes, alleles: (0..alleles).collect(), flat: false }
    }
}

impl Problem<f64> for SumOfGenes {
    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn gene_count(&self) -> usize {
        self.genes
    }

    fn alleles(&self, _gene: usize) -> &[u32] {
        &self.alleles
    }

    fn evaluate(&self, _scope: Scope, _mask: &GeneMask, genes: &[u32]) -> Evaluation<f64> {
        let raw = if self.flat { 0.0 } else { genes.iter().map(|&g| f64::from(g)).sum() };
        Evaluation::new(raw, 0.0)
    }
}

fn ind(penalized: f64) -> Individual64 {
    Individual64::evaluated(vec![], Evaluation::new(penalized, 0.0), Sense::Minimize, 1.0)
}

/// Bottom population over the first half, top over everything.
fn two_level(genes: usize) -> Topology {
    let half: Vec<usize> = (0..genes / 2).collect();
    Topology {
        populations: vec![
            PopulationSpec {
                mask: GeneMask::new(half, genes).unwrap(),
                scope: Scope::Partial(0),
                lower_partners: vec![],
            },
            PopulationSpec { mask: GeneMask::full(genes), scope: Scope::Full, lower_partners: vec![0] },
        ],
        top: 1,
        migrant_crossover: pyramid_ga::MigrantCrossover::OnePoint,
    }
}

#[test]
fn rank_roulette_frequencies() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let single = [ind(4.0)];
    assert_eq!(rank_roulette_select(Sense::Minimize, &single, &mut rng).unwrap(), 0);

    let pop = [ind(7.0), ind(1.0), ind(4.0)];
    let draws = 100_000;
    let mut hits = [0usize; 3];
    for _ in 0..draws {
        hits[rank_roulette_select(Sense::Minimize, &pop, &mut rng).unwrap()] += 1;
    }
    let freq: Vec<f64> = hits.iter().map(|&h| h as f64 / draws as f64).collect();
    assert!((freq[1] - 0.5).abs() < 0.01, "{freq:?}");
    assert!((freq[2] - 2.0 / 6.0).abs() < 0.01);
    assert!((freq[0] - 1.0 / 6.0).abs() < 0.01);

    let equal = [ind(2.0), ind(2.0), ind(2.0), ind(2.0)];
    let mut hits = [0usize; 4];
    for _ in 0..draws {
        hits[rank_roulette_select(Sense::Minimize, &equal, &mut rng).unwrap()] += 1;
    }
    for h in hits {
        assert!((h as f64 / draws as f64 - 0.25).abs() < 0.01);
    }
    assert!(rank_roulette_select::<f64, _>(Sense::Minimize, &[], &mut rng).is_err());
}

#[test]
fn uniform_crossover_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a: Vec<u32> = (0..1000).collect();
    let b: Vec<u32> = (1000..2000).collect();
    let (c1, c2) = uniform_crossover(&a, &a, 0.66, &mut rng).unwrap();
    assert_eq!((c1.as_slice(), c2.as_slice()), (a.as_slice(), a.as_slice()));
    let (c1, c2) = uniform_crossover(&a, &b, 1.0, &mut rng).unwrap();
    assert_eq!((c1, c2), (a.clone(), b.clone()));

    let mut from_a = 0;
    for _ in 0..100 {
        let (c1, c2) = uniform_crossover(&a, &b, 0.66, &mut rng).unwrap();
        from_a += c1.iter().filter(|&&g| g < 1000).count();
        for i in 0..1000 {
            assert_ne!(c1[i] < 1000, c2[i] < 1000);
        }
    }
    let fraction = from_a as f64 / 100_000.0;
    assert!((0.63..=0.69).contains(&fraction), "{fraction}");
    assert!(uniform_crossover(&a, &b[..10], 0.5, &mut rng).is_err());
}

#[test]
fn cross_level_provenance() {
    let upper_mask = GeneMask::new((0..15).collect(), 30).unwrap();
    let lower_mask = GeneMask::new((0..6).collect(), 30).unwrap();
    let lower: Vec<u32> = (0..6).map(|g| 100 + g).collect();
    let upper: Vec<u32> = (0..15).map(|g| 200 + g).collect();
    let child = cross_level_crossover(&lower, &lower_mask, &upper, &upper_mask).unwrap();
    assert_eq!(&child[..6], lower.as_slice());
    assert_eq!(&child[6..], &upper[6..]);

    let empty = GeneMask::new(vec![], 30).unwrap();
    assert_eq!(cross_level_crossover(&[], &empty, &upper, &upper_mask).unwrap(), upper);

    // same mask, cut at the full length
    assert_eq!(one_point_crossover(&lower, &[7; 6], 6).unwrap(), lower);

    let outside = GeneMask::new(vec![20], 30).unwrap();
    assert!(cross_level_crossover(&[1], &outside, &upper, &upper_mask).is_err());
}

#[test]
fn non_contiguous_lower_mask() {
    let upper_mask = GeneMask::new(vec![0, 1, 2, 7, 8, 9], 10).unwrap();
    let lower_mask = GeneMask::new(vec![0, 9], 10).unwrap();
    let child = cross_level_crossover(&[50, 59], &lower_mask, &[0, 1, 2, 7, 8, 9], &upper_mask).unwrap();
    assert_eq!(child, vec![50, 1, 2, 7, 8, 59]);
}

#[test]
fn mutation_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mask = GeneMask::full(30);
    let wide: Vec<u32> = (0..1_000_000).collect();
    let narrow = [3u32, 5, 9];

    let mut genes = vec![42u32; 30];
    assert!(!mutate(&mut genes, &mask, 0.0, |_| &wide[..], &mut rng));
    assert_eq!(genes, vec![42; 30]);

    mutate(&mut genes, &mask, 1.0, |_| &narrow[..], &mut rng);
    assert!(genes.iter().all(|g| narrow.contains(g)));

    let trials = 10_000;
    let mut changed = 0;
    for _ in 0..trials {
        let mut genes: Vec<u32> = vec![u32::MAX; 30];
        mutate(&mut genes, &mask, 0.01, |_| &wide[..], &mut rng);
        changed += genes.iter().filter(|&&g| g != u32::MAX).count();
    }
    let mean = changed as f64 / trials as f64;
    assert!((mean - 0.3).abs() <= 0.02, "{mean}");
}

#[test]
fn initial_pyramid_sizes() {
    let inst = nurse::generate_instance(&nurse::NurseGenParams::default(), 1).unwrap();
    let topo = nurse::pyramid_topology(&inst).unwrap();
    let engine = Engine::new(&inst, Config64::nurse(), Strategies::mating(MatingKind::RankSelection));
    let state = engine.init(&topo, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let sizes: Vec<usize> = state.populations.iter().map(|p| p.individuals.len()).collect();
    assert_eq!(sizes, vec![100, 100, 100, 100, 100, 100, 100, 300]);
    for pop in &state.populations {
        for i in &pop.individuals {
            for (&g, &a) in pop.mask.members().iter().zip(&i.genes) {
                assert!(inst.feasible(g).contains(&a));
            }
        }
    }
    let bottoms: Vec<usize> = state.populations.iter().filter(|p| p.is_bottom()).map(|p| p.id).collect();
    assert_eq!(bottoms, vec![0, 1, 2]);
    assert_eq!(state.populations[6].lower_partners, vec![0, 1, 2, 3, 4, 5]);
    assert_eq!(state.populations[3].lower_partners, vec![0, 1]);

    let minst = mall::generate_mall_instance(&mall::MallGenParams::default(), 1).unwrap();
    let topo = mall::pyramid_topology(&minst).unwrap();
    let engine = Engine::new(&minst, Config64::mall(), Strategies::mating(MatingKind::RankSelection));
    let state = engine.init(&topo, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let sizes: Vec<usize> = state.populations.iter().map(|p| p.individuals.len()).collect();
    assert_eq!(sizes, vec![100, 100, 100, 100, 100, 500]);
}

#[test]
fn single_population_is_a_plain_ga() {
    let problem = SumOfGenes::new(12, 4);
    let engine = Engine::new(&problem, Config64::single(50), Strategies::mating(MatingKind::RankSelection));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut state = engine.init(&Topology::single(12), &mut rng).unwrap();
    assert_eq!(state.populations.len(), 1);
    let result = engine.run(&mut state, &mut rng, None);
    assert_eq!(result.best_feasible.unwrap().raw, 0.0);
}

#[test]
fn bad_topologies_are_rejected() {
    let problem = SumOfGenes::new(6, 3);
    let mut topo = two_level(6);
    topo.populations[0].lower_partners = vec![1];
    let engine = Engine::new(&problem, Config64::with_sizes(20, 10, 10), Strategies::mating(MatingKind::RankSelection));
    assert!(engine.init(&topo, &mut ChaCha8Rng::seed_from_u64(0)).is_err());

    let empty = SumOfGenes { genes: 2, alleles: vec![], flat: false };
    let engine = Engine::new(&empty, Config64::single(10), Strategies::mating(MatingKind::RankSelection));
    assert!(engine.init(&Topology::single(2), &mut ChaCha8Rng::seed_from_u64(0)).is_err());
}

#[test]
fn elites_survive_in_place() {
    let problem = SumOfGenes::new(20, 10);
    let config = Config64::with_sizes(200, 100, 100);
    assert_eq!(config.elite_count(100), 10);
    let engine = Engine::new(&problem, config, Strategies::mating(MatingKind::RankSelection));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut state = engine.init(&two_level(20), &mut rng).unwrap();
    let before = state.clone();
    engine.step(&mut state, &mut rng);
    for (old, new) in before.populations.iter().zip(&state.populations) {
        let mut order: Vec<usize> = (0..old.individuals.len()).collect();
        order.sort_by(|&a, &b| {
            old.individuals[a].penalized.total_cmp(&old.individuals[b].penalized).then(a.cmp(&b))
        });
        for &i in &order[..10] {
            assert_eq!(new.individuals[i].genes, old.individuals[i].genes);
        }
        assert_eq!(new.individuals.len(), old.individuals.len());
    }
}

#[test]
fn bottom_children_come_from_their_own_population() {
    let problem = SumOfGenes::new(20, 1000);
    let mut config = Config64::with_sizes(200, 100, 100);
    config.mutation_rate = 0.0;
    let engine = Engine::new(&problem, config, Strategies::mating(MatingKind::RankSelection));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut state = engine.init(&two_level(20), &mut rng).unwrap();
    let before = state.populations[0].clone();
    assert!(before.is_bottom());
    engine.step(&mut state, &mut rng);
    for child in &state.populations[0].individuals {
        for (pos, &a) in child.genes.iter().enumerate() {
            assert!(before.individuals.iter().any(|p| p.genes[pos] == a));
        }
    }
}

#[test]
fn seeded_steps_repeat() {
    let inst = nurse::generate_instance(&nurse::NurseGenParams::default(), 2).unwrap();
    let topo = nurse::pyramid_topology(&inst).unwrap();
    let engine = Engine::new(&inst, Config64::nurse(), Strategies::mating(MatingKind::Choice));
    let go = || {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut state = engine.init(&topo, &mut rng).unwrap();
        engine.step(&mut state, &mut rng);
        engine.step(&mut state, &mut rng);
        state
    };
    assert_eq!(go(), go());
}

#[test]
fn flat_fitness_stops_after_the_stagnation_limit() {
    let problem = SumOfGenes { flat: true, ..SumOfGenes::new(8, 3) };
    let engine = Engine::new(&problem, Config64::single(30), Strategies::mating(MatingKind::RankSelection));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut state = engine.init(&Topology::single(8), &mut rng).unwrap();
    let result = engine.run(&mut state, &mut rng, None);
    assert_eq!(result.generations, 50);
    assert_eq!(result.trace.len(), 50);
}

#[test]
fn optimum_in_the_initial_population_is_kept() {
    let problem = SumOfGenes::new(2, 2);
    let engine = Engine::new(&problem, Config64::single(40), Strategies::mating(MatingKind::RankSelection));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut state = engine.init(&Topology::single(2), &mut rng).unwrap();
    assert!(state.populations[0].individuals.iter().any(|i| i.raw == 0.0));
    let result = engine.run(&mut state, &mut rng, None);
    assert_eq!(result.best_feasible.unwrap().genes, vec![0, 0]);
}

#[test]
fn penalty_rule_examples() {
    let feasible = Individual64::evaluated(vec![], Evaluation::new(5.0, 0.0), Sense::Minimize, 1.0);
    let infeasible = Individual64::evaluated(vec![], Evaluation::new(2.0, 3.0), Sense::Minimize, 1.0);

    let mut pc = PenaltyController::new(200.0, PenaltyParams::default());
    assert!((pc.update(Sense::Minimize, std::slice::from_ref(&feasible)) - 198.0).abs() < 1e-9);

    let mut pc = PenaltyController::new(2.0, PenaltyParams::default());
    for _ in 0..10 {
        pc.update(Sense::Minimize, std::slice::from_ref(&infeasible));
    }
    assert!((pc.weight() - 2.0 * 1.1f64.powi(10)).abs() < 1e-9);

    let params = PenaltyParams::default();
    let mut pc = PenaltyController::new(params.max, params);
    assert_eq!(pc.update(Sense::Minimize, std::slice::from_ref(&infeasible)), params.max);

    // raw gap 3 over violation 3, plus one
    let mut pc = PenaltyController::new(50.0, PenaltyParams::default());
    assert!((pc.update(Sense::Minimize, &[feasible, infeasible]) - 2.0).abs() < 1e-9);
}

#[test]
fn random_rng_streams_differ() {
    let problem = SumOfGenes::new(30, 50);
    let engine = Engine::new(&problem, Config64::single(20), Strategies::mating(MatingKind::RankSelection));
    let a = engine.init(&Topology::single(30), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let b = engine.init(&Topology::single(30), &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    assert_ne!(a.populations[0].individuals, b.populations[0].individuals);
}
