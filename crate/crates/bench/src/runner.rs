use std::panic::{catch_unwind, AssertUnwindSafe};

use pyramid_ga::nurse::{self, NurseHillclimber};
use pyramid_ga::{mall, Engine, Problem, PyramidConfig, Refiner, Strategies, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, StrategySpec};
use crate::instances::{InstanceSet, Instances};
use crate::results::{CellResult, CellStatus};
use crate::seed::derive_seed;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("instance set holds {found} instances, config expects {expected}")]
    ProblemMismatch { found: String, expected: String },
    #[error("cannot build thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Everything one cell needs besides the instance.
struct CellPlan<'a> {
    spec: &'a StrategySpec,
    config: PyramidConfig<f64>,
    topology: Topology,
}

fn execute<P: Problem<f64>>(
    problem: &P,
    plan: &CellPlan<'_>,
    seed: u64,
    refiner: Option<&dyn Refiner<f64>>,
) -> pyramid_ga::Result<pyramid_ga::RunResult64> {
    let strategies = plan.spec.strategies.unwrap_or_else(|| Strategies::mating(pyramid_ga::MatingKind::RankSelection));
    let engine = Engine::new(problem, plan.config.clone(), strategies);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = engine.init(&plan.topology, &mut rng)?;
    Ok(engine.run(&mut state, &mut rng, refiner))
}

fn topology_for(set: &InstanceSet, index: usize, baseline: bool) -> pyramid_ga::Result<Topology> {
    match &set.instances {
        Instances::Nurse(list) if baseline => Ok(Topology::single(list[index].nurses())),
        Instances::Mall(list) if baseline => Ok(Topology::single(list[index].locations())),
        Instances::Nurse(list) => nurse::pyramid_topology(&list[index]),
        Instances::Mall(list) => mall::pyramid_topology(&list[index]),
    }
}

/// Runs one cell. Errors and panics become a failed, infeasible cell.
pub fn run_cell(
    config: &ExperimentConfig,
    set: &InstanceSet,
    spec: &StrategySpec,
    instance: usize,
    run: usize,
) -> CellResult {
    let seed = derive_seed(config.base_seed, instance, run);
    let id = &set.ids[instance];
    let outcome = catch_unwind(AssertUnwindSafe(|| -> pyramid_ga::Result<CellResult> {
        let topology = topology_for(set, instance, spec.strategies.is_none())?;
        let plan = CellPlan { spec, config: config.pyramid_config(topology.populations.len()), topology };
        let result = match &set.instances {
            Instances::Nurse(list) => {
                let inst = &list[instance];
                let mut climber = NurseHillclimber::new(inst);
                if let Some(b) = config.pyramid.hillclimb_budget {
                    climber.budget = b;
                }
                let refiner: Option<&dyn Refiner<f64>> = config.hillclimb.then_some(&climber);
                execute(inst, &plan, seed, refiner)?
            }
            Instances::Mall(list) => execute(&list[instance], &plan, seed, None)?,
        };
        let best = result.best_feasible.as_ref().unwrap_or(&result.best_overall);
        Ok(CellResult {
            strategy: spec.label.clone(),
            instance: id.clone(),
            run,
            seed,
            feasible: result.is_feasible(),
            raw: best.raw,
            violation: best.violation,
            penalized: best.penalized,
            generations: result.generations,
            hillclimb_moves: result.refine_moves,
            status: if result.timed_out { CellStatus::Timeout } else { CellStatus::Ok },
        })
    }));
    match outcome {
        Ok(Ok(cell)) => cell,
        _ => CellResult::failed(&spec.label, id, run, seed),
    }
}

/// Runs every (strategy, instance, run) cell on `threads` workers (0 picks
/// the rayon default). Results come back in strategy, instance, run order
/// whatever the thread count.
pub fn run_experiment(
    config: &ExperimentConfig,
    set: &InstanceSet,
    threads: usize,
) -> Result<Vec<CellResult>, RunError> {
    config.validate()?;
    if set.problem() != config.problem {
        return Err(RunError::ProblemMismatch { found: set.problem().to_string(), expected: config.problem.to_string() });
    }
    let specs = config.strategies()?;
    let cells: Vec<(usize, usize, usize)> = (0..specs.len())
        .flat_map(|s| (0..set.len()).flat_map(move |i| (0..config.runs).map(move |r| (s, i, r))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(|| {
        cells
            .par_iter()
            .map(|&(s, i, r)| run_cell(config, set, &specs[s], i, r))
            .collect()
    }))
}
