use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, CommandFactory, Parser, Subcommand};
use pyramid_ga::mall::MallGenParams;
use pyramid_ga::nurse::NurseGenParams;
use pyramid_ga::selftest::run_selftest;
use pyramid_bench::config::{parse_eval, parse_mating, ExperimentConfig, ProblemKind};
use pyramid_bench::instances::{instance_files, InstanceSet, Instances};
use pyramid_bench::oracle::{mall_optimum, nurse_optimum};
use pyramid_bench::results::{read_csv, to_csv_string};
use pyramid_bench::{aggregate, emit_report, run_experiment, ReportFormat};

const OUT_ENV: &str = "PYRAMID_OUT";
const THREADS_ENV: &str = "PYRAMID_THREADS";

#[derive(Parser)]
#[command(name = "pyramid", version, about = "Pyramidal coevolutionary GA experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance set to files.
    Generate(GenerateArgs),
    /// Run an experiment and write results and a report.
    Run(RunArgs),
    /// Re-render the report of a finished experiment.
    Report(ReportArgs),
    /// Solve tiny generated instances by exhaustive enumeration.
    Oracle(OracleArgs),
    /// Run the randomised invariant checks.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    problem: ProblemKind,
    /// Number of instances.
    #[arg(long, default_value_t = 10)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Demand tightness (nurse) or bound tightness (mall), 0 to 1.
    #[arg(long)]
    tightness: Option<f64>,
    /// Nurses per ward or shop types per mall.
    #[arg(long)]
    size: Option<usize>,
    /// Output directory; defaults to $PYRAMID_OUT/instances.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn mating_token(s: &str) -> Result<String, String> {
    parse_mating(s).map(|_| s.to_string()).map_err(|e| e.to_string())
}

fn eval_token(s: &str) -> Result<String, String> {
    parse_eval(s).map(|_| s.to_string()).map_err(|e| e.to_string())
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML); flags override its fields.
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    problem: Option<ProblemKind>,
    /// Mating strategies, comma separated (SGA, S, R, B, D, J, A, C).
    #[arg(long, value_delimiter = ',', value_parser = mating_token)]
    mating: Vec<String>,
    /// Evaluation strategies, comma separated (S, R, B, D, SR, BR, RR).
    #[arg(long, value_delimiter = ',', value_parser = eval_token)]
    eval: Vec<String>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    /// Instance count to generate, or a directory of instance files.
    #[arg(long)]
    instances: Option<String>,
    #[arg(long)]
    hillclimb: bool,
    /// Output directory; defaults to $PYRAMID_OUT or ./pyramid-out.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
    /// Worker threads; defaults to $PYRAMID_THREADS or one per core.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory written by `run`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
    /// Reference value shown as a Bound row.
    #[arg(long)]
    bound: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    problem: ProblemKind,
    #[arg(long, default_value_t = 5)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    max_nurses: usize,
    #[arg(long, default_value_t = 9)]
    max_locations: usize,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("pyramid-out"))
}

fn thread_count(flag: Option<usize>) -> anyhow::Result<usize> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.parse().with_context(|| format!("{THREADS_ENV}={v} is not a thread count")),
        Err(_) => Ok(0),
    }
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let set = match args.problem {
        ProblemKind::Nurse => {
            let mut p = NurseGenParams::default();
            if let Some(t) = args.tightness {
                p.tightness = t;
            }
            if let Some(n) = args.size {
                p.nurses = n;
            }
            InstanceSet::generate_nurse(&p, args.instances, args.seed)?
        }
        ProblemKind::Mall => {
            let mut p = MallGenParams::default();
            if let Some(t) = args.tightness {
                p.tightness = t;
            }
            if let Some(n) = args.size {
                p.types = n;
            }
            InstanceSet::generate_mall(&p, args.instances, args.seed)?
        }
    };
    let dir = args.out.unwrap_or_else(|| out_dir(None).join("instances"));
    let paths = set.save(&dir)?;
    println!("wrote {} instances to {}", paths.len(), dir.display());
    Ok(())
}

fn resolve_config(args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let Some(problem) = args.problem else { bail!("give a config file or --problem") };
            let mut c = ExperimentConfig::new(problem);
            c.instances.count = 10;
            c
        }
    };
    if let Some(p) = args.problem {
        config.problem = p;
    }
    if !args.mating.is_empty() || !args.eval.is_empty() {
        config.mating = args.mating.clone();
        config.eval = args.eval.clone();
    }
    if let Some(s) = args.seed {
        config.base_seed = s;
    }
    if let Some(r) = args.runs {
        config.runs = r;
    }
    if args.hillclimb {
        config.hillclimb = true;
    }
    if let Some(spec) = &args.instances {
        match spec.parse::<usize>() {
            Ok(n) => {
                config.instances.paths.clear();
                config.instances.count = n;
            }
            Err(_) => config.instances.paths = instance_files(Path::new(spec))?,
        }
    }
    if config.mating.is_empty() && config.eval.is_empty() {
        config.mating = vec!["S".into()];
    }
    config.validate()?;
    Ok(config)
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let config = resolve_config(&args)?;
    let threads = thread_count(args.threads)?;
    let set = InstanceSet::from_source(config.problem, &config.instances)?;
    let started = Instant::now();
    let results = run_experiment(&config, &set, threads)?;
    let elapsed = started.elapsed().as_secs_f64();

    let dir = out_dir(args.out);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join("config.toml"), config.to_toml())?;
    std::fs::write(dir.join("results.csv"), to_csv_string(&results))?;
    let mut report = aggregate(config.problem, &results, config.bound);
    report.base_seed = Some(config.base_seed);
    report.config_digest = Some(config.digest());
    let text = emit_report(&report, args.format);
    let name = match args.format {
        ReportFormat::Table => "report.txt",
        ReportFormat::Csv => "report.csv",
    };
    std::fs::write(dir.join(name), &text)?;
    let manifest = serde_json::json!({
        "config_sha256": config.digest(),
        "base_seed": config.base_seed,
        "seed_scheme": pyramid_bench::seed::SEED_SCHEME,
        "cells": results.len(),
        "elapsed_secs": elapsed,
        "finished_unix_secs": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    });
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    print!("{text}");
    eprintln!("{} cells in {elapsed:.1}s, results in {}", results.len(), dir.display());
    Ok(())
}

fn report(args: ReportArgs) -> anyhow::Result<()> {
    let dir = out_dir(args.out);
    let config = ExperimentConfig::load(&dir.join("config.toml"))?;
    let file = std::fs::File::open(dir.join("results.csv")).context("opening results.csv")?;
    let results = read_csv(file)?;
    let mut report = aggregate(config.problem, &results, args.bound.or(config.bound));
    report.base_seed = Some(config.base_seed);
    report.config_digest = Some(config.digest());
    print!("{}", emit_report(&report, args.format));
    Ok(())
}

fn oracle(args: OracleArgs) -> anyhow::Result<()> {
    let set = match args.problem {
        ProblemKind::Nurse => {
            let p = NurseGenParams { nurses: args.max_nurses, ..NurseGenParams::tiny() };
            InstanceSet::generate_nurse(&p, args.instances, args.seed)?
        }
        ProblemKind::Mall => {
            let p = MallGenParams { locations: args.max_locations, ..MallGenParams::tiny() };
            InstanceSet::generate_mall(&p, args.instances, args.seed)?
        }
    };
    for (i, id) in set.ids.iter().enumerate() {
        let best = match &set.instances {
            Instances::Nurse(list) => nurse_optimum(&list[i]),
            Instances::Mall(list) => mall_optimum(&list[i]),
        };
        let genes: Vec<String> = best.genes.iter().map(u32::to_string).collect();
        println!(
            "{id}: objective {} violation {} solution [{}]",
            best.raw,
            best.violation,
            genes.join(",")
        );
    }
    Ok(())
}

fn selftest(args: SelftestArgs) -> anyhow::Result<bool> {
    let mut ok = true;
    for check in run_selftest(args.cases, args.seed) {
        let verdict = if check.passed() { "pass" } else { "FAIL" };
        println!("{verdict} {} ({} cases, {} failures)", check.name, check.cases, check.failures);
        if let Some(msg) = &check.first_failure {
            println!("     first failure: {msg}");
        }
        ok &= check.passed();
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let unknown = e.kind() == clap::error::ErrorKind::InvalidSubcommand;
            let _ = e.print();
            if unknown {
                let names: Vec<String> =
                    Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
                eprintln!("valid subcommands: {}", names.join(", "));
            }
            return ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2));
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => generate(a).map(|_| true),
        Command::Run(a) => run(a).map(|_| true),
        Command::Report(a) => report(a).map(|_| true),
        Command::Oracle(a) => oracle(a).map(|_| true),
        Command::Selftest(a) => selftest(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<pyramid_bench::config::ConfigError>().is_some();
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
