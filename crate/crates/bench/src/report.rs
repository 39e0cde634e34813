use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::ProblemKind;
use crate::results::{CellResult, CellStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Table,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSummary {
    pub instance: String,
    pub runs: usize,
    pub feasible_runs: usize,
    /// Best feasible objective over the runs.
    pub best: Option<f64>,
    /// `best`, or the censored value.
    pub value: f64,
}

impl InstanceSummary {
    pub fn censored(&self) -> bool {
        self.best.is_none()
    }

    pub fn feasibility(&self) -> f64 {
        self.feasible_runs as f64 / self.runs as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyRow {
    pub label: String,
    pub instances: Vec<InstanceSummary>,
    /// Mean over instances of the per-instance feasible fraction.
    pub feasibility: f64,
    /// Mean over instances of the per-instance value.
    pub mean_objective: f64,
    pub timed_out: usize,
    pub failed: usize,
}

impl StrategyRow {
    pub fn censored(&self) -> usize {
        self.instances.iter().filter(|i| i.censored()).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub problem: ProblemKind,
    pub rows: Vec<StrategyRow>,
    pub bound: Option<f64>,
    pub base_seed: Option<u64>,
    pub config_digest: Option<String>,
}

impl ExperimentReport {
    pub fn row(&self, label: &str) -> Option<&StrategyRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

fn first_appearance<'a>(items: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen: Vec<&str> = Vec::new();
    for item in items {
        if !seen.contains(&item) {
            seen.push(item);
        }
    }
    seen
}

/// Folds per-run results into per-strategy rows. Strategies and instances
/// keep the order in which they first appear.
pub fn aggregate(problem: ProblemKind, results: &[CellResult], bound: Option<f64>) -> ExperimentReport {
    let labels = first_appearance(results.iter().map(|r| r.strategy.as_str()));
    let rows = labels
        .into_iter()
        .map(|label| {
            let cells: Vec<&CellResult> = results.iter().filter(|r| r.strategy == label).collect();
            let ids = first_appearance(cells.iter().map(|r| r.instance.as_str()));
            let instances: Vec<InstanceSummary> = ids
                .into_iter()
                .map(|id| {
                    let runs: Vec<&&CellResult> = cells.iter().filter(|r| r.instance == id).collect();
                    let best = runs.iter().filter(|r| r.feasible).map(|r| r.raw).reduce(|a, b| {
                        if problem.minimizes() {
                            a.min(b)
                        } else {
                            a.max(b)
                        }
                    });
                    InstanceSummary {
                        instance: id.into(),
                        runs: runs.len(),
                        feasible_runs: runs.iter().filter(|r| r.feasible).count(),
                        best,
                        value: best.unwrap_or(problem.censored_value()),
                    }
                })
                .collect();
            let n = instances.len() as f64;
            let feasibility = instances.iter().map(InstanceSummary::feasibility).sum::<f64>() / n;
            let mean_objective = instances.iter().map(|i| i.value).sum::<f64>() / n;
            StrategyRow {
                label: label.into(),
                feasibility,
                mean_objective,
                timed_out: cells.iter().filter(|r| r.status == CellStatus::Timeout).count(),
                failed: cells.iter().filter(|r| r.status == CellStatus::Failed).count(),
                instances,
            }
        })
        .collect();
    ExperimentReport { problem, rows, bound, base_seed: None, config_digest: None }
}

fn percent(fraction: f64) -> String {
    format!("{:.1}%", 100.0 * fraction)
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => emit_table(report),
        ReportFormat::Csv => emit_csv(report),
    }
}

fn emit_table(report: &ExperimentReport) -> String {
    let p = report.problem;
    let mut lines: Vec<[String; 3]> =
        vec![["Strategy".into(), p.objective_label().into(), p.feasibility_label().into()]];
    if let Some(b) = report.bound {
        lines.push(["Bound".into(), format!("{b:.1}"), "-".into()]);
    }
    for row in &report.rows {
        lines.push([row.label.clone(), format!("{:.1}", row.mean_objective), percent(row.feasibility)]);
    }
    let width = |c: usize| lines.iter().map(|l| l[c].len()).max().unwrap_or(0);
    let (w0, w1, w2) = (width(0), width(1), width(2));

    let mut out = String::new();
    let _ = write!(out, "# problem: {p}");
    if let Some(first) = report.rows.first() {
        let runs = first.instances.first().map_or(0, |i| i.runs);
        let _ = write!(out, "; instances: {}; runs per instance: {runs}", first.instances.len());
    }
    if let Some(seed) = report.base_seed {
        let _ = write!(out, "; base seed: {seed}");
    }
    out.push('\n');
    if let Some(d) = &report.config_digest {
        let _ = writeln!(out, "# config sha256: {d}");
    }
    for l in &lines {
        let _ = writeln!(out, "{:<w0$}  {:>w1$}  {:>w2$}", l[0], l[1], l[2]);
    }
    let censored: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.censored() > 0)
        .map(|r| format!("{} {}", r.label, r.censored()))
        .collect();
    if !censored.is_empty() {
        let _ = writeln!(
            out,
            "# instances without a feasible run (counted as {}): {}",
            p.censored_value(),
            censored.join(", ")
        );
    }
    for (what, count) in [
        ("runs stopped by the time limit", report.rows.iter().map(|r| r.timed_out).sum::<usize>()),
        ("failed runs", report.rows.iter().map(|r| r.failed).sum()),
    ] {
        if count > 0 {
            let _ = writeln!(out, "# {what}: {count}");
        }
    }
    out
}

fn emit_csv(report: &ExperimentReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["strategy", "instance", "runs", "feasible_runs", "feasibility", "objective", "censored"];
    w.write_record(header).expect("in-memory write");
    for row in &report.rows {
        for i in &row.instances {
            w.write_record([
                row.label.clone(),
                i.instance.clone(),
                i.runs.to_string(),
                i.feasible_runs.to_string(),
                i.feasibility().to_string(),
                i.value.to_string(),
                i.censored().to_string(),
            ])
            .expect("in-memory write");
        }
        let runs: usize = row.instances.iter().map(|i| i.runs).sum();
        let feasible: usize = row.instances.iter().map(|i| i.feasible_runs).sum();
        w.write_record([
            row.label.clone(),
            "*".into(),
            runs.to_string(),
            feasible.to_string(),
            row.feasibility.to_string(),
            row.mean_objective.to_string(),
            row.censored().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("csv is utf-8")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Feasibility,
    Objective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Better,
    Worse,
    /// Within the margin.
    Tied,
    /// One of the strategies is not in the report.
    Missing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub metric: Metric,
    pub a_value: Option<f64>,
    pub b_value: Option<f64>,
    pub verdict: Verdict,
}

impl Comparison {
    /// `a` is not worse than `b` beyond the margin.
    pub fn holds(&self) -> bool {
        matches!(self.verdict, Verdict::Better | Verdict::Tied)
    }
}

/// Verdict on `a` against `b` for each pair. Feasibility is a fraction, so
/// a margin of 0.05 means five percentage points; objective margins are in
/// objective units and respect the problem's sense.
pub fn compare_orderings(report: &ExperimentReport, pairs: &[(&str, &str)], metric: Metric, margin: f64) -> Vec<Comparison> {
    let value = |label: &str| {
        report.row(label).map(|r| match metric {
            Metric::Feasibility => r.feasibility,
            Metric::Objective => r.mean_objective,
        })
    };
    let higher_is_better = metric == Metric::Feasibility || !report.problem.minimizes();
    pairs
        .iter()
        .map(|&(a, b)| {
            let (av, bv) = (value(a), value(b));
            let verdict = match (av, bv) {
                (Some(x), Some(y)) => {
                    let gain = if higher_is_better { x - y } else { y - x };
                    if gain.abs() <= margin {
                        Verdict::Tied
                    } else if gain > 0.0 {
                        Verdict::Better
                    } else {
                        Verdict::Worse
                    }
                }
                _ => Verdict::Missing,
            };
            Comparison { a: a.into(), b: b.into(), metric, a_value: av, b_value: bv, verdict }
        })
        .collect()
}
