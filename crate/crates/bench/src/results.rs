use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    /// Stopped by the wall-clock limit.
    Timeout,
    /// The run failed; it counts as infeasible.
    Failed,
}

/// Outcome of one (strategy, instance, run) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub strategy: String,
    pub instance: String,
    pub run: usize,
    pub seed: u64,
    pub feasible: bool,
    /// Objective of the best feasible solution, else of the best solution.
    pub raw: f64,
    pub violation: f64,
    pub penalized: f64,
    pub generations: usize,
    pub hillclimb_moves: usize,
    pub status: CellStatus,
}

impl CellResult {
    pub fn failed(strategy: &str, instance: &str, run: usize, seed: u64) -> Self {
        Self {
            strategy: strategy.into(),
            instance: instance.into(),
            run,
            seed,
            feasible: false,
            raw: f64::NAN,
            violation: f64::NAN,
            penalized: f64::NAN,
            generations: 0,
            hillclimb_moves: 0,
            status: CellStatus::Failed,
        }
    }
}

pub fn write_csv<W: Write>(out: W, results: &[CellResult]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(results: &[CellResult]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, results).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<CellResult>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
