//! Partner selection for recombination and for fitness evaluation.

mod evaluation;
mod grid;
mod joined;
mod mating;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use evaluation::{better_of_two, evaluate_with_partners};
pub use grid::{grid_neighbors, Cell, ToroidalGrid};
pub use joined::joined_topology;
pub use mating::{acceptance_probability, select_mate, MateChoice};

/// How the second parent is drawn from a lower-level population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatingKind {
    RankSelection,
    Random,
    Best,
    Distributed,
    Joined,
    Attractiveness,
    Choice,
}

impl MatingKind {
    pub const ALL: [MatingKind; 7] = [
        MatingKind::RankSelection,
        MatingKind::Random,
        MatingKind::Best,
        MatingKind::Distributed,
        MatingKind::Joined,
        MatingKind::Attractiveness,
        MatingKind::Choice,
    ];

    pub fn token(self) -> &'static str {
        match self {
            MatingKind::RankSelection => "S",
            MatingKind::Random => "R",
            MatingKind::Best => "B",
            MatingKind::Distributed => "D",
            MatingKind::Joined => "J",
            MatingKind::Attractiveness => "A",
            MatingKind::Choice => "C",
        }
    }
}

impl fmt::Display for MatingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownToken {
    pub token: String,
    pub valid: &'static str,
}

impl fmt::Display for UnknownToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown strategy `{}` (valid: {})", self.token, self.valid)
    }
}

impl std::error::Error for UnknownToken {}

impl FromStr for MatingKind {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MatingKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| UnknownToken { token: s.into(), valid: "S, R, B, D, J, A, C" })
    }
}

/// How partners are picked to complete a partial solution for evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EvalKind {
    RankBased,
    Random,
    Best,
    Distributed,
    BestRandom,
    RankRandom,
    RandomRandom,
}

impl EvalKind {
    pub const ALL: [EvalKind; 7] = [
        EvalKind::RankBased,
        EvalKind::Random,
        EvalKind::Best,
        EvalKind::Distributed,
        EvalKind::BestRandom,
        EvalKind::RankRandom,
        EvalKind::RandomRandom,
    ];

    pub fn token(self) -> &'static str {
        match self {
            EvalKind::RankBased => "S",
            EvalKind::Random => "R",
            EvalKind::Best => "B",
            EvalKind::Distributed => "D",
            EvalKind::BestRandom => "SR",
            EvalKind::RankRandom => "BR",
            EvalKind::RandomRandom => "RR",
        }
    }

    /// The one or two single pickers this strategy samples with.
    pub fn pickers(self) -> (Picker, Option<Picker>) {
        match self {
            EvalKind::RankBased => (Picker::Rank, None),
            EvalKind::Random => (Picker::Random, None),
            EvalKind::Best => (Picker::Best, None),
            EvalKind::Distributed => (Picker::Grid, None),
            EvalKind::BestRandom => (Picker::Best, Some(Picker::Random)),
            EvalKind::RankRandom => (Picker::Rank, Some(Picker::Random)),
            EvalKind::RandomRandom => (Picker::Random, Some(Picker::Random)),
        }
    }
}

impl fmt::Display for EvalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for EvalKind {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EvalKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| UnknownToken { token: s.into(), valid: "S, R, B, D, SR, BR, RR" })
    }
}

/// A single rule for drawing one member of a population.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picker {
    Rank,
    Random,
    Best,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatingStrategy {
    pub kind: MatingKind,
    /// Candidates sampled by the choice strategy.
    pub choice_candidates: usize,
}

impl MatingStrategy {
    pub fn new(kind: MatingKind) -> Self {
        Self { kind, choice_candidates: 10 }
    }
}

/// Whether partial solutions are scored by their own substitute fitness or by
/// completing them with partners and scoring the full solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalMode {
    SubFitness,
    Partnered(EvalKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategies {
    pub mating: MatingStrategy,
    pub evaluation: EvalMode,
}

impl Strategies {
    pub fn mating(kind: MatingKind) -> Self {
        Self { mating: MatingStrategy::new(kind), evaluation: EvalMode::SubFitness }
    }

    /// Partnered evaluation with rank-selection mating.
    pub fn evaluation(kind: EvalKind) -> Self {
        Self {
            mating: MatingStrategy::new(MatingKind::RankSelection),
            evaluation: EvalMode::Partnered(kind),
        }
    }

    pub fn uses_grid(&self) -> bool {
        self.mating.kind == MatingKind::Distributed
            || self.evaluation == EvalMode::Partnered(EvalKind::Distributed)
    }
}
