use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{PyramidError, Result};

/// Days and nights of one week.
pub const SLOTS: usize = 14;
/// Slots `0..DAYS` are day shifts, `DAYS..SLOTS` night shifts.
pub const DAYS: usize = 7;

const FORMAT: &str = "nurse-instance";
const VERSION: u32 = 1;

/// A weekly shift pattern: bit `k` set when the pattern works slot `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftPattern(pub u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    Day,
    Night,
    Combined,
    Empty,
}

impl ShiftPattern {
    pub fn from_slots(slots: &[usize]) -> Self {
        Self(slots.iter().fold(0u16, |acc, &k| acc | (1 << k)))
    }

    pub fn covers(self, slot: usize) -> bool {
        self.0 >> slot & 1 == 1
    }

    pub fn day_count(self) -> u32 {
        (self.0 & 0x7f).count_ones()
    }

    pub fn night_count(self) -> u32 {
        (self.0 >> DAYS & 0x7f).count_ones()
    }

    pub fn total(self) -> u32 {
        (self.0 & 0x3fff).count_ones()
    }

    pub fn kind(self) -> PatternKind {
        match (self.day_count() > 0, self.night_count() > 0) {
            (true, false) => PatternKind::Day,
            (false, true) => PatternKind::Night,
            (true, true) => PatternKind::Combined,
            (false, false) => PatternKind::Empty,
        }
    }

    /// Slots worked, ascending.
    pub fn slots(self) -> impl Iterator<Item = usize> {
        (0..SLOTS).filter(move |&k| self.covers(k))
    }
}

impl fmt::Display for ShiftPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..SLOTS {
            f.write_str(if self.covers(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for ShiftPattern {
    type Err = PyramidError;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() != SLOTS {
            return Err(PyramidError::Format(format!("pattern `{s}` is not {SLOTS} bits")));
        }
        let mut bits = 0u16;
        for (k, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << k,
                '0' => {}
                _ => return Err(PyramidError::Format(format!("pattern `{s}` has non-bit characters"))),
            }
        }
        Ok(Self(bits))
    }
}

/// Shifts per week a nurse works under each regime, where defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Contract {
    pub day: Option<u8>,
    pub night: Option<u8>,
    pub combined: Option<u8>,
}

impl Contract {
    /// Whether `pattern` belongs to this nurse's feasible set.
    pub fn admits(&self, pattern: ShiftPattern) -> bool {
        let matches = |want: Option<u8>, have: u32| want.is_some_and(|w| u32::from(w) == have);
        match pattern.kind() {
            PatternKind::Day => matches(self.day, pattern.day_count()),
            PatternKind::Night => matches(self.night, pattern.night_count()),
            PatternKind::Combined => matches(self.combined, pattern.total()),
            PatternKind::Empty => false,
        }
    }
}

/// One ward's weekly scheduling data.
#[derive(Debug, Clone, PartialEq)]
pub struct NurseInstance {
    grades: usize,
    patterns: Vec<ShiftPattern>,
    grade_of: Vec<u8>,
    pref: Vec<Vec<u8>>,
    contracts: Vec<Contract>,
    /// `demand[k][s - 1]`: nurses of grade `s` or better needed on slot `k`.
    demand: Vec<Vec<u32>>,
    feasible: Vec<Vec<u32>>,
}

impl NurseInstance {
    pub fn new(
        grades: usize,
        patterns: Vec<ShiftPattern>,
        grade_of: Vec<u8>,
        pref: Vec<Vec<u8>>,
        contracts: Vec<Contract>,
        demand: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let n = grade_of.len();
        let m = patterns.len();
        let bad = |msg: String| Err(PyramidError::InvalidInstance(msg));
        if grades == 0 || grades > 8 {
            return bad(format!("grade count {grades} outside 1..=8"));
        }
        if pref.len() != n || contracts.len() != n {
            return bad("per-nurse tables disagree on the nurse count".into());
        }
        if let Some(i) = pref.iter().position(|row| row.len() != m) {
            return bad(format!("preference row of nurse {i} does not have {m} entries"));
        }
        if pref.iter().flatten().any(|&c| c > 100) {
            return bad("preference costs must lie in 0..=100".into());
        }
        if let Some(i) = grade_of.iter().position(|&g| g == 0 || usize::from(g) > grades) {
            return bad(format!("nurse {i} has a grade outside 1..={grades}"));
        }
        if demand.len() != SLOTS || demand.iter().any(|row| row.len() != grades) {
            return bad(format!("demand must be {SLOTS} rows of {grades} grades"));
        }
        if patterns.iter().any(|p| p.0 >> SLOTS != 0) {
            return bad("pattern uses bits beyond the week".into());
        }
        let feasible: Vec<Vec<u32>> = contracts
            .iter()
            .map(|c| {
                (0..m as u32).filter(|&j| c.admits(patterns[j as usize])).collect::<Vec<_>>()
            })
            .collect();
        if let Some(i) = feasible.iter().position(|f| f.is_empty()) {
            return bad(format!("nurse {i} has no feasible shift pattern"));
        }
        Ok(Self { grades, patterns, grade_of, pref, contracts, demand, feasible })
    }

    pub fn nurses(&self) -> usize {
        self.grade_of.len()
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn grades(&self) -> usize {
        self.grades
    }

    pub fn patterns(&self) -> &[ShiftPattern] {
        &self.patterns
    }

    pub fn pattern(&self, j: u32) -> ShiftPattern {
        self.patterns[j as usize]
    }

    /// Grade of nurse `i`, 1 being the most qualified.
    pub fn grade_of(&self, i: usize) -> u8 {
        self.grade_of[i]
    }

    /// 1 when nurse `i` may cover demand at grade `s`.
    pub fn q(&self, i: usize, s: usize) -> u32 {
        u32::from(usize::from(self.grade_of[i]) <= s)
    }

    pub fn pref(&self, i: usize, j: u32) -> u8 {
        self.pref[i][j as usize]
    }

    pub fn contract(&self, i: usize) -> Contract {
        self.contracts[i]
    }

    /// Demand at slot `k` (0-based) for grade `s` (1-based) or better.
    pub fn demand(&self, k: usize, s: usize) -> u32 {
        self.demand[k][s - 1]
    }

    /// Demand attributable to grade `s` alone: the increase of the
    /// cumulative demand over grade `s - 1`.
    pub fn grade_demand(&self, k: usize, s: usize) -> u32 {
        let below = if s > 1 { self.demand[k][s - 2] } else { 0 };
        self.demand[k][s - 1].saturating_sub(below)
    }

    /// Feasible pattern indices of nurse `i`.
    pub fn feasible(&self, i: usize) -> &[u32] {
        &self.feasible[i]
    }

    /// Nurses whose grade is in `grades` (bit `s - 1` set for grade `s`).
    pub fn nurses_with_grades(&self, grades: u8) -> Vec<usize> {
        (0..self.nurses()).filter(|&i| grades >> (self.grade_of[i] - 1) & 1 == 1).collect()
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            format: FORMAT.into(),
            version: VERSION,
            n: self.nurses(),
            m: self.pattern_count(),
            p: self.grades,
            patterns: self.patterns.iter().map(ToString::to_string).collect(),
            grades: self.grade_of.clone(),
            pref: self.pref.clone(),
            day_shifts: self.contracts.iter().map(|c| c.day).collect(),
            night_shifts: self.contracts.iter().map(|c| c.night).collect(),
            combined_shifts: self.contracts.iter().map(|c| c.combined).collect(),
            demand: self.demand.clone(),
        };
        serde_json::to_string_pretty(&file).expect("instance serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| PyramidError::Format(e.to_string()))?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(PyramidError::Format(format!(
                "expected {FORMAT} v{VERSION}, found {} v{}",
                file.format, file.version
            )));
        }
        let n = file.n;
        if file.grades.len() != n
            || file.day_shifts.len() != n
            || file.night_shifts.len() != n
            || file.combined_shifts.len() != n
            || file.patterns.len() != file.m
        {
            return Err(PyramidError::Format("field lengths disagree with n and m".into()));
        }
        let patterns = file.patterns.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?;
        let contracts = (0..n)
            .map(|i| Contract {
                day: file.day_shifts[i],
                night: file.night_shifts[i],
                combined: file.combined_shifts[i],
            })
            .collect();
        Self::new(file.p, patterns, file.grades, file.pref, contracts, file.demand)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    format: String,
    version: u32,
    n: usize,
    m: usize,
    p: usize,
    patterns: Vec<String>,
    grades: Vec<u8>,
    pref: Vec<Vec<u8>>,
    day_shifts: Vec<Option<u8>>,
    night_shifts: Vec<Option<u8>>,
    combined_shifts: Vec<Option<u8>>,
    demand: Vec<Vec<u32>>,
}
