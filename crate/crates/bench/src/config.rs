use std::fmt;
use std::path::{Path, PathBuf};

use pyramid_ga::mall::MallGenParams;
use pyramid_ga::nurse::NurseGenParams;
use pyramid_ga::{EvalKind, MatingKind, PyramidConfig, Strategies};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CONFIG_VERSION: u32 = 1;
/// Label of the single-population baseline.
pub const BASELINE: &str = "SGA";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown {what} strategy `{token}`; valid tokens: {valid}")]
    UnknownStrategy { what: &'static str, token: String, valid: String },
    #[error("invalid experiment config: {0}")]
    Invalid(String),
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Nurse,
    Mall,
}

impl ProblemKind {
    /// Per-instance value recorded when no run finds a feasible solution.
    pub fn censored_value(self) -> f64 {
        match self {
            Self::Nurse => 100.0,
            Self::Mall => 0.0,
        }
    }

    pub fn objective_label(self) -> &'static str {
        match self {
            Self::Nurse => "N Cost",
            Self::Mall => "M Rent",
        }
    }

    pub fn feasibility_label(self) -> &'static str {
        match self {
            Self::Nurse => "N Feasibility",
            Self::Mall => "M Feasibility",
        }
    }

    pub fn minimizes(self) -> bool {
        self == Self::Nurse
    }

    pub fn pyramid_defaults(self) -> PyramidConfig<f64> {
        match self {
            Self::Nurse => PyramidConfig::nurse(),
            Self::Mall => PyramidConfig::mall(),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Nurse => "nurse",
            Self::Mall => "mall",
        })
    }
}

/// Valid tokens for the mating list, baseline included.
pub fn mating_tokens() -> String {
    std::iter::once(BASELINE)
        .chain(MatingKind::ALL.iter().map(|k| k.token()))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn eval_tokens() -> String {
    EvalKind::ALL.iter().map(|k| k.token()).collect::<Vec<_>>().join(", ")
}

/// Parses a mating token; `SGA` yields `None`.
pub fn parse_mating(token: &str) -> Result<Option<MatingKind>, ConfigError> {
    if token == BASELINE {
        return Ok(None);
    }
    token.parse().map(Some).map_err(|_| ConfigError::UnknownStrategy {
        what: "mating",
        token: token.into(),
        valid: mating_tokens(),
    })
}

pub fn parse_eval(token: &str) -> Result<EvalKind, ConfigError> {
    token.parse().map_err(|_| ConfigError::UnknownStrategy {
        what: "evaluation",
        token: token.into(),
        valid: eval_tokens(),
    })
}

/// One row of an experiment: a label and the engine strategies, `None` for
/// the single-population baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySpec {
    pub label: String,
    pub strategies: Option<Strategies>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PyramidOverrides {
    pub total_population: Option<usize>,
    pub sub_population_size: Option<usize>,
    pub top_population_size: Option<usize>,
    pub uniform_p: Option<f64>,
    pub mutation_rate: Option<f64>,
    pub replacement_fraction: Option<f64>,
    pub stagnation_limit: Option<usize>,
    pub max_generations: Option<usize>,
    /// Wall-clock cap per run in seconds; 60 when unset, 0 disables it.
    pub time_limit_secs: Option<f64>,
    pub hillclimb_budget: Option<usize>,
}

pub const DEFAULT_TIME_LIMIT_SECS: f64 = 60.0;

/// Where the instances come from: files, or the seeded generator.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSource {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<PathBuf>,
    /// Number of generated instances when no paths are given.
    #[serde(default)]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nurse: Option<NurseGenParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mall: Option<MallGenParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub problem: ProblemKind,
    #[serde(default)]
    pub mating: Vec<String>,
    #[serde(default)]
    pub eval: Vec<String>,
    #[serde(default)]
    pub hillclimb: bool,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub instances: InstanceSource,
    #[serde(default)]
    pub pyramid: PyramidOverrides,
    /// Reference value shown as a `Bound` row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

fn default_runs() -> usize {
    20
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind) -> Self {
        Self {
            version: CONFIG_VERSION,
            problem,
            mating: Vec::new(),
            eval: Vec::new(),
            hillclimb: false,
            runs: default_runs(),
            base_seed: 0,
            instances: InstanceSource::default(),
            pyramid: PyramidOverrides::default(),
            bound: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// SHA-256 of the canonical TOML form.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_toml().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.into()));
        if self.version != CONFIG_VERSION {
            return Err(ConfigError::Invalid(format!(
                "config version {} not supported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.runs == 0 {
            return invalid("runs must be at least 1");
        }
        if self.mating.is_empty() && self.eval.is_empty() {
            return invalid("list at least one mating or evaluation strategy");
        }
        if self.instances.paths.is_empty() && self.instances.count == 0 {
            return invalid("give instance paths or a positive instance count");
        }
        if self.hillclimb && self.problem != ProblemKind::Nurse {
            return invalid("the hillclimber is only defined for the nurse problem");
        }
        self.strategies().map(|_| ())
    }

    /// Strategy rows in config order. Evaluation rows use rank-selection
    /// mating; their labels gain an `E:` prefix when mating rows are present.
    pub fn strategies(&self) -> Result<Vec<StrategySpec>, ConfigError> {
        let mut out = Vec::new();
        for token in &self.mating {
            let strategies = parse_mating(token)?.map(Strategies::mating);
            out.push(StrategySpec { label: token.clone(), strategies });
        }
        for token in &self.eval {
            let kind = parse_eval(token)?;
            let label = if self.mating.is_empty() { token.clone() } else { format!("E:{token}") };
            out.push(StrategySpec { label, strategies: Some(Strategies::evaluation(kind)) });
        }
        let mut labels: Vec<&str> = out.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(ConfigError::Invalid("a strategy is listed twice".into()));
        }
        Ok(out)
    }

    /// Engine configuration for a pyramid with `populations` populations, or
    /// for the baseline when `populations` is 1.
    pub fn pyramid_config(&self, populations: usize) -> PyramidConfig<f64> {
        let o = &self.pyramid;
        let defaults = self.problem.pyramid_defaults();
        let total = o.total_population.unwrap_or(defaults.total_population);
        let mut c = if populations == 1 {
            PyramidConfig::single(total)
        } else if o.sub_population_size.is_some() || o.top_population_size.is_some() {
            let sub = o.sub_population_size.unwrap_or(defaults.sub_population_size);
            let top = o.top_population_size.unwrap_or(total.saturating_sub(sub * (populations - 1)));
            PyramidConfig::with_sizes(sub * (populations - 1) + top, sub, top)
        } else if total == defaults.total_population && defaults.validate(populations).is_ok() {
            defaults
        } else {
            let share = defaults.top_population_size as f64 / defaults.total_population as f64;
            PyramidConfig::scaled(total, populations, share)
        };
        if let Some(v) = o.uniform_p {
            c.uniform_p = v;
        }
        if let Some(v) = o.mutation_rate {
            c.mutation_rate = v;
        }
        if let Some(v) = o.replacement_fraction {
            c.replacement_fraction = v;
        }
        if let Some(v) = o.stagnation_limit {
            c.stagnation_limit = v;
        }
        c.max_generations = o.max_generations;
        let limit = o.time_limit_secs.unwrap_or(DEFAULT_TIME_LIMIT_SECS);
        c.time_limit_secs = (limit > 0.0).then_some(limit);
        c
    }
}
