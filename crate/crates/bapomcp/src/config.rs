//! Experiment configuration: defaults, `key=value` files and validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bapomcp_core::Variants;

/// Largest POSysadmin network accepted without `allow_large`.
pub const DESK_MAX_COMPUTERS: usize = 7;
/// Largest network accepted at all.
pub const MAX_COMPUTERS: usize = 10;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}:{line}: expected key=value, got {text:?}")]
    Syntax { path: String, line: usize, text: String },
    #[error("unknown configuration key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    Value { key: String, value: String, reason: String },
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    Tiger,
    Sysadmin,
    Chain,
}

impl FromStr for DomainKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tiger" => Ok(Self::Tiger),
            "sysadmin" | "posysadmin" => Ok(Self::Sysadmin),
            "chain" => Ok(Self::Chain),
            other => Err(format!("unknown domain {other:?} (tiger, sysadmin, chain)")),
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tiger => "tiger",
            Self::Sysadmin => "sysadmin",
            Self::Chain => "chain",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlannerKind {
    Pomcp,
    Lookahead,
}

impl FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pomcp" | "bapomcp" | "ba-pomcp" => Ok(Self::Pomcp),
            "lookahead" => Ok(Self::Lookahead),
            other => Err(format!("unknown planner {other:?} (pomcp, lookahead)")),
        }
    }
}

/// Which transition prior POSysadmin starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PriorKind {
    Noisy,
    Accurate,
}

impl FromStr for PriorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "noisy" => Ok(Self::Noisy),
            "accurate" => Ok(Self::Accurate),
            other => Err(format!("unknown prior {other:?} (noisy, accurate)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub domain: DomainKind,
    /// POSysadmin computers.
    pub n: usize,
    /// POSysadmin failure probability.
    pub f: f64,
    pub prior: PriorKind,
    pub planner: PlannerKind,
    pub variants: Variants,
    pub sims: usize,
    pub particles: usize,
    pub episodes: usize,
    pub runs: usize,
    pub horizon: usize,
    pub gamma: f64,
    /// UCB constant; `None` means `horizon · (max R − min R)`.
    pub exploration: Option<f64>,
    pub lambda: usize,
    /// Lookahead depth.
    pub depth: usize,
    pub seed: u64,
    /// Seconds per action above which an episode is flagged as capped.
    pub time_cap: f64,
    pub out: Option<PathBuf>,
    pub stats_out: Option<PathBuf>,
    /// Worker threads for independent runs; 0 uses every core.
    pub workers: usize,
    pub allow_large: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            domain: DomainKind::Tiger,
            n: 3,
            f: 0.1,
            prior: PriorKind::Noisy,
            planner: PlannerKind::Pomcp,
            variants: Variants::PLAIN,
            sims: 1000,
            particles: 1000,
            episodes: 100,
            runs: 500,
            horizon: 20,
            gamma: 0.95,
            exploration: None,
            lambda: 30,
            depth: 1,
            seed: 0,
            time_cap: 5.0,
            out: None,
            stats_out: None,
            workers: 0,
            allow_large: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.trim().parse().map_err(|e: T::Err| ConfigError::Value {
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(ConfigError::Value {
            key: key.to_string(),
            value: value.to_string(),
            reason: "expected true or false".into(),
        }),
    }
}

impl ExperimentConfig {
    /// Sets one field from its textual `key` and `value`. Keys are the CLI
    /// flag names; `-` and `_` are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let k = key.trim().to_ascii_lowercase().replace('_', "-");
        match k.as_str() {
            "domain" => self.domain = parse(&k, value)?,
            "n" => self.n = parse(&k, value)?,
            "f" => self.f = parse(&k, value)?,
            "prior" => self.prior = parse(&k, value)?,
            "planner" => self.planner = parse(&k, value)?,
            "variants" => self.variants = parse(&k, value)?,
            "sims" => self.sims = parse(&k, value)?,
            "particles" => self.particles = parse(&k, value)?,
            "episodes" => self.episodes = parse(&k, value)?,
            "runs" => self.runs = parse(&k, value)?,
            "horizon" => self.horizon = parse(&k, value)?,
            "gamma" => self.gamma = parse(&k, value)?,
            "exploration" | "c" => self.exploration = Some(parse(&k, value)?),
            "lambda" => self.lambda = parse(&k, value)?,
            "depth" => self.depth = parse(&k, value)?,
            "seed" => self.seed = parse(&k, value)?,
            "time-cap" => self.time_cap = parse(&k, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "stats" | "stats-out" => self.stats_out = Some(PathBuf::from(value.trim())),
            "workers" => self.workers = parse(&k, value)?,
            "allow-large" => self.allow_large = parse_bool(&k, value)?,
            _ => return Err(ConfigError::UnknownKey(key.trim().to_string())),
        }
        Ok(())
    }

    /// Applies every `key=value` line of `text`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    path: origin.to_string(),
                    line: i + 1,
                    text: line.to_string(),
                });
            };
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        self.apply_text(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.sims == 0 {
            return bad("sims must be at least 1".into());
        }
        if self.particles == 0 {
            return bad("particles must be at least 1".into());
        }
        if self.episodes == 0 || self.runs == 0 || self.horizon == 0 {
            return bad("episodes, runs and horizon must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma {} outside [0, 1)", self.gamma));
        }
        if let Some(c) = self.exploration {
            if !(c >= 0.0) {
                return bad(format!("exploration constant {c} is negative"));
            }
        }
        if self.planner == PlannerKind::Lookahead && self.depth == 0 {
            return bad("lookahead depth must be at least 1".into());
        }
        if !(self.time_cap > 0.0) {
            return bad(format!("time cap {} must be positive", self.time_cap));
        }
        if self.domain == DomainKind::Sysadmin {
            let limit = if self.allow_large { MAX_COMPUTERS } else { DESK_MAX_COMPUTERS };
            if self.n == 0 || self.n > limit {
                return bad(format!(
                    "n = {} outside 1..={limit}{}",
                    self.n,
                    if self.allow_large { "" } else { " (allow-large raises the limit to 10)" }
                ));
            }
            if !(0.0..=1.0).contains(&self.f) {
                return bad(format!("failure probability {} outside [0, 1]", self.f));
            }
        }
        Ok(())
    }

    /// Stats path: the explicit one, or `<out stem>.stats.csv` next to the
    /// records.
    pub fn stats_path(&self) -> Option<PathBuf> {
        self.stats_out
            .clone()
            .or_else(|| self.out.as_ref().map(|p| p.with_extension("stats.csv")))
    }
}
