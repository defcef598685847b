//! Experiment configuration: a flat `key=value` file whose keys are the
//! long flag names without dashes. Flags override file values.

use std::fmt::Write as _;
use std::path::PathBuf;

use fairgroup_core::clustering::DEFAULT_MAX_ITERS;
use fairgroup_core::{BalanceRatio, ExperimentConfig, ModelKind, PropagationMode, TrainConfig};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid value `{value}` for --{key}: {msg}")]
    Invalid {
        key: String,
        value: String,
        msg: String,
    },
    #[error("unknown key `{key}` on config line {line}")]
    UnknownKey { key: String, line: usize },
    #[error("config line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("--{key}: {msg}")]
    Constraint { key: &'static str, msg: &'static str },
}

/// Keys in echo order. `out` is accepted but never echoed.
pub const KEYS: [&str; 24] = [
    "data",
    "synth",
    "n",
    "seed-synth",
    "target",
    "protected",
    "threshold",
    "exclude",
    "classifier",
    "epochs",
    "learning-rate",
    "l2",
    "svm-cost",
    "k",
    "ratio",
    "mode",
    "alpha",
    "split",
    "seed-split",
    "seed-cluster",
    "seed-representative",
    "max-iters",
    "out",
    "config",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub synth: bool,
    pub n: usize,
    pub seed_synth: u64,
    pub target: String,
    pub protected: String,
    pub threshold: Option<f64>,
    pub exclude: Vec<String>,
    pub classifier: ModelKind,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub l2: Option<f64>,
    pub svm_cost: Option<f64>,
    pub k: usize,
    pub ratio: BalanceRatio,
    pub mode: PropagationMode,
    pub alpha: f64,
    pub split: f64,
    pub seed_split: u64,
    pub seed_cluster: u64,
    pub seed_representative: u64,
    pub max_iters: usize,
    /// Output directory; not part of the echoed config.
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let exp = ExperimentConfig::new(ModelKind::Logistic);
        Self {
            data: None,
            synth: false,
            n: 10_000,
            seed_synth: 7,
            target: "medicaid".into(),
            protected: "household_income".into(),
            threshold: None,
            exclude: Vec::new(),
            classifier: ModelKind::Logistic,
            epochs: None,
            learning_rate: None,
            l2: None,
            svm_cost: None,
            k: exp.k,
            ratio: exp.ratio,
            mode: exp.mode,
            alpha: exp.alpha,
            split: exp.split,
            seed_split: exp.seed_split,
            seed_cluster: exp.seed_cluster,
            seed_representative: exp.seed_representative,
            max_iters: DEFAULT_MAX_ITERS,
            out: None,
        }
    }
}

fn invalid(key: &str, value: &str, msg: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        value: value.into(),
        msg: msg.to_string(),
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| invalid(key, value, e))
}

fn optional(value: &str) -> Option<&str> {
    match value {
        "" | "none" => None,
        v => Some(v),
    }
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "data" => self.data = optional(value).map(PathBuf::from),
            "synth" => {
                self.synth = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(invalid(key, value, "expected true or false")),
                }
            }
            "n" => self.n = num(key, value)?,
            "seed-synth" => self.seed_synth = num(key, value)?,
            "target" => self.target = value.into(),
            "protected" => self.protected = value.into(),
            "threshold" => {
                self.threshold = optional(value).map(|v| num(key, v)).transpose()?;
            }
            "exclude" => {
                self.exclude = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect();
            }
            "classifier" => self.classifier = value.parse().map_err(|e| invalid(key, value, e))?,
            "epochs" => self.epochs = optional(value).map(|v| num(key, v)).transpose()?,
            "learning-rate" => self.learning_rate = optional(value).map(|v| num(key, v)).transpose()?,
            "l2" => self.l2 = optional(value).map(|v| num(key, v)).transpose()?,
            "svm-cost" => self.svm_cost = optional(value).map(|v| num(key, v)).transpose()?,
            "k" => self.k = num(key, value)?,
            "ratio" => self.ratio = value.parse().map_err(|e| invalid(key, value, e))?,
            "mode" => self.mode = value.parse().map_err(|e| invalid(key, value, e))?,
            "alpha" => self.alpha = num(key, value)?,
            "split" => self.split = num(key, value)?,
            "seed-split" => self.seed_split = num(key, value)?,
            "seed-cluster" => self.seed_cluster = num(key, value)?,
            "seed-representative" => self.seed_representative = num(key, value)?,
            "max-iters" => self.max_iters = num(key, value)?,
            "out" => self.out = optional(value).map(PathBuf::from),
            _ => {
                return Err(ConfigError::UnknownKey {
                    key: key.into(),
                    line: 0,
                })
            }
        }
        Ok(())
    }

    /// Applies a config file's lines. `#` starts a comment line.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let k = k.trim();
            if k == "config" || !KEYS.contains(&k) {
                return Err(ConfigError::UnknownKey {
                    key: k.into(),
                    line: i + 1,
                });
            }
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |key, msg| Err(ConfigError::Constraint { key, msg });
        match (&self.data, self.synth) {
            (None, false) => return fail("data", "one of --data or --synth is required"),
            (Some(_), true) => return fail("synth", "--data and --synth are mutually exclusive"),
            _ => {}
        }
        if self.synth && self.n < fairgroup_core::synth::MIN_ROWS {
            return fail("n", "must be at least 10");
        }
        if self.k < 1 {
            return fail("k", "must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return fail("alpha", "must lie in [0, 1]");
        }
        if !(self.split > 0.0 && self.split < 1.0) {
            return fail("split", "must lie strictly between 0 and 1");
        }
        if self.max_iters < 1 {
            return fail("max-iters", "must be at least 1");
        }
        if self.threshold.is_some_and(|t| !t.is_finite()) {
            return fail("threshold", "must be finite");
        }
        if self.epochs == Some(0) {
            return fail("epochs", "must be at least 1");
        }
        if self.learning_rate.is_some_and(|v| !(v > 0.0 && v.is_finite())) {
            return fail("learning-rate", "must be positive");
        }
        if self.l2.is_some_and(|v| !(v >= 0.0 && v.is_finite())) {
            return fail("l2", "must be nonnegative");
        }
        if self.svm_cost.is_some_and(|v| !(v > 0.0 && v.is_finite())) {
            return fail("svm-cost", "must be positive");
        }
        if self.protected == self.target {
            return fail("protected", "must differ from the target");
        }
        if self.exclude.iter().any(|e| *e == self.target || *e == self.protected) {
            return fail("exclude", "cannot exclude the target or the protected feature");
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        let mut t = TrainConfig::new(self.classifier);
        if let Some(v) = self.epochs {
            t.epochs = v;
        }
        if let Some(v) = self.learning_rate {
            t.learning_rate = v;
        }
        if let Some(v) = self.l2 {
            t.l2 = v;
        }
        if let Some(v) = self.svm_cost {
            t.svm_cost = v;
        }
        t
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            train: self.train_config(),
            k: self.k,
            ratio: self.ratio,
            mode: self.mode,
            alpha: self.alpha,
            split: self.split,
            seed_split: self.seed_split,
            seed_cluster: self.seed_cluster,
            seed_representative: self.seed_representative,
            max_iters: self.max_iters,
        }
    }

    /// Effective config as `key=value` lines in [`KEYS`] order. Unset
    /// optional keys and `out` are omitted. Parsing the result gives back an
    /// equal config (apart from `out`).
    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        if let Some(d) = &self.data {
            put("data", d.display().to_string());
        }
        put("synth", self.synth.to_string());
        put("n", self.n.to_string());
        put("seed-synth", self.seed_synth.to_string());
        put("target", self.target.clone());
        put("protected", self.protected.clone());
        if let Some(t) = self.threshold {
            put("threshold", t.to_string());
        }
        put("exclude", self.exclude.join(","));
        put("classifier", self.classifier.to_string());
        if let Some(v) = self.epochs {
            put("epochs", v.to_string());
        }
        if let Some(v) = self.learning_rate {
            put("learning-rate", v.to_string());
        }
        if let Some(v) = self.l2 {
            put("l2", v.to_string());
        }
        if let Some(v) = self.svm_cost {
            put("svm-cost", v.to_string());
        }
        put("k", self.k.to_string());
        put("ratio", self.ratio.to_string());
        put("mode", self.mode.to_string());
        put("alpha", self.alpha.to_string());
        put("split", self.split.to_string());
        put("seed-split", self.seed_split.to_string());
        put("seed-cluster", self.seed_cluster.to_string());
        put("seed-representative", self.seed_representative.to_string());
        put("max-iters", self.max_iters.to_string());
        s
    }
}
