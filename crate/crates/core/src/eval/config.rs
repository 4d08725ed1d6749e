use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::classify::{HighLevelConfig, LowLevelKind, LowLevelParams, TreeConfig};
use crate::error::{Error, Result};

use super::{Paradigm, PipelineConfig};

/// Defaults for every experiment knob, readable from `key = value` text.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub window: usize,
    pub paradigm: Paradigm,
    pub low_level: LowLevelKind,
    pub lambda: f64,
    pub lambda_step: f64,
    pub alpha_t: f64,
    pub mu_critical: usize,
    /// `None` picks the median same-class distance per training fold.
    pub epsilon: Option<f64>,
    pub kappa: usize,
    pub fallback_factor: f64,
    pub knn_k: usize,
    pub min_size: usize,
    pub max_depth: Option<usize>,
    pub mu_max: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            window: 5,
            paradigm: Paradigm::Semantic,
            low_level: LowLevelKind::Knn,
            lambda: 0.5,
            lambda_step: 0.05,
            alpha_t: 0.5,
            mu_critical: 10,
            epsilon: None,
            kappa: 3,
            fallback_factor: 3.0,
            knn_k: 1,
            min_size: 2,
            max_depth: None,
            mu_max: 20,
            seed: 42,
        }
    }
}

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse()
        .map_err(|e: T::Err| Error::InvalidConfig(format!("{key}: cannot parse '{raw}': {e}")))
}

fn optional<T: FromStr>(key: &str, raw: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match raw {
        "auto" | "none" | "" => Ok(None),
        _ => value(key, raw).map(Some),
    }
}

impl ExperimentConfig {
    /// Applies one setting.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let raw = raw.trim();
        match key.trim() {
            "window" => self.window = value(key, raw)?,
            "paradigm" => self.paradigm = value(key, raw)?,
            "low_level" => self.low_level = value(key, raw)?,
            "lambda" => self.lambda = value(key, raw)?,
            "lambda_step" => self.lambda_step = value(key, raw)?,
            "alpha_t" => self.alpha_t = value(key, raw)?,
            "mu_c" | "mu_critical" => self.mu_critical = value(key, raw)?,
            "epsilon" => self.epsilon = optional(key, raw)?,
            "kappa" => self.kappa = value(key, raw)?,
            "fallback_factor" => self.fallback_factor = value(key, raw)?,
            "knn_k" => self.knn_k = value(key, raw)?,
            "min_size" => self.min_size = value(key, raw)?,
            "max_depth" => self.max_depth = optional(key, raw)?,
            "mu_max" => self.mu_max = value(key, raw)?,
            "seed" => self.seed = value(key, raw)?,
            other => return Err(Error::InvalidConfig(format!("unknown setting '{other}'"))),
        }
        Ok(())
    }

    /// Defaults overridden by `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, raw) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: n + 1,
                message: "expected key = value".into(),
            })?;
            config.set(key, raw)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad("lambda must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.alpha_t) {
            return bad("alpha_t must lie in [0, 1]");
        }
        if !(self.lambda_step > 0.0 && self.lambda_step <= 1.0) {
            return bad("lambda_step must lie in (0, 1]");
        }
        if self.epsilon.is_some_and(|e| !(e > 0.0)) {
            return bad("epsilon must be positive");
        }
        if self.kappa == 0 || self.knn_k == 0 {
            return bad("kappa and knn_k must be at least 1");
        }
        Ok(())
    }

    pub fn high_level(&self) -> HighLevelConfig<f64> {
        HighLevelConfig {
            alpha_t: self.alpha_t,
            alpha_c: 1.0 - self.alpha_t,
            mu_critical: self.mu_critical,
        }
    }

    pub fn pipeline(&self) -> PipelineConfig<f64> {
        PipelineConfig {
            low_level: self.low_level,
            params: LowLevelParams {
                knn_k: self.knn_k,
                tree: TreeConfig {
                    min_size: self.min_size,
                    max_depth: self.max_depth,
                },
            },
            epsilon: self.epsilon,
            kappa: self.kappa,
            fallback_factor: self.fallback_factor,
            high_level: self.high_level(),
            low_level_only: false,
        }
    }

    /// The configuration as parseable text.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "auto".into());
        let mut s = String::new();
        let _ = writeln!(s, "window = {}", self.window);
        let _ = writeln!(s, "paradigm = {}", self.paradigm);
        let _ = writeln!(s, "low_level = {}", self.low_level);
        let _ = writeln!(s, "lambda = {}", self.lambda);
        let _ = writeln!(s, "lambda_step = {}", self.lambda_step);
        let _ = writeln!(s, "alpha_t = {}", self.alpha_t);
        let _ = writeln!(s, "mu_c = {}", self.mu_critical);
        let _ = writeln!(s, "epsilon = {}", opt(self.epsilon.map(|e| e.to_string())));
        let _ = writeln!(s, "kappa = {}", self.kappa);
        let _ = writeln!(s, "fallback_factor = {}", self.fallback_factor);
        let _ = writeln!(s, "knn_k = {}", self.knn_k);
        let _ = writeln!(s, "min_size = {}", self.min_size);
        let _ = writeln!(s, "max_depth = {}", opt(self.max_depth.map(|d| d.to_string())));
        let _ = writeln!(s, "mu_max = {}", self.mu_max);
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::default();
        c.epsilon = Some(0.25);
        c.low_level = LowLevelKind::C45;
        c.paradigm = Paradigm::Topological;
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn comments_and_errors() {
        let c = ExperimentConfig::parse("# defaults\nkappa = 5 # more links\n\nepsilon = auto\n").unwrap();
        assert_eq!(c.kappa, 5);
        assert_eq!(c.epsilon, None);
        assert!(ExperimentConfig::parse("colour = blue").is_err());
        assert!(ExperimentConfig::parse("lambda = 2").is_err());
        assert!(matches!(ExperimentConfig::parse("kappa 5"), Err(Error::Parse { line: 1, .. })));
    }
}
