//! Line-oriented `key=value` run configuration.
//!
//! Values are resolved in three layers: built-in defaults, then a config
//! file, then explicit overrides (command-line flags). The effective values
//! are written into the header of every produced file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::aligner::{AlignParams, Pattern};
use crate::error::{Error, Result};
use crate::miner::MinerConfig;
use crate::retrieval::RetrievalParams;
use crate::textprep::Analyzer;
use crate::tm::TrainConfig;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "WEBCLIR_CONFIG";

/// Every recognised key with its default ("" for unset paths).
pub const DEFAULTS: &[(&str, &str)] = &[
    ("source_lang", "en"),
    ("target_lang", "fr"),
    // "snowball" (stemming and stoplist) or "plain" (lower-casing only)
    ("analyzer", "snowball"),
    // retrieval
    ("lambda", "0.7"),
    ("top_k", "1000"),
    ("oov", "pass-through"),
    ("combine_alpha", "0.5"),
    // training
    ("iterations", "5"),
    ("null_token", "false"),
    ("max_pair_tokens", "60"),
    ("min_pair_tokens", "1"),
    // pruning
    ("prune_threshold", "0.1"),
    ("prune_top_n", "100000"),
    ("marginal_floor", "1e-6"),
    ("digit_rule", "true"),
    // evaluation
    ("cutoff", "1000"),
    ("significance_alpha", "0.05"),
    // alignment
    ("prior_1_1", "0.89"),
    ("prior_1_0", "0.005"),
    ("prior_0_1", "0.005"),
    ("prior_2_1", "0.0445"),
    ("prior_1_2", "0.0445"),
    ("prior_2_2", "0.011"),
    ("length_variance", "6.8"),
    ("cognate_weight", "0.3"),
    ("cognate_prefix_len", "4"),
    // mining
    ("typical_ratio", "1.0"),
    ("length_tolerance", "0.40"),
    ("structure_threshold", "0.20"),
    ("min_text", "200"),
    ("max_pairings", "1"),
    ("anchor_gate", "false"),
    ("anchor_pattern", ""),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            values: DEFAULTS
                .iter()
                .map(|(k, v)| ((*k).to_owned(), (*v).to_owned()))
                .collect(),
        }
    }
}

fn check_key(key: &str) -> Result<()> {
    if DEFAULTS.iter().any(|(k, _)| *k == key) {
        Ok(())
    } else {
        Err(Error::Config(format!("unknown configuration key {key:?}")))
    }
}

impl RunConfig {
    /// Applies `key=value` lines on top of the current values. Blank lines
    /// and lines starting with `#` are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse("config", n + 1, "expected key=value"))?;
            let k = k.trim();
            check_key(k).map_err(|_| Error::parse("config", n + 1, format!("unknown key {k:?}")))?;
            self.values.insert(k.to_owned(), v.trim().to_owned());
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    /// Defaults, then `file` (or the file named by the environment
    /// variable when `file` is `None`), then `overrides`.
    pub fn resolve(file: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut c = RunConfig::default();
        let env_path = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
        if let Some(path) = file.map(Path::to_path_buf).or(env_path) {
            c.apply_file(&path)?;
        }
        for (k, v) in overrides {
            c.set(k, v)?;
        }
        Ok(c)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        check_key(key)?;
        self.values.insert(key.to_owned(), value.to_owned());
        Ok(())
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map_or("", String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.raw(key);
        raw.parse()
            .map_err(|_| Error::Config(format!("cannot parse {key}={raw:?}")))
    }

    /// Effective values, sorted by key.
    pub fn header(&self) -> Vec<(String, String)> {
        self.values.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    /// The same values in config-file syntax.
    pub fn render(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn retrieval_params(&self) -> Result<RetrievalParams> {
        let p = RetrievalParams {
            lambda: self.get("lambda")?,
            top_k: self.get("top_k")?,
            oov: self.get("oov")?,
            ..Default::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        Ok(TrainConfig {
            iterations: self.get("iterations")?,
            use_null_token: self.get("null_token")?,
            min_pair_tokens: self.get("min_pair_tokens")?,
            max_pair_tokens: self.get("max_pair_tokens")?,
            convergence_delta: None,
        })
    }

    pub fn analyzer(&self, language: &str) -> Result<Analyzer> {
        match self.raw("analyzer") {
            "snowball" => Ok(Analyzer::new(language)),
            "plain" => Ok(Analyzer::plain(language)),
            other => Err(Error::Config(format!("unknown analyzer {other:?}"))),
        }
    }

    pub fn align_params(&self) -> Result<AlignParams> {
        let mut p = AlignParams::default();
        p.length_variance = self.get("length_variance")?;
        p.cognate_weight = self.get("cognate_weight")?;
        p.cognate_prefix_len = self.get("cognate_prefix_len")?;
        for pattern in Pattern::ALL {
            let key = format!("prior_{}", pattern.label().replace('-', "_"));
            p.set_prior(pattern, self.get(&key)?);
        }
        p.validate()?;
        Ok(p)
    }

    pub fn miner_config(&self) -> Result<MinerConfig> {
        let mut c = MinerConfig::new(self.raw("source_lang"), self.raw("target_lang"));
        c.typical_ratio = self.get("typical_ratio")?;
        c.length_tolerance = self.get("length_tolerance")?;
        c.structure_threshold = self.get("structure_threshold")?;
        c.min_text = self.get("min_text")?;
        c.max_pairings = self.get("max_pairings")?;
        c.anchor_gate = self.get("anchor_gate")?;
        let pattern = self.raw("anchor_pattern");
        c.anchor_pattern = (!pattern.is_empty()).then(|| pattern.to_owned());
        Ok(c)
    }
}
