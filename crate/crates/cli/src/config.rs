use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentName {
    Fig4,
    Fig5,
    Fig6,
    EdaSphere,
    IgoQuadratic,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 5] = [
        ExperimentName::Fig4,
        ExperimentName::Fig5,
        ExperimentName::Fig6,
        ExperimentName::EdaSphere,
        ExperimentName::IgoQuadratic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::Fig4 => "fig4",
            ExperimentName::Fig5 => "fig5",
            ExperimentName::Fig6 => "fig6",
            ExperimentName::EdaSphere => "eda_sphere",
            ExperimentName::IgoQuadratic => "igo_quadratic",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            ExperimentName::Fig4 => "conditional VAE-EDA vs SBX (eta 5, 50) on two-moons and ring+blob parents",
            ExperimentName::Fig5 => "two-task Gaussian mixture sampler vs multitask SBX: transfer and hull fidelity",
            ExperimentName::Fig6 => "multitask SBX/OB-Scan vs mixture+product sampler: out-of-hull leaps",
            ExperimentName::EdaSphere => "Gaussian EDA on a shifted 2-D sphere: convergence and variance collapse",
            ExperimentName::IgoQuadratic => "IGO natural-gradient ascent on -|x|^2 over seeds",
        }
    }

    /// Recognised configuration keys and their defaults.
    pub fn defaults(&self) -> &'static [(&'static str, &'static str)] {
        match self {
            ExperimentName::Fig4 => &[
                ("n_parents", "500"),
                ("n_offspring", "500"),
                ("eta_low", "5"),
                ("eta_high", "50"),
                ("moons_noise", "0.1"),
                ("ring_radius", "3"),
                ("ring_noise", "0.15"),
                ("blob_fraction", "0.3"),
                ("blob_std", "0.3"),
                ("vae_hidden", "64"),
                ("vae_epochs", "600"),
                ("vae_learning_rate", "0.01"),
                ("vae_batch_size", "32"),
                ("vae_kl_weight", "0.3"),
            ],
            ExperimentName::Fig5 => &[
                ("replicates", "20"),
                ("n_parents", "500"),
                ("n_offspring", "500"),
                ("eta", "50"),
                ("rmp", "1"),
                ("weights_a", "0.7,0.3"),
                ("weights_b", "0.5,0.5"),
            ],
            ExperimentName::Fig6 => &[
                ("replicates", "20"),
                ("n_parents", "500"),
                ("n_offspring", "500"),
                ("eta", "50"),
                ("rmp", "1"),
                ("task_weight", "0.3"),
                ("product_weight", "0.4"),
                ("dominant_radius", "1.3416407864998738"),
            ],
            ExperimentName::EdaSphere => &[
                ("pop_size", "100"),
                ("parent_fraction", "0.3"),
                ("generations", "60"),
                ("optimum", "1.5,-0.5"),
                ("bound", "5"),
                ("min_variance", "1e-8"),
            ],
            ExperimentName::IgoQuadratic => &[
                ("replicates", "20"),
                ("steps", "200"),
                ("step_size", "0.05"),
                ("batch", "64"),
                ("initial_mean", "3,3"),
                ("initial_variance", "4"),
            ],
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentName::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| CliError::config(format!("unknown experiment `{s}`; see `natgen list`")))
    }
}

/// A fully resolved experiment configuration: every recognised key has a
/// value, either its default or an explicit setting.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: ExperimentName,
    pub seed: u64,
    pub out_dir: PathBuf,
    values: BTreeMap<String, String>,
}

/// `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::config(format!("line {}: empty key", i + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

impl ExperimentConfig {
    pub fn new(name: ExperimentName, seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            name,
            seed,
            out_dir: out_dir.into(),
            values: name
                .defaults()
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    /// Resolves a configuration from an optional config file's text, then
    /// command-line values, which win. `seed` and `out` may come from either.
    pub fn resolve(
        name: ExperimentName,
        file_text: Option<&str>,
        seed: Option<u64>,
        out_dir: Option<PathBuf>,
        overrides: &[(String, String)],
    ) -> Result<Self> {
        let mut pairs = match file_text {
            Some(t) => parse_key_values(t)?,
            None => Vec::new(),
        };
        pairs.extend(overrides.iter().cloned());
        let mut cfg = Self::new(name, 0, PathBuf::new());
        let (mut file_seed, mut file_out) = (None, None);
        for (k, v) in pairs {
            match k.as_str() {
                "seed" => file_seed = Some(v.parse::<u64>().map_err(|_| CliError::config(format!("bad seed `{v}`")))?),
                "out" => file_out = Some(PathBuf::from(v)),
                _ => cfg.set(&k, &v)?,
            }
        }
        cfg.seed = seed
            .or(file_seed)
            .ok_or_else(|| CliError::config("a seed is required (--seed or `seed = N`)"))?;
        cfg.out_dir = out_dir
            .or(file_out)
            .ok_or_else(|| CliError::config("an output directory is required (--out or `out = DIR`)"))?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(CliError::config(format!("`{key}` is not a setting of {}", self.name))),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    fn raw(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| CliError::config(format!("`{key}` is not a setting of {}", self.name)))
    }

    pub fn get_f64(&self, key: &str) -> Result<f64> {
        let v = self.raw(key)?;
        v.parse()
            .map_err(|_| CliError::config(format!("`{key}` must be a number, got `{v}`")))
    }

    pub fn get_usize(&self, key: &str) -> Result<usize> {
        let v = self.raw(key)?;
        v.parse()
            .map_err(|_| CliError::config(format!("`{key}` must be a non-negative integer, got `{v}`")))
    }

    pub fn get_list(&self, key: &str) -> Result<Vec<f64>> {
        self.raw(key)?
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| CliError::config(format!("`{key}` must be comma-separated numbers")))
            })
            .collect()
    }
}
