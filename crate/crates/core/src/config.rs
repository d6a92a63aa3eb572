use std::ffi::OsString;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::architecture::PatternNetConfig;
use crate::error::{Error, Result};
use crate::experiments::{
    default_input_noise_levels, default_neuron_noise_levels, NeuronNoise, Protocol,
};

/// Environment variable that replaces `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "NEUROPATTERN_OUTPUT_DIR";

/// Noise grids of the two robustness sweeps, in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Added input spikes relative to the signal spike count.
    pub input_noise_levels: Vec<f64>,
    /// Feature-neuron parameter jitter.
    pub neuron_noise_levels: Vec<f64>,
    pub neuron_noise: NeuronNoise,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            input_noise_levels: default_input_noise_levels(),
            neuron_noise_levels: default_neuron_noise_levels(),
            neuron_noise: NeuronNoise::default(),
        }
    }
}

/// Everything one command needs. Pattern definitions and the seed list
/// live in `protocol`. Every field has a default, so an empty file is a
/// valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub network: PatternNetConfig,
    pub protocol: Protocol,
    pub sweeps: SweepConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            network: PatternNetConfig::default(),
            protocol: Protocol::default(),
            sweeps: SweepConfig::default(),
            output_dir: PathBuf::from("results"),
        }
    }
}

impl RunConfig {
    /// Parse and validate a TOML document. Errors carry the dotted schema
    /// path of the offending field, e.g. `protocol.eval_duration`.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| Error::config("", e.to_string().trim()))?;
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { String::new() } else { path };
            Error::config(path, e.into_inner().message().trim())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::config("", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.network
            .validate()
            .map_err(|e| Error::config("network", strip_kind(&e)))?;
        self.protocol.validate()?;
        let grids = [
            ("sweeps.input_noise_levels", &self.sweeps.input_noise_levels),
            ("sweeps.neuron_noise_levels", &self.sweeps.neuron_noise_levels),
        ];
        for (path, levels) in grids {
            if let Some(l) = levels.iter().find(|l| !l.is_finite() || **l < 0.0) {
                return Err(Error::config(path, format!("level {l} must be finite and >= 0")));
            }
        }
        if self.sweeps.neuron_noise_levels.iter().any(|&l| l >= 100.0) {
            return Err(Error::config(
                "sweeps.neuron_noise_levels",
                "jitter must stay below 100 percent",
            ));
        }
        let scale = self.sweeps.neuron_noise.current_noise_scale;
        if !scale.is_finite() || scale < 0.0 {
            return Err(Error::config(
                "sweeps.neuron_noise.current_noise_scale",
                "must be finite and >= 0",
            ));
        }
        Ok(())
    }

    /// `output_dir`, unless `env` (the value of [`OUTPUT_DIR_ENV`]) is set
    /// and non-empty.
    pub fn resolve_output_dir(&self, env: Option<OsString>) -> PathBuf {
        match env {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.output_dir.clone(),
        }
    }

    pub fn network_hash(&self) -> String {
        network_hash(&self.network)
    }

    /// Write the resolved config and the seed list next to a report, as
    /// `<stem>_config.toml` and `<stem>_seeds.json`.
    pub fn write_provenance(&self, dir: &Path, stem: &str) -> Result<()> {
        let mut resolved = self.clone();
        resolved.output_dir = dir.to_path_buf();
        let cfg = dir.join(format!("{stem}_config.toml"));
        std::fs::write(&cfg, resolved.to_toml()?).map_err(|e| Error::io(&cfg, e))?;
        let seeds = dir.join(format!("{stem}_seeds.json"));
        let body = serde_json::json!({
            "train_seed": self.protocol.train_seed,
            "seeds": self.protocol.seeds,
        });
        std::fs::write(&seeds, serde_json::to_string_pretty(&body)?).map_err(|e| Error::io(&seeds, e))
    }
}

/// SHA-256 over the canonical JSON form of a network config. Two configs
/// share a hash exactly when they build the same network.
pub fn network_hash(config: &PatternNetConfig) -> String {
    let json = serde_json::to_vec(config).expect("network config always serializes");
    hex::encode(Sha256::digest(&json))
}

fn strip_kind(e: &Error) -> String {
    match e {
        Error::Structural(m) | Error::Precondition(m) => m.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_path(text: &str) -> String {
        match RunConfig::from_toml_str(text) {
            Err(Error::Config { path, .. }) => path,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_is_the_default() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn resolved_copy_round_trips() {
        let cfg = RunConfig::default();
        let back = RunConfig::from_toml_str(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn errors_name_the_schema_path() {
        assert_eq!(err_path("[protocol]\neval_duration = \"long\""), "protocol.eval_duration");
        assert_eq!(err_path("[protocol]\neval_duration = 0"), "protocol.eval_duration");
        assert_eq!(err_path("[network.tuning.wta]\nthreshold = 1.5"), "network.tuning.wta.threshold");
        assert_eq!(err_path("[sweeps]\ninput_noise_levels = [-1.0]"), "sweeps.input_noise_levels");
        assert_eq!(err_path("[network]\nkernel_size = 4"), "network");
        assert!(err_path("[protocol]\nbogus = 1").starts_with("protocol"));
    }

    #[test]
    fn env_overrides_output_dir() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.resolve_output_dir(None), PathBuf::from("results"));
        assert_eq!(cfg.resolve_output_dir(Some("".into())), PathBuf::from("results"));
        assert_eq!(cfg.resolve_output_dir(Some("/tmp/x".into())), PathBuf::from("/tmp/x"));
    }

    #[test]
    fn hash_tracks_the_network_only() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.protocol.eval_duration += 1;
        assert_eq!(a.network_hash(), b.network_hash());
        b.network.tuning.wta.threshold += 1;
        assert_ne!(a.network_hash(), b.network_hash());
        assert_eq!(a.network_hash().len(), 64);
    }
}
