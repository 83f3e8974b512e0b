//! Run and suite descriptors (TOML files, overridable from flags).

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

fn default_seed() -> u64 {
    1
}

fn default_report_every() -> usize {
    500
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunDescriptor {
    /// Label used in outputs; defaults to the ensemble spec.
    pub name: Option<String>,
    pub ensemble: EnsembleSection,
    pub stream: StreamSection,
    #[serde(default)]
    pub eval: EvalSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSection {
    /// Ensemble spec string, e.g. `goowe:m=10,chunk=500`.
    pub spec: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StreamSection {
    /// Generator spec string, e.g. `rbf:classes=10,drift=0.01`.
    pub spec: Option<String>,
    /// Data file (`.arff` or headerless CSV) instead of a generator.
    pub path: Option<PathBuf>,
    /// Schema sidecar for CSV files.
    pub schema: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Instance cap; generators require one.
    pub count: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalSection {
    #[serde(default = "default_report_every")]
    pub report_every: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            report_every: default_report_every(),
        }
    }
}

impl RunDescriptor {
    pub fn from_toml_path(path: &PathBuf) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.stream.spec.is_none() && self.stream.path.is_none() {
            bail!("stream needs either a spec or a file path");
        }
        if self.stream.spec.is_some() && self.stream.path.is_some() {
            bail!("stream spec and file path are mutually exclusive");
        }
        if self.stream.spec.is_some() && self.stream.count.is_none() {
            bail!("generated streams need an instance count");
        }
        Ok(())
    }

    pub fn run_name(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.ensemble.spec.clone())
    }

    pub fn stream_name(&self) -> String {
        match (&self.stream.spec, &self.stream.path) {
            (Some(spec), _) => spec.clone(),
            (None, Some(path)) => path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            (None, None) => "unknown".into(),
        }
    }

    /// Hash of everything that determines the run's outputs.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("descriptor serialises");
        let digest = Sha256::digest(canonical.as_bytes());
        hex_prefix(&digest, 16)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteDescriptor {
    pub name: Option<String>,
    /// Ensemble spec strings; one matrix column each.
    pub ensembles: Vec<String>,
    /// Stream spec strings; one matrix row each.
    pub streams: Vec<String>,
    /// Seeds; cells report the mean over seeds.
    pub seeds: Vec<u64>,
    pub count: u64,
    #[serde(default = "default_report_every")]
    pub report_every: usize,
}

impl SuiteDescriptor {
    pub fn from_toml_path(path: &PathBuf) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let suite: SuiteDescriptor =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        suite.validate()?;
        Ok(suite)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ensembles.is_empty() || self.streams.is_empty() || self.seeds.is_empty() {
            bail!("suite needs at least one ensemble, one stream and one seed");
        }
        if self.count == 0 {
            bail!("suite instance count must be positive");
        }
        Ok(())
    }
}

fn hex_prefix(bytes: &[u8], chars: usize) -> String {
    let mut out = String::with_capacity(chars);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
        if out.len() >= chars {
            break;
        }
    }
    out.truncate(chars);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_descriptor_round_trips_through_toml() {
        let text = r#"
name = "demo"
[ensemble]
spec = "goowe:m=10"
[stream]
spec = "sea:noise=0.1"
seed = 7
count = 1000
[eval]
report_every = 250
"#;
        let desc: RunDescriptor = toml::from_str(text).unwrap();
        desc.validate().unwrap();
        assert_eq!(desc.run_name(), "demo");
        assert_eq!(desc.stream.seed, 7);
        assert_eq!(desc.eval.report_every, 250);
        let h1 = desc.config_hash();
        assert_eq!(h1.len(), 16);
        assert_eq!(h1, desc.config_hash());
    }

    #[test]
    fn validation_catches_contradictions() {
        let text = r#"
[ensemble]
spec = "goowe"
[stream]
seed = 1
"#;
        let desc: RunDescriptor = toml::from_str(text).unwrap();
        assert!(desc.validate().is_err());
    }

    #[test]
    fn hashes_differ_when_config_differs() {
        let mk = |seed: u64| RunDescriptor {
            name: None,
            ensemble: EnsembleSection {
                spec: "goowe".into(),
            },
            stream: StreamSection {
                spec: Some("sea".into()),
                path: None,
                schema: None,
                seed,
                count: Some(100),
            },
            eval: EvalSection::default(),
        };
        assert_ne!(mk(1).config_hash(), mk(2).config_hash());
    }
}
