//! Compact spec strings for ensembles and streams: `name:key=value,...`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};

use goowe::baselines::{BlockConfig, BlockEnsemble, ReplacementRule, VoteRule};
use goowe::ensemble::{GooweConfig, GooweEnsemble};
use goowe::eval::StreamClassifier;
use goowe::learners::{LearnerSpec, TreeParams};
use goowe::streams::{
    abrupt_rbf, ArffStream, CsvStream, HyperplaneConfig, HyperplaneGenerator, LedConfig,
    LedGenerator, RandomTreeConfig, RandomTreeGenerator, RbfConfig, RbfGenerator, SeaConfig,
    SeaGenerator, StreamSource,
};
use goowe::StreamSchema;

/// Parsed `name:key=value,...` with consumption tracking so typos in keys
/// surface as errors instead of being silently ignored.
pub struct SpecParams {
    name: String,
    params: BTreeMap<String, String>,
}

impl SpecParams {
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, rest) = match spec.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (spec, None),
        };
        let name = name.trim().to_ascii_lowercase();
        if name.is_empty() {
            bail!("empty spec name in '{spec}'");
        }
        let mut params = BTreeMap::new();
        if let Some(rest) = rest {
            for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| anyhow!("expected key=value, got '{pair}' in '{spec}'"))?;
                params.insert(
                    k.trim().replace('-', "_").to_ascii_lowercase(),
                    v.trim().to_string(),
                );
            }
        }
        Ok(SpecParams { name, params })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.params.remove(key)
    }

    pub fn take_f64(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            Some(v) => v
                .parse()
                .with_context(|| format!("'{key}' must be a number, got '{v}'")),
            None => Ok(default),
        }
    }

    pub fn take_usize(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.take(key) {
            Some(v) => v
                .parse()
                .with_context(|| format!("'{key}' must be an integer, got '{v}'")),
            None => Ok(default),
        }
    }

    pub fn take_u64_opt(&mut self, key: &str) -> Result<Option<u64>> {
        match self.take(key) {
            Some(v) => {
                Ok(Some(v.parse().with_context(|| {
                    format!("'{key}' must be an integer, got '{v}'")
                })?))
            }
            None => Ok(None),
        }
    }

    pub fn take_str(&mut self, key: &str, default: &str) -> String {
        self.take(key).unwrap_or_else(|| default.to_string())
    }

    pub fn finish(self) -> Result<()> {
        if self.params.is_empty() {
            Ok(())
        } else {
            let keys: Vec<&str> = self.params.keys().map(String::as_str).collect();
            bail!(
                "unknown parameter(s) for '{}': {}",
                self.name,
                keys.join(", ")
            )
        }
    }
}

fn learner_spec(params: &mut SpecParams) -> Result<LearnerSpec> {
    let kind = params.take_str("learner", "ht");
    let grace = params.take_f64("grace", 100.0)?;
    let delta = params.take_f64("delta", 0.01)?;
    let tau = params.take_f64("tau", 0.05)?;
    match kind.as_str() {
        "ht" | "tree" => Ok(LearnerSpec::HoeffdingTree(TreeParams {
            grace_period: grace,
            split_confidence: delta,
            tie_threshold: tau,
            ..TreeParams::default()
        })),
        "nb" | "bayes" => Ok(LearnerSpec::NaiveBayes),
        other => bail!("unknown learner '{other}' (expected ht|nb)"),
    }
}

fn vote_rule(params: &mut SpecParams) -> Result<VoteRule> {
    let rule = params.take_str("rule", "goowe");
    let beta = params.take_f64("beta", 0.5)?;
    let theta = params.take_f64("theta", 0.01)?;
    let solve_on = params.take_str("solve_on", "window");
    match rule.as_str() {
        "mv" => Ok(VoteRule::MajorityVote),
        "dwm" => Ok(VoteRule::Dwm { beta, theta }),
        "awe" => Ok(VoteRule::Awe),
        "aue2" => Ok(VoteRule::Aue2),
        "goowe" => Ok(VoteRule::Goowe {
            solve_on_chunk: solve_on == "chunk",
        }),
        other => bail!("unknown vote rule '{other}' (expected mv|dwm|awe|aue2|goowe)"),
    }
}

fn replacement_rule(params: &mut SpecParams) -> Result<ReplacementRule> {
    let rule = params.take_str("rule", "goowe");
    let beta = params.take_f64("beta", 0.5)?;
    let theta = params.take_f64("theta", 0.01)?;
    match rule.as_str() {
        "mse" | "worst-mse" | "worst_mse" => Ok(ReplacementRule::WorstMse),
        "dwm" => Ok(ReplacementRule::Dwm { beta, theta }),
        "awe" => Ok(ReplacementRule::Awe),
        "aue2" => Ok(ReplacementRule::Aue2),
        "goowe" => Ok(ReplacementRule::Goowe),
        other => bail!("unknown replacement rule '{other}' (expected mse|dwm|awe|aue2|goowe)"),
    }
}

/// Build a classifier from an ensemble spec string.
///
/// Names: `goowe` (the full ensemble), `base1:rule=...` (vote-aggregation
/// scaffold), `base2:rule=...` (model-management scaffold, majority vote).
pub fn build_classifier(
    spec: &str,
    schema: Arc<StreamSchema>,
) -> Result<Box<dyn StreamClassifier<f64>>> {
    let mut params = SpecParams::parse(spec)?;
    let m = params.take_usize("m", 10)?;
    let chunk = params.take_usize("chunk", 500)?;
    let window = params.take_usize("window", 500)?;
    match params.name().to_string().as_str() {
        "goowe" => {
            let mem_mb = params.take_f64("mem_mb", 32.0)?;
            let learner = learner_spec(&mut params)?;
            params.finish()?;
            let cfg = GooweConfig {
                max_components: m,
                chunk_size: chunk,
                window_size: window,
                memory_limit_bytes: (mem_mb * 1024.0 * 1024.0) as usize,
                learner,
            };
            Ok(Box::new(GooweEnsemble::new(schema, cfg)?))
        }
        "base1" => {
            let rule = vote_rule(&mut params)?;
            let learner = learner_spec(&mut params)?;
            params.finish()?;
            let cfg = BlockConfig {
                max_components: m,
                chunk_size: chunk,
                window_size: window,
                learner,
            };
            Ok(Box::new(BlockEnsemble::base1(rule, schema, cfg)?))
        }
        "base2" => {
            let rule = replacement_rule(&mut params)?;
            let learner = learner_spec(&mut params)?;
            params.finish()?;
            let cfg = BlockConfig {
                max_components: m,
                chunk_size: chunk,
                window_size: window,
                learner,
            };
            Ok(Box::new(BlockEnsemble::base2(rule, schema, cfg)?))
        }
        other => bail!("unknown algorithm '{other}' (expected goowe|base1|base2)"),
    }
}

/// Build a synthetic stream from a spec string.
///
/// Names: `rbf`, `rbf-abrupt`, `sea`, `hyp`, `tree`, `led`.
/// `expected_count` sizes the segment chain of `rbf-abrupt` when no explicit
/// `segments` parameter is given.
pub fn build_stream(
    spec: &str,
    seed: u64,
    expected_count: Option<u64>,
) -> Result<Box<dyn StreamSource<f64>>> {
    let mut params = SpecParams::parse(spec)?;
    match params.name().to_string().as_str() {
        "rbf" => {
            let drift_speed = params.take_f64("drift", 0.0)?;
            // Gradually drifting presets carry a small outlier rate so
            // evaluators see blips; stationary streams stay clean.
            let default_blip = if drift_speed > 0.0 { 0.001 } else { 0.0 };
            let cfg = RbfConfig {
                attributes: params.take_usize("attrs", 20)?,
                classes: params.take_usize("classes", 4)?,
                centroids: params.take_usize("centroids", 50)?,
                std_max: params.take_f64("std", 1.0)?,
                drift_speed,
                drift_interval: params.take_u64_opt("interval")?.unwrap_or(500),
                blip_rate: params.take_f64("blip", default_blip)?,
            };
            params.finish()?;
            Ok(Box::new(RbfGenerator::new(cfg, seed)?))
        }
        "rbf-abrupt" | "rbf_abrupt" => {
            let cfg = RbfConfig {
                attributes: params.take_usize("attrs", 20)?,
                classes: params.take_usize("classes", 4)?,
                centroids: params.take_usize("centroids", 50)?,
                std_max: params.take_f64("std", 1.0)?,
                ..RbfConfig::default()
            };
            let drift_every = params.take_u64_opt("drift_every")?.unwrap_or(5_000);
            let width = params.take_f64("width", 50.0)?;
            let segments = match params.take_u64_opt("segments")? {
                Some(s) => s as usize,
                None => match expected_count {
                    Some(count) => (count / drift_every) as usize + 1,
                    None => bail!("rbf-abrupt needs either segments=... or a known instance count"),
                },
            };
            params.finish()?;
            Ok(abrupt_rbf(cfg, drift_every, width, segments, seed)?)
        }
        "sea" => {
            let cfg = SeaConfig {
                noise: params.take_f64("noise", 0.0)?,
                drift_every: params.take_u64_opt("drift_every")?,
                start_concept: params.take_usize("concept", 0)?,
            };
            params.finish()?;
            Ok(Box::new(SeaGenerator::new(cfg, seed)?))
        }
        "hyp" | "hyperplane" => {
            let cfg = HyperplaneConfig {
                attributes: params.take_usize("attrs", 10)?,
                magnitude: params.take_f64("mag", 0.0)?,
                noise: params.take_f64("noise", 0.0)?,
                reversal_probability: params.take_f64("reversal", 0.10)?,
            };
            params.finish()?;
            Ok(Box::new(HyperplaneGenerator::new(cfg, seed)?))
        }
        "tree" => {
            let cfg = RandomTreeConfig {
                classes: params.take_usize("classes", 4)?,
                nominal_attributes: params.take_usize("nominals", 5)?,
                numeric_attributes: params.take_usize("numerics", 5)?,
                nominal_values: params.take_usize("values", 5)?,
                max_depth: params.take_usize("depth", 5)?,
                reswap_every: params.take_u64_opt("reswap_every")?,
            };
            params.finish()?;
            Ok(Box::new(RandomTreeGenerator::new(cfg, seed)?))
        }
        "led" => {
            let cfg = LedConfig {
                noise: params.take_f64("noise", 0.0)?,
            };
            params.finish()?;
            Ok(Box::new(LedGenerator::new(cfg, seed)?))
        }
        other => bail!("unknown stream '{other}' (expected rbf|rbf-abrupt|sea|hyp|tree|led)"),
    }
}

/// Open a data file as a stream: `.arff` self-describes, anything else is
/// headerless CSV with a JSON schema sidecar (`<file>.schema.json` unless
/// given explicitly).
pub fn open_data_file(
    path: &Path,
    schema_path: Option<&Path>,
) -> Result<Box<dyn StreamSource<f64>>> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if ext.eq_ignore_ascii_case("arff") {
        return Ok(Box::new(ArffStream::open(path)?));
    }
    let schema_file = match schema_path {
        Some(p) => p.to_path_buf(),
        None => sidecar_schema_path(path),
    };
    let text = std::fs::read_to_string(&schema_file)
        .with_context(|| format!("reading schema sidecar {}", schema_file.display()))?;
    let schema: StreamSchema = serde_json::from_str(&text)
        .with_context(|| format!("parsing schema sidecar {}", schema_file.display()))?;
    Ok(Box::new(CsvStream::open(path, Arc::new(schema))?))
}

/// `data.csv` -> `data.schema.json`.
pub fn sidecar_schema_path(path: &Path) -> std::path::PathBuf {
    path.with_extension("schema.json")
}

/// File-system safe name for a spec string.
pub fn sanitize(spec: &str) -> String {
    spec.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bare_and_parameterised_names() {
        let p = SpecParams::parse("goowe").unwrap();
        assert_eq!(p.name(), "goowe");
        let mut p = SpecParams::parse("base1:rule=mv,m=5").unwrap();
        assert_eq!(p.name(), "base1");
        assert_eq!(p.take_usize("m", 10).unwrap(), 5);
        assert_eq!(p.take_str("rule", "goowe"), "mv");
        p.finish().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut p = SpecParams::parse("rbf:clesses=4").unwrap();
        let _ = p.take_usize("classes", 4).unwrap();
        assert!(p.finish().is_err());
    }

    #[test]
    fn unknown_algorithm_names_valid_ones() {
        let schema = Arc::new(StreamSchema::numeric(2, 2).unwrap());
        let Err(err) = build_classifier("boost", schema) else {
            panic!("expected an error")
        };
        let text = format!("{err}");
        assert!(text.contains("goowe|base1|base2"), "{text}");
    }

    #[test]
    fn stream_specs_build() {
        assert!(build_stream("rbf:classes=3,attrs=5", 1, None).is_ok());
        assert!(build_stream("sea:noise=0.1", 1, None).is_ok());
        assert!(build_stream("hyp:mag=0.001,noise=0.05", 1, None).is_ok());
        assert!(build_stream("tree:reswap_every=1000", 1, None).is_ok());
        assert!(build_stream("led:noise=0.2", 1, None).is_ok());
        assert!(build_stream("rbf-abrupt:drift_every=100,width=10", 1, Some(1000)).is_ok());
        assert!(build_stream("rbf-abrupt", 1, None).is_err());
        assert!(build_stream("wavelet", 1, None).is_err());
    }

    #[test]
    fn sanitize_is_fs_safe() {
        assert_eq!(sanitize("base1:rule=mv,m=5"), "base1_rule_mv_m_5");
    }
}
