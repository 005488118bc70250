use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::AppError;
use crate::audio::AudioConfig;
use crate::classifiers::{Method, TrainConfig};
use crate::corpus::{SchemeKind, SplitSpec};
use crate::evaluation::Modality;

/// Everything a `train` run depends on. Loaded from JSON (missing fields
/// take their defaults) and then overridden by command-line flags.
///
/// `output_dir` and `feature_cache` do not affect results and are left out
/// of serialized snapshots, so bundles written to different directories
/// stay byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub manifest_path: PathBuf,
    /// Language name recorded alongside the data, e.g. `Tamil`.
    pub language: Option<String>,
    pub task: SchemeKind,
    pub modality: Modality,
    pub method: Method,
    pub split: SplitSpec,
    pub audio: AudioConfig,
    pub train: TrainConfig,
    /// Min-max scale speech features (fit on the training split).
    pub normalize: bool,
    #[serde(skip_serializing)]
    pub feature_cache: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifest_path: PathBuf::new(),
            language: None,
            task: SchemeKind::Binary,
            modality: Modality::Text,
            method: Method::Lr,
            split: SplitSpec::default(),
            audio: AudioConfig::default(),
            train: TrainConfig::default(),
            normalize: true,
            feature_cache: None,
            output_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self, AppError> {
        serde_json::from_str(text)
            .map_err(|e| AppError::Usage(format!("invalid config {}: {e}", origin.display())))
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path).map_err(|e| super::io_error(path, e))?;
        Self::from_json(&text, path)
    }

    /// Set both the split seed and the training seed.
    pub fn set_seed(&mut self, seed: u64) {
        self.split.seed = seed;
        self.train.seed = seed;
    }

    /// Training hyper-parameters with the run's method applied.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            method: self.method,
            ..self.train
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
