//! Orchestration behind the `bos` binary: run configuration, model
//! bundles and the train / sweep / predict / report / inspect commands.

use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

use crate::audio::AudioError;
use crate::classifiers::ClassifierError;
use crate::corpus::CorpusError;
use crate::evaluation::{EvalError, Modality};
use crate::text::TextError;

mod bundle;
mod commands;
mod config;
mod sweep;

pub use bundle::{Featurizer, ModelBundle, FORMAT_VERSION};
pub use commands::{
    cmd_inspect, cmd_predict, cmd_report, cmd_train, featurize, load_inputs, run_cell, write_predictions_csv,
    CellOutput, Inputs,
};
pub use config::RunConfig;
pub use sweep::{cmd_sweep, SweepOutcome};

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("audio file not found: {}", path.display())]
    MissingAudio { path: PathBuf },
    #[error("{} utterance(s) lack {modality} input: {}", ids.len(), preview(ids))]
    MissingModality { modality: Modality, ids: Vec<String> },
    #[error("model bundle format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: invalid JSON: {message}", path.display())]
    Json { path: PathBuf, message: String },
    #[error("internal error: {0}")]
    Internal(String),
}

impl AppError {
    /// 1 usage, 2 data, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Classifier(ClassifierError::InvalidConfig(_)) => 1,
            AppError::Audio(AudioError::InvalidConfig(_)) => 1,
            AppError::Corpus(CorpusError::InvalidFraction(_)) => 1,
            AppError::Internal(_) => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AppError::Usage(_) => "usage",
            AppError::Corpus(_) => "corpus",
            AppError::Audio(_) => "audio",
            AppError::Text(_) => "text",
            AppError::Classifier(_) => "classifier",
            AppError::Eval(_) => "evaluation",
            AppError::MissingAudio { .. } => "missing_audio",
            AppError::MissingModality { .. } => "missing_modality",
            AppError::VersionMismatch { .. } => "version_mismatch",
            AppError::Io { .. } => "io",
            AppError::Json { .. } => "json",
            AppError::Internal(_) => "internal",
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        let mut v = json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        match self {
            AppError::MissingAudio { path } | AppError::Io { path, .. } | AppError::Json { path, .. } => {
                v["path"] = json!(path.display().to_string());
            }
            AppError::MissingModality { ids, .. } => v["ids"] = json!(ids),
            _ => {}
        }
        v.to_string()
    }
}

fn preview(ids: &[String]) -> String {
    const SHOWN: usize = 5;
    let mut s = ids.iter().take(SHOWN).cloned().collect::<Vec<_>>().join(", ");
    if ids.len() > SHOWN {
        s.push_str(&format!(", ... ({} more)", ids.len() - SHOWN));
    }
    s
}

pub(crate) fn io_error(path: &Path, e: impl ToString) -> AppError {
    AppError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub(crate) fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), AppError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| io_error(path, e))
}

/// Configure the global worker pool from `BOS_THREADS` when it is set.
pub fn init_thread_pool() -> Result<(), AppError> {
    let Ok(raw) = std::env::var("BOS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| AppError::Usage(format!("BOS_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| AppError::Internal(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_and_json() {
        let e = AppError::MissingAudio {
            path: PathBuf::from("a/b.wav"),
        };
        assert_eq!(e.exit_code(), 2);
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(v["path"], "a/b.wav");
        assert_eq!(v["error"], "missing_audio");
        assert_eq!(AppError::Usage("x".into()).exit_code(), 1);
        assert_eq!(AppError::Internal("x".into()).exit_code(), 3);
        let m = AppError::MissingModality {
            modality: Modality::Text,
            ids: vec!["u1".into(), "u7".into()],
        };
        assert!(m.to_string().contains("u1, u7"));
        let many = AppError::MissingModality {
            modality: Modality::Speech,
            ids: (0..30).map(|i| format!("u{i}")).collect(),
        };
        assert!(many.to_string().ends_with("u4, ... (25 more)"));
        let v: serde_json::Value = serde_json::from_str(&many.to_json()).unwrap();
        assert_eq!(v["ids"].as_array().unwrap().len(), 30);
    }
}
