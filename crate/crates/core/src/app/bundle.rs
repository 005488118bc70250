use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{io_error, write_file, AppError, RunConfig};
use crate::audio::SpeechFeaturizer;
use crate::classifiers::TrainedModel;
use crate::corpus::LabelScheme;
use crate::evaluation::Modality;
use crate::text::TextFeaturizer;

pub const FORMAT_VERSION: u64 = 1;

/// Fitted featurizer state, fit on the training split only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "modality", rename_all = "lowercase")]
pub enum Featurizer {
    Text(TextFeaturizer),
    Speech(SpeechFeaturizer),
}

impl Featurizer {
    pub fn modality(&self) -> Modality {
        match self {
            Featurizer::Text(_) => Modality::Text,
            Featurizer::Speech(_) => Modality::Speech,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Featurizer::Text(t) => t.n_features(),
            Featurizer::Speech(s) => s.n_features(),
        }
    }
}

/// Everything needed to predict: a single JSON document whose numeric
/// arrays are base64 little-endian blocks, so reloading is bit-exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u64,
    pub run_config: RunConfig,
    pub scheme: LabelScheme,
    pub featurizer: Featurizer,
    pub model: TrainedModel,
}

impl ModelBundle {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self, AppError> {
        let json_err = |e: serde_json::Error| AppError::Json {
            path: origin.to_path_buf(),
            message: e.to_string(),
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(json_err)?;
        let found = value.get("format_version").and_then(serde_json::Value::as_u64).unwrap_or(0);
        if found != FORMAT_VERSION {
            return Err(AppError::VersionMismatch {
                found,
                expected: FORMAT_VERSION,
            });
        }
        serde_json::from_value(value).map_err(json_err)
    }

    pub fn save(&self, path: &Path) -> Result<(), AppError> {
        write_file(path, self.to_json())
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::from_json(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{predict, train, TrainConfig};

    fn text_bundle() -> ModelBundle {
        let docs = ["good day sunny", "bad awful day", "sunny good", "awful bad bad"];
        let (featurizer, x) = TextFeaturizer::fit(&docs).unwrap();
        let model = train(&x, &[1, 0, 1, 0], 2, &TrainConfig::default()).unwrap();
        ModelBundle {
            format_version: FORMAT_VERSION,
            run_config: RunConfig::default(),
            scheme: LabelScheme::binary(),
            featurizer: Featurizer::Text(featurizer),
            model,
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let b = text_bundle();
        let back = ModelBundle::from_json(&b.to_json(), Path::new("m.json")).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.to_json(), b.to_json());
        let Featurizer::Text(t) = &back.featurizer else { panic!() };
        let x = t.transform(&["bad sunny day"]);
        assert_eq!(predict(&back.model, &x).unwrap(), predict(&b.model, &x).unwrap());
    }

    #[test]
    fn version_gate() {
        let text = text_bundle().to_json().replacen("\"format_version\": 1", "\"format_version\": 2", 1);
        let e = ModelBundle::from_json(&text, Path::new("m.json")).unwrap_err();
        assert!(matches!(e, AppError::VersionMismatch { found: 2, expected: 1 }));
        assert!(matches!(
            ModelBundle::from_json("{", Path::new("m.json")).unwrap_err(),
            AppError::Json { .. }
        ));
    }
}
