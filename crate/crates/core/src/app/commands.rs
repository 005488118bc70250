use std::fmt::Write as _;
use std::path::Path;

use super::{write_file, AppError, Featurizer, ModelBundle, RunConfig, FORMAT_VERSION};
use crate::audio::{extract_all, AudioConfig, AudioExtractor, Spectrogram, SpeechFeaturizer};
use crate::classifiers::{predict, train};
use crate::corpus::{
    class_distribution, load_manifest, stratified_split, Dataset, LabelScheme, Language,
};
use crate::evaluation::{confusion_from_indices, report, ClassificationReport, Modality};
use crate::matrix::FeatureMatrix;
use crate::text::TextFeaturizer;

/// Raw per-utterance model inputs, in dataset order.
#[derive(Debug, Clone)]
pub enum Inputs {
    Text(Vec<String>),
    Speech(Vec<Spectrogram>),
}

impl Inputs {
    pub fn len(&self) -> usize {
        match self {
            Inputs::Text(t) => t.len(),
            Inputs::Speech(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn select(&self, indices: &[usize]) -> Inputs {
        match self {
            Inputs::Text(t) => Inputs::Text(indices.iter().map(|&i| t[i].clone()).collect()),
            Inputs::Speech(s) => Inputs::Speech(indices.iter().map(|&i| s[i].clone()).collect()),
        }
    }
}

/// Gather text or decode and analyse every audio clip. Fails up front,
/// naming the offenders, when an utterance lacks the requested input or an
/// audio file does not exist.
pub fn load_inputs(
    ds: &Dataset,
    modality: Modality,
    audio: &AudioConfig,
    feature_cache: Option<&Path>,
) -> Result<Inputs, AppError> {
    let utts = ds.utterances();
    let missing: Vec<String> = utts
        .iter()
        .filter(|u| match modality {
            Modality::Text => u.text.is_none(),
            Modality::Speech => u.audio_path.is_none(),
        })
        .map(|u| u.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(AppError::MissingModality { modality, ids: missing });
    }
    match modality {
        Modality::Text => Ok(Inputs::Text(
            utts.iter().map(|u| u.text.clone().unwrap_or_default()).collect(),
        )),
        Modality::Speech => {
            let items: Vec<(String, std::path::PathBuf)> = utts
                .iter()
                .map(|u| (u.id.clone(), u.audio_path.clone().expect("checked above")))
                .collect();
            if let Some((_, path)) = items.iter().find(|(_, p)| !p.is_file()) {
                return Err(AppError::MissingAudio { path: path.clone() });
            }
            let extractor = AudioExtractor::new(*audio)?;
            let specs = extract_all(&extractor, &items, feature_cache)
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Inputs::Speech(specs))
        }
    }
}

/// Apply a fitted featurizer.
pub fn featurize(featurizer: &Featurizer, inputs: &Inputs) -> Result<FeatureMatrix, AppError> {
    match (featurizer, inputs) {
        (Featurizer::Text(f), Inputs::Text(t)) => Ok(f.transform(t)),
        (Featurizer::Speech(f), Inputs::Speech(s)) => Ok(f.transform(s)?),
        (f, _) => Err(AppError::Internal(format!(
            "{} featurizer applied to other-modality inputs",
            f.modality()
        ))),
    }
}

/// Result of training and scoring one model.
#[derive(Debug, Clone)]
pub struct CellOutput {
    pub bundle: ModelBundle,
    pub report: ClassificationReport,
    pub validation_ids: Vec<String>,
    pub validation_gold: Vec<usize>,
    pub validation_predicted: Vec<usize>,
}

impl CellOutput {
    /// Writes `model.json`, `report.csv`, `report.txt` and
    /// `validation_predictions.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), AppError> {
        self.bundle.save(&dir.join("model.json"))?;
        write_file(&dir.join("report.csv"), self.report.to_csv())?;
        write_file(&dir.join("report.txt"), self.report.to_text())?;
        let scheme = &self.bundle.scheme;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "gold_label", "predicted_label"])
            .map_err(|e| AppError::Internal(e.to_string()))?;
        for ((id, &g), &p) in self
            .validation_ids
            .iter()
            .zip(&self.validation_gold)
            .zip(&self.validation_predicted)
        {
            w.write_record([id.as_str(), scheme.code(g), scheme.code(p)])
                .map_err(|e| AppError::Internal(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| AppError::Internal(e.to_string()))?;
        write_file(&dir.join("validation_predictions.csv"), bytes)
    }
}

/// Split, fit the featurizer on the training side only, train, and score
/// the validation side. `inputs` must be in dataset order.
pub fn run_cell(cfg: &RunConfig, ds: &Dataset, inputs: &Inputs) -> Result<CellOutput, AppError> {
    if inputs.len() != ds.len() {
        return Err(AppError::Internal(format!(
            "{} inputs for {} utterances",
            inputs.len(),
            ds.len()
        )));
    }
    let split = stratified_split(ds, &cfg.split)?;
    let y_train = split.train.label_indices()?;
    let y_val = split.validation.label_indices()?;
    let (featurizer, x_train) = match inputs.select(&split.train_indices) {
        Inputs::Text(t) => {
            let (f, x) = TextFeaturizer::fit(&t)?;
            (Featurizer::Text(f), x)
        }
        Inputs::Speech(s) => {
            let (f, x) = SpeechFeaturizer::fit(cfg.audio, &s, cfg.normalize)?;
            (Featurizer::Speech(f), x)
        }
    };
    let scheme = ds.scheme().clone();
    let model = train(&x_train, &y_train, scheme.len(), &cfg.train_config())?;
    let x_val = featurize(&featurizer, &inputs.select(&split.validation_indices))?;
    let predicted = predict(&model, &x_val)?;
    let report = report(&confusion_from_indices(&y_val, &predicted, &scheme)?);
    Ok(CellOutput {
        bundle: ModelBundle {
            format_version: FORMAT_VERSION,
            run_config: cfg.clone(),
            scheme,
            featurizer,
            model,
        },
        report,
        validation_ids: split.validation.utterances().iter().map(|u| u.id.clone()).collect(),
        validation_gold: y_val,
        validation_predicted: predicted,
    })
}

fn load_dataset(cfg: &RunConfig) -> Result<Dataset, AppError> {
    let ds = load_manifest(&cfg.manifest_path, &LabelScheme::for_kind(cfg.task))?;
    Ok(match &cfg.language {
        Some(name) => ds.with_language(Language::parse(name)),
        None => ds,
    })
}

/// Train one model as configured; writes its artifacts when
/// `cfg.output_dir` is set.
pub fn cmd_train(cfg: &RunConfig) -> Result<CellOutput, AppError> {
    let ds = load_dataset(cfg)?;
    let inputs = load_inputs(&ds, cfg.modality, &cfg.audio, cfg.feature_cache.as_deref())?;
    let out = run_cell(cfg, &ds, &inputs)?;
    if let Some(dir) = &cfg.output_dir {
        out.write(dir)?;
    }
    Ok(out)
}

fn predict_manifest(
    bundle: &ModelBundle,
    manifest: &Path,
    feature_cache: Option<&Path>,
) -> Result<(Dataset, Vec<usize>), AppError> {
    let ds = load_manifest(manifest, &bundle.scheme)?;
    if ds.is_empty() {
        return Ok((ds, Vec::new()));
    }
    let audio = match &bundle.featurizer {
        Featurizer::Speech(f) => f.config,
        Featurizer::Text(_) => bundle.run_config.audio,
    };
    let inputs = load_inputs(&ds, bundle.featurizer.modality(), &audio, feature_cache)?;
    let x = featurize(&bundle.featurizer, &inputs)?;
    Ok((ds, predict(&bundle.model, &x)?))
}

/// Predict every utterance of a manifest; returns `(id, label)` pairs in
/// manifest order.
pub fn cmd_predict(
    bundle: &ModelBundle,
    manifest: &Path,
    feature_cache: Option<&Path>,
) -> Result<Vec<(String, String)>, AppError> {
    let (ds, predicted) = predict_manifest(bundle, manifest, feature_cache)?;
    Ok(ds
        .utterances()
        .iter()
        .zip(predicted)
        .map(|(u, p)| (u.id.clone(), bundle.scheme.code(p).to_string()))
        .collect())
}

/// `id,predicted_label` CSV.
pub fn write_predictions_csv(rows: &[(String, String)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "predicted_label"]).expect("in-memory write");
    for (id, label) in rows {
        w.write_record([id, label]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Score a bundle against a manifest with gold labels.
pub fn cmd_report(
    bundle: &ModelBundle,
    manifest: &Path,
    feature_cache: Option<&Path>,
) -> Result<ClassificationReport, AppError> {
    let (ds, predicted) = predict_manifest(bundle, manifest, feature_cache)?;
    let gold = ds.label_indices()?;
    Ok(report(&confusion_from_indices(&gold, &predicted, &bundle.scheme)?))
}

/// Class distribution, split sizes and feature shapes of a manifest.
pub fn cmd_inspect(cfg: &RunConfig) -> Result<String, AppError> {
    let ds = load_dataset(cfg)?;
    let mut out = String::new();
    let _ = writeln!(out, "manifest: {}", cfg.manifest_path.display());
    let _ = writeln!(out, "utterances: {}", ds.len());
    let dist = class_distribution(&ds)?;
    let _ = writeln!(out, "{} classes: {dist}", cfg.task);
    if !ds.is_empty() {
        let split = stratified_split(&ds, &cfg.split)?;
        let _ = writeln!(out, "train: {}", class_distribution(&split.train)?);
        let _ = writeln!(out, "validation: {}", class_distribution(&split.validation)?);
    }

    let texts: Vec<&str> = ds.utterances().iter().filter_map(|u| u.text.as_deref()).collect();
    let _ = write!(out, "text: {} of {} utterances", texts.len(), ds.len());
    if !texts.is_empty() {
        let (_, x) = TextFeaturizer::fit(&texts)?;
        let _ = write!(out, ", tf-idf shape {} x {}", x.n_rows(), x.n_cols());
    }
    let _ = writeln!(out);

    let with_audio = Dataset::new(
        ds.utterances().iter().filter(|u| u.audio_path.is_some()).cloned().collect(),
        ds.scheme().clone(),
        ds.language().clone(),
    )?;
    let _ = write!(out, "speech: {} of {} utterances", with_audio.len(), ds.len());
    if !with_audio.is_empty() {
        let Inputs::Speech(specs) = load_inputs(&with_audio, Modality::Speech, &cfg.audio, cfg.feature_cache.as_deref())?
        else {
            unreachable!("speech inputs requested")
        };
        let frames = specs.iter().map(Spectrogram::n_frames).max().unwrap_or(0);
        let _ = write!(
            out,
            ", mel shape {} x {} (flattened {})",
            cfg.audio.n_mels,
            frames,
            cfg.audio.n_mels * frames
        );
    }
    let _ = writeln!(out);
    Ok(out)
}
