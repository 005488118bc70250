//! Labeled multimodal utterances, label schemes, manifest ingestion and
//! deterministic stratified splitting.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;

/// Manifest header, in canonical column order.
pub const MANIFEST_COLUMNS: [&str; 9] = [
    "id",
    "subject_id",
    "gender",
    "source",
    "utterance_no",
    "text",
    "audio_path",
    "binary_label",
    "multiclass_label",
];

/// Code of the residual non-hate class, shared by both schemes.
pub const NON_HATE: &str = "N";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read manifest {path}: {message}")]
    UnreadableFile { path: PathBuf, message: String },
    #[error("manifest is missing column `{0}`")]
    MissingColumn(String),
    #[error("unknown label `{code}` at row {row}")]
    UnknownLabel { code: String, row: usize },
    #[error("duplicate id `{id}` at row {row}")]
    DuplicateId { id: String, row: usize },
    #[error("row {row}: invalid {column}: {message}")]
    InvalidField {
        row: usize,
        column: &'static str,
        message: String,
    },
    #[error("row {row}: neither text nor audio_path is present")]
    NoModality { row: usize },
    #[error("row {row}: binary label `{binary}` is inconsistent with multiclass label `{multiclass}`")]
    InconsistentLabels {
        row: usize,
        binary: String,
        multiclass: String,
    },
    #[error("utterance `{0}` has no label under the active scheme")]
    UnlabeledUtterance(String),
    #[error("train fraction {0} is outside (0, 1)")]
    InvalidFraction(f64),
    #[error("invalid label scheme: {0}")]
    InvalidScheme(String),
    #[error("cannot write manifest {path}: {message}")]
    Write { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gender {
    M,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryLabel {
    H,
    N,
}

impl BinaryLabel {
    pub fn code(self) -> &'static str {
        match self {
            BinaryLabel::H => "H",
            BinaryLabel::N => "N",
        }
    }

    pub fn parse(code: &str) -> Option<Self> {
        match code {
            "H" => Some(BinaryLabel::H),
            "N" => Some(BinaryLabel::N),
            _ => None,
        }
    }
}

/// One labeled sample.
///
/// Multiclass codes are opaque strings validated against the active scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    pub id: String,
    pub subject_id: String,
    pub gender: Gender,
    pub source: String,
    pub utterance_no: u32,
    pub text: Option<String>,
    pub audio_path: Option<PathBuf>,
    pub binary_label: Option<BinaryLabel>,
    pub multiclass_label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Binary,
    Multiclass,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Binary => "binary",
            SchemeKind::Multiclass => "multiclass",
        })
    }
}

/// Ordered label codes for one task. Order defines class indices and the
/// tie-break order used by every classifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelScheme {
    kind: SchemeKind,
    labels: Vec<String>,
}

impl LabelScheme {
    pub fn binary() -> Self {
        Self {
            kind: SchemeKind::Binary,
            labels: vec!["H".into(), "N".into()],
        }
    }

    pub fn multiclass() -> Self {
        Self {
            kind: SchemeKind::Multiclass,
            labels: ["C", "N", "P", "R", "G"].iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn for_kind(kind: SchemeKind) -> Self {
        match kind {
            SchemeKind::Binary => Self::binary(),
            SchemeKind::Multiclass => Self::multiclass(),
        }
    }

    /// A multiclass scheme with caller-chosen codes. The binary scheme is fixed.
    pub fn custom_multiclass<S: AsRef<str>>(labels: &[S]) -> Result<Self, CorpusError> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        if labels.len() < 2 {
            return Err(CorpusError::InvalidScheme("need at least two labels".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if l.is_empty() || l.contains(',') {
                return Err(CorpusError::InvalidScheme(format!("bad label code `{l}`")));
            }
            if !seen.insert(l.as_str()) {
                return Err(CorpusError::InvalidScheme(format!("duplicate label `{l}`")));
            }
        }
        Ok(Self {
            kind: SchemeKind::Multiclass,
            labels,
        })
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == code)
    }

    pub fn code(&self, index: usize) -> &str {
        &self.labels[index]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Language {
    Malayalam,
    Tamil,
    Telugu,
    Other(String),
}

impl Language {
    /// The three language conditions of the sweep rubric, in report order.
    pub const RUBRIC: [Language; 3] = [Language::Malayalam, Language::Tamil, Language::Telugu];

    pub fn parse(name: &str) -> Self {
        match name.to_ascii_lowercase().as_str() {
            "malayalam" | "mal" | "ml" => Language::Malayalam,
            "tamil" | "tam" | "ta" => Language::Tamil,
            "telugu" | "tel" | "te" => Language::Telugu,
            _ => Language::Other(name.to_string()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Language::Malayalam => "Malayalam",
            Language::Tamil => "Tamil",
            Language::Telugu => "Telugu",
            Language::Other(s) => s,
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    utterances: Vec<Utterance>,
    scheme: LabelScheme,
    language: Language,
}

impl Dataset {
    /// Validate and assemble a dataset. Row numbers in errors are 1-based
    /// positions in `utterances`.
    pub fn new(
        utterances: Vec<Utterance>,
        scheme: LabelScheme,
        language: Language,
    ) -> Result<Self, CorpusError> {
        let mut ids = HashSet::new();
        for (i, u) in utterances.iter().enumerate() {
            let row = i + 1;
            if !ids.insert(u.id.as_str()) {
                return Err(CorpusError::DuplicateId {
                    id: u.id.clone(),
                    row,
                });
            }
            if u.text.is_none() && u.audio_path.is_none() {
                return Err(CorpusError::NoModality { row });
            }
            if let Some(code) = &u.multiclass_label {
                if scheme.kind == SchemeKind::Multiclass && scheme.index_of(code).is_none() {
                    return Err(CorpusError::UnknownLabel {
                        code: code.clone(),
                        row,
                    });
                }
                if let Some(b) = u.binary_label {
                    let expected = if code == NON_HATE {
                        BinaryLabel::N
                    } else {
                        BinaryLabel::H
                    };
                    if b != expected {
                        return Err(CorpusError::InconsistentLabels {
                            row,
                            binary: b.code().into(),
                            multiclass: code.clone(),
                        });
                    }
                }
            }
        }
        Ok(Self {
            utterances,
            scheme,
            language,
        })
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn scheme(&self) -> &LabelScheme {
        &self.scheme
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    /// Label code of `u` under this dataset's scheme.
    pub fn label_code<'a>(&self, u: &'a Utterance) -> Option<&'a str> {
        match self.scheme.kind {
            SchemeKind::Binary => u.binary_label.map(BinaryLabel::code),
            SchemeKind::Multiclass => u.multiclass_label.as_deref(),
        }
    }

    pub fn label_index(&self, u: &Utterance) -> Option<usize> {
        self.label_code(u).and_then(|c| self.scheme.index_of(c))
    }

    pub fn is_fully_labeled(&self) -> bool {
        self.utterances.iter().all(|u| self.label_index(u).is_some())
    }

    /// Class index per utterance, failing on the first unlabeled one.
    pub fn label_indices(&self) -> Result<Vec<usize>, CorpusError> {
        self.utterances
            .iter()
            .map(|u| {
                self.label_index(u)
                    .ok_or_else(|| CorpusError::UnlabeledUtterance(u.id.clone()))
            })
            .collect()
    }

    /// Sub-dataset of the utterances at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            utterances: indices.iter().map(|&i| self.utterances[i].clone()).collect(),
            scheme: self.scheme.clone(),
            language: self.language.clone(),
        }
    }

    /// Same utterances viewed under a different scheme.
    pub fn with_scheme(&self, scheme: LabelScheme) -> Result<Self, CorpusError> {
        Self::new(self.utterances.clone(), scheme, self.language.clone())
    }

    pub fn with_language(mut self, language: Language) -> Self {
        self.language = language;
        self
    }
}

/// Per-class counts in scheme order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCounts(pub Vec<(String, usize)>);

impl ClassCounts {
    pub fn get(&self, code: &str) -> Option<usize> {
        self.0.iter().find(|(c, _)| c == code).map(|(_, n)| *n)
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|(_, n)| n).sum()
    }
}

impl fmt::Display for ClassCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(c, n)| format!("{c}: {n}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn class_distribution(ds: &Dataset) -> Result<ClassCounts, CorpusError> {
    let mut counts = vec![0usize; ds.scheme.len()];
    for idx in ds.label_indices()? {
        counts[idx] += 1;
    }
    Ok(ClassCounts(
        ds.scheme.labels.iter().cloned().zip(counts).collect(),
    ))
}

fn field(record: &csv::StringRecord, col: Option<usize>) -> &str {
    col.and_then(|c| record.get(c)).unwrap_or("").trim()
}

fn optional(s: &str) -> Option<&str> {
    (!s.is_empty()).then_some(s)
}

/// Read a manifest CSV. Relative audio paths are resolved against the
/// manifest's directory. A missing binary label is derived from the
/// multiclass label when that one is present.
pub fn load_manifest(path: &Path, scheme: &LabelScheme) -> Result<Dataset, CorpusError> {
    let unreadable = |message: String| CorpusError::UnreadableFile {
        path: path.to_path_buf(),
        message,
    };
    let bytes = std::fs::read(path).map_err(|e| unreadable(e.to_string()))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(bytes.as_slice());
    let headers = reader.headers().map_err(|e| unreadable(e.to_string()))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let mut cols = [None; MANIFEST_COLUMNS.len()];
    for (slot, name) in cols.iter_mut().zip(MANIFEST_COLUMNS) {
        *slot = Some(column(name).ok_or_else(|| CorpusError::MissingColumn(name.into()))?);
    }
    let [c_id, c_subject, c_gender, c_source, c_no, c_text, c_audio, c_bin, c_multi] = cols;

    let mut utterances = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| unreadable(e.to_string()))?;
        let id = field(&record, c_id);
        if id.is_empty() {
            return Err(CorpusError::InvalidField {
                row,
                column: "id",
                message: "empty".into(),
            });
        }
        let gender = match field(&record, c_gender) {
            "M" | "m" => Gender::M,
            "F" | "f" => Gender::F,
            other => {
                return Err(CorpusError::InvalidField {
                    row,
                    column: "gender",
                    message: format!("`{other}` is not M or F"),
                })
            }
        };
        let utterance_no = field(&record, c_no).parse::<u32>().map_err(|e| {
            CorpusError::InvalidField {
                row,
                column: "utterance_no",
                message: e.to_string(),
            }
        })?;
        let binary_label = match optional(field(&record, c_bin)) {
            None => None,
            Some(code) => Some(BinaryLabel::parse(code).ok_or_else(|| {
                CorpusError::UnknownLabel {
                    code: code.into(),
                    row,
                }
            })?),
        };
        let multiclass_label = optional(field(&record, c_multi)).map(str::to_string);
        let binary_label = binary_label.or_else(|| {
            multiclass_label.as_deref().map(|m| {
                if m == NON_HATE {
                    BinaryLabel::N
                } else {
                    BinaryLabel::H
                }
            })
        });
        // text keeps its interior whitespace; only emptiness marks absence
        let raw_text = c_text.and_then(|c| record.get(c)).unwrap_or("");
        let text = (!raw_text.trim().is_empty()).then(|| raw_text.to_string());
        let audio_path = optional(field(&record, c_audio)).map(|p| {
            let p = PathBuf::from(p);
            if p.is_relative() {
                base_dir.join(p)
            } else {
                p
            }
        });
        utterances.push(Utterance {
            id: id.into(),
            subject_id: field(&record, c_subject).into(),
            gender,
            source: field(&record, c_source).into(),
            utterance_no,
            text,
            audio_path,
            binary_label,
            multiclass_label,
        });
    }
    Dataset::new(utterances, scheme.clone(), Language::Other(String::new()))
}

/// Write utterances as a manifest CSV. Audio paths are written as given.
pub fn write_manifest(path: &Path, utterances: &[Utterance]) -> Result<(), CorpusError> {
    let err = |message: String| CorpusError::Write {
        path: path.to_path_buf(),
        message,
    };
    let mut w = csv::Writer::from_path(path).map_err(|e| err(e.to_string()))?;
    w.write_record(MANIFEST_COLUMNS).map_err(|e| err(e.to_string()))?;
    for u in utterances {
        let gender = match u.gender {
            Gender::M => "M",
            Gender::F => "F",
        };
        let audio = u
            .audio_path
            .as_ref()
            .map(|p| p.to_string_lossy().into_owned())
            .unwrap_or_default();
        w.write_record([
            u.id.as_str(),
            u.subject_id.as_str(),
            gender,
            u.source.as_str(),
            &u.utterance_no.to_string(),
            u.text.as_deref().unwrap_or(""),
            &audio,
            u.binary_label.map(BinaryLabel::code).unwrap_or(""),
            u.multiclass_label.as_deref().unwrap_or(""),
        ])
        .map_err(|e| err(e.to_string()))?;
    }
    w.flush().map_err(|e| err(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.75,
            seed: 0,
            stratified: true,
        }
    }
}

/// Result of a train/validation split. Index lists refer to positions in the
/// source dataset and are in ascending order.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub validation: Dataset,
    pub train_indices: Vec<usize>,
    pub validation_indices: Vec<usize>,
    /// Scheme labels with no members; they contribute nothing to either side.
    pub empty_classes: Vec<String>,
}

/// Number of members of a class of size `n` that go to the train side.
pub fn train_share(n: usize, fraction: f64) -> usize {
    // the epsilon absorbs products like 10 * 0.7 = 6.999...
    let share = ((n as f64) * fraction + 1e-9).floor() as usize;
    share.min(n)
}

/// Deterministic split. Within each class, members are shuffled by a
/// ChaCha8 stream keyed on (`spec.seed`, FNV-1a of the class code), and the
/// first `floor(n_c * train_fraction)` go to train.
pub fn stratified_split(ds: &Dataset, spec: &SplitSpec) -> Result<Split, CorpusError> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(spec.train_fraction));
    }
    let mut train = Vec::new();
    let mut validation = Vec::new();
    let mut empty_classes = Vec::new();

    if spec.stratified {
        let labels = ds.label_indices()?;
        for (class, code) in ds.scheme.labels.iter().enumerate() {
            let mut members: Vec<usize> = labels
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == class)
                .map(|(i, _)| i)
                .collect();
            if members.is_empty() {
                log::warn!("class `{code}` has no members; it is absent from both splits");
                empty_classes.push(code.clone());
                continue;
            }
            members.shuffle(&mut seed::labeled_rng(spec.seed, code));
            let k = train_share(members.len(), spec.train_fraction);
            train.extend_from_slice(&members[..k]);
            validation.extend_from_slice(&members[k..]);
        }
    } else {
        let mut all: Vec<usize> = (0..ds.len()).collect();
        all.shuffle(&mut seed::labeled_rng(spec.seed, "\u{0}unstratified"));
        let k = train_share(all.len(), spec.train_fraction);
        train.extend_from_slice(&all[..k]);
        validation.extend_from_slice(&all[k..]);
    }
    train.sort_unstable();
    validation.sort_unstable();
    Ok(Split {
        train: ds.subset(&train),
        validation: ds.subset(&validation),
        train_indices: train,
        validation_indices: validation,
        empty_classes,
    })
}
