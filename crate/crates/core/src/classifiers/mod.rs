//! The four classifier families behind one train/predict contract.
//!
//! Labels are class indices into a label scheme. Every argmax in this
//! module breaks ties toward the lowest class index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::FeatureMatrix;

pub mod forest;
pub mod linear;
pub mod naive_bayes;

pub use forest::{bootstrap_indices, DecisionTree, ForestModel};
pub use linear::{LinearModel, LossKind};
pub use naive_bayes::NbModel;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("no training samples")]
    NoSamples,
    #[error("{rows} feature rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("label {label} is outside the {n_classes}-class scheme")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("negative feature value at row {row}, column {col}; multinomial naive Bayes needs nonnegative features")]
    NegativeFeature { row: usize, col: usize },
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },
    #[error("shape mismatch: model expects {expected} features, input has {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Nb,
    Svm,
    Lr,
    Rf,
}

impl Method {
    /// Report order.
    pub const ALL: [Method; 4] = [Method::Nb, Method::Svm, Method::Lr, Method::Rf];

    pub fn name(self) -> &'static str {
        match self {
            Method::Nb => "nb",
            Method::Svm => "svm",
            Method::Lr => "lr",
            Method::Rf => "rf",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nb" => Ok(Method::Nb),
            "svm" => Ok(Method::Svm),
            "lr" => Ok(Method::Lr),
            "rf" => Ok(Method::Rf),
            other => Err(format!("unknown method `{other}` (expected nb, svm, lr or rf)")),
        }
    }
}

/// Hyper-parameters for all four families. Fields irrelevant to the chosen
/// method are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub method: Method,
    pub seed: u64,
    /// Additive smoothing for naive Bayes.
    pub nb_alpha: f64,
    /// L2 penalty weight `λ` in `λ‖w‖²`.
    pub l2_lambda: f64,
    pub max_epochs: usize,
    /// Initial step size; epoch `t` (1-based) uses `learning_rate / t`.
    pub learning_rate: f64,
    /// Stop once the objective changes by less than this between epochs.
    pub tolerance: f64,
    pub rf_trees: usize,
    pub rf_max_depth: Option<usize>,
    /// Draw a bootstrap sample per tree. Disable to grow every tree on all rows.
    pub rf_bootstrap: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            method: Method::Lr,
            seed: 0,
            nb_alpha: 1.0,
            l2_lambda: 1e-4,
            max_epochs: 200,
            learning_rate: 0.1,
            tolerance: 1e-6,
            rf_trees: 100,
            rf_max_depth: None,
            rf_bootstrap: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |m: &str| Err(ClassifierError::InvalidConfig(m.into()));
        if !(self.nb_alpha > 0.0 && self.nb_alpha.is_finite()) {
            return bad("nb_alpha must be positive and finite");
        }
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return bad("l2_lambda must be nonnegative and finite");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive and finite");
        }
        if !(self.tolerance >= 0.0) {
            return bad("tolerance must be nonnegative");
        }
        if self.rf_trees == 0 {
            return bad("rf_trees must be positive");
        }
        if self.rf_max_depth == Some(0) {
            return bad("rf_max_depth must be positive when set");
        }
        Ok(())
    }
}

/// A fitted classifier of any family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedModel {
    NaiveBayes(NbModel),
    Linear(LinearModel),
    Forest(ForestModel),
    /// Degenerate model from single-class training data.
    Constant {
        n_classes: usize,
        n_features: usize,
        class: usize,
    },
}

impl TrainedModel {
    pub fn n_classes(&self) -> usize {
        match self {
            TrainedModel::NaiveBayes(m) => m.n_classes(),
            TrainedModel::Linear(m) => m.n_classes(),
            TrainedModel::Forest(m) => m.n_classes(),
            TrainedModel::Constant { n_classes, .. } => *n_classes,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::NaiveBayes(m) => m.n_features(),
            TrainedModel::Linear(m) => m.n_features(),
            TrainedModel::Forest(m) => m.n_features(),
            TrainedModel::Constant { n_features, .. } => *n_features,
        }
    }
}

/// Index of the largest value; the first one wins ties. NaN never wins.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] || (values[best].is_nan() && !v.is_nan()) {
            best = i;
        }
    }
    best
}

fn check_training_input(
    x: &FeatureMatrix,
    y: &[usize],
    n_classes: usize,
) -> Result<(), ClassifierError> {
    if x.n_rows() != y.len() {
        return Err(ClassifierError::LengthMismatch {
            rows: x.n_rows(),
            labels: y.len(),
        });
    }
    if y.is_empty() {
        return Err(ClassifierError::NoSamples);
    }
    if let Some(&label) = y.iter().find(|&&l| l >= n_classes) {
        return Err(ClassifierError::LabelOutOfRange { label, n_classes });
    }
    if let Some((row, col)) = x.first_non_finite() {
        return Err(ClassifierError::NonFiniteFeature { row, col });
    }
    Ok(())
}

/// Fit the configured method on rows `x` with class indices `y` drawn
/// from `0..n_classes`.
///
/// Single-class training data yields [`TrainedModel::Constant`].
pub fn train(
    x: &FeatureMatrix,
    y: &[usize],
    n_classes: usize,
    cfg: &TrainConfig,
) -> Result<TrainedModel, ClassifierError> {
    cfg.validate()?;
    check_training_input(x, y, n_classes)?;
    if cfg.method == Method::Nb {
        naive_bayes::check_nonnegative(x)?;
    }
    if y.iter().all(|&l| l == y[0]) {
        log::warn!(
            "training data holds a single class ({}); fitting a constant model",
            y[0]
        );
        return Ok(TrainedModel::Constant {
            n_classes,
            n_features: x.n_cols(),
            class: y[0],
        });
    }
    Ok(match cfg.method {
        Method::Nb => TrainedModel::NaiveBayes(NbModel::fit(x, y, n_classes, cfg.nb_alpha)),
        Method::Lr => TrainedModel::Linear(LinearModel::fit(x, y, n_classes, LossKind::Logistic, cfg)),
        Method::Svm => TrainedModel::Linear(LinearModel::fit(x, y, n_classes, LossKind::Hinge, cfg)),
        Method::Rf => TrainedModel::Forest(ForestModel::fit(x, y, n_classes, cfg)),
    })
}

fn check_shape(m: &TrainedModel, x: &FeatureMatrix) -> Result<(), ClassifierError> {
    if x.n_cols() != m.n_features() {
        return Err(ClassifierError::ShapeMismatch {
            expected: m.n_features(),
            found: x.n_cols(),
        });
    }
    Ok(())
}

/// Per-row class scores, `n_rows × n_classes`:
/// naive Bayes → normalized log joint, logistic → sigmoid of the margin,
/// SVM → raw margin, forest → vote fractions, constant → one-hot.
pub fn predict_scores(m: &TrainedModel, x: &FeatureMatrix) -> Result<Vec<Vec<f64>>, ClassifierError> {
    check_shape(m, x)?;
    Ok(match m {
        TrainedModel::NaiveBayes(nb) => x.rows().map(|r| nb.log_posterior(r)).collect(),
        TrainedModel::Linear(lin) => x.rows().map(|r| lin.scores(r)).collect(),
        TrainedModel::Forest(rf) => x.rows().map(|r| rf.vote_fractions(r)).collect(),
        TrainedModel::Constant { n_classes, class, .. } => {
            let mut one_hot = vec![0.0; *n_classes];
            one_hot[*class] = 1.0;
            vec![one_hot; x.n_rows()]
        }
    })
}

pub fn predict(m: &TrainedModel, x: &FeatureMatrix) -> Result<Vec<usize>, ClassifierError> {
    Ok(predict_scores(m, x)?.iter().map(|s| argmax(s)).collect())
}
