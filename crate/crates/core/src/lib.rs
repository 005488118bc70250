//! Bag-of-sounds multimodal hate-speech classification.
//!
//! Audio clips become flattened, normalized Mel-spectrogram rows and text
//! becomes smoothed TF-IDF rows; either feeds one of four classical
//! classifiers (multinomial naive Bayes, linear SVM, logistic regression,
//! random forest), scored by per-class and macro-averaged F1 over a
//! stratified train/validation split.

pub mod app;
pub mod audio;
pub mod classifiers;
pub mod codec;
pub mod corpus;
pub mod evaluation;
pub mod matrix;
pub mod seed;
pub mod text;

pub use matrix::{FeatureMatrix, Provenance};
