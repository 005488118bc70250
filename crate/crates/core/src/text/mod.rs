//! Text path: tokenization, count vectors and smoothed TF-IDF.

use thiserror::Error;

mod tfidf;
mod tokenize;
mod vocabulary;

pub use tfidf::{fit_tfidf, tfidf_transform, TextFeaturizer, TfidfModel};
pub use tokenize::tokenize;
pub use vocabulary::{count_transform, fit_vocabulary, CountMatrix, Vocabulary};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("cannot fit idf weights on an empty corpus")]
    EmptyCorpus,
    #[error("shape mismatch: expected {expected} columns, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
}
