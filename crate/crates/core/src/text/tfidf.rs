use serde::{Deserialize, Serialize};

use super::tokenize::tokenize;
use super::vocabulary::{count_transform, fit_vocabulary, CountMatrix, Vocabulary};
use super::TextError;
use crate::codec;
use crate::matrix::{FeatureMatrix, Provenance};

/// Fitted vocabulary with smoothed inverse document frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    pub vocabulary: Vocabulary,
    #[serde(with = "codec::f64_block")]
    pub idf: Vec<f64>,
}

/// `idf(t) = ln((1 + n) / (1 + df(t))) + 1` over the documents of `c`.
pub fn fit_tfidf(c: &CountMatrix, vocabulary: &Vocabulary) -> Result<TfidfModel, TextError> {
    if c.n_docs() == 0 {
        return Err(TextError::EmptyCorpus);
    }
    if c.n_terms() != vocabulary.len() {
        return Err(TextError::ShapeMismatch {
            expected: vocabulary.len(),
            found: c.n_terms(),
        });
    }
    let n = c.n_docs() as f64;
    let idf = c
        .document_frequencies()
        .into_iter()
        .map(|df| ((1.0 + n) / (1.0 + df as f64)).ln() + 1.0)
        .collect();
    Ok(TfidfModel {
        vocabulary: vocabulary.clone(),
        idf,
    })
}

/// Raw count times idf, then L2 row normalization. All-zero rows stay zero.
pub fn tfidf_transform(c: &CountMatrix, m: &TfidfModel) -> Result<FeatureMatrix, TextError> {
    if c.n_terms() != m.idf.len() {
        return Err(TextError::ShapeMismatch {
            expected: m.idf.len(),
            found: c.n_terms(),
        });
    }
    let mut out = FeatureMatrix::zeros(c.n_docs(), c.n_terms(), Provenance::Text);
    for d in 0..c.n_docs() {
        let row = out.row_mut(d);
        for &(t, n) in c.row(d) {
            row[t] = f64::from(n) * m.idf[t];
        }
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
    }
    Ok(out)
}

/// Raw text → TF-IDF rows, fitted on a training corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextFeaturizer {
    pub model: TfidfModel,
}

impl TextFeaturizer {
    pub fn fit<S: AsRef<str>>(texts: &[S]) -> Result<(Self, FeatureMatrix), TextError> {
        let docs: Vec<Vec<String>> = texts.iter().map(|t| tokenize(t.as_ref())).collect();
        let vocabulary = fit_vocabulary(&docs);
        let counts = count_transform(&docs, &vocabulary);
        let model = fit_tfidf(&counts, &vocabulary)?;
        let x = tfidf_transform(&counts, &model)?;
        Ok((Self { model }, x))
    }

    pub fn n_features(&self) -> usize {
        self.model.idf.len()
    }

    pub fn transform<S: AsRef<str>>(&self, texts: &[S]) -> FeatureMatrix {
        let docs: Vec<Vec<String>> = texts.iter().map(|t| tokenize(t.as_ref())).collect();
        let counts = count_transform(&docs, &self.model.vocabulary);
        tfidf_transform(&counts, &self.model).expect("counts built from the model vocabulary")
    }
}
