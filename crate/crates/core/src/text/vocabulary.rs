use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Term → column index, with indices assigned in lexicographic term order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Build from any collection of terms; duplicates collapse.
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sorted: BTreeSet<String> = terms.into_iter().map(Into::into).collect();
        let terms: Vec<String> = sorted.into_iter().collect();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Self { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

impl Serialize for Vocabulary {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<String>::deserialize(d)?;
        let n = terms.len();
        let v = Vocabulary::from_terms(terms);
        if v.len() != n {
            return Err(serde::de::Error::custom("vocabulary contains duplicate terms"));
        }
        Ok(v)
    }
}

pub fn fit_vocabulary<S: AsRef<str>>(docs: &[Vec<S>]) -> Vocabulary {
    Vocabulary::from_terms(docs.iter().flatten().map(|t| t.as_ref().to_string()))
}

/// Sparse term counts, one sorted `(column, count)` list per document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    n_terms: usize,
    rows: Vec<Vec<(usize, u32)>>,
}

impl CountMatrix {
    pub fn new(n_terms: usize, rows: Vec<Vec<(usize, u32)>>) -> Self {
        debug_assert!(rows.iter().flatten().all(|&(c, _)| c < n_terms));
        Self { n_terms, rows }
    }

    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn row(&self, d: usize) -> &[(usize, u32)] {
        &self.rows[d]
    }

    pub fn get(&self, d: usize, t: usize) -> u32 {
        self.rows[d]
            .binary_search_by_key(&t, |&(c, _)| c)
            .map_or(0, |i| self.rows[d][i].1)
    }

    /// Number of documents with a nonzero count, per term.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0; self.n_terms];
        for row in &self.rows {
            for &(c, n) in row {
                if n > 0 {
                    df[c] += 1;
                }
            }
        }
        df
    }
}

/// Count in-vocabulary tokens per document; unknown tokens are dropped.
pub fn count_transform<S: AsRef<str>>(docs: &[Vec<S>], v: &Vocabulary) -> CountMatrix {
    let rows = docs
        .iter()
        .map(|doc| {
            let mut counts: HashMap<usize, u32> = HashMap::new();
            for tok in doc {
                if let Some(c) = v.get(tok.as_ref()) {
                    *counts.entry(c).or_default() += 1;
                }
            }
            let mut row: Vec<(usize, u32)> = counts.into_iter().collect();
            row.sort_unstable();
            row
        })
        .collect();
    CountMatrix::new(v.len(), rows)
}
