use serde::{Deserialize, Serialize};

use super::AudioError;
use crate::codec;
use crate::matrix::FeatureMatrix;

/// Per-column min-max scaler fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    #[serde(with = "codec::f64_block")]
    mins: Vec<f64>,
    #[serde(with = "codec::f64_block")]
    maxs: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(m: &FeatureMatrix) -> Result<Self, AudioError> {
        if m.n_rows() == 0 || m.n_cols() == 0 {
            return Err(AudioError::EmptyMatrix);
        }
        let mut mins = m.row(0).to_vec();
        let mut maxs = mins.clone();
        for row in m.rows().skip(1) {
            for ((lo, hi), &v) in mins.iter_mut().zip(maxs.iter_mut()).zip(row) {
                *lo = lo.min(v);
                *hi = hi.max(v);
            }
        }
        Ok(Self { mins, maxs })
    }

    pub fn n_features(&self) -> usize {
        self.mins.len()
    }

    pub fn mins(&self) -> &[f64] {
        &self.mins
    }

    pub fn maxs(&self) -> &[f64] {
        &self.maxs
    }

    /// Map each column to `[0, 1]` with the fitted bounds, clipping values
    /// outside them. Constant fitted columns map to 0.
    pub fn transform(&self, m: &FeatureMatrix) -> Result<FeatureMatrix, AudioError> {
        if m.n_cols() != self.mins.len() {
            return Err(AudioError::ShapeMismatch {
                expected: self.mins.len(),
                found: m.n_cols(),
            });
        }
        let mut out = m.clone();
        for i in 0..out.n_rows() {
            for ((v, &lo), &hi) in out.row_mut(i).iter_mut().zip(&self.mins).zip(&self.maxs) {
                let span = hi - lo;
                *v = if span > 0.0 {
                    ((*v - lo) / span).clamp(0.0, 1.0)
                } else {
                    0.0
                };
            }
        }
        Ok(out)
    }
}

/// Fit a scaler on `m` and return the scaled matrix together with it.
pub fn min_max_normalize(m: &FeatureMatrix) -> Result<(FeatureMatrix, MinMaxScaler), AudioError> {
    let scaler = MinMaxScaler::fit(m)?;
    let scaled = scaler.transform(m)?;
    Ok((scaled, scaler))
}
