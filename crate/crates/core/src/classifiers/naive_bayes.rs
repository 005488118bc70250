//! Multinomial naive Bayes with additive smoothing. Real-valued features
//! are treated as fractional counts.

use serde::{Deserialize, Serialize};

use super::ClassifierError;
use crate::codec;
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    n_classes: usize,
    n_features: usize,
    /// `ln(n_c / n)`; `-inf` for classes absent from training.
    #[serde(with = "codec::f64_block")]
    class_log_prior: Vec<f64>,
    /// Row-major `n_classes × n_features`.
    #[serde(with = "codec::f64_block")]
    feature_log_prob: Vec<f64>,
}

pub(super) fn check_nonnegative(x: &FeatureMatrix) -> Result<(), ClassifierError> {
    for (row, r) in x.rows().enumerate() {
        if let Some(col) = r.iter().position(|&v| v < 0.0) {
            return Err(ClassifierError::NegativeFeature { row, col });
        }
    }
    Ok(())
}

impl NbModel {
    /// `feature_log_prob[c][t] = ln((count(c,t) + α) / (Σ_t count(c,t) + α·n_features))`.
    pub fn fit(x: &FeatureMatrix, y: &[usize], n_classes: usize, alpha: f64) -> Self {
        let n_features = x.n_cols();
        let mut counts = vec![0.0; n_classes * n_features];
        let mut class_sizes = vec![0usize; n_classes];
        for (row, &c) in x.rows().zip(y) {
            class_sizes[c] += 1;
            for (acc, &v) in counts[c * n_features..(c + 1) * n_features].iter_mut().zip(row) {
                *acc += v;
            }
        }
        let n = y.len() as f64;
        let class_log_prior = class_sizes.iter().map(|&k| (k as f64 / n).ln()).collect();
        let mut feature_log_prob = vec![0.0; n_classes * n_features];
        for c in 0..n_classes {
            let row = &counts[c * n_features..(c + 1) * n_features];
            let total: f64 = row.iter().sum::<f64>() + alpha * n_features as f64;
            for (dst, &k) in feature_log_prob[c * n_features..(c + 1) * n_features]
                .iter_mut()
                .zip(row)
            {
                *dst = ((k + alpha) / total).ln();
            }
        }
        Self {
            n_classes,
            n_features,
            class_log_prior,
            feature_log_prob,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn class_log_prior(&self) -> &[f64] {
        &self.class_log_prior
    }

    pub fn feature_log_prob(&self, class: usize) -> &[f64] {
        &self.feature_log_prob[class * self.n_features..(class + 1) * self.n_features]
    }

    /// Unnormalized `ln P(c) + Σ_t x_t ln P(t | c)`.
    pub fn joint_log_likelihood(&self, row: &[f64]) -> Vec<f64> {
        (0..self.n_classes)
            .map(|c| {
                let dot: f64 = self
                    .feature_log_prob(c)
                    .iter()
                    .zip(row)
                    .map(|(lp, &v)| lp * v)
                    .sum();
                self.class_log_prior[c] + dot
            })
            .collect()
    }

    /// Log joint shifted so that the exponentials sum to one.
    pub fn log_posterior(&self, row: &[f64]) -> Vec<f64> {
        let joint = self.joint_log_likelihood(row);
        let max = joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + joint.iter().map(|&j| (j - max).exp()).sum::<f64>().ln();
        joint.into_iter().map(|j| j - lse).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::argmax;
    use crate::matrix::Provenance;

    fn two_class() -> NbModel {
        // class A total counts [4, 0], class B [0, 4]
        let x = FeatureMatrix::from_rows(2, [[3.0, 0.0], [1.0, 0.0], [0.0, 4.0]], Provenance::Text);
        NbModel::fit(&x, &[0, 0, 1], 2, 1.0)
    }

    #[test]
    fn smoothing_formula() {
        let m = two_class();
        let a = m.feature_log_prob(0);
        let b = m.feature_log_prob(1);
        assert!((a[0] - (5.0f64 / 6.0).ln()).abs() < 1e-15);
        assert!((a[1] - (1.0f64 / 6.0).ln()).abs() < 1e-15);
        assert!((b[0] - (1.0f64 / 6.0).ln()).abs() < 1e-15);
        assert!((b[1] - (5.0f64 / 6.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn posterior_for_counts_three_zero() {
        let m = two_class();
        let post = m.log_posterior(&[3.0, 0.0]);
        // hand computation: ln(2/3) + 3 ln(5/6) vs ln(1/3) + 3 ln(1/6)
        let ja = (2.0f64 / 3.0).ln() + 3.0 * (5.0f64 / 6.0).ln();
        let jb = (1.0f64 / 3.0).ln() + 3.0 * (1.0f64 / 6.0).ln();
        assert!(ja > jb);
        assert_eq!(argmax(&post), 0);
        assert!((post[0] - post[1] - (ja - jb)).abs() < 1e-12);
        let total: f64 = post.iter().map(|p| p.exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distributions_are_normalized() {
        let x = FeatureMatrix::from_rows(3, [[0.2, 0.5, 0.0], [1.0, 0.0, 0.3], [0.0, 0.0, 0.0]], Provenance::Audio);
        let m = NbModel::fit(&x, &[0, 1, 1], 3, 0.5);
        let prior: f64 = m.class_log_prior().iter().map(|p| p.exp()).sum();
        assert!((prior - 1.0).abs() < 1e-9);
        assert_eq!(m.class_log_prior()[2], f64::NEG_INFINITY);
        for c in 0..3 {
            let s: f64 = m.feature_log_prob(c).iter().map(|p| p.exp()).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
        // the absent class never wins
        assert_ne!(argmax(&m.log_posterior(&[0.0, 0.0, 5.0])), 2);
    }
}
