//! One-vs-rest linear models trained by deterministic full-batch
//! (sub)gradient descent.
//!
//! For class `c`, targets are `+1` for rows of `c` and `-1` otherwise, and
//! the objective over `n` rows is
//!
//! ```text
//! J(w, b) = (1/n) Σ_i ℓ(ŷ_i · (w·x_i + b)) + λ‖w‖²
//! ```
//!
//! with `ℓ(m) = ln(1 + e^{-m})` (logistic) or `max(0, 1 - m)` (hinge).
//! The bias is not penalized.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TrainConfig;
use crate::codec;
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Logistic,
    Hinge,
}

/// Numerically stable `ln(1 + e^{-m})`.
fn log1p_exp_neg(m: f64) -> f64 {
    if m > 0.0 {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LossKind {
    pub fn loss(self, margin: f64) -> f64 {
        match self {
            LossKind::Logistic => log1p_exp_neg(margin),
            LossKind::Hinge => (1.0 - margin).max(0.0),
        }
    }

    /// d loss / d margin; for the hinge, the subgradient `-1` on `m < 1`.
    pub fn dloss(self, margin: f64) -> f64 {
        match self {
            LossKind::Logistic => -sigmoid(-margin),
            LossKind::Hinge => {
                if margin < 1.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// The regularized binary objective for one one-vs-rest subproblem.
#[derive(Debug, Clone)]
pub struct BinaryObjective<'a> {
    x: &'a FeatureMatrix,
    targets: Vec<f64>,
    lambda: f64,
    loss: LossKind,
}

impl<'a> BinaryObjective<'a> {
    /// `targets` must be ±1, one per row of `x`.
    pub fn new(x: &'a FeatureMatrix, targets: Vec<f64>, lambda: f64, loss: LossKind) -> Self {
        assert_eq!(x.n_rows(), targets.len());
        Self {
            x,
            targets,
            lambda,
            loss,
        }
    }

    fn decision(&self, w: &[f64], b: f64) -> Vec<f64> {
        self.x.rows().map(|r| dot(w, r) + b).collect()
    }

    fn value_from(&self, w: &[f64], decision: &[f64]) -> f64 {
        let n = self.targets.len() as f64;
        let data: f64 = decision
            .iter()
            .zip(&self.targets)
            .map(|(&s, &t)| self.loss.loss(t * s))
            .sum();
        data / n + self.lambda * dot(w, w)
    }

    fn gradient_from(&self, w: &[f64], decision: &[f64]) -> (Vec<f64>, f64) {
        let n = self.targets.len() as f64;
        let mut gw: Vec<f64> = w.iter().map(|&wj| 2.0 * self.lambda * wj).collect();
        let mut gb = 0.0;
        for ((row, &s), &t) in self.x.rows().zip(decision).zip(&self.targets) {
            let coeff = self.loss.dloss(t * s) * t / n;
            if coeff == 0.0 {
                continue;
            }
            gb += coeff;
            for (g, &v) in gw.iter_mut().zip(row) {
                *g += coeff * v;
            }
        }
        (gw, gb)
    }

    pub fn value(&self, w: &[f64], b: f64) -> f64 {
        self.value_from(w, &self.decision(w, b))
    }

    /// Gradient (logistic) or subgradient (hinge) with respect to `(w, b)`.
    pub fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        self.gradient_from(w, &self.decision(w, b))
    }

    /// Training margins `ŷ_i · (w·x_i + b)`.
    pub fn margins(&self, w: &[f64], b: f64) -> Vec<f64> {
        self.decision(w, b)
            .iter()
            .zip(&self.targets)
            .map(|(s, t)| s * t)
            .collect()
    }

    /// Descend from zero with step `learning_rate / t` at epoch `t`, stopping
    /// when the objective changes by less than `tolerance` or after
    /// `max_epochs`. Returns `(w, b, epochs_run)`.
    pub fn minimize(&self, cfg: &TrainConfig) -> (Vec<f64>, f64, usize) {
        let mut w = vec![0.0; self.x.n_cols()];
        let mut b = 0.0;
        let mut decision = self.decision(&w, b);
        let mut prev = self.value_from(&w, &decision);
        let mut epochs = 0;
        for t in 1..=cfg.max_epochs {
            epochs = t;
            let step = cfg.learning_rate / t as f64;
            let (gw, gb) = self.gradient_from(&w, &decision);
            for (wj, g) in w.iter_mut().zip(gw) {
                *wj -= step * g;
            }
            b -= step * gb;
            decision = self.decision(&w, b);
            let value = self.value_from(&w, &decision);
            if (prev - value).abs() < cfg.tolerance {
                break;
            }
            prev = value;
        }
        (w, b, epochs)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    n_classes: usize,
    n_features: usize,
    loss: LossKind,
    /// Row-major `n_classes × n_features`, one row per one-vs-rest scorer.
    #[serde(with = "codec::f64_block")]
    weights: Vec<f64>,
    #[serde(with = "codec::f64_block")]
    bias: Vec<f64>,
}

impl LinearModel {
    pub fn fit(
        x: &FeatureMatrix,
        y: &[usize],
        n_classes: usize,
        loss: LossKind,
        cfg: &TrainConfig,
    ) -> Self {
        let per_class: Vec<(Vec<f64>, f64)> = (0..n_classes)
            .into_par_iter()
            .map(|c| {
                let targets = y.iter().map(|&l| if l == c { 1.0 } else { -1.0 }).collect();
                let objective = BinaryObjective::new(x, targets, cfg.l2_lambda, loss);
                let (w, b, _) = objective.minimize(cfg);
                (w, b)
            })
            .collect();
        let mut weights = Vec::with_capacity(n_classes * x.n_cols());
        let mut bias = Vec::with_capacity(n_classes);
        for (w, b) in per_class {
            weights.extend(w);
            bias.push(b);
        }
        Self {
            n_classes,
            n_features: x.n_cols(),
            loss,
            weights,
            bias,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn loss(&self) -> LossKind {
        self.loss
    }

    pub fn weights(&self, class: usize) -> &[f64] {
        &self.weights[class * self.n_features..(class + 1) * self.n_features]
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn decision(&self, row: &[f64]) -> Vec<f64> {
        (0..self.n_classes)
            .map(|c| dot(self.weights(c), row) + self.bias[c])
            .collect()
    }

    /// Sigmoid scores for logistic models, raw margins for hinge models.
    pub fn scores(&self, row: &[f64]) -> Vec<f64> {
        let d = self.decision(row);
        match self.loss {
            LossKind::Logistic => d.into_iter().map(sigmoid).collect(),
            LossKind::Hinge => d,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::Method;
    use crate::matrix::Provenance;

    #[test]
    fn stable_logistic_pieces() {
        assert!((log1p_exp_neg(0.0) - 2f64.ln()).abs() < 1e-15);
        assert!(log1p_exp_neg(800.0) >= 0.0);
        assert!((log1p_exp_neg(-800.0) - 800.0).abs() < 1e-9);
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
    }

    #[test]
    fn separable_two_points() {
        let x = FeatureMatrix::from_rows(2, [[0.0, 0.0], [1.0, 1.0]], Provenance::Audio);
        let cfg = TrainConfig {
            method: Method::Lr,
            ..TrainConfig::default()
        };
        let m = LinearModel::fit(&x, &[0, 1], 2, LossKind::Logistic, &cfg);
        for (i, row) in x.rows().enumerate() {
            let s = m.scores(row);
            assert!(s[i] > 0.5, "row {i}: {s:?}");
            assert_eq!(crate::classifiers::argmax(&s), i);
        }
    }

    #[test]
    fn descent_lowers_the_objective() {
        let x = FeatureMatrix::from_rows(
            2,
            [[0.2, 0.9], [0.1, 0.7], [0.8, 0.1], [0.9, 0.3], [0.5, 0.5]],
            Provenance::Text,
        );
        for loss in [LossKind::Logistic, LossKind::Hinge] {
            let obj = BinaryObjective::new(&x, vec![1.0, 1.0, -1.0, -1.0, 1.0], 1e-3, loss);
            let start = obj.value(&[0.0, 0.0], 0.0);
            let (w, b, epochs) = obj.minimize(&TrainConfig::default());
            assert!(obj.value(&w, b) < start, "{loss:?}");
            assert!(epochs >= 1 && epochs <= 200);
            assert!(w.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn hinge_subgradient_vanishes_beyond_margin() {
        assert_eq!(LossKind::Hinge.dloss(1.5), 0.0);
        assert_eq!(LossKind::Hinge.dloss(0.5), -1.0);
        assert_eq!(LossKind::Hinge.loss(2.0), 0.0);
    }
}
