//! Random forest of Gini decision trees.
//!
//! Each tree draws its own ChaCha8 stream from `(seed, tree index)`: first
//! the bootstrap sample, then per-node feature subsets. Thresholds are
//! midpoints between consecutive distinct sorted values; rows with
//! `x[f] <= threshold` go left.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmax, TrainConfig};
use crate::codec;
use crate::matrix::FeatureMatrix;
use crate::seed;

const LEAF: u32 = u32::MAX;

/// Flat array encoding of a binary tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    n_classes: usize,
    /// Split feature per node, `u32::MAX` for leaves.
    #[serde(with = "codec::u32_block")]
    feature: Vec<u32>,
    #[serde(with = "codec::f64_block")]
    threshold: Vec<f64>,
    #[serde(with = "codec::u32_block")]
    left: Vec<u32>,
    #[serde(with = "codec::u32_block")]
    right: Vec<u32>,
    /// Training rows reaching each node.
    #[serde(with = "codec::u32_block")]
    samples: Vec<u32>,
    /// Row-major `n_nodes × n_classes` class counts (zero for internal nodes).
    #[serde(with = "codec::u32_block")]
    histogram: Vec<u32>,
}

/// Gini impurity `1 − Σ p_c²` of a class-count vector.
pub fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

struct Builder<'a> {
    x: &'a FeatureMatrix,
    y: &'a [usize],
    n_classes: usize,
    max_depth: Option<usize>,
    features_per_split: usize,
    rng: ChaCha8Rng,
    tree: DecisionTree,
}

impl Builder<'_> {
    fn push_node(&mut self) -> usize {
        let t = &mut self.tree;
        t.feature.push(LEAF);
        t.threshold.push(0.0);
        t.left.push(LEAF);
        t.right.push(LEAF);
        t.samples.push(0);
        t.histogram.extend(std::iter::repeat_n(0, self.n_classes));
        t.feature.len() - 1
    }

    /// Best split of `rows` on feature `f`, or `None` if `f` is constant there.
    fn best_threshold(&self, rows: &[usize], f: usize, parent: &[usize]) -> Option<Candidate> {
        let mut pairs: Vec<(f64, usize)> = rows.iter().map(|&i| (self.x.get(i, f), self.y[i])).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs[0].0 == pairs[pairs.len() - 1].0 {
            return None;
        }
        let n = pairs.len();
        let mut left = vec![0usize; self.n_classes];
        let mut right = parent.to_vec();
        let mut best: Option<Candidate> = None;
        for k in 0..n - 1 {
            let (v, c) = pairs[k];
            left[c] += 1;
            right[c] -= 1;
            let next = pairs[k + 1].0;
            if v == next {
                continue;
            }
            let n_left = k + 1;
            let n_right = n - n_left;
            let impurity = (n_left as f64 * gini(&left, n_left)
                + n_right as f64 * gini(&right, n_right))
                / n as f64;
            if best.is_none_or(|b| impurity < b.impurity) {
                let mut threshold = v + (next - v) / 2.0;
                if threshold >= next {
                    threshold = v;
                }
                best = Some(Candidate {
                    feature: f,
                    threshold,
                    impurity,
                });
            }
        }
        best
    }

    fn choose_split(&mut self, rows: &[usize], counts: &[usize]) -> Option<Candidate> {
        let n_features = self.x.n_cols();
        let mut order: Vec<usize> = (0..n_features).collect();
        let mut best: Option<Candidate> = None;
        // Draw features without replacement; look at `features_per_split`
        // of them, and keep drawing only while none of them can split.
        for drawn in 0..n_features {
            if drawn >= self.features_per_split && best.is_some() {
                break;
            }
            let pick = self.rng.gen_range(drawn..n_features);
            order.swap(drawn, pick);
            let f = order[drawn];
            if let Some(c) = self.best_threshold(rows, f, counts) {
                if best.is_none_or(|b| c.impurity < b.impurity) {
                    best = Some(c);
                }
            }
        }
        best
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let node = self.push_node();
        let mut counts = vec![0usize; self.n_classes];
        for &i in &rows {
            counts[self.y[i]] += 1;
        }
        self.tree.samples[node] = rows.len() as u32;
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_reached = self.max_depth.is_some_and(|d| depth >= d);
        let split = if pure || depth_reached || rows.len() < 2 {
            None
        } else {
            self.choose_split(&rows, &counts)
        };
        let Some(split) = split else {
            let h = &mut self.tree.histogram[node * self.n_classes..(node + 1) * self.n_classes];
            for (dst, &c) in h.iter_mut().zip(&counts) {
                *dst = c as u32;
            }
            return node;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&i| self.x.get(i, split.feature) <= split.threshold);
        self.tree.feature[node] = split.feature as u32;
        self.tree.threshold[node] = split.threshold;
        let l = self.grow(left_rows, depth + 1);
        let r = self.grow(right_rows, depth + 1);
        self.tree.left[node] = l as u32;
        self.tree.right[node] = r as u32;
        node
    }
}

impl DecisionTree {
    /// Grow a tree on `rows` of `x` (duplicates allowed). `max_depth`
    /// counts edges from the root.
    pub fn fit(
        x: &FeatureMatrix,
        y: &[usize],
        n_classes: usize,
        rows: Vec<usize>,
        max_depth: Option<usize>,
        features_per_split: usize,
        rng: ChaCha8Rng,
    ) -> Self {
        let mut builder = Builder {
            x,
            y,
            n_classes,
            max_depth,
            features_per_split: features_per_split.max(1),
            rng,
            tree: DecisionTree {
                n_classes,
                feature: Vec::new(),
                threshold: Vec::new(),
                left: Vec::new(),
                right: Vec::new(),
                samples: Vec::new(),
                histogram: Vec::new(),
            },
        };
        builder.grow(rows, 0);
        builder.tree
    }

    pub fn n_nodes(&self) -> usize {
        self.feature.len()
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.feature[node] == LEAF
    }

    pub fn samples(&self, node: usize) -> usize {
        self.samples[node] as usize
    }

    pub fn histogram(&self, node: usize) -> &[u32] {
        &self.histogram[node * self.n_classes..(node + 1) * self.n_classes]
    }

    pub fn children(&self, node: usize) -> Option<(usize, usize)> {
        (!self.is_leaf(node)).then(|| (self.left[node] as usize, self.right[node] as usize))
    }

    pub fn split(&self, node: usize) -> Option<(usize, f64)> {
        (!self.is_leaf(node)).then(|| (self.feature[node] as usize, self.threshold[node]))
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &DecisionTree, n: usize) -> usize {
            match t.children(n) {
                None => 0,
                Some((l, r)) => 1 + walk(t, l).max(walk(t, r)),
            }
        }
        walk(self, 0)
    }

    pub fn leaf_for(&self, row: &[f64]) -> usize {
        let mut node = 0;
        while !self.is_leaf(node) {
            node = if row[self.feature[node] as usize] <= self.threshold[node] {
                self.left[node] as usize
            } else {
                self.right[node] as usize
            };
        }
        node
    }

    /// Majority class of the leaf reached by `row`.
    pub fn predict_row(&self, row: &[f64]) -> usize {
        let h: Vec<f64> = self.histogram(self.leaf_for(row)).iter().map(|&c| f64::from(c)).collect();
        argmax(&h)
    }
}

/// Row indices of the bootstrap sample for tree `tree` under `seed`.
pub fn bootstrap_indices(n: usize, seed: u64, tree: usize) -> Vec<usize> {
    let mut rng = seed::stream_rng(seed, tree as u64);
    draw_bootstrap(n, &mut rng)
}

fn draw_bootstrap(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// `floor(sqrt(n_features))`, at least one.
pub fn features_per_split(n_features: usize) -> usize {
    ((n_features as f64).sqrt().floor() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    n_classes: usize,
    n_features: usize,
    trees: Vec<DecisionTree>,
}

impl ForestModel {
    pub fn fit(x: &FeatureMatrix, y: &[usize], n_classes: usize, cfg: &TrainConfig) -> Self {
        let n = x.n_rows();
        let k = features_per_split(x.n_cols());
        let trees = (0..cfg.rf_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = seed::stream_rng(cfg.seed, t as u64);
                let rows = if cfg.rf_bootstrap {
                    draw_bootstrap(n, &mut rng)
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit(x, y, n_classes, rows, cfg.rf_max_depth, k, rng)
            })
            .collect();
        Self {
            n_classes,
            n_features: x.n_cols(),
            trees,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Fraction of trees voting for each class.
    pub fn vote_fractions(&self, row: &[f64]) -> Vec<f64> {
        let mut votes = vec![0usize; self.n_classes];
        for t in &self.trees {
            votes[t.predict_row(row)] += 1;
        }
        let n = self.trees.len() as f64;
        votes.into_iter().map(|v| v as f64 / n).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::Method;
    use crate::matrix::Provenance;
    use rand::SeedableRng;

    fn cfg() -> TrainConfig {
        TrainConfig {
            method: Method::Rf,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[5, 0], 5), 0.0);
        assert_eq!(gini(&[2, 2], 4), 0.5);
        assert!((gini(&[1, 1, 1], 3) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn xor_needs_depth_two() {
        let x = FeatureMatrix::from_rows(2, [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]], Provenance::Audio);
        let y = [0, 1, 1, 0];
        let forest = ForestModel::fit(
            &x,
            &y,
            2,
            &TrainConfig {
                rf_trees: 5,
                rf_bootstrap: false,
                rf_max_depth: Some(2),
                ..cfg()
            },
        );
        for (row, &label) in x.rows().zip(&y) {
            assert_eq!(argmax(&forest.vote_fractions(row)), label);
        }
        assert!(forest.trees().iter().all(|t| t.depth() == 2));
    }

    #[test]
    fn leaf_histograms_account_for_every_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rows: Vec<[f64; 3]> = (0..60).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
        let y: Vec<usize> = rows.iter().map(|r| usize::from(r[0] + r[1] > 1.0) + usize::from(r[2] > 0.8)).collect();
        let x = FeatureMatrix::from_rows(3, &rows, Provenance::Audio);
        let forest = ForestModel::fit(&x, &y, 3, &TrainConfig { rf_trees: 7, ..cfg() });
        for t in forest.trees() {
            assert_eq!(t.samples(0), 60);
            for node in 0..t.n_nodes() {
                match t.children(node) {
                    None => {
                        let sum: u32 = t.histogram(node).iter().sum();
                        assert_eq!(sum as usize, t.samples(node));
                    }
                    Some((l, r)) => assert_eq!(t.samples(l) + t.samples(r), t.samples(node)),
                }
            }
        }
    }

    #[test]
    fn depth_limit_is_respected() {
        let x = FeatureMatrix::from_rows(1, (0..32).map(|i| [i as f64]), Provenance::Audio);
        let y: Vec<usize> = (0..32).map(|i| i % 2).collect();
        let forest = ForestModel::fit(&x, &y, 2, &TrainConfig { rf_trees: 3, rf_max_depth: Some(3), ..cfg() });
        assert!(forest.trees().iter().all(|t| t.depth() <= 3));
    }

    #[test]
    fn vote_fractions_sum_to_one() {
        let x = FeatureMatrix::from_rows(1, [[0.0], [1.0], [2.0], [3.0]], Provenance::Audio);
        let forest = ForestModel::fit(&x, &[0, 0, 1, 1], 2, &TrainConfig { rf_trees: 10, ..cfg() });
        let s = forest.vote_fractions(&[1.5]);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_separates_adjacent_floats() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let x = FeatureMatrix::from_rows(1, [[a], [b]], Provenance::Audio);
        let tree = DecisionTree::fit(&x, &[0, 1], 2, vec![0, 1], None, 1, ChaCha8Rng::seed_from_u64(0));
        assert_eq!(tree.predict_row(&[a]), 0);
        assert_eq!(tree.predict_row(&[b]), 1);
    }
}
