//! Dense row-major feature matrices shared by both modalities.

use serde::{Deserialize, Serialize};

/// Which featurizer produced the columns of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Audio,
    Text,
}

/// A dense `n_rows × n_cols` matrix of `f64`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
    provenance: Provenance,
}

impl FeatureMatrix {
    /// Build a matrix from a flat row-major buffer.
    ///
    /// Panics if `data.len() != n_rows * n_cols`.
    pub fn from_flat(n_rows: usize, n_cols: usize, data: Vec<f64>, provenance: Provenance) -> Self {
        assert_eq!(
            data.len(),
            n_rows * n_cols,
            "flat buffer length does not match {n_rows}x{n_cols}"
        );
        Self {
            n_rows,
            n_cols,
            data,
            provenance,
        }
    }

    /// Stack equal-length rows. An empty iterator yields a `0 × n_cols` matrix.
    ///
    /// Panics on ragged rows.
    pub fn from_rows<I, R>(n_cols: usize, rows: I, provenance: Provenance) -> Self
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[f64]>,
    {
        let mut data = Vec::new();
        let mut n_rows = 0;
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), n_cols, "ragged row {n_rows}");
            data.extend_from_slice(row);
            n_rows += 1;
        }
        Self {
            n_rows,
            n_cols,
            data,
            provenance,
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize, provenance: Provenance) -> Self {
        Self::from_flat(n_rows, n_cols, vec![0.0; n_rows * n_cols], provenance)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.n_rows).map(move |i| self.row(i))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    /// Copy out the rows at `indices`, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self::from_flat(indices.len(), self.n_cols, data, self.provenance)
    }

    /// Position of the first non-finite cell, if any.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|p| (p / self.n_cols, p % self.n_cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_selection() {
        let m = FeatureMatrix::from_rows(2, [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], Provenance::Text);
        assert_eq!(m.n_rows(), 3);
        assert_eq!(m.row(1), &[3.0, 4.0]);
        let s = m.select_rows(&[2, 0]);
        assert_eq!(s.as_slice(), &[5.0, 6.0, 1.0, 2.0]);
        assert_eq!(m.rows().count(), 3);
    }

    #[test]
    fn zero_width_matrix_keeps_its_rows() {
        let m = FeatureMatrix::zeros(4, 0, Provenance::Audio);
        assert_eq!(m.rows().count(), 4);
        assert!(m.rows().all(|r| r.is_empty()));
        assert_eq!(m.n_rows(), 4);
    }

    #[test]
    fn finds_non_finite() {
        let m = FeatureMatrix::from_rows(2, [[1.0, 2.0], [f64::NAN, 4.0]], Provenance::Audio);
        assert_eq!(m.first_non_finite(), Some((1, 0)));
    }
}
