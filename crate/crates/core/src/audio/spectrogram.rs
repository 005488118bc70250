use serde::{Deserialize, Serialize};

use crate::matrix::Provenance;

/// Floor applied to power values before taking logarithms.
pub const AMIN: f64 = 1e-10;
/// Dynamic range kept below the loudest cell, in dB.
pub const TOP_DB: f64 = 80.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrogramAxis {
    LinearPower,
    MelPower,
    MelDecibel,
}

/// `n_rows × n_frames` matrix, row-major (one row per frequency band).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    n_rows: usize,
    n_frames: usize,
    values: Vec<f64>,
    axis: SpectrogramAxis,
}

impl Spectrogram {
    pub fn new(n_rows: usize, n_frames: usize, values: Vec<f64>, axis: SpectrogramAxis) -> Self {
        assert_eq!(values.len(), n_rows * n_frames, "spectrogram buffer size");
        Self {
            n_rows,
            n_frames,
            values,
            axis,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>], axis: SpectrogramAxis) -> Self {
        let n_frames = rows.first().map_or(0, Vec::len);
        let values: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(rows.len(), n_frames, values, axis)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn axis(&self) -> SpectrogramAxis {
        self.axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, frame: usize) -> f64 {
        self.values[row * self.n_frames + frame]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.n_frames..(row + 1) * self.n_frames]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A single flattened feature row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

/// Max-referenced decibel conversion with `amin = 1e-10` and an 80 dB floor.
pub fn power_to_db(s: &Spectrogram) -> Spectrogram {
    power_to_db_with(s, AMIN, Some(TOP_DB))
}

/// `10·log10(max(v, amin)) − 10·log10(max(ref, amin))` with `ref` the
/// spectrogram maximum, then floored at `max_db − top_db` when given.
pub fn power_to_db_with(s: &Spectrogram, amin: f64, top_db: Option<f64>) -> Spectrogram {
    let reference = s.max().max(amin);
    let ref_db = 10.0 * reference.log10();
    let mut values: Vec<f64> = s
        .values
        .iter()
        .map(|&v| 10.0 * v.max(amin).log10() - ref_db)
        .collect();
    if let Some(top_db) = top_db {
        let floor = values.iter().copied().fold(f64::NEG_INFINITY, f64::max) - top_db;
        for v in &mut values {
            *v = v.max(floor);
        }
    }
    Spectrogram::new(s.n_rows, s.n_frames, values, SpectrogramAxis::MelDecibel)
}

/// Pad on the right with the spectrogram's minimum, or truncate, to
/// exactly `target_frames` columns.
pub fn pad_to_shape(s: &Spectrogram, target_frames: usize) -> Spectrogram {
    assert!(target_frames >= 1, "target_frames must be positive");
    if s.n_frames == target_frames {
        return s.clone();
    }
    let fill = if s.values.is_empty() { 0.0 } else { s.min() };
    let keep = s.n_frames.min(target_frames);
    let mut values = Vec::with_capacity(s.n_rows * target_frames);
    for r in 0..s.n_rows {
        values.extend_from_slice(&s.row(r)[..keep]);
        values.resize((r + 1) * target_frames, fill);
    }
    Spectrogram::new(s.n_rows, target_frames, values, s.axis)
}

/// Row-major flattening into an audio feature vector.
pub fn flatten(s: &Spectrogram) -> FeatureVector {
    FeatureVector {
        values: s.values.clone(),
        provenance: Provenance::Audio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mel(rows: &[Vec<f64>]) -> Spectrogram {
        Spectrogram::from_rows(rows, SpectrogramAxis::MelPower)
    }

    #[test]
    fn db_reference_points() {
        let s = mel(&[vec![1.0, 0.01, 0.0, 1e-9]]);
        let db = power_to_db(&s);
        assert_eq!(db.axis(), SpectrogramAxis::MelDecibel);
        assert_eq!(db.get(0, 0), 0.0);
        assert!((db.get(0, 1) + 20.0).abs() < 1e-12);
        assert_eq!(db.get(0, 2), -80.0);
        assert_eq!(db.get(0, 3), -80.0);
    }

    #[test]
    fn db_is_relative_to_max() {
        let s = mel(&[vec![4.0, 0.4], vec![0.04, 4.0]]);
        let db = power_to_db(&s);
        assert_eq!(db.get(0, 0), 0.0);
        assert!((db.get(0, 1) + 10.0).abs() < 1e-12);
        assert!((db.get(1, 0) + 20.0).abs() < 1e-12);
    }

    #[test]
    fn all_zero_input_is_all_zero_db() {
        let db = power_to_db(&mel(&[vec![0.0, 0.0]]));
        assert_eq!(db.values(), &[0.0, 0.0]);
    }

    #[test]
    fn padding_fills_with_minimum() {
        let rows: Vec<Vec<f64>> = (0..80)
            .map(|r| (0..50).map(|t| -((r + t) as f64)).collect())
            .collect();
        let s = Spectrogram::from_rows(&rows, SpectrogramAxis::MelDecibel);
        let min = s.min();
        let p = pad_to_shape(&s, 120);
        assert_eq!((p.n_rows(), p.n_frames()), (80, 120));
        for r in 0..80 {
            assert_eq!(&p.row(r)[..50], s.row(r));
            assert!(p.row(r)[50..].iter().all(|&v| v == min));
        }
    }

    #[test]
    fn padding_identity_and_truncation() {
        let rows: Vec<Vec<f64>> = (0..80).map(|r| (0..130).map(|t| (r * t) as f64).collect()).collect();
        let s = Spectrogram::from_rows(&rows, SpectrogramAxis::MelDecibel);
        let same = pad_to_shape(&s, 130);
        assert_eq!(same, s);
        let cut = pad_to_shape(&s, 120);
        assert_eq!(cut.n_frames(), 120);
        for r in 0..80 {
            assert_eq!(cut.row(r), &s.row(r)[..120]);
        }
    }

    #[test]
    fn flatten_is_row_major() {
        let v = flatten(&mel(&[vec![1.0, 2.0], vec![3.0, 4.0]]));
        assert_eq!(v.values, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(v.provenance, Provenance::Audio);
        assert_eq!(flatten(&mel(&[vec![7.0]])).values, vec![7.0]);
        let big = Spectrogram::new(80, 120, vec![0.0; 9600], SpectrogramAxis::MelDecibel);
        assert_eq!(flatten(&big).values.len(), 9600);
    }
}
