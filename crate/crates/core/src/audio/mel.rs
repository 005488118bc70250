use super::spectrogram::{Spectrogram, SpectrogramAxis};
use super::AudioError;

/// HTK Mel scale: `2595 · log10(1 + f / 700)`.
pub fn hz_to_mel(f: f64) -> Result<f64, AudioError> {
    if f < 0.0 || f.is_nan() {
        return Err(AudioError::NegativeFrequency(f));
    }
    Ok(2595.0 * (f / 700.0).ln_1p() / std::f64::consts::LN_10)
}

pub fn mel_to_hz(m: f64) -> Result<f64, AudioError> {
    if m < 0.0 || m.is_nan() {
        return Err(AudioError::NegativeFrequency(m));
    }
    Ok(700.0 * (m * std::f64::consts::LN_10 / 2595.0).exp_m1())
}

/// Triangular filters over the one-sided FFT bins, `n_mels × n_bins`.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    n_mels: usize,
    n_bins: usize,
    fmin_hz: f64,
    fmax_hz: f64,
    weights: Vec<f64>,
}

impl MelFilterbank {
    /// Wrap an arbitrary nonnegative weight matrix given as rows.
    pub fn from_weights(rows: &[Vec<f64>]) -> Result<Self, AudioError> {
        let n_bins = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || n_bins == 0 {
            return Err(AudioError::InvalidConfig("empty filterbank".into()));
        }
        if rows.iter().any(|r| r.len() != n_bins) {
            return Err(AudioError::InvalidConfig("ragged filterbank rows".into()));
        }
        if rows.iter().flatten().any(|&w| !(w >= 0.0)) {
            return Err(AudioError::InvalidConfig("negative filter weight".into()));
        }
        Ok(Self {
            n_mels: rows.len(),
            n_bins,
            fmin_hz: f64::NAN,
            fmax_hz: f64::NAN,
            weights: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn n_mels(&self) -> usize {
        self.n_mels
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    /// Frequency range; NaN for filterbanks built from raw weights.
    pub fn range_hz(&self) -> (f64, f64) {
        (self.fmin_hz, self.fmax_hz)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n_bins..(i + 1) * self.n_bins]
    }

    pub fn column_sum(&self, bin: usize) -> f64 {
        (0..self.n_mels).map(|i| self.row(i)[bin]).sum()
    }
}

/// Build `n_mels` triangles whose `n_mels + 2` breakpoints are equally
/// spaced in Mel between `fmin_hz` and `fmax_hz`. Filters peak at 1.
pub fn build_mel_filterbank(
    sr_hz: u32,
    frame_length: usize,
    n_mels: usize,
    fmin_hz: f64,
    fmax_hz: f64,
) -> Result<MelFilterbank, AudioError> {
    if n_mels == 0 {
        return Err(AudioError::InvalidConfig("n_mels must be positive".into()));
    }
    if frame_length < 2 {
        return Err(AudioError::InvalidConfig("frame_length must be at least 2".into()));
    }
    let mel_lo = hz_to_mel(fmin_hz)?;
    if !(fmin_hz < fmax_hz) {
        return Err(AudioError::InvalidRange {
            fmin: fmin_hz,
            fmax: fmax_hz,
        });
    }
    let nyquist = f64::from(sr_hz) / 2.0;
    if fmax_hz > nyquist {
        return Err(AudioError::NyquistExceeded {
            fmax: fmax_hz,
            nyquist,
        });
    }
    let mel_hi = hz_to_mel(fmax_hz)?;
    let step = (mel_hi - mel_lo) / (n_mels + 1) as f64;
    let mut breakpoints = Vec::with_capacity(n_mels + 2);
    for i in 0..n_mels + 2 {
        let m = if i == n_mels + 1 { mel_hi } else { mel_lo + step * i as f64 };
        breakpoints.push(mel_to_hz(m)?);
    }
    // pin the ends so rounding cannot leak weight outside [fmin, fmax]
    breakpoints[0] = fmin_hz;
    breakpoints[n_mels + 1] = fmax_hz;

    let n_bins = frame_length / 2 + 1;
    let bin_hz = f64::from(sr_hz) / frame_length as f64;
    let mut weights = vec![0.0; n_mels * n_bins];
    for i in 0..n_mels {
        let (lo, center, hi) = (breakpoints[i], breakpoints[i + 1], breakpoints[i + 2]);
        for k in 0..n_bins {
            let f = k as f64 * bin_hz;
            let w = if f <= lo || f >= hi {
                0.0
            } else if f <= center {
                (f - lo) / (center - lo)
            } else {
                (hi - f) / (hi - center)
            };
            weights[i * n_bins + k] = w;
        }
    }
    Ok(MelFilterbank {
        n_mels,
        n_bins,
        fmin_hz,
        fmax_hz,
        weights,
    })
}

/// Project a linear power spectrogram through the filterbank.
pub fn mel_spectrogram(s: &Spectrogram, fb: &MelFilterbank) -> Result<Spectrogram, AudioError> {
    if s.n_rows() != fb.n_bins {
        return Err(AudioError::ShapeMismatch {
            expected: fb.n_bins,
            found: s.n_rows(),
        });
    }
    let n_frames = s.n_frames();
    let mut out = vec![0.0; fb.n_mels * n_frames];
    for m in 0..fb.n_mels {
        let dst = &mut out[m * n_frames..(m + 1) * n_frames];
        for (k, &w) in fb.row(m).iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (d, &p) in dst.iter_mut().zip(s.row(k)) {
                *d += w * p;
            }
        }
    }
    Ok(Spectrogram::new(
        fb.n_mels,
        n_frames,
        out,
        SpectrogramAxis::MelPower,
    ))
}
