use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::spectrogram::{Spectrogram, SpectrogramAxis};
use super::wav::Waveform;
use super::AudioError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    /// Periodic Hann, `0.5 - 0.5 cos(2πn/N)`.
    Hann,
    Rectangular,
}

impl WindowKind {
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            WindowKind::Rectangular => vec![1.0; len],
            WindowKind::Hann => (0..len)
                .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StftConfig {
    pub frame_length: usize,
    pub hop_length: usize,
    pub window: WindowKind,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self {
            frame_length: 512,
            hop_length: 256,
            window: WindowKind::Hann,
        }
    }
}

impl StftConfig {
    pub fn validate(&self) -> Result<(), AudioError> {
        if self.frame_length < 2 || !self.frame_length.is_power_of_two() {
            return Err(AudioError::InvalidConfig(format!(
                "frame_length {} is not a power of two >= 2",
                self.frame_length
            )));
        }
        if self.hop_length == 0 || self.hop_length > self.frame_length {
            return Err(AudioError::InvalidConfig(format!(
                "hop_length {} must be in 1..={}",
                self.hop_length, self.frame_length
            )));
        }
        Ok(())
    }

    /// Number of one-sided frequency bins, `frame_length / 2 + 1`.
    pub fn n_bins(&self) -> usize {
        self.frame_length / 2 + 1
    }

    pub fn n_frames(&self, n_samples: usize) -> usize {
        if n_samples < self.frame_length {
            0
        } else {
            1 + (n_samples - self.frame_length) / self.hop_length
        }
    }
}

/// A planned short-time Fourier transform. Cheap to share across threads.
#[derive(Clone)]
pub struct Stft {
    cfg: StftConfig,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Stft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stft").field("cfg", &self.cfg).finish()
    }
}

impl Stft {
    pub fn new(cfg: StftConfig) -> Result<Self, AudioError> {
        cfg.validate()?;
        let fft = FftPlanner::new().plan_fft_forward(cfg.frame_length);
        Ok(Self {
            cfg,
            window: cfg.window.coefficients(cfg.frame_length),
            fft,
        })
    }

    pub fn config(&self) -> &StftConfig {
        &self.cfg
    }

    /// One-sided power spectrum of a single frame.
    pub fn frame_power(&self, frame: &[f64]) -> Vec<f64> {
        assert_eq!(frame.len(), self.cfg.frame_length);
        let mut buf: Vec<Complex<f64>> = frame
            .iter()
            .zip(&self.window)
            .map(|(&x, &w)| Complex::new(x * w, 0.0))
            .collect();
        self.fft.process(&mut buf);
        buf[..self.cfg.n_bins()].iter().map(|c| c.norm_sqr()).collect()
    }

    /// Power spectrogram of `samples`, `n_bins × n_frames`.
    pub fn power(&self, samples: &[f64]) -> Result<Spectrogram, AudioError> {
        let n_frames = self.cfg.n_frames(samples.len());
        if n_frames == 0 {
            return Err(AudioError::SignalTooShort {
                len: samples.len(),
                frame_length: self.cfg.frame_length,
            });
        }
        let n_bins = self.cfg.n_bins();
        let mut values = vec![0.0; n_bins * n_frames];
        for t in 0..n_frames {
            let start = t * self.cfg.hop_length;
            let power = self.frame_power(&samples[start..start + self.cfg.frame_length]);
            for (r, p) in power.into_iter().enumerate() {
                values[r * n_frames + t] = p;
            }
        }
        Ok(Spectrogram::new(
            n_bins,
            n_frames,
            values,
            SpectrogramAxis::LinearPower,
        ))
    }
}

pub fn stft(w: &Waveform, cfg: &StftConfig) -> Result<Spectrogram, AudioError> {
    Stft::new(*cfg)?.power(&w.samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_power(frame: &[f64], window: &[f64]) -> Vec<f64> {
        let n = frame.len();
        (0..=n / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (t, (&x, &w)) in frame.iter().zip(window).enumerate() {
                    let angle = -2.0 * PI * (k * t) as f64 / n as f64;
                    re += x * w * angle.cos();
                    im += x * w * angle.sin();
                }
                re * re + im * im
            })
            .collect()
    }

    fn rect(n: usize) -> StftConfig {
        StftConfig {
            frame_length: n,
            hop_length: n,
            window: WindowKind::Rectangular,
        }
    }

    #[test]
    fn zero_signal_gives_zero_spectrogram() {
        let s = stft(&Waveform::new(vec![0.0; 1024], 16000), &StftConfig::default()).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.0));
        assert_eq!(s.n_frames(), 3);
        assert_eq!(s.n_rows(), 257);
    }

    #[test]
    fn constant_signal_rectangular_window() {
        let s = stft(&Waveform::new(vec![1.0; 8], 8), &rect(4)).unwrap();
        assert_eq!(s.n_frames(), 2);
        for t in 0..2 {
            assert!((s.get(0, t) - 16.0).abs() < 1e-12);
            assert!(s.get(1, t).abs() < 1e-12);
            assert!(s.get(2, t).abs() < 1e-12);
        }
    }

    #[test]
    fn bin_centered_sine_concentrates_energy() {
        let n = 64;
        for k in 1..n / 2 {
            let x: Vec<f64> = (0..n)
                .map(|t| (2.0 * PI * (k * t) as f64 / n as f64).sin())
                .collect();
            let power = Stft::new(rect(n)).unwrap().frame_power(&x);
            let total: f64 = power.iter().sum();
            assert!(power[k] / total >= 0.99, "bin {k}");
        }
    }

    #[test]
    fn matches_naive_dft_with_hann_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &n in &[8usize, 16, 32, 64] {
            let cfg = StftConfig {
                frame_length: n,
                hop_length: n / 2,
                window: WindowKind::Hann,
            };
            let plan = Stft::new(cfg).unwrap();
            let window = WindowKind::Hann.coefficients(n);
            let frame: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let fast = plan.frame_power(&frame);
            let slow = naive_power(&frame, &window);
            let scale = slow.iter().cloned().fold(0.0, f64::max);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn frame_count_and_short_signal() {
        let cfg = StftConfig::default();
        assert_eq!(cfg.n_frames(16000), 1 + (16000 - 512) / 256);
        assert!(matches!(
            stft(&Waveform::new(vec![0.0; 100], 16000), &cfg),
            Err(AudioError::SignalTooShort { len: 100, .. })
        ));
    }

    #[test]
    fn config_validation() {
        for (frame_length, hop_length) in [(500, 100), (512, 0), (512, 513), (1, 1)] {
            let cfg = StftConfig {
                frame_length,
                hop_length,
                window: WindowKind::Hann,
            };
            assert!(Stft::new(cfg).is_err());
        }
    }
}
