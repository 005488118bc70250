use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cache::{read_feature_cache, write_feature_cache};
use super::mel::{build_mel_filterbank, mel_spectrogram, MelFilterbank};
use super::normalize::MinMaxScaler;
use super::spectrogram::{flatten, pad_to_shape, power_to_db_with, Spectrogram, SpectrogramAxis};
use super::stft::{Stft, StftConfig};
use super::wav::{decode_wav, Waveform};
use super::{AudioError, AMIN, TOP_DB};
use crate::matrix::{FeatureMatrix, Provenance};
use crate::seed::fnv1a;

/// Every knob of the speech path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AudioConfig {
    /// Waveforms are linearly resampled to this rate before analysis.
    pub sample_rate_hz: u32,
    #[serde(flatten)]
    pub stft: StftConfig,
    pub n_mels: usize,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
    pub amin: f64,
    pub top_db: f64,
}

impl Default for AudioConfig {
    fn default() -> Self {
        Self {
            sample_rate_hz: 16_000,
            stft: StftConfig::default(),
            n_mels: 80,
            fmin_hz: 0.0,
            fmax_hz: 8_000.0,
            amin: AMIN,
            top_db: TOP_DB,
        }
    }
}

impl AudioConfig {
    /// Stable identifier of the configuration, used to key feature caches.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", fnv1a(json.as_bytes()))
    }
}

/// Linear-interpolation resampling.
pub fn resample_linear(w: &Waveform, target_hz: u32) -> Waveform {
    if w.sample_rate_hz == target_hz || w.samples.is_empty() {
        return Waveform::new(w.samples.clone(), target_hz);
    }
    let ratio = f64::from(w.sample_rate_hz) / f64::from(target_hz);
    let last = (w.samples.len() - 1) as f64;
    let n_out = (last / ratio).floor() as usize + 1;
    let samples = (0..n_out)
        .map(|k| {
            let pos = k as f64 * ratio;
            let i = pos.floor() as usize;
            let frac = pos - i as f64;
            match w.samples.get(i + 1) {
                Some(&next) => w.samples[i] * (1.0 - frac) + next * frac,
                None => w.samples[i],
            }
        })
        .collect();
    Waveform::new(samples, target_hz)
}

/// Waveform to dB-scaled Mel spectrogram (unpadded).
#[derive(Debug, Clone)]
pub struct AudioExtractor {
    config: AudioConfig,
    stft: Stft,
    filterbank: MelFilterbank,
}

impl AudioExtractor {
    pub fn new(config: AudioConfig) -> Result<Self, AudioError> {
        if config.sample_rate_hz == 0 {
            return Err(AudioError::InvalidConfig("sample rate must be positive".into()));
        }
        if !(config.top_db >= 0.0 && config.amin > 0.0) {
            return Err(AudioError::InvalidConfig("amin must be > 0 and top_db >= 0".into()));
        }
        let stft = Stft::new(config.stft)?;
        let filterbank = build_mel_filterbank(
            config.sample_rate_hz,
            config.stft.frame_length,
            config.n_mels,
            config.fmin_hz,
            config.fmax_hz,
        )?;
        Ok(Self {
            config,
            stft,
            filterbank,
        })
    }

    pub fn config(&self) -> &AudioConfig {
        &self.config
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    /// Clips shorter than one frame are zero-padded to a single frame.
    pub fn extract(&self, w: &Waveform) -> Result<Spectrogram, AudioError> {
        if w.samples.is_empty() {
            return Err(AudioError::EmptyAudio);
        }
        let mut w = resample_linear(w, self.config.sample_rate_hz);
        if w.samples.len() < self.config.stft.frame_length {
            w.samples.resize(self.config.stft.frame_length, 0.0);
        }
        let power = self.stft.power(&w.samples)?;
        let mel = mel_spectrogram(&power, &self.filterbank)?;
        Ok(power_to_db_with(&mel, self.config.amin, Some(self.config.top_db)))
    }

    pub fn extract_file(&self, path: &Path) -> Result<Spectrogram, AudioError> {
        self.extract(&decode_wav(path)?)
    }

    fn extract_cached(&self, key: &str, path: &Path, cache_dir: &Path) -> Result<Spectrogram, AudioError> {
        let name = format!("{:016x}.bos", fnv1a(format!("{key}\0{}", path.display()).as_bytes()));
        let file = cache_dir.join(self.config.fingerprint()).join(name);
        if let Ok((rows, cols, values)) = read_feature_cache(&file) {
            if rows == self.config.n_mels {
                return Ok(Spectrogram::new(rows, cols, values, SpectrogramAxis::MelDecibel));
            }
        }
        let spec = self.extract_file(path)?;
        if let Some(parent) = file.parent() {
            std::fs::create_dir_all(parent).map_err(|e| AudioError::Io {
                path: parent.to_path_buf(),
                message: e.to_string(),
            })?;
        }
        write_feature_cache(&file, spec.n_rows(), spec.n_frames(), spec.values())?;
        Ok(spec)
    }
}

/// Extract every `(key, path)` in parallel. Output order matches input
/// order regardless of scheduling. With a cache directory, results are
/// read from / written to `BOS1` files keyed on the config fingerprint.
pub fn extract_all(
    extractor: &AudioExtractor,
    items: &[(String, PathBuf)],
    cache_dir: Option<&Path>,
) -> Vec<Result<Spectrogram, AudioError>> {
    items
        .par_iter()
        .map(|(key, path)| match cache_dir {
            Some(dir) => extractor.extract_cached(key, path, dir),
            None => extractor.extract_file(path),
        })
        .collect()
}

/// Fitted speech featurizer: pad length from the training split plus an
/// optional per-column min-max scaler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeechFeaturizer {
    pub config: AudioConfig,
    pub pad_frames: usize,
    pub scaler: Option<MinMaxScaler>,
}

impl SpeechFeaturizer {
    pub fn fit(
        config: AudioConfig,
        train: &[Spectrogram],
        normalize: bool,
    ) -> Result<(Self, FeatureMatrix), AudioError> {
        let pad_frames = train
            .iter()
            .map(Spectrogram::n_frames)
            .max()
            .ok_or(AudioError::EmptyMatrix)?;
        let mut featurizer = Self {
            config,
            pad_frames,
            scaler: None,
        };
        let raw = featurizer.stack(train)?;
        if normalize {
            let scaler = MinMaxScaler::fit(&raw)?;
            let scaled = scaler.transform(&raw)?;
            featurizer.scaler = Some(scaler);
            return Ok((featurizer, scaled));
        }
        Ok((featurizer, raw))
    }

    pub fn n_features(&self) -> usize {
        self.config.n_mels * self.pad_frames
    }

    fn stack(&self, specs: &[Spectrogram]) -> Result<FeatureMatrix, AudioError> {
        let n_cols = self.n_features();
        let mut data = Vec::with_capacity(specs.len() * n_cols);
        for s in specs {
            if s.n_rows() != self.config.n_mels {
                return Err(AudioError::ShapeMismatch {
                    expected: self.config.n_mels,
                    found: s.n_rows(),
                });
            }
            data.extend(flatten(&pad_to_shape(s, self.pad_frames)).values);
        }
        Ok(FeatureMatrix::from_flat(specs.len(), n_cols, data, Provenance::Audio))
    }

    pub fn transform(&self, specs: &[Spectrogram]) -> Result<FeatureMatrix, AudioError> {
        let raw = self.stack(specs)?;
        match &self.scaler {
            Some(scaler) => scaler.transform(&raw),
            None => Ok(raw),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(freq: f64, secs: f64, sr: u32) -> Waveform {
        let n = (secs * f64::from(sr)) as usize;
        Waveform::new(
            (0..n)
                .map(|t| 0.5 * (2.0 * PI * freq * t as f64 / f64::from(sr)).sin())
                .collect(),
            sr,
        )
    }

    #[test]
    fn resampling_preserves_endpoints_and_interpolates() {
        let w = Waveform::new(vec![0.0, 1.0, 2.0, 3.0], 4);
        let up = resample_linear(&w, 8);
        assert_eq!(up.samples, vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
        let down = resample_linear(&w, 2);
        assert_eq!(down.samples, vec![0.0, 2.0]);
    }

    #[test]
    fn extracted_spectrogram_peaks_near_tone() {
        let ex = AudioExtractor::new(AudioConfig::default()).unwrap();
        let s = ex.extract(&tone(1000.0, 0.5, 16000)).unwrap();
        assert_eq!(s.n_rows(), 80);
        assert_eq!(s.axis(), SpectrogramAxis::MelDecibel);
        let t = s.n_frames() / 2;
        let peak = (0..80)
            .max_by(|&a, &b| s.get(a, t).partial_cmp(&s.get(b, t)).unwrap())
            .unwrap();
        let fb = ex.filterbank();
        let bin = (1000.0_f64 / (16000.0 / 512.0)).round() as usize;
        assert!(fb.row(peak)[bin] > 0.0, "peak band {peak} does not cover 1 kHz");
        assert_eq!(s.max(), 0.0);
        assert!(s.min() >= -80.0);
    }

    #[test]
    fn short_and_resampled_clips() {
        let ex = AudioExtractor::new(AudioConfig::default()).unwrap();
        let s = ex.extract(&Waveform::new(vec![0.1; 100], 16000)).unwrap();
        assert_eq!(s.n_frames(), 1);
        let s = ex.extract(&tone(440.0, 1.0, 8000)).unwrap();
        assert_eq!(s.n_frames(), AudioConfig::default().stft.n_frames(15999));
        assert!(matches!(
            ex.extract(&Waveform::new(vec![], 16000)),
            Err(AudioError::EmptyAudio)
        ));
    }

    #[test]
    fn featurizer_pads_to_training_max_and_normalizes() {
        let rows = |frames: usize, v: f64| Spectrogram::new(2, frames, vec![v; 2 * frames], SpectrogramAxis::MelDecibel);
        let cfg = AudioConfig {
            n_mels: 2,
            ..AudioConfig::default()
        };
        let train = vec![rows(3, -10.0), rows(5, -50.0)];
        let (fz, x) = SpeechFeaturizer::fit(cfg, &train, true).unwrap();
        assert_eq!(fz.pad_frames, 5);
        assert_eq!((x.n_rows(), x.n_cols()), (2, 10));
        assert!(x.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)));
        let longer = fz.transform(&[rows(9, -30.0)]).unwrap();
        assert_eq!(longer.n_cols(), 10);
        assert!(matches!(
            SpeechFeaturizer::fit(cfg, &[], true),
            Err(AudioError::EmptyMatrix)
        ));
    }

    #[test]
    fn parallel_extraction_is_ordered_and_cached() {
        let dir = tempfile::tempdir().unwrap();
        let mut items = Vec::new();
        for (i, f) in [300.0, 1200.0, 3000.0].iter().enumerate() {
            let p = dir.path().join(format!("{i}.wav"));
            super::super::write_wav_pcm16(&p, &tone(*f, 0.2, 16000).samples, 1, 16000).unwrap();
            items.push((format!("u{i}"), p));
        }
        let ex = AudioExtractor::new(AudioConfig::default()).unwrap();
        let direct: Vec<_> = extract_all(&ex, &items, None).into_iter().map(Result::unwrap).collect();
        let cache = dir.path().join("cache");
        let first: Vec<_> = extract_all(&ex, &items, Some(&cache)).into_iter().map(Result::unwrap).collect();
        let second: Vec<_> = extract_all(&ex, &items, Some(&cache)).into_iter().map(Result::unwrap).collect();
        assert_eq!(direct, first);
        assert_eq!(first, second);
        assert_eq!(
            std::fs::read_dir(cache.join(ex.config().fingerprint())).unwrap().count(),
            3
        );
    }
}
