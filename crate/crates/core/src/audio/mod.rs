//! Speech path: PCM audio to flattened, normalized Mel-spectrogram features.
//!
//! The stages are exposed individually (`decode_wav`, `stft`,
//! `mel_spectrogram`, `power_to_db`, `pad_to_shape`, `flatten`,
//! `min_max_normalize`) and chained by [`AudioExtractor`] and
//! [`SpeechFeaturizer`].

use std::path::PathBuf;

use thiserror::Error;

mod cache;
mod mel;
mod normalize;
mod pipeline;
mod spectrogram;
mod stft;
mod wav;

pub use cache::{read_feature_cache, write_feature_cache, CACHE_MAGIC};
pub use mel::{build_mel_filterbank, hz_to_mel, mel_spectrogram, mel_to_hz, MelFilterbank};
pub use normalize::{min_max_normalize, MinMaxScaler};
pub use pipeline::{extract_all, resample_linear, AudioConfig, AudioExtractor, SpeechFeaturizer};
pub use spectrogram::{
    flatten, pad_to_shape, power_to_db, power_to_db_with, FeatureVector, Spectrogram,
    SpectrogramAxis, AMIN, TOP_DB,
};
pub use stft::{stft, Stft, StftConfig, WindowKind};
pub use wav::{decode_wav, decode_wav_bytes, write_wav_f32, write_wav_pcm16, Waveform};

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("unsupported encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("audio contains no samples")]
    EmptyAudio,
    #[error("signal of {len} samples is shorter than the {frame_length}-sample frame")]
    SignalTooShort { len: usize, frame_length: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("negative frequency {0}")]
    NegativeFrequency(f64),
    #[error("invalid frequency range: fmin {fmin} Hz >= fmax {fmax} Hz")]
    InvalidRange { fmin: f64, fmax: f64 },
    #[error("fmax {fmax} Hz exceeds the Nyquist frequency {nyquist} Hz")]
    NyquistExceeded { fmax: f64, nyquist: f64 },
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("cannot normalize an empty matrix")]
    EmptyMatrix,
    #[error("feature cache: {0}")]
    Cache(String),
}
