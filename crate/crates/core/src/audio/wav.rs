//! Minimal RIFF/WAVE reader and writer for PCM16 and IEEE float32.

use std::path::Path;

use super::AudioError;

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xfffe;

/// Mono audio. Samples lie in [-1, 1] for PCM16 input; float input is
/// passed through unclamped.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub sample_rate_hz: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Self {
        Self {
            samples,
            sample_rate_hz,
        }
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate_hz)
    }
}

struct Format {
    tag: u16,
    channels: u16,
    sample_rate: u32,
    bits: u16,
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_fmt(body: &[u8]) -> Result<Format, AudioError> {
    if body.len() < 16 {
        return Err(AudioError::CorruptHeader(format!(
            "fmt chunk of {} bytes",
            body.len()
        )));
    }
    let mut tag = u16_at(body, 0);
    if tag == FORMAT_EXTENSIBLE {
        if body.len() < 26 {
            return Err(AudioError::CorruptHeader("truncated extensible fmt chunk".into()));
        }
        // first two bytes of the sub-format GUID carry the real tag
        tag = u16_at(body, 24);
    }
    Ok(Format {
        tag,
        channels: u16_at(body, 2),
        sample_rate: u32_at(body, 4),
        bits: u16_at(body, 14),
    })
}

/// Decode an in-memory WAV file, downmixing to mono by channel mean.
pub fn decode_wav_bytes(bytes: &[u8]) -> Result<Waveform, AudioError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(AudioError::CorruptHeader("missing RIFF/WAVE signature".into()));
    }
    let mut format = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let declared = u32_at(bytes, pos + 4) as usize;
        let start = pos + 8;
        // streaming writers leave the size unset; clamp to what is present
        let end = start.saturating_add(declared).min(bytes.len());
        let body = &bytes[start..end];
        match id {
            b"fmt " => format = Some(parse_fmt(body)?),
            b"data" => {
                data = Some(body);
                break;
            }
            _ => {}
        }
        // chunks are word aligned
        pos = start.saturating_add(declared).saturating_add(declared & 1);
    }
    let format = format.ok_or_else(|| AudioError::CorruptHeader("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| AudioError::CorruptHeader("no data chunk".into()))?;
    if format.channels == 0 {
        return Err(AudioError::CorruptHeader("zero channels".into()));
    }
    if format.sample_rate == 0 {
        return Err(AudioError::CorruptHeader("zero sample rate".into()));
    }
    let bytes_per_sample = match (format.tag, format.bits) {
        (FORMAT_PCM, 16) => 2,
        (FORMAT_IEEE_FLOAT, 32) => 4,
        (tag, bits) => {
            return Err(AudioError::UnsupportedEncoding(format!(
                "format tag {tag} with {bits} bits per sample"
            )))
        }
    };
    let channels = usize::from(format.channels);
    let frame_bytes = bytes_per_sample * channels;
    let n_frames = data.len() / frame_bytes;
    if n_frames == 0 {
        return Err(AudioError::EmptyAudio);
    }
    let decode = |chunk: &[u8]| -> f64 {
        if bytes_per_sample == 2 {
            f64::from(i16::from_le_bytes([chunk[0], chunk[1]])) / 32768.0
        } else {
            f64::from(f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]))
        }
    };
    let samples = data
        .chunks_exact(frame_bytes)
        .map(|frame| {
            let sum: f64 = frame.chunks_exact(bytes_per_sample).map(decode).sum();
            sum / channels as f64
        })
        .collect();
    Ok(Waveform::new(samples, format.sample_rate))
}

pub fn decode_wav(path: &Path) -> Result<Waveform, AudioError> {
    let bytes = std::fs::read(path).map_err(|e| AudioError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    decode_wav_bytes(&bytes)
}

fn header(tag: u16, channels: u16, sample_rate: u32, bits: u16, data_len: u32) -> Vec<u8> {
    let block_align = channels * bits / 8;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&tag.to_le_bytes());
    out.extend_from_slice(&channels.to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * u32::from(block_align)).to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    out
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), AudioError> {
    std::fs::write(path, bytes).map_err(|e| AudioError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Write interleaved samples as 16-bit PCM. Values are clamped to [-1, 1).
pub fn write_wav_pcm16(
    path: &Path,
    interleaved: &[f64],
    channels: u16,
    sample_rate: u32,
) -> Result<(), AudioError> {
    let data_len = (interleaved.len() * 2) as u32;
    let mut out = header(FORMAT_PCM, channels, sample_rate, 16, data_len);
    for &s in interleaved {
        let q = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    write_bytes(path, &out)
}

pub fn write_wav_f32(
    path: &Path,
    interleaved: &[f64],
    channels: u16,
    sample_rate: u32,
) -> Result<(), AudioError> {
    let data_len = (interleaved.len() * 4) as u32;
    let mut out = header(FORMAT_IEEE_FLOAT, channels, sample_rate, 32, data_len);
    for &s in interleaved {
        out.extend_from_slice(&(s as f32).to_le_bytes());
    }
    write_bytes(path, &out)
}
