//! Synthetic corpora shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use bos_core::audio::write_wav_pcm16;
use bos_core::corpus::{write_manifest, BinaryLabel, Gender, Utterance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SAMPLE_RATE: u32 = 16_000;

pub struct Synth<'a> {
    /// Class codes. `H`/`N` alone give a binary-only corpus; anything else
    /// is treated as multiclass with `N` mapping to binary `N`.
    pub classes: &'a [&'a str],
    pub per_class: usize,
    pub with_text: bool,
    pub audio_secs: Option<f64>,
    pub words_per_doc: usize,
    pub seed: u64,
}

impl Default for Synth<'_> {
    fn default() -> Self {
        Self {
            classes: &["H", "N"],
            per_class: 20,
            with_text: true,
            audio_secs: None,
            words_per_doc: 8,
            seed: 1,
        }
    }
}

/// Class `k` owns the 20-term vocabulary `k{k}w0 .. k{k}w19`.
pub fn class_vocabulary(k: usize) -> Vec<String> {
    (0..20).map(|j| format!("k{k}w{j}")).collect()
}

/// A tone drawn from class `k`'s band `[400 + 900k, 700 + 900k]` Hz plus
/// uniform noise.
pub fn class_tone(k: usize, secs: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let lo = 400.0 + 900.0 * k as f64;
    let freq = rng.gen_range(lo..lo + 300.0);
    let phase = rng.gen_range(0.0..2.0 * PI);
    let n = (secs * f64::from(SAMPLE_RATE)) as usize;
    (0..n)
        .map(|i| {
            let t = i as f64 / f64::from(SAMPLE_RATE);
            0.5 * (2.0 * PI * freq * t + phase).sin() + rng.gen_range(-0.05..0.05)
        })
        .collect()
}

/// Write a manifest (and WAV files under `dir/audio/`) and return its path.
pub fn write_corpus(dir: &Path, name: &str, s: &Synth) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let binary_only = s.classes.iter().all(|c| *c == "H" || *c == "N");
    let mut utts = Vec::new();
    for i in 0..s.per_class {
        for (k, code) in s.classes.iter().enumerate() {
            let id = format!("{name}_{code}{i:03}");
            let text = s.with_text.then(|| {
                let vocab = class_vocabulary(k);
                (0..s.words_per_doc)
                    .map(|_| vocab[rng.gen_range(0..vocab.len())].as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            });
            let audio_path = s.audio_secs.map(|secs| {
                let rel = PathBuf::from("audio").join(format!("{id}.wav"));
                let abs = dir.join(&rel);
                std::fs::create_dir_all(abs.parent().unwrap()).unwrap();
                write_wav_pcm16(&abs, &class_tone(k, secs, &mut rng), 1, SAMPLE_RATE).unwrap();
                rel
            });
            let binary = if *code == "N" { BinaryLabel::N } else { BinaryLabel::H };
            utts.push(Utterance {
                id,
                subject_id: format!("s{}", i % 4),
                gender: if i % 2 == 0 { Gender::F } else { Gender::M },
                source: "synthetic".into(),
                utterance_no: i as u32,
                text,
                audio_path,
                binary_label: Some(binary),
                multiclass_label: (!binary_only).then(|| code.to_string()),
            });
        }
    }
    let path = dir.join(format!("{name}.csv"));
    write_manifest(&path, &utts).unwrap();
    path
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bos() -> std::process::Command {
    std::process::Command::new(env!("CARGO_BIN_EXE_bos"))
}
