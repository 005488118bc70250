//! On-disk feature cache: magic `BOS1`, `u32` rows, `u32` cols, then
//! row-major little-endian `f64` values.

use std::path::Path;

use super::AudioError;

pub const CACHE_MAGIC: &[u8; 4] = b"BOS1";

pub fn write_feature_cache(
    path: &Path,
    rows: usize,
    cols: usize,
    values: &[f64],
) -> Result<(), AudioError> {
    if values.len() != rows * cols {
        return Err(AudioError::ShapeMismatch {
            expected: rows * cols,
            found: values.len(),
        });
    }
    let too_big = |n: usize| u32::try_from(n).map_err(|_| AudioError::Cache(format!("dimension {n} exceeds u32")));
    let mut out = Vec::with_capacity(12 + values.len() * 8);
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&too_big(rows)?.to_le_bytes());
    out.extend_from_slice(&too_big(cols)?.to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, out).map_err(|e| AudioError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Returns `(rows, cols, values)`.
pub fn read_feature_cache(path: &Path) -> Result<(usize, usize, Vec<f64>), AudioError> {
    let bytes = std::fs::read(path).map_err(|e| AudioError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if bytes.len() < 12 || &bytes[..4] != CACHE_MAGIC {
        return Err(AudioError::Cache(format!("{} is not a BOS1 file", path.display())));
    }
    let rows = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let cols = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let body = &bytes[12..];
    if body.len() != rows * cols * 8 {
        return Err(AudioError::Cache(format!(
            "{}: expected {} payload bytes, found {}",
            path.display(),
            rows * cols * 8,
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((rows, cols, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u1.bos");
        write_feature_cache(&path, 2, 1, &[1.5, -0.25]).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"BOS1");
        assert_eq!(&bytes[4..8], &2u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &1u32.to_le_bytes());
        assert_eq!(&bytes[12..20], &1.5f64.to_le_bytes());
        assert_eq!(bytes.len(), 28);
        assert_eq!(read_feature_cache(&path).unwrap(), (2, 1, vec![1.5, -0.25]));
    }

    #[test]
    fn rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bos");
        std::fs::write(&path, b"BOS1\x02\x00\x00\x00\x02\x00\x00\x00short").unwrap();
        assert!(matches!(read_feature_cache(&path), Err(AudioError::Cache(_))));
        std::fs::write(&path, b"RIFF").unwrap();
        assert!(matches!(read_feature_cache(&path), Err(AudioError::Cache(_))));
        assert!(write_feature_cache(&path, 2, 2, &[0.0]).is_err());
    }
}
