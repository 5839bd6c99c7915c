//! On-disk dataset format.
//!
//! Each sample tensor lives in its own file:
//!
//! ```text
//! magic "CRKD" | version u16 LE | rank u8 | dims rank x u32 LE | dtype u8 | payload
//! ```
//!
//! dtype 0 is uint8 (pixels, normalized to [0,1] on load), dtype 1 is
//! float32 LE. Labels and metadata live in a sidecar `manifest.tsv` of
//! tab-separated lines `id <TAB> relative-path <TAB> gloss tokens`, plus a
//! `vocab.txt` with one gloss token per line.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array4;

use super::{Dataset, GlossVocabulary, VideoSample};
use crate::error::{CrkdError, Result};

pub const SAMPLE_MAGIC: &[u8; 4] = b"CRKD";
pub const SAMPLE_VERSION: u16 = 1;
pub const DTYPE_U8: u8 = 0;
pub const DTYPE_F32: u8 = 1;

const MAX_RANK: u8 = 8;
const MANIFEST_FILE: &str = "manifest.tsv";
const VOCAB_FILE: &str = "vocab.txt";
const SAMPLE_DIR: &str = "samples";

/// A decoded tensor file: dims as declared, values normalized to `f32`
/// (uint8 payloads are divided by 255).
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTensor {
    pub dims: Vec<usize>,
    pub dtype: u8,
    pub values: Vec<f32>,
}

/// Decode a sample tensor file from bytes. `origin` only labels errors.
pub fn decode_sample_file(bytes: &[u8], origin: &Path) -> Result<ParsedTensor> {
    let mut cursor = 0usize;
    let take = |cursor: &mut usize, n: usize| -> Result<&[u8]> {
        if *cursor + n > bytes.len() {
            return Err(CrkdError::parse(origin, "unexpected end of header"));
        }
        let out = &bytes[*cursor..*cursor + n];
        *cursor += n;
        Ok(out)
    };

    let magic = take(&mut cursor, 4)?;
    if magic != SAMPLE_MAGIC {
        return Err(CrkdError::parse(
            origin,
            format!("bad magic bytes {magic:02x?}, expected \"CRKD\""),
        ));
    }
    let version = u16::from_le_bytes(take(&mut cursor, 2)?.try_into().unwrap());
    if version != SAMPLE_VERSION {
        return Err(CrkdError::parse(
            origin,
            format!("unsupported format version {version}"),
        ));
    }
    let rank = take(&mut cursor, 1)?[0];
    if rank == 0 || rank > MAX_RANK {
        return Err(CrkdError::parse(origin, format!("invalid rank {rank}")));
    }
    let mut dims = Vec::with_capacity(rank as usize);
    let mut element_count = 1usize;
    for _ in 0..rank {
        let d = u32::from_le_bytes(take(&mut cursor, 4)?.try_into().unwrap()) as usize;
        if d == 0 {
            return Err(CrkdError::parse(origin, "zero-sized dimension"));
        }
        element_count = element_count
            .checked_mul(d)
            .ok_or_else(|| CrkdError::parse(origin, "dimension product overflows"))?;
        dims.push(d);
    }
    let dtype = take(&mut cursor, 1)?[0];
    let elem_size = match dtype {
        DTYPE_U8 => 1usize,
        DTYPE_F32 => 4usize,
        other => {
            return Err(CrkdError::parse(origin, format!("unknown dtype tag {other}")));
        }
    };

    let expected = element_count
        .checked_mul(elem_size)
        .ok_or_else(|| CrkdError::parse(origin, "payload size overflows"))?;
    let payload = &bytes[cursor..];
    if payload.len() != expected {
        return Err(CrkdError::Truncated {
            path: origin.to_path_buf(),
            expected,
            actual: payload.len(),
        });
    }

    let values = match dtype {
        DTYPE_U8 => payload.iter().map(|&b| b as f32 / 255.0).collect(),
        DTYPE_F32 => payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect(),
        _ => unreachable!(),
    };

    Ok(ParsedTensor { dims, dtype, values })
}

/// Encode a video-frame tensor as a uint8 sample file.
pub fn encode_sample_file(frames: &Array4<f32>) -> Vec<u8> {
    let dims = frames.dim();
    let dims = [dims.0, dims.1, dims.2, dims.3];
    let mut out = Vec::with_capacity(4 + 2 + 1 + 16 + 1 + frames.len());
    out.extend_from_slice(SAMPLE_MAGIC);
    out.extend_from_slice(&SAMPLE_VERSION.to_le_bytes());
    out.push(dims.len() as u8);
    for d in dims {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    out.push(DTYPE_U8);
    // Row-major (standard layout) order.
    for &v in frames.as_standard_layout().iter() {
        out.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub relative_path: PathBuf,
    pub gloss_tokens: Vec<String>,
}

/// Parse a manifest from text. `origin` only labels errors.
pub fn parse_manifest(text: &str, origin: &Path) -> Result<Vec<ManifestEntry>> {
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (id, rel, glosses) = match (fields.next(), fields.next(), fields.next()) {
            (Some(id), Some(rel), Some(glosses)) => (id, rel, glosses),
            _ => {
                return Err(CrkdError::parse(
                    origin,
                    format!("line {}: expected 3 tab-separated fields", lineno + 1),
                ));
            }
        };
        if fields.next().is_some() {
            return Err(CrkdError::parse(
                origin,
                format!("line {}: trailing fields", lineno + 1),
            ));
        }
        if id.is_empty() || rel.is_empty() {
            return Err(CrkdError::parse(
                origin,
                format!("line {}: empty id or path", lineno + 1),
            ));
        }
        let rel_path = PathBuf::from(rel);
        if rel_path.is_absolute()
            || rel_path
                .components()
                .any(|c| matches!(c, std::path::Component::ParentDir))
        {
            return Err(CrkdError::parse(
                origin,
                format!("line {}: path must be relative without `..`", lineno + 1),
            ));
        }
        let gloss_tokens: Vec<String> = glosses.split(' ').map(str::to_owned).collect();
        if gloss_tokens.iter().any(|t| t.is_empty()) {
            return Err(CrkdError::parse(
                origin,
                format!("line {}: malformed gloss list", lineno + 1),
            ));
        }
        entries.push(ManifestEntry {
            id: id.to_owned(),
            relative_path: rel_path,
            gloss_tokens,
        });
    }
    Ok(entries)
}

/// Write a dataset split to `dir` (created if missing): sample files under
/// `samples/`, plus `manifest.tsv` and `vocab.txt`.
pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    let sample_dir = dir.join(SAMPLE_DIR);
    fs::create_dir_all(&sample_dir).map_err(|e| CrkdError::io(&sample_dir, e))?;

    let mut manifest = String::new();
    for sample in &dataset.samples {
        let rel = PathBuf::from(SAMPLE_DIR).join(format!("{}.crkd", sample.id));
        let bytes = encode_sample_file(&sample.frames);
        let path = dir.join(&rel);
        fs::write(&path, bytes).map_err(|e| CrkdError::io(&path, e))?;
        let tokens: Vec<&str> = sample
            .glosses
            .iter()
            .map(|&g| {
                dataset
                    .vocab
                    .token_of(g)
                    .expect("gloss index within vocabulary")
            })
            .collect();
        manifest.push_str(&format!(
            "{}\t{}\t{}\n",
            sample.id,
            rel.display(),
            tokens.join(" ")
        ));
    }
    let manifest_path = dir.join(MANIFEST_FILE);
    fs::write(&manifest_path, manifest).map_err(|e| CrkdError::io(&manifest_path, e))?;

    let vocab_path = dir.join(VOCAB_FILE);
    fs::write(&vocab_path, dataset.vocab.tokens().join("\n") + "\n")
        .map_err(|e| CrkdError::io(&vocab_path, e))?;
    Ok(())
}

/// Load a dataset split saved by [`save_dataset`]. The round-trip is
/// bit-exact for uint8 payloads.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let text =
        fs::read_to_string(&manifest_path).map_err(|e| CrkdError::io(&manifest_path, e))?;
    let entries = parse_manifest(&text, &manifest_path)?;

    let vocab_path = dir.join(VOCAB_FILE);
    let vocab = if vocab_path.exists() {
        let text = fs::read_to_string(&vocab_path).map_err(|e| CrkdError::io(&vocab_path, e))?;
        let tokens: Vec<String> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::to_owned)
            .collect();
        GlossVocabulary::new(tokens)?
    } else {
        // Fall back to the sorted token set observed in the manifest.
        let mut tokens: Vec<String> = entries
            .iter()
            .flat_map(|e| e.gloss_tokens.iter().cloned())
            .collect();
        tokens.sort();
        tokens.dedup();
        GlossVocabulary::new(tokens)?
    };

    let mut samples = Vec::with_capacity(entries.len());
    for entry in entries {
        let path = dir.join(&entry.relative_path);
        let bytes = fs::read(&path).map_err(|e| CrkdError::io(&path, e))?;
        let tensor = decode_sample_file(&bytes, &path)?;
        if tensor.dims.len() != 4 || tensor.dims[1] != 3 {
            return Err(CrkdError::parse(
                &path,
                format!("expected a TxCxHxW video with 3 channels, got dims {:?}", tensor.dims),
            ));
        }
        let dims = (
            tensor.dims[0],
            tensor.dims[1],
            tensor.dims[2],
            tensor.dims[3],
        );
        let frames = Array4::from_shape_vec(dims, tensor.values)
            .map_err(|e| CrkdError::parse(&path, e.to_string()))?;
        let glosses = entry
            .gloss_tokens
            .iter()
            .map(|t| {
                vocab.class_of(t).ok_or_else(|| {
                    CrkdError::parse(&manifest_path, format!("unknown gloss token `{t}`"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        samples.push(VideoSample::new(entry.id, frames, glosses)?);
    }

    Ok(Dataset { vocab, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_synthetic_dataset;

    #[test]
    fn save_load_round_trip_is_bit_exact() {
        let ds = generate_synthetic_dataset(6, 4, 5, 56, 11).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&ds, dir.path()).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.vocab, ds.vocab);
        assert_eq!(back.samples.len(), ds.samples.len());
        for (a, b) in ds.samples.iter().zip(&back.samples) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.glosses, b.glosses);
            assert_eq!(a.frames, b.frames);
        }
    }

    #[test]
    fn corrupt_magic_is_a_parse_error_naming_the_file() {
        let ds = generate_synthetic_dataset(4, 1, 4, 56, 3).unwrap();
        let mut bytes = encode_sample_file(&ds.samples[0].frames);
        bytes[0] = b'X';
        let err = decode_sample_file(&bytes, Path::new("bad.crkd")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.crkd"), "{msg}");
        assert!(msg.contains("magic"), "{msg}");
    }

    #[test]
    fn dim_payload_mismatch_is_truncation() {
        let ds = generate_synthetic_dataset(4, 1, 4, 56, 3).unwrap();
        let mut bytes = encode_sample_file(&ds.samples[0].frames);
        bytes.pop();
        match decode_sample_file(&bytes, Path::new("short.crkd")).unwrap_err() {
            CrkdError::Truncated { expected, actual, .. } => {
                assert_eq!(expected, actual + 1);
            }
            other => panic!("expected truncation, got {other}"),
        }
    }

    #[test]
    fn float32_payload_round_trips() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(SAMPLE_MAGIC);
        bytes.extend_from_slice(&SAMPLE_VERSION.to_le_bytes());
        bytes.push(2);
        bytes.extend_from_slice(&2u32.to_le_bytes());
        bytes.extend_from_slice(&3u32.to_le_bytes());
        bytes.push(DTYPE_F32);
        let values = [0.5f32, -1.0, 2.25, 0.0, 1e-3, 7.5];
        for v in values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        let tensor = decode_sample_file(&bytes, Path::new("t.crkd")).unwrap();
        assert_eq!(tensor.dims, vec![2, 3]);
        assert_eq!(tensor.values, values);
    }

    #[test]
    fn manifest_rejects_escapes_and_bad_fields() {
        let p = Path::new("manifest.tsv");
        assert!(parse_manifest("id\tsamples/a.crkd\tg00 g01\n", p).is_ok());
        assert!(parse_manifest("id only\n", p).is_err());
        assert!(parse_manifest("id\t../evil\tg00\n", p).is_err());
        assert!(parse_manifest("id\tsamples/a.crkd\tg00  g01\n", p).is_err());
        assert!(parse_manifest("id\tsamples/a.crkd\tg00\textra\n", p).is_err());
    }
}
