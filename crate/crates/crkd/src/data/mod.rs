//! Gloss-video dataset machinery: synthetic generation, augmentation,
//! rescaling and on-disk persistence.

mod augment;
mod format;
mod synth;

pub use augment::{augment_sequence, rescale_resolution, temporal_length_bounds};
pub use format::{
    decode_sample_file, encode_sample_file, load_dataset, parse_manifest, save_dataset,
    ManifestEntry, DTYPE_F32, DTYPE_U8, SAMPLE_MAGIC,
};
pub use synth::generate_synthetic_dataset;

use ndarray::Array4;

use crate::error::{CrkdError, Result};

/// Reserved surface form of the CTC blank. Gloss tokens may not collide with it.
pub const BLANK_TOKEN: &str = "-";

/// Ordered gloss vocabulary. Class index 0 is the CTC blank; gloss token `i`
/// occupies class index `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlossVocabulary {
    tokens: Vec<String>,
}

impl GlossVocabulary {
    pub fn new(tokens: Vec<String>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(CrkdError::invalid(
                "vocabulary needs at least one gloss token besides the blank",
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for tok in &tokens {
            if tok == BLANK_TOKEN {
                return Err(CrkdError::invalid(format!(
                    "gloss token may not equal the blank symbol `{BLANK_TOKEN}`"
                )));
            }
            if tok.is_empty() || tok.contains(char::is_whitespace) {
                return Err(CrkdError::invalid(format!(
                    "gloss token `{tok}` must be non-empty and whitespace-free"
                )));
            }
            if !seen.insert(tok.clone()) {
                return Err(CrkdError::invalid(format!("duplicate gloss token `{tok}`")));
            }
        }
        Ok(Self { tokens })
    }

    /// Canonical vocabulary `g00, g01, ...` used by the synthetic generator.
    pub fn canonical(gloss_count: usize) -> Result<Self> {
        if gloss_count < 1 {
            return Err(CrkdError::invalid("vocab must exceed blank-only"));
        }
        Self::new((0..gloss_count).map(|g| format!("g{g:02}")).collect())
    }

    pub fn blank_index(&self) -> usize {
        0
    }

    /// Number of classes including the blank.
    pub fn class_count(&self) -> usize {
        self.tokens.len() + 1
    }

    pub fn gloss_count(&self) -> usize {
        self.tokens.len()
    }

    /// Class index (1-based; 0 is the blank) for a gloss token.
    pub fn class_of(&self, token: &str) -> Option<usize> {
        self.tokens.iter().position(|t| t == token).map(|i| i + 1)
    }

    /// Token for a non-blank class index.
    pub fn token_of(&self, class: usize) -> Option<&str> {
        if class == 0 {
            return None;
        }
        self.tokens.get(class - 1).map(|s| s.as_str())
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// A gloss-labelled clip: `frames` is `[T, 3, H, W]` with pixel values in
/// `[0, 1]`; `glosses` are non-blank class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoSample {
    pub id: String,
    pub frames: Array4<f32>,
    pub glosses: Vec<usize>,
}

impl VideoSample {
    pub fn new(id: String, frames: Array4<f32>, glosses: Vec<usize>) -> Result<Self> {
        let (t, c, _h, _w) = frames.dim();
        if t == 0 {
            return Err(CrkdError::invalid("sample must contain at least one frame"));
        }
        if c != 3 {
            return Err(CrkdError::invalid(format!(
                "sample must have 3 channels, got {c}"
            )));
        }
        if glosses.is_empty() {
            return Err(CrkdError::invalid("label must contain at least one gloss"));
        }
        if glosses.contains(&0) {
            return Err(CrkdError::invalid("label may not contain the blank class"));
        }
        if glosses.len() > t {
            return Err(CrkdError::invalid(format!(
                "label length {} exceeds frame count {t}",
                glosses.len()
            )));
        }
        Ok(Self { id, frames, glosses })
    }

    pub fn num_frames(&self) -> usize {
        self.frames.dim().0
    }

    pub fn resolution(&self) -> (usize, usize) {
        let (_, _, h, w) = self.frames.dim();
        (h, w)
    }
}

/// Sequence-level augmentation policy: one crop offset and one flip decision
/// per clip, optional temporal resampling.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AugmentPolicy {
    pub crop_source: usize,
    pub crop_target: usize,
    pub flip_probability: f64,
    pub temporal_scale_bound: f64,
    pub center_crop_only: bool,
}

impl AugmentPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.crop_target > self.crop_source {
            return Err(CrkdError::invalid(format!(
                "crop_target {} exceeds crop_source {}",
                self.crop_target, self.crop_source
            )));
        }
        if !(0.0..=1.0).contains(&self.flip_probability) {
            return Err(CrkdError::invalid("flip_probability must be in [0,1]"));
        }
        if !(0.0..1.0).contains(&self.temporal_scale_bound) {
            return Err(CrkdError::invalid("temporal_scale_bound must be in [0,1)"));
        }
        Ok(())
    }

    /// Deterministic evaluation policy: center crop, no flip, no resampling.
    pub fn center_crop(crop_source: usize, crop_target: usize) -> Self {
        Self {
            crop_source,
            crop_target,
            flip_probability: 0.0,
            temporal_scale_bound: 0.0,
            center_crop_only: true,
        }
    }
}

/// An in-memory dataset split plus its vocabulary.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub vocab: GlossVocabulary,
    pub samples: Vec<VideoSample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array4;

    #[test]
    fn vocabulary_indices_are_one_based() {
        let v = GlossVocabulary::canonical(3).unwrap();
        assert_eq!(v.blank_index(), 0);
        assert_eq!(v.class_count(), 4);
        assert_eq!(v.class_of("g00"), Some(1));
        assert_eq!(v.token_of(3), Some("g02"));
        assert_eq!(v.token_of(0), None);
    }

    #[test]
    fn vocabulary_rejects_blank_collision_and_duplicates() {
        assert!(GlossVocabulary::new(vec!["-".into()]).is_err());
        assert!(GlossVocabulary::new(vec!["a".into(), "a".into()]).is_err());
        assert!(GlossVocabulary::new(vec![]).is_err());
    }

    #[test]
    fn sample_rejects_blank_in_label_and_overlong_label() {
        let frames = Array4::<f32>::zeros((2, 3, 4, 4));
        assert!(VideoSample::new("x".into(), frames.clone(), vec![0]).is_err());
        assert!(VideoSample::new("x".into(), frames.clone(), vec![1, 2, 1]).is_err());
        assert!(VideoSample::new("x".into(), frames, vec![1, 2]).is_ok());
    }
}
