//! Sequence-level augmentation and spatial rescaling.

use ndarray::{Array4, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{AugmentPolicy, VideoSample};
use crate::error::{CrkdError, Result};

/// Inclusive bounds for the resampled temporal length of a clip of length
/// `t` under scale bound `b`: `[ceil(t(1-b)), floor(t(1+b))]`.
pub fn temporal_length_bounds(t: usize, bound: f64) -> (usize, usize) {
    let lo = ((t as f64) * (1.0 - bound)).ceil() as usize;
    let hi = ((t as f64) * (1.0 + bound)).floor() as usize;
    (lo.max(1), hi.max(1))
}

/// Nearest-frame index resampling of a clip to `new_t` frames. Duplicates or
/// drops frames; never interpolates, so labels stay valid.
fn resample_time(frames: &Array4<f32>, new_t: usize) -> Array4<f32> {
    let (t, c, h, w) = frames.dim();
    if new_t == t {
        return frames.clone();
    }
    let mut out = Array4::<f32>::zeros((new_t, c, h, w));
    for dst in 0..new_t {
        let src = (((dst as f64 + 0.5) * t as f64 / new_t as f64) - 0.5).round();
        let src = src.clamp(0.0, (t - 1) as f64) as usize;
        out.index_axis_mut(Axis(0), dst)
            .assign(&frames.index_axis(Axis(0), src));
    }
    out
}

/// Apply one crop offset, one flip decision and one temporal resampling to a
/// whole clip. All frames of the clip share the same spatial transform; the
/// gloss label is untouched.
pub fn augment_sequence(
    sample: &VideoSample,
    policy: &AugmentPolicy,
    rng: &mut ChaCha8Rng,
) -> Result<VideoSample> {
    policy.validate()?;
    let (t, c, h, w) = sample.frames.dim();
    if h < policy.crop_target || w < policy.crop_target {
        return Err(CrkdError::invalid(format!(
            "crop_target {} exceeds frame size {h}x{w}",
            policy.crop_target
        )));
    }

    let max_off_y = h - policy.crop_target;
    let max_off_x = w - policy.crop_target;
    let (off_y, off_x, flip, new_t) = if policy.center_crop_only {
        (max_off_y / 2, max_off_x / 2, false, t)
    } else {
        // One draw per decision per SEQUENCE, in a fixed order.
        let off_y = if max_off_y > 0 {
            rng.gen_range(0..=max_off_y)
        } else {
            0
        };
        let off_x = if max_off_x > 0 {
            rng.gen_range(0..=max_off_x)
        } else {
            0
        };
        let flip = rng.gen::<f64>() < policy.flip_probability;
        let new_t = if policy.temporal_scale_bound > 0.0 {
            let (lo, hi) = temporal_length_bounds(t, policy.temporal_scale_bound);
            rng.gen_range(lo..=hi)
        } else {
            t
        };
        (off_y, off_x, flip, new_t)
    };

    let tgt = policy.crop_target;
    let mut cropped = sample
        .frames
        .slice(ndarray::s![.., .., off_y..off_y + tgt, off_x..off_x + tgt])
        .to_owned();
    if flip {
        cropped.invert_axis(Axis(3));
    }
    let frames = resample_time(&cropped, new_t);
    let _ = c;

    VideoSample::new(sample.id.clone(), frames, sample.glosses.clone())
}

/// Bilinear per-frame resize to `target` x `target` (half-pixel centers).
/// Temporal length and labels are unchanged; same-size input is returned
/// element-for-element identical.
pub fn rescale_resolution(sample: &VideoSample, target: usize) -> Result<VideoSample> {
    if target == 0 {
        return Err(CrkdError::invalid("target resolution must be positive"));
    }
    let (t, c, h, w) = sample.frames.dim();
    if h == target && w == target {
        return Ok(sample.clone());
    }

    let scale_y = h as f64 / target as f64;
    let scale_x = w as f64 / target as f64;
    // Precompute the 1-D interpolation taps once per axis.
    let taps = |n_src: usize, scale: f64| -> Vec<(usize, usize, f32)> {
        (0..target)
            .map(|d| {
                let src = (d as f64 + 0.5) * scale - 0.5;
                let src = src.clamp(0.0, (n_src - 1) as f64);
                let lo = src.floor() as usize;
                let hi = (lo + 1).min(n_src - 1);
                (lo, hi, (src - lo as f64) as f32)
            })
            .collect()
    };
    let ytaps = taps(h, scale_y);
    let xtaps = taps(w, scale_x);

    let mut out = Array4::<f32>::zeros((t, c, target, target));
    for ti in 0..t {
        for ci in 0..c {
            let plane = sample.frames.index_axis(Axis(0), ti);
            let plane = plane.index_axis(Axis(0), ci);
            for (dy, &(y0, y1, fy)) in ytaps.iter().enumerate() {
                for (dx, &(x0, x1, fx)) in xtaps.iter().enumerate() {
                    let top = plane[[y0, x0]] * (1.0 - fx) + plane[[y0, x1]] * fx;
                    let bot = plane[[y1, x0]] * (1.0 - fx) + plane[[y1, x1]] * fx;
                    out[[ti, ci, dy, dx]] = top * (1.0 - fy) + bot * fy;
                }
            }
        }
    }

    VideoSample::new(sample.id.clone(), out, sample.glosses.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use ndarray::Array4;

    fn sample(t: usize, res: usize) -> VideoSample {
        let mut frames = Array4::<f32>::zeros((t, 3, res, res));
        for ti in 0..t {
            for y in 0..res {
                for x in 0..res {
                    frames[[ti, 0, y, x]] = (ti * res * res + y * res + x) as f32;
                }
            }
        }
        VideoSample::new("s".into(), frames, vec![1, 2]).unwrap()
    }

    #[test]
    fn identity_policy_is_identity() {
        let s = sample(5, 16);
        let policy = AugmentPolicy {
            crop_source: 16,
            crop_target: 16,
            flip_probability: 0.0,
            temporal_scale_bound: 0.0,
            center_crop_only: false,
        };
        let mut rng = derive_rng(1, "aug", &[0]);
        let out = augment_sequence(&s, &policy, &mut rng).unwrap();
        assert_eq!(out.frames, s.frames);
        assert_eq!(out.glosses, s.glosses);
    }

    #[test]
    fn temporal_bound_respected() {
        let s = sample(100, 8);
        let policy = AugmentPolicy {
            crop_source: 8,
            crop_target: 8,
            flip_probability: 0.0,
            temporal_scale_bound: 0.2,
            center_crop_only: false,
        };
        for i in 0..40 {
            let mut rng = derive_rng(3, "aug", &[i]);
            let out = augment_sequence(&s, &policy, &mut rng).unwrap();
            let t = out.num_frames();
            assert!((80..=120).contains(&t), "T = {t}");
            assert_eq!(out.glosses, s.glosses);
        }
    }

    #[test]
    fn crop_window_shared_across_frames() {
        // Both frames carry the same spatial pattern, so a shared crop
        // window makes the cropped frames equal; differing windows would not.
        let res = 12;
        let mut frames = Array4::<f32>::zeros((2, 3, res, res));
        for t in 0..2 {
            for y in 0..res {
                for x in 0..res {
                    frames[[t, 0, y, x]] = (y * res + x) as f32;
                }
            }
        }
        let s = VideoSample::new("s".into(), frames, vec![1]).unwrap();
        let policy = AugmentPolicy {
            crop_source: 12,
            crop_target: 8,
            flip_probability: 0.5,
            temporal_scale_bound: 0.0,
            center_crop_only: false,
        };
        for i in 0..20 {
            let mut rng = derive_rng(5, "aug", &[i]);
            let out = augment_sequence(&s, &policy, &mut rng).unwrap();
            assert_eq!(
                out.frames.index_axis(Axis(0), 0),
                out.frames.index_axis(Axis(0), 1)
            );
        }
    }

    #[test]
    fn crop_larger_than_frame_rejected() {
        let s = sample(2, 8);
        let policy = AugmentPolicy {
            crop_source: 8,
            crop_target: 9,
            flip_probability: 0.0,
            temporal_scale_bound: 0.0,
            center_crop_only: false,
        };
        let mut rng = derive_rng(0, "aug", &[0]);
        assert!(augment_sequence(&s, &policy, &mut rng).is_err());
    }

    #[test]
    fn rescale_identity_and_shape() {
        let s = sample(4, 16);
        let same = rescale_resolution(&s, 16).unwrap();
        assert_eq!(same.frames, s.frames);
        let down = rescale_resolution(&s, 7).unwrap();
        assert_eq!(down.frames.dim(), (4, 3, 7, 7));
        assert_eq!(down.glosses, s.glosses);
    }

    #[test]
    fn pipeline_preserves_time() {
        let s = sample(9, 16);
        let policy = AugmentPolicy::center_crop(16, 12);
        let mut rng = derive_rng(0, "aug", &[0]);
        let a = augment_sequence(&s, &policy, &mut rng).unwrap();
        let b = rescale_resolution(&a, 6).unwrap();
        assert_eq!(b.num_frames(), 9);
    }
}
