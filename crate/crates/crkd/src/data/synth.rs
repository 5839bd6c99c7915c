//! Synthetic gloss-video generation.
//!
//! Each gloss index maps to a unique (shape, color, trajectory) motif drawn
//! on a dark background. The motifs are deliberately easy to separate so a
//! small network can reach near-zero WER and distillation effects stay
//! measurable. Frames are rendered on the 8-bit grid so that the in-memory
//! dataset round-trips bit-exactly through the uint8 file format.

use ndarray::Array4;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Dataset, GlossVocabulary, VideoSample};
use crate::error::{CrkdError, Result};
use crate::rng::derive_rng;

const MIN_GLOSSES: usize = 3;
const MAX_GLOSSES: usize = 8;

/// Bright, well-separated palette; indexed by gloss.
const PALETTE: [[f32; 3]; 8] = [
    [1.00, 0.25, 0.25],
    [0.25, 1.00, 0.30],
    [0.30, 0.45, 1.00],
    [1.00, 0.95, 0.25],
    [1.00, 0.35, 1.00],
    [0.25, 1.00, 1.00],
    [1.00, 0.62, 0.20],
    [0.80, 0.80, 0.85],
];

/// Unit directions the motifs travel along.
const DIRECTIONS: [(f32, f32); 8] = [
    (1.0, 0.0),
    (-1.0, 0.0),
    (0.0, 1.0),
    (0.0, -1.0),
    (0.7071, 0.7071),
    (-0.7071, 0.7071),
    (0.7071, -0.7071),
    (-0.7071, -0.7071),
];

#[derive(Clone, Copy)]
enum Shape {
    Square,
    Disc,
    Cross,
    Ring,
}

fn motif(gloss: usize) -> (Shape, [f32; 3], (f32, f32)) {
    let shape = match gloss % 4 {
        0 => Shape::Square,
        1 => Shape::Disc,
        2 => Shape::Cross,
        _ => Shape::Ring,
    };
    let color = PALETTE[(gloss / 4) % PALETTE.len()];
    let dir = DIRECTIONS[gloss % DIRECTIONS.len()];
    (shape, color, dir)
}

fn covered(shape: Shape, dx: f32, dy: f32, radius: f32) -> bool {
    let r2 = dx * dx + dy * dy;
    match shape {
        Shape::Square => dx.abs() <= radius && dy.abs() <= radius,
        Shape::Disc => r2 <= radius * radius,
        Shape::Cross => {
            (dx.abs() <= radius * 0.35 && dy.abs() <= radius)
                || (dy.abs() <= radius * 0.35 && dx.abs() <= radius)
        }
        Shape::Ring => r2 <= radius * radius && r2 >= (radius * 0.55) * (radius * 0.55),
    }
}

/// Quantize to the uint8 grid so file round-trips are bit-exact.
fn quantize(v: f32) -> f32 {
    let byte = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    byte as f32 / 255.0
}

fn render_gloss(
    frames: &mut Array4<f32>,
    t0: usize,
    frames_per_gloss: usize,
    gloss_class: usize,
    resolution: usize,
    rng: &mut ChaCha8Rng,
) {
    let (shape, color, dir) = motif(gloss_class - 1);
    let res = resolution as f32;
    let radius = res * 0.11;
    // Travel spans about a third of the frame, centred with a small jitter.
    let span = res * 0.30;
    let jitter_x: f32 = rng.gen_range(-0.06..0.06) * res;
    let jitter_y: f32 = rng.gen_range(-0.06..0.06) * res;
    let cx = res / 2.0 + jitter_x;
    let cy = res / 2.0 + jitter_y;
    let steps = frames_per_gloss.max(1) as f32;

    for k in 0..frames_per_gloss {
        let phase = (k as f32 + 0.5) / steps - 0.5;
        let px = cx + dir.0 * phase * span;
        let py = cy + dir.1 * phase * span;
        let mut frame = frames.index_axis_mut(ndarray::Axis(0), t0 + k);
        for y in 0..resolution {
            for x in 0..resolution {
                let dx = x as f32 + 0.5 - px;
                let dy = y as f32 + 0.5 - py;
                if covered(shape, dx, dy, radius) {
                    for (c, component) in color.iter().enumerate() {
                        frame[[c, y, x]] = quantize(*component);
                    }
                }
            }
        }
    }
}

/// Generate a deterministic synthetic dataset of moving-motif clips.
///
/// `vocab_size` counts all classes including the blank, so it must be at
/// least 2 (blank plus one gloss). Each sample concatenates 3-8 glosses,
/// each rendered for `frames_per_gloss` frames at `resolution` x
/// `resolution`. Identical seeds give bit-identical datasets.
pub fn generate_synthetic_dataset(
    vocab_size: usize,
    num_samples: usize,
    frames_per_gloss: usize,
    resolution: usize,
    seed: u64,
) -> Result<Dataset> {
    if vocab_size < 2 {
        return Err(CrkdError::invalid("vocab must exceed blank-only"));
    }
    if num_samples == 0 || frames_per_gloss == 0 {
        return Err(CrkdError::invalid(
            "num_samples and frames_per_gloss must be positive",
        ));
    }
    if resolution < 56 {
        return Err(CrkdError::invalid("resolution must be at least 56"));
    }

    let gloss_tokens = vocab_size - 1;
    let vocab = GlossVocabulary::canonical(gloss_tokens)?;
    let mut samples = Vec::with_capacity(num_samples);
    for idx in 0..num_samples {
        let mut rng = derive_rng(seed, "synth-sample", &[idx as u64]);
        let gloss_count = rng.gen_range(MIN_GLOSSES..=MAX_GLOSSES);
        let glosses: Vec<usize> = (0..gloss_count)
            .map(|_| rng.gen_range(1..=gloss_tokens))
            .collect();
        let total_frames = gloss_count * frames_per_gloss;

        let background = quantize(0.05);
        let mut frames =
            Array4::<f32>::from_elem((total_frames, 3, resolution, resolution), background);
        for (g, &class) in glosses.iter().enumerate() {
            render_gloss(
                &mut frames,
                g * frames_per_gloss,
                frames_per_gloss,
                class,
                resolution,
                &mut rng,
            );
        }
        // Mild salt noise keeps the task from being purely color lookup.
        let noise_count = (total_frames * resolution * resolution) / 200;
        for _ in 0..noise_count {
            let t = rng.gen_range(0..total_frames);
            let y = rng.gen_range(0..resolution);
            let x = rng.gen_range(0..resolution);
            let v = quantize(rng.gen_range(0.0..0.5));
            for c in 0..3 {
                frames[[t, c, y, x]] = v;
            }
        }

        samples.push(VideoSample::new(
            format!("synth{idx:05}"),
            frames,
            glosses,
        )?);
    }

    Ok(Dataset { vocab, samples })
}
