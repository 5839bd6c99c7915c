//! Cross-resolution knowledge distillation for continuous gloss-sequence
//! recognition.
//!
//! The crate covers the full pipeline at desk scale: synthetic gloss-video
//! generation ([`data`]), the low-resolution student network and a reference
//! teacher ([`arch`]), CTC / feature / logit distillation losses ([`losses`]),
//! CTC decoding ([`decode`]), WER scoring and an analytic parameter/compute
//! profiler ([`metrics`]), and the two-phase teacher-then-student training
//! loop ([`trainer`]).
//!
//! Numeric kernels are generic over [`Real`] so that training runs in `f32`
//! (matching the 32-bit on-disk weight format bit for bit) while oracle and
//! gradient tests run in `f64`.

pub mod arch;
pub mod data;
pub mod decode;
pub mod error;
pub mod losses;
pub mod metrics;
pub mod rng;
pub mod trainer;

pub use error::{CrkdError, Result};

use ndarray::NdFloat;
use num_traits_float::FromF64;

/// Floating-point scalar the numeric kernels are generic over.
///
/// `f32` and `f64` both satisfy the bound; `f32` gets the fast gemm path of
/// `ndarray` just like `f64`.
pub trait Real: NdFloat + FromF64 + std::iter::Sum {}

impl Real for f32 {}
impl Real for f64 {}

/// Conversion helper for numeric literals inside generic code.
pub fn real<F: Real>(x: f64) -> F {
    F::from_f64(x)
}

mod num_traits_float {
    /// Lossy conversion from `f64`, used for constants in generic kernels.
    pub trait FromF64 {
        fn from_f64(x: f64) -> Self;
    }

    impl FromF64 for f32 {
        fn from_f64(x: f64) -> Self {
            x as f32
        }
    }

    impl FromF64 for f64 {
        fn from_f64(x: f64) -> Self {
            x
        }
    }
}
