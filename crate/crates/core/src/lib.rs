//! Cancelable biometric templates built from an (n,n) Boolean XOR secret
//! sharing chain.
//!
//! A grayscale biometric image is combined with `n - 1` cover images
//! through a temporary-share / noisy-share XOR chain, and each noisy share
//! is passed through a per-pixel bit transform to produce the stored secret
//! shares. All `n` shares are needed to run the chain backwards.
//!
//! Module map:
//! * [`image`], [`pgm`], [`bmp`]: raster type, codecs and pixel operations
//! * [`permutation`]: seed-keyed pixel permutations
//! * [`scheme`]: cover generation (M1/M2/M3), enrollment and authentication
//! * [`metrics`]: distortion measures between an original and a template
//! * [`manifest`], [`dataset`], [`batch`], [`commands`]: persistence and CLI plumbing

pub mod batch;
pub mod bmp;
pub mod commands;
pub mod dataset;
mod error;
pub mod image;
pub mod manifest;
pub mod metrics;
pub mod permutation;
pub mod pgm;
pub mod rng;
pub mod scheme;
pub mod synthetic;

pub use error::{Error, Result};
pub use image::{BitTransform, Direction, GrayImage};
pub use metrics::MetricsReport;
pub use permutation::PermutationKey;
pub use scheme::{MethodKind, ReconstructionResult, SchemeParams, ShareSet};
