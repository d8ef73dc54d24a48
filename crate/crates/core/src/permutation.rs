//! Seed-keyed pixel permutations.
//!
//! A [`PermutationKey`] expands to a permutation of `0..length` by a
//! Fisher–Yates shuffle driven by [`SplitMix64`](crate::rng::SplitMix64):
//! starting from the identity, for `i` from `length - 1` down to `1`, draw
//! `j` uniformly in `0..=i` and swap positions `i` and `j`.
//!
//! Permutations act on the flattened row-major pixel vector.

use serde::{Deserialize, Serialize};

use crate::rng::SplitMix64;
use crate::{Error, GrayImage, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PermutationKey {
    pub seed: u64,
    pub length: usize,
}

impl PermutationKey {
    pub fn new(seed: u64, length: usize) -> Self {
        Self { seed, length }
    }

    /// Key sized for `img`.
    pub fn for_image(seed: u64, img: &GrayImage) -> Self {
        Self::new(seed, img.len())
    }
}

pub fn derive_permutation(key: PermutationKey) -> Result<Vec<usize>> {
    if key.length == 0 {
        return Err(Error::InvalidParams(
            "permutation length must be positive".into(),
        ));
    }
    let mut rng = SplitMix64::new(key.seed);
    let mut perm: Vec<usize> = (0..key.length).collect();
    for i in (1..key.length).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    Ok(perm)
}

fn checked_permutation(img: &GrayImage, key: PermutationKey) -> Result<Vec<usize>> {
    if key.length != img.len() {
        return Err(Error::LengthMismatch {
            key: key.length,
            pixels: img.len(),
        });
    }
    derive_permutation(key)
}

/// Output pixel `j` is input pixel `perm[j]`.
pub fn apply_permutation(img: &GrayImage, perm: &[usize]) -> Result<GrayImage> {
    if perm.len() != img.len() {
        return Err(Error::LengthMismatch {
            key: perm.len(),
            pixels: img.len(),
        });
    }
    let src = img.pixels();
    Ok(img.with_pixels(perm.iter().map(|&i| src[i]).collect()))
}

/// Undoes [`apply_permutation`]: output pixel `perm[j]` is input pixel `j`.
pub fn apply_inverse_permutation(img: &GrayImage, perm: &[usize]) -> Result<GrayImage> {
    if perm.len() != img.len() {
        return Err(Error::LengthMismatch {
            key: perm.len(),
            pixels: img.len(),
        });
    }
    let mut out = vec![0u8; img.len()];
    for (&dst, &v) in perm.iter().zip(img.pixels()) {
        out[dst] = v;
    }
    Ok(img.with_pixels(out))
}

pub fn permute_image(img: &GrayImage, key: PermutationKey) -> Result<GrayImage> {
    let perm = checked_permutation(img, key)?;
    apply_permutation(img, &perm)
}

pub fn inverse_permute_image(img: &GrayImage, key: PermutationKey) -> Result<GrayImage> {
    let perm = checked_permutation(img, key)?;
    apply_inverse_permutation(img, &perm)
}
