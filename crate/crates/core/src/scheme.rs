//! The (n,n) XOR share chain and its cover-image strategies.
//!
//! Enrollment, for a secret `S` and covers `C_1 .. C_{n-1}`:
//!
//! ```text
//! TS_1 = S                 TS_i = C_{i-1} ^ TS_{i-1}     (i = 2..n)
//! NS_1 = TS_1              NS_i = TS_i ^ NS_{i-1}        (i = 2..n)
//! SS_i = LBR(NS_i)                                       (i = 1..n)
//! ```
//!
//! Authentication runs the exact inverse:
//!
//! ```text
//! NS_i = RBR(SS_i)
//! TS_1 = NS_1              TS_i = NS_i ^ NS_{i-1}        (i = 2..n)
//! S    = TS_1              C_{i-1} = TS_i ^ TS_{i-1}     (i = 2..n)
//! ```
//!
//! `LBR`/`RBR` are the left/right directions of a [`BitTransform`].
//! Every step needs the previous share, so nothing here reconstructs the
//! secret from fewer than `n` shares.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::image::{bit_transform, Direction};
use crate::permutation::{inverse_permute_image, permute_image, PermutationKey};
use crate::synthetic::textured_image;
use crate::{BitTransform, Error, GrayImage, Result};

/// Default share count: one secret and three covers.
pub const DEFAULT_SHARES: usize = 4;

/// How the secret and cover images are derived from the biometric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    /// Secret is the original; covers are unrelated gray images.
    M1,
    /// Secret is the original; covers are keyed permutations of it.
    M2,
    /// Secret and covers are all keyed permutations of the original.
    M3,
}

impl MethodKind {
    pub const ALL: [MethodKind; 3] = [MethodKind::M1, MethodKind::M2, MethodKind::M3];

    /// Number of permutation seeds the method consumes for `n` shares.
    /// M1 takes either none (supplied covers) or `n - 1` texture seeds.
    pub fn seed_count(self, n: usize) -> usize {
        match self {
            MethodKind::M1 | MethodKind::M2 => n - 1,
            MethodKind::M3 => n,
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodKind::M1 => "m1",
            MethodKind::M2 => "m2",
            MethodKind::M3 => "m3",
        })
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "m1" => Ok(MethodKind::M1),
            "m2" => Ok(MethodKind::M2),
            "m3" => Ok(MethodKind::M3),
            other => Err(Error::InvalidParams(format!(
                "unknown method {other:?} (expected m1, m2 or m3)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeParams {
    pub method: MethodKind,
    pub n: usize,
    pub bit_transform: BitTransform,
    /// M1: empty or `n - 1` texture seeds; M2: `n - 1`; M3: `n`, where
    /// `seeds[0]` scrambles the secret.
    pub seeds: Vec<u64>,
}

impl SchemeParams {
    pub fn new(
        method: MethodKind,
        n: usize,
        bit_transform: BitTransform,
        seeds: Vec<u64>,
    ) -> Result<Self> {
        let params = Self {
            method,
            n,
            bit_transform,
            seeds,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!(
                "share count must be at least 2, got {}",
                self.n
            )));
        }
        let want = self.method.seed_count(self.n);
        let ok =
            self.seeds.len() == want || (self.method == MethodKind::M1 && self.seeds.is_empty());
        if !ok {
            return Err(Error::InvalidParams(format!(
                "{} with n = {} needs {want} seeds, got {}",
                self.method,
                self.n,
                self.seeds.len()
            )));
        }
        Ok(())
    }
}

/// The stored template: `n` secret shares plus the parameters that made them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareSet {
    pub params: SchemeParams,
    pub shares: Vec<GrayImage>,
}

impl ShareSet {
    pub fn dims(&self) -> Option<(u32, u32)> {
        self.shares.first().map(GrayImage::dims)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionResult {
    pub secret: GrayImage,
    pub covers: Vec<GrayImage>,
}

/// Derives the secret and the `n - 1` covers for `original`.
///
/// For M1, `supplied` covers (if any) must number `n - 1` and are resized
/// to the original's dimensions by nearest neighbour; otherwise the covers
/// are synthetic textures keyed by `params.seeds`. `supplied` is ignored
/// for M2 and M3.
pub fn make_covers(
    original: &GrayImage,
    params: &SchemeParams,
    supplied: &[GrayImage],
) -> Result<(GrayImage, Vec<GrayImage>)> {
    params.validate()?;
    if original.len() < 2 {
        return Err(Error::InvalidParams(
            "original must have at least two pixels".into(),
        ));
    }
    let (w, h) = original.dims();
    let permuted = |seed: u64| permute_image(original, PermutationKey::for_image(seed, original));

    match params.method {
        MethodKind::M1 => {
            let covers = if !supplied.is_empty() {
                if supplied.len() != params.n - 1 {
                    return Err(Error::InvalidParams(format!(
                        "m1 with n = {} needs {} cover images, got {}",
                        params.n,
                        params.n - 1,
                        supplied.len()
                    )));
                }
                supplied
                    .iter()
                    .map(|c| c.resize_nearest(w, h))
                    .collect::<Result<Vec<_>>>()?
            } else if !params.seeds.is_empty() {
                params
                    .seeds
                    .iter()
                    .map(|&s| textured_image(w, h, s))
                    .collect()
            } else {
                return Err(Error::InvalidParams(
                    "m1 needs cover images or texture seeds".into(),
                ));
            };
            Ok((original.clone(), covers))
        }
        MethodKind::M2 => {
            let covers = params
                .seeds
                .iter()
                .map(|&s| permuted(s))
                .collect::<Result<Vec<_>>>()?;
            Ok((original.clone(), covers))
        }
        MethodKind::M3 => {
            let secret = permuted(params.seeds[0])?;
            let covers = params.seeds[1..]
                .iter()
                .map(|&s| permuted(s))
                .collect::<Result<Vec<_>>>()?;
            Ok((secret, covers))
        }
    }
}

/// Runs the enrollment chain, returning `SS_1 .. SS_n` with `n = covers.len() + 1`.
pub fn enroll(
    secret: &GrayImage,
    covers: &[GrayImage],
    transform: BitTransform,
) -> Result<Vec<GrayImage>> {
    if covers.is_empty() {
        return Err(Error::InvalidParams(
            "enrollment needs at least one cover (n >= 2)".into(),
        ));
    }
    for c in covers {
        secret.ensure_same_dims(c)?;
    }
    let lbr = transform.table(Direction::Left);

    let mut temp = secret.pixels().to_vec();
    let mut noisy = temp.clone();
    let mut shares = Vec::with_capacity(covers.len() + 1);
    shares.push(secret.with_pixels(noisy.iter().map(|&v| lbr[v as usize]).collect()));
    for cover in covers {
        for ((t, n), &c) in temp.iter_mut().zip(noisy.iter_mut()).zip(cover.pixels()) {
            *t ^= c;
            *n ^= *t;
        }
        shares.push(secret.with_pixels(noisy.iter().map(|&v| lbr[v as usize]).collect()));
    }
    Ok(shares)
}

/// Covers generation plus enrollment in one step.
pub fn generate_template(
    original: &GrayImage,
    params: &SchemeParams,
    supplied: &[GrayImage],
) -> Result<ShareSet> {
    let (secret, covers) = make_covers(original, params, supplied)?;
    let shares = enroll(&secret, &covers, params.bit_transform)?;
    Ok(ShareSet {
        params: params.clone(),
        shares,
    })
}

/// Inverts [`enroll`]. Refuses unless all `n` shares are present.
pub fn authenticate(set: &ShareSet) -> Result<ReconstructionResult> {
    let n = set.params.n;
    if n < 2 || set.shares.len() < n {
        return Err(Error::MissingShare {
            expected: n,
            found: set.shares.len(),
        });
    }
    if set.shares.len() > n {
        return Err(Error::InvalidParams(format!(
            "{} shares supplied for an n = {n} template",
            set.shares.len()
        )));
    }
    let first = &set.shares[0];
    for s in &set.shares[1..] {
        first.ensure_same_dims(s)?;
    }

    let noisy: Vec<GrayImage> = set
        .shares
        .iter()
        .map(|s| bit_transform(s, set.params.bit_transform, Direction::Right))
        .collect();

    let mut temp = Vec::with_capacity(n);
    temp.push(noisy[0].clone());
    for pair in noisy.windows(2) {
        temp.push(crate::image::xor_images(&pair[1], &pair[0])?);
    }
    let covers = temp
        .windows(2)
        .map(|pair| crate::image::xor_images(&pair[1], &pair[0]))
        .collect::<Result<Vec<_>>>()?;

    Ok(ReconstructionResult {
        secret: temp.swap_remove(0),
        covers,
    })
}

/// Recovers the biometric from a reconstructed secret. For M3 this needs
/// the secret's permutation seed; M1 and M2 secrets are the biometric.
pub fn reveal_original(result: &ReconstructionResult, params: &SchemeParams) -> Result<GrayImage> {
    match params.method {
        MethodKind::M1 | MethodKind::M2 => Ok(result.secret.clone()),
        MethodKind::M3 => {
            let seed = *params.seeds.first().ok_or_else(|| {
                Error::InvalidParams("m3 reveal needs the secret's permutation seed".into())
            })?;
            inverse_permute_image(
                &result.secret,
                PermutationKey::for_image(seed, &result.secret),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn px(v: u8) -> GrayImage {
        GrayImage::new(1, 1, vec![v]).unwrap()
    }

    fn random_image(w: u32, h: u32, rng: &mut SplitMix64) -> GrayImage {
        GrayImage::from_fn(w, h, |_, _| rng.next_u64() as u8).unwrap()
    }

    /// Brute-force closed form: SS_i = LBR(XOR_{j<=i} (S ^ C_1 ^ .. ^ C_{j-1})),
    /// evaluated pixel by pixel with no shared state between shares.
    fn closed_form(secret: &GrayImage, covers: &[GrayImage], t: BitTransform) -> Vec<Vec<u8>> {
        let n = covers.len() + 1;
        (1..=n)
            .map(|i| {
                (0..secret.len())
                    .map(|p| {
                        let mut noisy = 0u8;
                        for j in 1..=i {
                            let mut temp = secret.pixels()[p];
                            for c in &covers[..j - 1] {
                                temp ^= c.pixels()[p];
                            }
                            noisy ^= temp;
                        }
                        t.apply_pixel(noisy, Direction::Left)
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn hand_traced_two_share_example() {
        let shares = enroll(&px(170), &[px(204)], BitTransform::Reverse8).unwrap();
        assert_eq!(shares[0].pixels(), &[85]);
        assert_eq!(shares[1].pixels(), &[51]);
        let expected = closed_form(&px(170), &[px(204)], BitTransform::Reverse8);
        assert_eq!(expected, vec![vec![85], vec![51]]);

        let params = SchemeParams::new(MethodKind::M1, 2, BitTransform::Reverse8, vec![]).unwrap();
        let back = authenticate(&ShareSet { params, shares }).unwrap();
        assert_eq!(back.secret, px(170));
        assert_eq!(back.covers, vec![px(204)]);
    }

    #[test]
    fn zero_inputs_give_zero_shares() {
        let z = GrayImage::filled(5, 4, 0).unwrap();
        let shares = enroll(
            &z,
            &[z.clone(), z.clone(), z.clone()],
            BitTransform::Reverse8,
        )
        .unwrap();
        assert_eq!(shares.len(), 4);
        assert!(shares.iter().all(|s| *s == z));
    }

    #[test]
    fn matches_closed_form_for_five_shares() {
        let mut rng = SplitMix64::new(11);
        for t in [BitTransform::Reverse8, BitTransform::Rotate(3)] {
            for _ in 0..20 {
                let s = random_image(6, 5, &mut rng);
                let covers: Vec<_> = (0..4).map(|_| random_image(6, 5, &mut rng)).collect();
                let shares = enroll(&s, &covers, t).unwrap();
                let got: Vec<Vec<u8>> = shares.into_iter().map(GrayImage::into_pixels).collect();
                assert_eq!(got, closed_form(&s, &covers, t));
            }
        }
    }

    #[test]
    fn round_trip_all_methods() {
        let mut rng = SplitMix64::new(5);
        for method in MethodKind::ALL {
            for n in 2..=6 {
                for t in [BitTransform::Reverse8, BitTransform::Rotate(5)] {
                    let original = random_image(9, 7, &mut rng);
                    let seeds = (0..method.seed_count(n)).map(|_| rng.next_u64()).collect();
                    let params = SchemeParams::new(method, n, t, seeds).unwrap();
                    let (secret, covers) = make_covers(&original, &params, &[]).unwrap();
                    let set = generate_template(&original, &params, &[]).unwrap();
                    assert_eq!(set.shares.len(), n);
                    let back = authenticate(&set).unwrap();
                    assert_eq!(back.secret, secret);
                    assert_eq!(back.covers, covers);
                    assert_eq!(reveal_original(&back, &params).unwrap(), original);
                }
            }
        }
    }

    #[test]
    fn missing_share_is_refused() {
        let mut rng = SplitMix64::new(8);
        let original = random_image(8, 8, &mut rng);
        let params =
            SchemeParams::new(MethodKind::M3, 4, BitTransform::Reverse8, vec![1, 2, 3, 4]).unwrap();
        let mut set = generate_template(&original, &params, &[]).unwrap();
        set.shares.pop();
        assert!(matches!(
            authenticate(&set),
            Err(Error::MissingShare {
                expected: 4,
                found: 3
            })
        ));
    }

    #[test]
    fn mismatched_share_dims() {
        let params = SchemeParams::new(MethodKind::M1, 2, BitTransform::Reverse8, vec![]).unwrap();
        let set = ShareSet {
            params,
            shares: vec![
                GrayImage::filled(2, 2, 0).unwrap(),
                GrayImage::filled(4, 1, 0).unwrap(),
            ],
        };
        assert!(matches!(
            authenticate(&set),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(enroll(
            &GrayImage::filled(2, 2, 0).unwrap(),
            &[],
            BitTransform::Reverse8
        )
        .is_err());
    }

    #[test]
    fn m2_covers_are_permutations_of_secret() {
        let mut rng = SplitMix64::new(21);
        let original = random_image(10, 10, &mut rng);
        let params =
            SchemeParams::new(MethodKind::M2, 2, BitTransform::Reverse8, vec![99]).unwrap();
        let (secret, covers) = make_covers(&original, &params, &[]).unwrap();
        assert_eq!(secret, original);
        assert_eq!(
            covers,
            vec![permute_image(&original, PermutationKey::new(99, 100)).unwrap()]
        );
    }

    #[test]
    fn m3_covers_keep_histogram() {
        let mut rng = SplitMix64::new(22);
        let original = random_image(10, 10, &mut rng);
        let params =
            SchemeParams::new(MethodKind::M3, 4, BitTransform::Reverse8, vec![1, 2, 3, 4]).unwrap();
        let (secret, covers) = make_covers(&original, &params, &[]).unwrap();
        assert_ne!(secret, original);
        assert_eq!(secret.histogram(), original.histogram());
        for c in covers {
            assert_eq!(c.histogram(), original.histogram());
        }
    }

    #[test]
    fn m1_resizes_supplied_covers() {
        let mut rng = SplitMix64::new(23);
        let original = random_image(94, 112, &mut rng);
        let supplied: Vec<_> = (0..3).map(|_| random_image(40, 30, &mut rng)).collect();
        let params = SchemeParams::new(MethodKind::M1, 4, BitTransform::Reverse8, vec![]).unwrap();
        let (secret, covers) = make_covers(&original, &params, &supplied).unwrap();
        assert_eq!(secret, original);
        assert_eq!(covers.len(), 3);
        assert!(covers.iter().all(|c| c.dims() == (94, 112)));
    }

    #[test]
    fn m1_without_covers_or_seeds() {
        let original = GrayImage::filled(4, 4, 3).unwrap();
        let params = SchemeParams::new(MethodKind::M1, 3, BitTransform::Reverse8, vec![]).unwrap();
        assert!(make_covers(&original, &params, &[]).is_err());
        let one = [GrayImage::filled(2, 2, 0).unwrap()];
        assert!(make_covers(&original, &params, &one).is_err());
    }

    #[test]
    fn degenerate_original_and_bad_params() {
        let params = SchemeParams::new(MethodKind::M2, 2, BitTransform::Reverse8, vec![1]).unwrap();
        assert!(make_covers(&px(1), &params, &[]).is_err());
        assert!(SchemeParams::new(MethodKind::M2, 1, BitTransform::Reverse8, vec![]).is_err());
        assert!(
            SchemeParams::new(MethodKind::M3, 4, BitTransform::Reverse8, vec![1, 2, 3]).is_err()
        );
        assert!(SchemeParams::new(MethodKind::M1, 4, BitTransform::Reverse8, vec![1]).is_err());
    }

    #[test]
    fn reveal_rules() {
        let mut rng = SplitMix64::new(31);
        let original = random_image(64, 64, &mut rng);
        let params =
            SchemeParams::new(MethodKind::M3, 2, BitTransform::Reverse8, vec![10, 20]).unwrap();
        let back = authenticate(&generate_template(&original, &params, &[]).unwrap()).unwrap();
        assert_eq!(reveal_original(&back, &params).unwrap(), original);

        let no_seeds = SchemeParams {
            seeds: vec![],
            ..params.clone()
        };
        assert!(reveal_original(&back, &no_seeds).is_err());

        let m2 = SchemeParams::new(MethodKind::M2, 2, BitTransform::Reverse8, vec![10]).unwrap();
        assert_eq!(reveal_original(&back, &m2).unwrap(), back.secret);
    }

    #[test]
    fn wrong_reveal_seed_scrambles() {
        let mut rng = SplitMix64::new(41);
        for _ in 0..100 {
            let original = random_image(64, 64, &mut rng);
            let seeds: Vec<u64> = (0..4).map(|_| rng.next_u64()).collect();
            let params =
                SchemeParams::new(MethodKind::M3, 4, BitTransform::Reverse8, seeds.clone())
                    .unwrap();
            let back = authenticate(&generate_template(&original, &params, &[]).unwrap()).unwrap();
            let mut wrong = params.clone();
            wrong.seeds[0] = rng.next_u64();
            let guess = reveal_original(&back, &wrong).unwrap();
            let differing = guess
                .pixels()
                .iter()
                .zip(original.pixels())
                .filter(|(a, b)| a != b)
                .count();
            assert!(differing as f64 / original.len() as f64 >= 0.95);
        }
    }

    #[test]
    fn method_parse() {
        assert_eq!("M3".parse::<MethodKind>().unwrap(), MethodKind::M3);
        assert_eq!(MethodKind::M1.to_string(), "m1");
        assert!("m4".parse::<MethodKind>().is_err());
    }
}
