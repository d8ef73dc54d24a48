//! Distortion and similarity measures between an original image `I` and a
//! template image `S` of the same size.
//!
//! | measure | definition |
//! |---------|------------|
//! | Cr   | Pearson correlation over all pixels |
//! | MSE  | mean of `(I - S)^2` |
//! | RMSE | `sqrt(MSE)` |
//! | MAE  | mean of `abs(I - S)` |
//! | PSNR | `20 log10(255 / RMSE)`, `+inf` when MSE is 0 |
//! | SSIM | single-window SSIM over whole-image statistics, `C1 = (0.01*255)^2`, `C2 = (0.03*255)^2` |
//! | NPCR | percentage of pixel positions that differ |
//! | UACI | `100 * MAE / 255` |

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, GrayImage, Result};

pub const MAX_GRAY: f64 = 255.0;
pub const SSIM_C1: f64 = (0.01 * MAX_GRAY) * (0.01 * MAX_GRAY);
pub const SSIM_C2: f64 = (0.03 * MAX_GRAY) * (0.03 * MAX_GRAY);

fn check(i: &GrayImage, s: &GrayImage) -> Result<()> {
    i.ensure_same_dims(s)
}

/// Population statistics shared by correlation and SSIM.
struct Moments {
    mean_i: f64,
    mean_s: f64,
    var_i: f64,
    var_s: f64,
    cov: f64,
}

fn centered_dot(a: &[u8], mean_a: f64, b: &[u8], mean_b: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x as f64 - mean_a) * (y as f64 - mean_b))
        .sum()
}

fn moments(i: &GrayImage, s: &GrayImage) -> Moments {
    let n = i.len() as f64;
    let mean = |img: &GrayImage| img.pixels().iter().map(|&v| v as u64).sum::<u64>() as f64 / n;
    let (mean_i, mean_s) = (mean(i), mean(s));
    // Variances go through the same routine as the covariance so that
    // identical images give bit-identical terms.
    Moments {
        mean_i,
        mean_s,
        var_i: centered_dot(i.pixels(), mean_i, i.pixels(), mean_i) / n,
        var_s: centered_dot(s.pixels(), mean_s, s.pixels(), mean_s) / n,
        cov: centered_dot(i.pixels(), mean_i, s.pixels(), mean_s) / n,
    }
}

pub fn correlation(i: &GrayImage, s: &GrayImage) -> Result<f64> {
    check(i, s)?;
    let m = moments(i, s);
    if m.var_i == 0.0 || m.var_s == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((m.cov / (m.var_i * m.var_s).sqrt()).clamp(-1.0, 1.0))
}

fn squared_error_sum(i: &GrayImage, s: &GrayImage) -> u64 {
    i.pixels()
        .iter()
        .zip(s.pixels())
        .map(|(&a, &b)| {
            let d = a.abs_diff(b) as u64;
            d * d
        })
        .sum()
}

fn absolute_error_sum(i: &GrayImage, s: &GrayImage) -> u64 {
    i.pixels()
        .iter()
        .zip(s.pixels())
        .map(|(&a, &b)| a.abs_diff(b) as u64)
        .sum()
}

pub fn mse(i: &GrayImage, s: &GrayImage) -> Result<f64> {
    check(i, s)?;
    Ok(squared_error_sum(i, s) as f64 / i.len() as f64)
}

pub fn rmse(i: &GrayImage, s: &GrayImage) -> Result<f64> {
    mse(i, s).map(f64::sqrt)
}

pub fn mae(i: &GrayImage, s: &GrayImage) -> Result<f64> {
    check(i, s)?;
    Ok(absolute_error_sum(i, s) as f64 / i.len() as f64)
}

/// PSNR in dB for a given mean squared error; `+inf` at zero error.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (MAX_GRAY / mse.sqrt()).log10()
    }
}

pub fn psnr(i: &GrayImage, s: &GrayImage) -> Result<f64> {
    mse(i, s).map(psnr_from_mse)
}

pub fn ssim(i: &GrayImage, s: &GrayImage) -> Result<f64> {
    check(i, s)?;
    let m = moments(i, s);
    let num = (2.0 * m.mean_i * m.mean_s + SSIM_C1) * (2.0 * m.cov + SSIM_C2);
    let den = (m.mean_i * m.mean_i + m.mean_s * m.mean_s + SSIM_C1) * (m.var_i + m.var_s + SSIM_C2);
    Ok(num / den)
}

pub fn npcr(i: &GrayImage, s: &GrayImage) -> Result<f64> {
    check(i, s)?;
    let changed = i
        .pixels()
        .iter()
        .zip(s.pixels())
        .filter(|(a, b)| a != b)
        .count();
    Ok(100.0 * changed as f64 / i.len() as f64)
}

/// Percentage form of the mean absolute error.
pub fn uaci_from_mae(mae: f64) -> f64 {
    100.0 * mae / MAX_GRAY
}

pub fn uaci(i: &GrayImage, s: &GrayImage) -> Result<f64> {
    mae(i, s).map(uaci_from_mae)
}

/// All eight measures for one image pair, or their average over many pairs.
///
/// `cr` is `None` when the correlation is undefined (a constant image).
/// In JSON, `cr: None` is written as `"n/a"` and an infinite `psnr` as `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(serialize_with = "ser_cr", deserialize_with = "de_cr")]
    pub cr: Option<f64>,
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    #[serde(serialize_with = "ser_psnr", deserialize_with = "de_psnr")]
    pub psnr: f64,
    pub ssim: f64,
    pub npcr: f64,
    pub uaci: f64,
}

impl MetricsReport {
    /// The values two identical images produce.
    pub const IDEAL: MetricsReport = MetricsReport {
        cr: Some(1.0),
        mse: 0.0,
        rmse: 0.0,
        mae: 0.0,
        psnr: f64::INFINITY,
        ssim: 1.0,
        npcr: 0.0,
        uaci: 0.0,
    };

    /// Arithmetic mean of each measure, summed in iteration order.
    ///
    /// `cr` is averaged over the reports where it is defined; `psnr` is the
    /// mean of the per-pair values, so one infinite entry makes it infinite.
    pub fn mean<'a>(reports: impl IntoIterator<Item = &'a MetricsReport>) -> Option<MetricsReport> {
        let mut count = 0usize;
        let mut cr_count = 0usize;
        let mut acc = [0.0f64; 8];
        for r in reports {
            count += 1;
            if let Some(cr) = r.cr {
                acc[0] += cr;
                cr_count += 1;
            }
            acc[1] += r.mse;
            acc[2] += r.rmse;
            acc[3] += r.mae;
            acc[4] += r.psnr;
            acc[5] += r.ssim;
            acc[6] += r.npcr;
            acc[7] += r.uaci;
        }
        if count == 0 {
            return None;
        }
        let n = count as f64;
        Some(MetricsReport {
            cr: (cr_count > 0).then(|| acc[0] / cr_count as f64),
            mse: acc[1] / n,
            rmse: acc[2] / n,
            mae: acc[3] / n,
            psnr: acc[4] / n,
            ssim: acc[5] / n,
            npcr: acc[6] / n,
            uaci: acc[7] / n,
        })
    }
}

pub fn report_all(i: &GrayImage, s: &GrayImage) -> Result<MetricsReport> {
    check(i, s)?;
    let mse = mse(i, s)?;
    let mae = mae(i, s)?;
    Ok(MetricsReport {
        cr: match correlation(i, s) {
            Ok(v) => Some(v),
            Err(Error::ZeroVariance) => None,
            Err(e) => return Err(e),
        },
        mse,
        rmse: mse.sqrt(),
        mae,
        psnr: psnr_from_mse(mse),
        ssim: ssim(i, s)?,
        npcr: npcr(i, s)?,
        uaci: uaci_from_mae(mae),
    })
}

/// `"n/a"` for an undefined correlation.
pub fn format_cr(cr: Option<f64>) -> String {
    cr.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}

/// `"inf"` for an infinite PSNR.
pub fn format_psnr(psnr: f64) -> String {
    if psnr.is_infinite() {
        "inf".to_string()
    } else {
        format!("{psnr:.3}")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NumOrText {
    Num(f64),
    Text(String),
}

fn ser_cr<S: Serializer>(cr: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match cr {
        Some(v) => s.serialize_f64(*v),
        None => s.serialize_str("n/a"),
    }
}

fn de_cr<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    match NumOrText::deserialize(d)? {
        NumOrText::Num(v) => Ok(Some(v)),
        NumOrText::Text(t) if t == "n/a" => Ok(None),
        NumOrText::Text(t) => Err(serde::de::Error::custom(format!("bad cr value {t:?}"))),
    }
}

fn ser_psnr<S: Serializer>(psnr: &f64, s: S) -> Result<S::Ok, S::Error> {
    if psnr.is_infinite() && *psnr > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*psnr)
    }
}

fn de_psnr<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    match NumOrText::deserialize(d)? {
        NumOrText::Num(v) => Ok(v),
        NumOrText::Text(t) if t == "inf" => Ok(f64::INFINITY),
        NumOrText::Text(t) => Err(serde::de::Error::custom(format!("bad psnr value {t:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn img(w: u32, h: u32, data: &[u8]) -> GrayImage {
        GrayImage::new(w, h, data.to_vec()).unwrap()
    }

    fn random_image(w: u32, h: u32, seed: u64) -> GrayImage {
        let mut rng = SplitMix64::new(seed);
        GrayImage::from_fn(w, h, |_, _| rng.next_u64() as u8).unwrap()
    }

    fn negative(x: &GrayImage) -> GrayImage {
        img(
            x.width(),
            x.height(),
            &x.pixels().iter().map(|v| 255 - v).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn correlation_examples() {
        let x = random_image(16, 16, 1);
        assert_eq!(correlation(&x, &x).unwrap(), 1.0);
        assert!((correlation(&x, &negative(&x)).unwrap() + 1.0).abs() < 1e-12);
        let flat = GrayImage::filled(16, 16, 9).unwrap();
        assert!(matches!(correlation(&flat, &x), Err(Error::ZeroVariance)));
        assert!(matches!(correlation(&x, &flat), Err(Error::ZeroVariance)));
    }

    #[test]
    fn error_examples() {
        let black = GrayImage::filled(3, 3, 0).unwrap();
        let white = GrayImage::filled(3, 3, 255).unwrap();
        assert_eq!(mse(&black, &black).unwrap(), 0.0);
        assert_eq!(mse(&black, &white).unwrap(), 65025.0);
        assert_eq!(mae(&black, &white).unwrap(), 255.0);
        assert_eq!(psnr(&black, &white).unwrap(), 0.0);
        assert_eq!(psnr(&white, &white).unwrap(), f64::INFINITY);
        assert_eq!(npcr(&black, &white).unwrap(), 100.0);
        assert_eq!(uaci(&black, &white).unwrap(), 100.0);

        let a = img(2, 1, &[0, 10]);
        let b = img(2, 1, &[3, 14]);
        assert_eq!(mse(&a, &b).unwrap(), 12.5);
        assert_eq!(mae(&a, &b).unwrap(), 3.5);
        assert_eq!(rmse(&a, &b).unwrap(), 12.5f64.sqrt());
    }

    #[test]
    fn npcr_counts_changed_positions() {
        let a = img(2, 2, &[1, 2, 3, 4]);
        let b = img(2, 2, &[1, 2, 3, 5]);
        assert_eq!(npcr(&a, &b).unwrap(), 25.0);
        assert_eq!(npcr(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn ssim_black_vs_white() {
        // Zero variances and covariance leave C1 / (255^2 + C1).
        let black = GrayImage::filled(4, 4, 0).unwrap();
        let white = GrayImage::filled(4, 4, 255).unwrap();
        let expected = 6.5025 / 65031.5025;
        assert!((ssim(&black, &white).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn ssim_identity_and_symmetry() {
        let x = random_image(20, 10, 3);
        let y = random_image(20, 10, 4);
        assert_eq!(ssim(&x, &x).unwrap(), 1.0);
        assert_eq!(ssim(&x, &y).unwrap(), ssim(&y, &x).unwrap());
    }

    #[test]
    fn psnr_from_published_mse() {
        // Independent route: 10 log10(255^2 / MSE).
        let direct = 10.0 * (65025.0f64 / 7971.40).log10();
        assert!((psnr_from_mse(7971.40) - direct).abs() < 1e-12);
        assert!((psnr_from_mse(7971.40) - 9.1155).abs() < 1e-4);
        assert_eq!(psnr_from_mse(65025.0), 0.0);
    }

    #[test]
    fn uaci_from_published_mae() {
        assert!((uaci_from_mae(59.54) - 23.349).abs() < 1e-3);
    }

    #[test]
    fn ideal_row_for_identical_images() {
        let x = random_image(32, 32, 8);
        assert_eq!(report_all(&x, &x).unwrap(), MetricsReport::IDEAL);
    }

    #[test]
    fn constant_image_reports_na() {
        let flat = GrayImage::filled(4, 4, 100).unwrap();
        let r = report_all(&flat, &flat).unwrap();
        assert_eq!(r.cr, None);
        assert_eq!(r.npcr, 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let a = GrayImage::filled(2, 2, 0).unwrap();
        let b = GrayImage::filled(1, 4, 0).unwrap();
        assert!(matches!(
            report_all(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(mse(&a, &b).is_err());
        assert!(npcr(&a, &b).is_err());
    }

    #[test]
    fn json_sentinels() {
        let flat = GrayImage::filled(2, 2, 7).unwrap();
        let r = report_all(&flat, &flat).unwrap();
        let json = serde_json::to_value(r).unwrap();
        assert_eq!(json["psnr"], "inf");
        assert_eq!(json["cr"], "n/a");
        let back: MetricsReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn mean_of_reports() {
        let a = report_all(&random_image(8, 8, 1), &random_image(8, 8, 2)).unwrap();
        let b = report_all(&random_image(8, 8, 3), &random_image(8, 8, 4)).unwrap();
        let m = MetricsReport::mean([&a, &b]).unwrap();
        assert_eq!(m.mse, (a.mse + b.mse) / 2.0);
        assert!((m.uaci - 100.0 * m.mae / 255.0).abs() < 1e-9);
        assert!(MetricsReport::mean([]).is_none());
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(seed in any::<u64>(), w in 2u32..24, h in 2u32..24) {
            let x = random_image(w, h, seed);
            let y = random_image(w, h, seed ^ 0xDEAD_BEEF);
            let xy = report_all(&x, &y).unwrap();
            let yx = report_all(&y, &x).unwrap();
            prop_assert_eq!(xy.mse, yx.mse);
            prop_assert_eq!(xy.mae, yx.mae);
            prop_assert_eq!(xy.psnr, yx.psnr);
            prop_assert_eq!(xy.npcr, yx.npcr);
            prop_assert_eq!(xy.uaci, yx.uaci);
            prop_assert!((xy.ssim - yx.ssim).abs() < 1e-12);
            match (xy.cr, yx.cr) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
                (a, b) => prop_assert_eq!(a, b),
            }
            prop_assert!((-1.0..=1.0).contains(&xy.ssim));
            prop_assert!(xy.cr.is_none_or(|c| (-1.0..=1.0).contains(&c)));
            prop_assert!((0.0..=100.0).contains(&xy.npcr));
            prop_assert!((0.0..=100.0).contains(&xy.uaci));
            prop_assert!((0.0..=65025.0).contains(&xy.mse));
            prop_assert!((0.0..=255.0).contains(&xy.mae));
            prop_assert!((xy.rmse * xy.rmse - xy.mse).abs() <= 1e-9 * xy.mse.max(1.0));
            prop_assert_eq!(xy.uaci, 100.0 * xy.mae / 255.0);
        }

        #[test]
        fn xor_with_nonzero_constant_changes_every_pixel(seed in any::<u64>(), c in 1u8..=255) {
            let x = random_image(12, 9, seed);
            let flipped = img(12, 9, &x.pixels().iter().map(|v| v ^ c).collect::<Vec<_>>());
            prop_assert_eq!(npcr(&x, &flipped).unwrap(), 100.0);
        }
    }
}
