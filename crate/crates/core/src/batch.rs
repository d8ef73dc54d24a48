//! Corpus-level enrollment and evaluation.
//!
//! Every image in a dataset is enrolled under each requested method and
//! each of its `n` shares is compared with the original. A row's measures
//! are the mean over that image's shares; the aggregate is the mean of the
//! rows, in corpus order.
//!
//! Per-image seeds come from the master seed: image `k` (0-based corpus
//! index) uses `derive_seed(master, k)` to seed a SplitMix64 stream whose
//! successive outputs are the permutation (or M1 texture) seeds.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{self, DatasetKind};
use crate::metrics::{self, MetricsReport};
use crate::rng::{derive_seed, SplitMix64};
use crate::scheme::{self, MethodKind, SchemeParams, ShareSet};
use crate::{BitTransform, Error, GrayImage, Result};

/// Written into every report so readers know what was averaged.
pub const PAIRING: &str =
    "each share SS_i vs the original image, averaged over shares then over images";

pub const CSV_HEADER: [&str; 11] = [
    "image", "method", "n", "cr", "mse", "rmse", "mae", "psnr", "ssim", "npcr", "uaci",
];

#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub kind: DatasetKind,
    pub methods: Vec<MethodKind>,
    pub n: usize,
    pub bit_transform: BitTransform,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageRow {
    /// Path relative to the dataset root, `/`-separated.
    pub image: String,
    pub method: MethodKind,
    pub report: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodAggregate {
    pub method: MethodKind,
    pub report: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub dataset: String,
    pub dataset_kind: String,
    pub image_count: usize,
    pub skipped: usize,
    pub n: usize,
    pub bit_transform: BitTransform,
    pub master_seed: String,
    pub pairing: String,
    pub methods: Vec<MethodAggregate>,
}

/// Scheme parameters for corpus image `index`.
pub fn image_params(
    method: MethodKind,
    n: usize,
    bit_transform: BitTransform,
    master_seed: u64,
    index: u64,
) -> Result<SchemeParams> {
    let mut rng = SplitMix64::new(derive_seed(master_seed, index));
    let seeds = (0..method.seed_count(n.max(1)))
        .map(|_| rng.next_u64())
        .collect();
    SchemeParams::new(method, n, bit_transform, seeds)
}

/// Mean of the measures between `original` and each share.
pub fn evaluate_shares(original: &GrayImage, shares: &[GrayImage]) -> Result<MetricsReport> {
    let reports = shares
        .iter()
        .map(|s| metrics::report_all(original, s))
        .collect::<Result<Vec<_>>>()?;
    MetricsReport::mean(&reports)
        .ok_or_else(|| Error::InvalidParams("no shares to evaluate".into()))
}

pub fn evaluate_template(original: &GrayImage, set: &ShareSet) -> Result<MetricsReport> {
    evaluate_shares(original, &set.shares)
}

fn evaluate_image(
    original: &GrayImage,
    index: u64,
    config: &BatchConfig,
) -> Result<Vec<(MethodKind, MetricsReport)>> {
    config
        .methods
        .iter()
        .map(|&method| {
            let params = image_params(
                method,
                config.n,
                config.bit_transform,
                config.master_seed,
                index,
            )?;
            let set = scheme::generate_template(original, &params, &[])?;
            Ok((method, evaluate_template(original, &set)?))
        })
        .collect()
}

/// Evaluates in-memory images as a corpus. Rows come back in input order.
pub fn evaluate_corpus(
    images: &[(String, GrayImage)],
    config: &BatchConfig,
) -> Result<Vec<ImageRow>> {
    let per_image: Vec<Vec<(MethodKind, MetricsReport)>> = images
        .par_iter()
        .enumerate()
        .map(|(i, (_, img))| evaluate_image(img, i as u64, config))
        .collect::<Result<_>>()?;
    Ok(images
        .iter()
        .zip(per_image)
        .flat_map(|((name, _), reports)| {
            reports.into_iter().map(move |(method, report)| ImageRow {
                image: name.clone(),
                method,
                report,
            })
        })
        .collect())
}

pub fn aggregate(rows: &[ImageRow], methods: &[MethodKind]) -> Vec<MethodAggregate> {
    methods
        .iter()
        .filter_map(|&method| {
            let report = MetricsReport::mean(
                rows.iter()
                    .filter(|r| r.method == method)
                    .map(|r| &r.report),
            )?;
            Some(MethodAggregate { method, report })
        })
        .collect()
}

/// Loads the dataset, evaluates it and builds the aggregate report.
///
/// Undecodable files are skipped (and counted); the corpus index of an
/// image is its position among the files that did decode.
pub fn run_batch(root: &Path, config: &BatchConfig) -> Result<(CorpusReport, Vec<ImageRow>)> {
    config
        .methods
        .iter()
        .try_for_each(|&m| image_params(m, config.n, config.bit_transform, 0, 0).map(drop))?;
    if config.methods.is_empty() {
        return Err(Error::InvalidParams("no methods selected".into()));
    }
    let files = dataset::list_images(root, config.kind)?;
    let loaded: Vec<(String, Result<GrayImage>)> = files
        .par_iter()
        .map(|path| {
            let rel = path
                .strip_prefix(root)
                .unwrap_or(path)
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            (rel, dataset::load_image(path))
        })
        .collect();

    let mut skipped = 0;
    let mut images = Vec::with_capacity(loaded.len());
    for (name, result) in loaded {
        match result {
            Ok(img) if img.len() >= 2 => images.push((name, img)),
            Ok(_) => {
                log::warn!("skipping {name}: image too small");
                skipped += 1;
            }
            Err(e) => {
                log::warn!("skipping {name}: {e}");
                skipped += 1;
            }
        }
    }
    if skipped > 0 {
        log::warn!(
            "skipped {skipped} unreadable file(s) under {}",
            root.display()
        );
    }
    if images.is_empty() {
        return Err(Error::EmptyCorpus(root.to_path_buf()));
    }

    let rows = evaluate_corpus(&images, config)?;
    let report = CorpusReport {
        dataset: root.display().to_string(),
        dataset_kind: config.kind.to_string(),
        image_count: images.len(),
        skipped,
        n: config.n,
        bit_transform: config.bit_transform,
        master_seed: config.master_seed.to_string(),
        pairing: PAIRING.to_string(),
        methods: aggregate(&rows, &config.methods),
    };
    Ok((report, rows))
}

fn csv_number(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        v.to_string()
    }
}

/// CSV with header [`CSV_HEADER`]; one row per (image, method).
pub fn rows_to_csv(rows: &[ImageRow], n: usize) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in rows {
        let r = &row.report;
        w.write_record([
            row.image.clone(),
            row.method.to_string(),
            n.to_string(),
            r.cr.map_or_else(|| "n/a".to_string(), |v| v.to_string()),
            csv_number(r.mse),
            csv_number(r.rmse),
            csv_number(r.mae),
            csv_number(r.psnr),
            csv_number(r.ssim),
            csv_number(r.npcr),
            csv_number(r.uaci),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Fixed-width table with one line per labelled report.
pub fn format_table(rows: &[(String, MetricsReport)]) -> String {
    let mut out = format!(
        "{:<10} {:>8} {:>10} {:>9} {:>8} {:>8} {:>8} {:>7} {:>7}\n",
        "", "Cr", "MSE", "RMSE", "MAE", "PSNR", "SSIM", "NPCR", "UACI"
    );
    for (label, r) in rows {
        out.push_str(&format!(
            "{:<10} {:>8} {:>10.2} {:>9.3} {:>8.2} {:>8} {:>8.4} {:>7.2} {:>7.2}\n",
            label,
            metrics::format_cr(r.cr),
            r.mse,
            r.rmse,
            r.mae,
            metrics::format_psnr(r.psnr),
            r.ssim,
            r.npcr,
            r.uaci
        ));
    }
    out
}
