//! The operations behind the `cvss` subcommands.
//!
//! Each returns a [`Result`]; the binary maps errors to exit codes with
//! [`Error::exit_code`].

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::batch::{self, BatchConfig, CorpusReport};
use crate::dataset::{load_image, save_pgm_file};
use crate::manifest::{pixel_digest, Dims, EnrollmentManifest, DIGEST_ALGORITHM, SCHEMA_VERSION};
use crate::metrics::MetricsReport;
use crate::scheme::{self, MethodKind, SchemeParams, ShareSet};
use crate::{BitTransform, Error, GrayImage, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Where enrollment seeds come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedSource {
    /// Fresh seeds from the OS entropy source.
    Auto,
    /// Seeds derived from one master seed (as image 0 of a batch).
    Master(u64),
    /// Exactly the seeds the method needs, in slot order.
    Explicit(Vec<u64>),
}

#[derive(Debug, Clone)]
pub struct EnrollRequest {
    pub input: PathBuf,
    pub method: MethodKind,
    pub n: usize,
    pub bit_transform: BitTransform,
    pub seeds: SeedSource,
    pub out_dir: PathBuf,
    pub user_id: Option<String>,
    /// M1 cover images; when empty M1 uses seeded textures.
    pub covers: Vec<PathBuf>,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn resolve_params(req: &EnrollRequest) -> Result<SchemeParams> {
    if req.n < 2 {
        return Err(Error::InvalidParams(format!(
            "share count must be at least 2, got {}",
            req.n
        )));
    }
    let uses_supplied_covers = req.method == MethodKind::M1 && !req.covers.is_empty();
    let seeds = match &req.seeds {
        _ if uses_supplied_covers => Vec::new(),
        SeedSource::Explicit(seeds) => seeds.clone(),
        SeedSource::Master(master) => {
            return batch::image_params(req.method, req.n, req.bit_transform, *master, 0);
        }
        SeedSource::Auto => (0..req.method.seed_count(req.n))
            .map(|_| rand::random::<u64>())
            .collect(),
    };
    SchemeParams::new(req.method, req.n, req.bit_transform, seeds)
}

pub fn cmd_enroll(req: &EnrollRequest) -> Result<EnrollmentManifest> {
    let params = resolve_params(req)?;
    let original = load_image(&req.input)?;
    let covers = req
        .covers
        .iter()
        .map(|p| load_image(p))
        .collect::<Result<Vec<_>>>()?;
    let set = scheme::generate_template(&original, &params, &covers)?;

    create_dir(&req.out_dir)?;
    let mut share_files = Vec::with_capacity(params.n);
    let mut content_digests = Vec::with_capacity(params.n);
    for (i, share) in set.shares.iter().enumerate() {
        let name = format!("share_{}.pgm", i + 1);
        save_pgm_file(&req.out_dir.join(&name), share)?;
        share_files.push(name);
        content_digests.push(pixel_digest(share));
    }

    let user_id = req.user_id.clone().unwrap_or_else(|| {
        req.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "user".into())
    });
    let (width, height) = original.dims();
    let manifest = EnrollmentManifest {
        schema: SCHEMA_VERSION,
        user_id,
        method: params.method,
        n: params.n,
        bit_transform: params.bit_transform,
        seeds: params.seeds,
        dims: Dims { width, height },
        share_files,
        digest_algorithm: DIGEST_ALGORITHM.into(),
        content_digests,
    };
    manifest.write(&req.out_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}

/// Loads every share named in the manifest and checks dimensions and
/// digests. Fails before returning anything if a single share is absent.
pub fn load_verified_shares(
    manifest: &EnrollmentManifest,
    share_dir: &Path,
) -> Result<Vec<GrayImage>> {
    let paths: Vec<PathBuf> = manifest
        .share_files
        .iter()
        .map(|f| share_dir.join(f))
        .collect();
    let present = paths.iter().filter(|p| p.is_file()).count();
    if present < manifest.n {
        return Err(Error::MissingShare {
            expected: manifest.n,
            found: present,
        });
    }
    let expected_dims = (manifest.dims.width, manifest.dims.height);
    paths
        .iter()
        .zip(&manifest.content_digests)
        .zip(&manifest.share_files)
        .map(|((path, digest), name)| {
            let img = load_image(path)?;
            if img.dims() != expected_dims {
                return Err(Error::DimensionMismatch {
                    expected: expected_dims,
                    found: img.dims(),
                });
            }
            if !pixel_digest(&img).eq_ignore_ascii_case(digest) {
                return Err(Error::DigestMismatch { file: name.clone() });
            }
            Ok(img)
        })
        .collect()
}

fn manifest_dir(manifest_path: &Path) -> PathBuf {
    manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

#[derive(Debug, Clone)]
pub struct AuthenticateRequest {
    pub manifest: PathBuf,
    /// Defaults to the manifest's directory.
    pub share_dir: Option<PathBuf>,
    /// Permutation seeds for revealing an M3 original; `seeds[0]` is used.
    pub seeds: Option<Vec<u64>>,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthenticateOutcome {
    pub secret: PathBuf,
    pub covers: Vec<PathBuf>,
    pub revealed: Option<PathBuf>,
}

pub fn cmd_authenticate(req: &AuthenticateRequest) -> Result<AuthenticateOutcome> {
    let manifest = EnrollmentManifest::read(&req.manifest)?;
    let params = manifest.params()?;
    let share_dir = req
        .share_dir
        .clone()
        .unwrap_or_else(|| manifest_dir(&req.manifest));
    let shares = load_verified_shares(&manifest, &share_dir)?;
    let result = scheme::authenticate(&ShareSet {
        params: params.clone(),
        shares,
    })?;

    let revealed_img = match (&req.seeds, params.method) {
        (Some(seeds), MethodKind::M3) => {
            let reveal_params = SchemeParams {
                seeds: seeds.clone(),
                ..params.clone()
            };
            Some(scheme::reveal_original(&result, &reveal_params)?)
        }
        _ => None,
    };

    create_dir(&req.out_dir)?;
    let secret = req.out_dir.join("secret.pgm");
    save_pgm_file(&secret, &result.secret)?;
    let mut covers = Vec::with_capacity(result.covers.len());
    for (i, cover) in result.covers.iter().enumerate() {
        let path = req.out_dir.join(format!("cover_{}.pgm", i + 1));
        save_pgm_file(&path, cover)?;
        covers.push(path);
    }
    let revealed = match revealed_img {
        Some(img) => {
            let path = req.out_dir.join("original.pgm");
            save_pgm_file(&path, &img)?;
            Some(path)
        }
        None => None,
    };
    Ok(AuthenticateOutcome {
        secret,
        covers,
        revealed,
    })
}

/// JSON document written by `evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub original: String,
    pub manifest: String,
    pub method: MethodKind,
    pub n: usize,
    pub pairing: String,
    pub report: MetricsReport,
}

pub fn cmd_evaluate(
    original: &Path,
    manifest_path: &Path,
    share_dir: Option<&Path>,
) -> Result<EvaluationReport> {
    let manifest = EnrollmentManifest::read(manifest_path)?;
    let original_img = load_image(original)?;
    let share_dir = share_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| manifest_dir(manifest_path));
    let shares = load_verified_shares(&manifest, &share_dir)?;
    for s in &shares {
        original_img.ensure_same_dims(s)?;
    }
    Ok(EvaluationReport {
        original: original.display().to_string(),
        manifest: manifest_path.display().to_string(),
        method: manifest.method,
        n: manifest.n,
        pairing: "each share SS_i vs the original image, averaged over shares".into(),
        report: batch::evaluate_shares(&original_img, &shares)?,
    })
}

#[derive(Debug, Clone)]
pub struct BatchRequest {
    pub root: PathBuf,
    pub config: BatchConfig,
    /// CSV goes to `report.with_extension("csv")`, the aggregate JSON to
    /// `report.with_extension("json")`.
    pub report: PathBuf,
}

#[derive(Debug, Clone)]
pub struct BatchOutcome {
    pub report: CorpusReport,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
}

pub fn cmd_batch(req: &BatchRequest) -> Result<BatchOutcome> {
    let (report, rows) = batch::run_batch(&req.root, &req.config)?;
    let csv_path = req.report.with_extension("csv");
    let json_path = req.report.with_extension("json");
    if let Some(parent) = csv_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    fs::write(&csv_path, batch::rows_to_csv(&rows, req.config.n))
        .map_err(|e| Error::io(&csv_path, e))?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;
    Ok(BatchOutcome {
        report,
        csv_path,
        json_path,
    })
}

/// Parses `"1,2,3"` into seeds.
pub fn parse_seed_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u64>()
                .map_err(|_| Error::InvalidParams(format!("seed {s:?} is not a decimal u64")))
        })
        .collect()
}
