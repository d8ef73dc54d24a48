//! The enrollment manifest: the JSON record stored alongside the share files.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "user_id": "s1-1",
//!   "method": "m3",
//!   "n": 4,
//!   "bit_transform": "reverse8",
//!   "seeds": ["11400714819323198485", "..."],
//!   "dims": { "width": 92, "height": 112 },
//!   "share_files": ["share_1.pgm", "..."],
//!   "digest_algorithm": "sha256",
//!   "content_digests": ["<hex sha256 of share 1 pixels>", "..."]
//! }
//! ```
//!
//! Seeds are decimal strings so they survive JSON tooling that reads numbers
//! as doubles. Digests cover the raw row-major pixel bytes of each share,
//! not the PGM file.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::scheme::{MethodKind, SchemeParams};
use crate::{BitTransform, Error, GrayImage, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const DIGEST_ALGORITHM: &str = "sha256";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnrollmentManifest {
    pub schema: u32,
    pub user_id: String,
    pub method: MethodKind,
    pub n: usize,
    pub bit_transform: BitTransform,
    #[serde(serialize_with = "ser_seeds", deserialize_with = "de_seeds")]
    pub seeds: Vec<u64>,
    pub dims: Dims,
    pub share_files: Vec<String>,
    pub digest_algorithm: String,
    pub content_digests: Vec<String>,
}

/// Hex SHA-256 of an image's pixel payload.
pub fn pixel_digest(img: &GrayImage) -> String {
    hex::encode(Sha256::digest(img.pixels()))
}

impl EnrollmentManifest {
    pub fn params(&self) -> Result<SchemeParams> {
        SchemeParams::new(self.method, self.n, self.bit_transform, self.seeds.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::InvalidParams(format!(
                "unsupported manifest schema {}",
                self.schema
            )));
        }
        self.params()?;
        if self.share_files.len() != self.n || self.content_digests.len() != self.n {
            return Err(Error::InvalidParams(format!(
                "manifest lists {} share files and {} digests for n = {}",
                self.share_files.len(),
                self.content_digests.len(),
                self.n
            )));
        }
        if self.digest_algorithm != DIGEST_ALGORITHM {
            return Err(Error::InvalidParams(format!(
                "unsupported digest algorithm {:?}",
                self.digest_algorithm
            )));
        }
        if self.dims.width == 0 || self.dims.height == 0 {
            return Err(Error::InvalidParams(
                "manifest dims must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let m: Self = serde_json::from_str(text).map_err(|source| Error::Json {
            path: origin.to_path_buf(),
            source,
        })?;
        m.validate()?;
        Ok(m)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

fn ser_seeds<S: Serializer>(seeds: &[u64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(seeds.iter().map(u64::to_string))
}

fn de_seeds<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
    Vec::<String>::deserialize(d)?
        .iter()
        .map(|s| {
            s.parse::<u64>()
                .map_err(|_| serde::de::Error::custom(format!("seed {s:?} is not a decimal u64")))
        })
        .collect()
}
