//! Dataset discovery and image loading.
//!
//! * `orl-pgm`: `root/<subject>/<n>.pgm` (ORL faces: `s1/1.pgm` .. `s40/10.pgm`)
//! * `iitd-bmp`: `root/<subject>/<file>.bmp` (IIT Delhi iris layout)
//! * `flat`: every `.pgm` and `.bmp` directly under `root`
//!
//! Files are returned in lexicographic path order so corpus indices are
//! stable across runs and platforms.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use walkdir::WalkDir;

use crate::{bmp, pgm, Error, GrayImage, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    OrlPgm,
    IitdBmp,
    Flat,
}

impl DatasetKind {
    fn depth(self) -> usize {
        match self {
            DatasetKind::OrlPgm | DatasetKind::IitdBmp => 2,
            DatasetKind::Flat => 1,
        }
    }

    fn accepts(self, ext: &str) -> bool {
        match self {
            DatasetKind::OrlPgm => ext == "pgm",
            DatasetKind::IitdBmp => ext == "bmp",
            DatasetKind::Flat => ext == "pgm" || ext == "bmp",
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetKind::OrlPgm => "orl-pgm",
            DatasetKind::IitdBmp => "iitd-bmp",
            DatasetKind::Flat => "flat",
        })
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orl-pgm" => Ok(DatasetKind::OrlPgm),
            "iitd-bmp" => Ok(DatasetKind::IitdBmp),
            "flat" => Ok(DatasetKind::Flat),
            other => Err(Error::InvalidParams(format!(
                "unknown dataset kind {other:?} (expected orl-pgm, iitd-bmp or flat)"
            ))),
        }
    }
}

pub fn list_images(root: &Path, kind: DatasetKind) -> Result<Vec<PathBuf>> {
    if !root.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "dataset root is not a directory",
            ),
        ));
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(root)
        .min_depth(kind.depth())
        .max_depth(kind.depth())
        .sort_by_file_name()
    {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let ext = entry
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if ext.is_some_and(|e| kind.accepts(&e)) {
            files.push(entry.into_path());
        }
    }
    Ok(files)
}

/// Decodes a PGM or BMP from bytes, sniffing the magic number.
pub fn decode_image(bytes: &[u8]) -> Result<GrayImage> {
    match bytes {
        [b'B', b'M', ..] => bmp::load_bmp(bytes),
        [b'P', ..] => pgm::load_pgm(bytes),
        _ => Err(Error::Unsupported("not a PGM or BMP file".into())),
    }
}

pub fn load_image(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

pub fn save_pgm_file(path: &Path, img: &GrayImage) -> Result<()> {
    fs::write(path, pgm::save_pgm(img)).map_err(|e| Error::io(path, e))
}
