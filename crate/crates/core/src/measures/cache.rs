//! On-disk cache of limit measures, keyed by a SHA-256 digest of the inputs
//! that determine them.
//!
//! A cache file holds one JSON header line followed by `cell,mass` rows in
//! shortlex order. Files are written to a temporary name and renamed.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::DiscreteBoundaryMeasure;
use crate::error::{Error, Result};
use crate::word::GroupWord;

const FORMAT: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub format: u32,
    pub key: String,
    pub rank: u8,
    pub depth: usize,
    pub error: f64,
    /// Free-form description of the inputs, stored for inspection only.
    pub inputs: serde_json::Value,
}

/// Hex SHA-256 of the canonical JSON serialization of `inputs`.
pub fn cache_key(inputs: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(inputs).expect("JSON values serialize");
    hex::encode(Sha256::digest(&bytes))
}

pub fn cache_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.csv"))
}

/// Loads a cached measure. A missing file is `Ok(None)`; a file whose header
/// does not match the key is an error.
pub fn load(dir: &Path, key: &str) -> Result<Option<DiscreteBoundaryMeasure>> {
    let path = cache_path(dir, key);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut lines = text.lines();
    let header: CacheHeader = serde_json::from_str(lines.next().unwrap_or(""))
        .map_err(|e| Error::Parse(format!("{}: bad cache header: {e}", path.display())))?;
    if header.format != FORMAT || header.key != key {
        return Err(Error::Parse(format!(
            "{}: cache header does not match key {key}",
            path.display()
        )));
    }
    let mut cells = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let (cell, mass) = line.split_once(',').ok_or_else(|| {
            Error::Parse(format!("{}:{}: expected cell,mass", path.display(), i + 2))
        })?;
        let w: GroupWord = cell.parse()?;
        let m: f64 = mass
            .parse()
            .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), i + 2)))?;
        cells.insert(w, m);
    }
    DiscreteBoundaryMeasure::from_cells(header.rank, header.depth, cells, header.error).map(Some)
}

/// Writes a measure atomically and returns the final path.
pub fn store(
    dir: &Path,
    key: &str,
    inputs: serde_json::Value,
    measure: &DiscreteBoundaryMeasure,
) -> Result<PathBuf> {
    use super::CellMeasure;
    fs::create_dir_all(dir)?;
    let header = CacheHeader {
        format: FORMAT,
        key: key.to_string(),
        rank: measure.rank(),
        depth: measure.depth(),
        error: measure.mass_error(),
        inputs,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let f = tmp.as_file_mut();
        let mut out = std::io::BufWriter::new(f);
        writeln!(
            out,
            "{}",
            serde_json::to_string(&header).expect("header serializes")
        )?;
        for (w, m) in measure.cells(measure.depth()).expect("own depth exists") {
            writeln!(out, "{w},{m:.16e}")?;
        }
        out.flush()?;
    }
    let path = cache_path(dir, key);
    tmp.persist(&path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(path)
}
