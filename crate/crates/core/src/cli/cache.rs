//! On-disk result cache: one JSON file mapping a stable hash of
//! (quantity, key, radius, precision profile) to the computed value.
//!
//! The file is only trusted if it parses, was written for the same precision
//! profile, and every entry's hash matches its contents; otherwise it is
//! ignored and rewritten at the end of the run.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::norms::{CacheEntry, NormEngine};

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    format: u32,
    profile_digest: String,
    entries: BTreeMap<String, CacheEntry>,
}

fn entry_hash(entry: &CacheEntry, profile_digest: &str) -> String {
    hex::encode(Sha256::digest(format!(
        "{}|{profile_digest}",
        entry.identity()
    )))
}

/// Loads usable entries into the engine. Returns how many were accepted, or
/// a reason the file was ignored.
pub fn load(
    path: &Path,
    profile_digest: &str,
    engine: &NormEngine,
) -> std::result::Result<usize, String> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(format!("unreadable: {e}")),
    };
    let file: CacheFile = serde_json::from_str(&text).map_err(|e| format!("corrupt: {e}"))?;
    if file.format != FORMAT_VERSION || file.profile_digest != profile_digest {
        return Err("written for a different precision profile".to_owned());
    }
    let valid = file
        .entries
        .into_iter()
        .filter(|(hash, e)| *hash == entry_hash(e, profile_digest))
        .map(|(_, e)| e);
    Ok(engine.import(valid))
}

/// Writes every memoised value, replacing the file atomically.
pub fn save(path: &Path, profile_digest: &str, engine: &NormEngine) -> Result<()> {
    let entries = engine
        .export()
        .into_iter()
        .map(|e| (entry_hash(&e, profile_digest), e))
        .collect();
    let file = CacheFile {
        format: FORMAT_VERSION,
        profile_digest: profile_digest.to_owned(),
        entries,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_vec(&file)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Removes the cache file; a missing file is not an error.
pub fn clear(path: &Path) -> Result<bool> {
    match fs::remove_file(path) {
        Ok(()) => Ok(true),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(false),
        Err(e) => Err(e.into()),
    }
}
