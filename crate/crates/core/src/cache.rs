//! On-disk JSON cache for group closures and moment tables.
//!
//! Enabled when `BERG_CACHE_DIR` is set. Entries are keyed by the SHA-256 of
//! their canonical inputs, so a changed input never reads a stale entry.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const CACHE_ENV: &str = "BERG_CACHE_DIR";

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    /// `None` unless `BERG_CACHE_DIR` is set and nonempty.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(Self::new)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Hex SHA-256 of the parts, each length-prefixed.
    pub fn key(kind: &str, parts: &[String]) -> String {
        let mut h = Sha256::new();
        for p in std::iter::once(kind).chain(parts.iter().map(String::as_str)) {
            h.update((p.len() as u64).to_le_bytes());
            h.update(p.as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, kind: &str, key: &str) -> PathBuf {
        self.root.join(kind).join(format!("{key}.json"))
    }

    /// Missing or unreadable entries are treated as misses.
    pub fn load<T: DeserializeOwned>(&self, kind: &str, key: &str) -> Option<T> {
        let s = std::fs::read_to_string(self.path(kind, key)).ok()?;
        serde_json::from_str(&s).ok()
    }

    /// Writes through a temporary file so readers never see partial entries.
    pub fn store<T: Serialize>(&self, kind: &str, key: &str, value: &T) -> Result<()> {
        let path = self.path(kind, key);
        let dir = path.parent().expect("cache path has a parent");
        std::fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{key}.{}.tmp", std::process::id()));
        std::fs::write(&tmp, serde_json::to_vec(value)?)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }
}
