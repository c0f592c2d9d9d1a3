//! On-disk store of census counts.
//!
//! One JSON document: `{"version": 1, "entries": [{"n", "q", "m", "count", "modulus", "method"}]}`
//! with counts as decimal strings and entries sorted by `(n, q, m)`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::census::{CensusMethod, ImageCensus};
use crate::error::{Error, Result};
use crate::gf::FieldTable;

pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub n: usize,
    pub q: usize,
    pub m: u64,
    pub count: String,
    pub modulus: Vec<u32>,
    pub method: CensusMethod,
}

impl CacheEntry {
    pub fn from_census(census: &ImageCensus, field: &FieldTable) -> Self {
        CacheEntry {
            n: census.n,
            q: census.q,
            m: census.m,
            count: census.count.to_string(),
            modulus: field.modulus().to_vec(),
            method: census.method,
        }
    }

    pub fn count(&self) -> Result<BigUint> {
        self.count
            .parse()
            .map_err(|_| Error::CacheFormat(format!("count {:?} is not a decimal integer", self.count)))
    }
}

#[derive(Serialize, Deserialize)]
struct Document {
    version: u32,
    entries: Vec<CacheEntry>,
}

#[derive(Debug, Clone, Default)]
pub struct CensusCache {
    path: Option<PathBuf>,
    entries: BTreeMap<(usize, usize, u64), CacheEntry>,
}

impl CensusCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens the cache at `path`; a missing file is an empty cache.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut cache = CensusCache {
            path: Some(path.clone()),
            entries: BTreeMap::new(),
        };
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e.into()),
        };
        let doc: Document = serde_json::from_str(&text)?;
        if doc.version != CACHE_VERSION {
            return Err(Error::CacheFormat(format!("unsupported cache version {}", doc.version)));
        }
        for e in doc.entries {
            e.count()?;
            cache.entries.insert((e.n, e.q, e.m), e);
        }
        Ok(cache)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = Document {
            version: CACHE_VERSION,
            entries: self.entries.values().cloned().collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    /// Writes through a sibling temporary file and a rename.
    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(self.to_json()?.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// The stored count, ignoring entries built over a different field presentation.
    pub fn get(&self, n: usize, field: &FieldTable, m: u64) -> Option<BigUint> {
        self.entries
            .get(&(n, field.order(), m))
            .filter(|e| e.modulus == field.modulus())
            .and_then(|e| e.count().ok())
    }

    pub fn insert(&mut self, entry: CacheEntry) {
        self.entries.insert((entry.n, entry.q, entry.m), entry);
    }

    pub fn entries(&self) -> impl Iterator<Item = &CacheEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Drops entries matching `doomed`; returns how many went.
    pub fn prune(&mut self, mut doomed: impl FnMut(&CacheEntry) -> bool) -> usize {
        let before = self.entries.len();
        self.entries.retain(|_, e| !doomed(e));
        before - self.entries.len()
    }

    /// Drops entries whose field is unsupported or whose modulus is not the current one.
    pub fn prune_stale(&mut self) -> usize {
        self.prune(|e| match FieldTable::for_order(e.q as u64) {
            Ok(f) => f.modulus() != e.modulus.as_slice(),
            Err(_) => true,
        })
    }
}
