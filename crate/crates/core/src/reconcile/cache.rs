//! On-disk response cache: `<root>/<namespace>/<sha256-of-query>.json`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::sha256_hex;

/// What a cache file holds: the query it answers and the raw service payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub query: String,
    pub response: Value,
}

#[derive(Debug)]
pub struct DiskCache {
    root: PathBuf,
    write_lock: Mutex<()>,
}

impl DiskCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self {
            root: root.into(),
            write_lock: Mutex::new(()),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, namespace: &str, query: &str) -> PathBuf {
        self.root
            .join(namespace)
            .join(format!("{}.json", sha256_hex(query)))
    }

    pub fn get(&self, namespace: &str, query: &str) -> io::Result<Option<CacheRecord>> {
        match fs::read_to_string(self.path_for(namespace, query)) {
            Ok(text) => serde_json::from_str(&text)
                .map(Some)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Writes through a temp file and rename so readers never see partial files.
    pub fn put(&self, namespace: &str, query: &str, response: &Value) -> io::Result<PathBuf> {
        let path = self.path_for(namespace, query);
        let dir = path.parent().expect("cache path has a parent");
        let _guard = self.write_lock.lock().expect("cache lock poisoned");
        fs::create_dir_all(dir)?;
        let record = CacheRecord {
            query: query.to_string(),
            response: response.clone(),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        serde_json::to_writer_pretty(&mut tmp, &record)?;
        tmp.write_all(b"\n")?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(path)
    }

    /// All records of one namespace, sorted by file name.
    pub fn entries(&self, namespace: &str) -> io::Result<Vec<(PathBuf, CacheRecord)>> {
        let dir = self.root.join(namespace);
        let mut paths: Vec<PathBuf> = match fs::read_dir(&dir) {
            Ok(rd) => rd
                .filter_map(Result::ok)
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect(),
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e),
        };
        paths.sort();
        paths
            .into_iter()
            .map(|p| {
                let text = fs::read_to_string(&p)?;
                let record = serde_json::from_str(&text)
                    .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
                Ok((p, record))
            })
            .collect()
    }

    /// Removes one namespace, or everything when `namespace` is `None`.
    /// Returns the number of files removed.
    pub fn clear(&self, namespace: Option<&str>) -> io::Result<usize> {
        let _guard = self.write_lock.lock().expect("cache lock poisoned");
        let dirs: Vec<PathBuf> = match namespace {
            Some(ns) => vec![self.root.join(ns)],
            None => match fs::read_dir(&self.root) {
                Ok(rd) => rd
                    .filter_map(Result::ok)
                    .map(|e| e.path())
                    .filter(|p| p.is_dir())
                    .collect(),
                Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
                Err(e) => return Err(e),
            },
        };
        let mut removed = 0;
        for dir in dirs {
            let rd = match fs::read_dir(&dir) {
                Ok(rd) => rd,
                Err(e) if e.kind() == io::ErrorKind::NotFound => continue,
                Err(e) => return Err(e),
            };
            for entry in rd.filter_map(Result::ok) {
                let p = entry.path();
                if p.extension().is_some_and(|x| x == "json") {
                    fs::remove_file(&p)?;
                    removed += 1;
                }
            }
        }
        Ok(removed)
    }
}
