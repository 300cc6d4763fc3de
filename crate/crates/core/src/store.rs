//! On-disk cache of `M_k` and the optional OEIS cross-check file.
//!
//! Layout under the cache root:
//!
//! ```text
//! mk/<k>.jsonl      one family per line, in enumeration order
//! mk/<k>.meta.json  count, wall time, version and sha256 digests
//! mk/<k>.lock       present while a writer holds the cache
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumerate::{enumerate_mlcifs_with, EnumConfig};
use crate::error::{integrity_err, Error, Result};
use crate::family::Family;

pub const CACHE_ENV: &str = "MLCIF_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".mlcif-cache";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheMeta {
    pub k: u32,
    pub count: usize,
    pub wall_time_secs: f64,
    pub version: String,
    /// Digest of the whole `.jsonl` file.
    pub digest: String,
    /// Digest of each line, without its newline.
    pub line_digests: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

/// Removes the lock file when the writer finishes, successfully or not.
struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

fn serialize(families: &[Family]) -> String {
    families.iter().map(|f| f.to_json_line() + "\n").collect()
}

impl Cache {
    pub fn at(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    /// `$MLCIF_CACHE_DIR`, or `./.mlcif-cache`.
    pub fn from_env() -> Self {
        Self::at(
            std::env::var_os(CACHE_ENV)
                .map_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR), PathBuf::from),
        )
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dir(&self) -> PathBuf {
        self.root.join("mk")
    }

    pub fn mk_path(&self, k: u32) -> PathBuf {
        self.dir().join(format!("{k}.jsonl"))
    }

    pub fn meta_path(&self, k: u32) -> PathBuf {
        self.dir().join(format!("{k}.meta.json"))
    }

    fn lock_path(&self, k: u32) -> PathBuf {
        self.dir().join(format!("{k}.lock"))
    }

    fn lock(&self, k: u32) -> Result<LockGuard> {
        fs::create_dir_all(self.dir())?;
        let path = self.lock_path(k);
        match fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
        {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id())?;
                Ok(LockGuard(path))
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Usage(format!(
                "the cache for k = {k} is held by another writer; remove {} if that writer is gone",
                path.display()
            ))),
            Err(e) => Err(e.into()),
        }
    }

    /// Writes `M_k` and its meta file, replacing any previous entry.
    pub fn write_mk(&self, k: u32, families: &[Family], wall_time_secs: f64) -> Result<CacheMeta> {
        if let Some(f) = families.iter().find(|f| f.k() != k || f.n() != 2 * k) {
            return Err(Error::Param(format!(
                "{f} does not belong in the cache for k = {k}"
            )));
        }
        let _guard = self.lock(k)?;
        let body = serialize(families);
        let meta = CacheMeta {
            k,
            count: families.len(),
            wall_time_secs,
            version: VERSION.to_string(),
            digest: sha256_hex(body.as_bytes()),
            line_digests: body.lines().map(|l| sha256_hex(l.as_bytes())).collect(),
        };
        let write_atomic = |path: PathBuf, contents: &[u8]| -> Result<()> {
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, contents)?;
            fs::rename(&tmp, &path)?;
            Ok(())
        };
        write_atomic(self.mk_path(k), body.as_bytes())?;
        write_atomic(
            self.meta_path(k),
            serde_json::to_string_pretty(&meta)?.as_bytes(),
        )?;
        Ok(meta)
    }

    pub fn read_meta(&self, k: u32) -> Result<Option<CacheMeta>> {
        let path = self.meta_path(k);
        if !path.exists() {
            return Ok(None);
        }
        let meta: CacheMeta = serde_json::from_str(&fs::read_to_string(&path)?)
            .map_err(|e| integrity_err!("{} is not a valid meta file: {e}", path.display()))?;
        Ok(Some(meta))
    }

    /// Reads `M_k` back, checking every line against its recorded digest.
    /// `None` if nothing is cached for `k`.
    pub fn read_mk(&self, k: u32) -> Result<Option<Vec<Family>>> {
        let path = self.mk_path(k);
        let meta = match (path.exists(), self.read_meta(k)?) {
            (false, None) => return Ok(None),
            (true, Some(m)) => m,
            (true, None) => return Err(integrity_err!("{} has no meta file", path.display())),
            (false, Some(_)) => return Err(integrity_err!("{} is missing", path.display())),
        };
        let body = fs::read_to_string(&path)?;
        let lines: Vec<&str> = body.lines().collect();
        if meta.k != k || lines.len() != meta.count || meta.line_digests.len() != meta.count {
            return Err(integrity_err!(
                "{} has {} lines but its meta file records {} families",
                path.display(),
                lines.len(),
                meta.count
            ));
        }
        let mut out = Vec::with_capacity(lines.len());
        for (i, (line, digest)) in lines.iter().zip(&meta.line_digests).enumerate() {
            let bad = |why: String| integrity_err!("{} line {}: {why}", path.display(), i + 1);
            if sha256_hex(line.as_bytes()) != *digest {
                return Err(bad("contents do not match the recorded digest".into()));
            }
            let f = Family::from_json_line(line).map_err(|e| bad(e.to_string()))?;
            if f.k() != k || f.n() != 2 * k {
                return Err(bad(format!(
                    "{f} is not a family of {k}-sets on [{}]",
                    2 * k
                )));
            }
            out.push(f);
        }
        if sha256_hex(body.as_bytes()) != meta.digest {
            return Err(integrity_err!(
                "{} does not match its recorded file digest",
                path.display()
            ));
        }
        Ok(Some(out))
    }

    /// Cached `M_k` if present, otherwise enumerated and stored. The flag
    /// says whether the cache was used.
    pub fn load_or_enumerate(&self, k: u32, cfg: &EnumConfig) -> Result<(Vec<Family>, bool)> {
        if let Some(mk) = self.read_mk(k)? {
            return Ok((mk, true));
        }
        let start = Instant::now();
        let mk = enumerate_mlcifs_with(k, cfg)?;
        self.write_mk(k, &mk, start.elapsed().as_secs_f64())?;
        Ok((mk, false))
    }
}

/// Writes `M_k` and reads it back; true iff the serializations match byte
/// for byte.
pub fn cache_roundtrip(cache: &Cache, k: u32) -> Result<bool> {
    let start = Instant::now();
    let mk = enumerate_mlcifs_with(k, &EnumConfig::default())?;
    cache.write_mk(k, &mk, start.elapsed().as_secs_f64())?;
    let back = cache
        .read_mk(k)?
        .ok_or_else(|| integrity_err!("cache entry for k = {k} vanished"))?;
    Ok(serialize(&back) == serialize(&mk)
        && fs::read_to_string(cache.mk_path(k))? == serialize(&mk))
}

/// Externally supplied `|M_k|` values.
///
/// Accepts either an OEIS b-file (`k value` per line) or a bare list of
/// values separated by whitespace, read as `k = 1, 2, ...`. Lines starting
/// with `#` are ignored. A missing file is `None`.
pub fn read_a300099(path: &Path) -> Result<Option<BTreeMap<u32, u128>>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path)?;
    let rows: Vec<Vec<&str>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().collect())
        .collect();
    let num = |s: &str, line: usize| {
        s.parse::<u128>().map_err(|_| {
            integrity_err!(
                "{} line {line}: '{s}' is not a nonnegative integer",
                path.display()
            )
        })
    };
    let mut out = BTreeMap::new();
    if !rows.is_empty() && rows.iter().all(|r| r.len() == 2) {
        for (i, r) in rows.iter().enumerate() {
            let k = num(r[0], i + 1)?;
            let k = u32::try_from(k).map_err(|_| {
                integrity_err!("{} line {}: index too large", path.display(), i + 1)
            })?;
            out.insert(k, num(r[1], i + 1)?);
        }
    } else {
        for (i, v) in rows.iter().flatten().enumerate() {
            out.insert(i as u32 + 1, num(v, 0)?);
        }
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_stable_digest() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path().join("fresh"));
        assert!(cache.read_mk(2).unwrap().is_none());
        assert!(cache_roundtrip(&cache, 2).unwrap());
        let body = fs::read_to_string(cache.mk_path(2)).unwrap();
        assert_eq!(body.lines().count(), 2);
        let first = cache.read_meta(2).unwrap().unwrap().digest;
        assert!(cache_roundtrip(&cache, 2).unwrap());
        assert_eq!(cache.read_meta(2).unwrap().unwrap().digest, first);
        assert!(!cache.lock_path(2).exists());
    }

    #[test]
    fn tampering_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path());
        cache_roundtrip(&cache, 3).unwrap();
        let path = cache.mk_path(3);
        let body = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = body.lines().map(String::from).collect();
        lines[1] = lines[1].replace("[1,", "[2,");
        fs::write(&path, lines.join("\n") + "\n").unwrap();
        let err = cache.read_mk(3).unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn lock_blocks_second_writer() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path());
        let _held = cache.lock(2).unwrap();
        assert!(cache.write_mk(2, &[], 0.0).is_err());
    }

    #[test]
    fn oeis_file_forms() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        assert!(read_a300099(&p).unwrap().is_none());
        fs::write(&p, "# values\n1 2 6\n").unwrap();
        assert_eq!(
            read_a300099(&p).unwrap().unwrap(),
            BTreeMap::from([(1, 1), (2, 2), (3, 6)])
        );
        fs::write(&p, "2 2\n3 6\n").unwrap();
        assert_eq!(
            read_a300099(&p).unwrap().unwrap(),
            BTreeMap::from([(2, 2), (3, 6)])
        );
        fs::write(&p, "1 x\n").unwrap();
        assert!(read_a300099(&p).is_err());
    }
}
