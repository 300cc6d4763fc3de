//! Optional TOML configuration. Precedence, highest first: command-line
//! flags, environment variables, this file, built-in defaults.
//!
//! ```toml
//! threads = 4
//! cache_dir = ".mlcif-cache"
//! oeis = "data/a300099.txt"
//! samples = 100
//! seed = 7
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "MLCIF_THREADS";

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub oeis: Option<PathBuf>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Usage(format!("bad config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// `flag`, else `$MLCIF_THREADS`, else the file; `None` means use the
    /// hardware parallelism.
    pub fn threads(&self, flag: Option<usize>) -> Result<Option<usize>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => {
                v.trim().parse().map(Some).map_err(|_| {
                    Error::Usage(format!("{THREADS_ENV} = '{v}' is not a thread count"))
                })
            }
            Err(_) => Ok(self.threads),
        }
    }
}
