//! Run manifests: one TOML sidecar `<output>.manifest.toml` per output file.
//!
//! ```toml
//! command = "evolve"                 # subcommand
//! argv = ["lrbec", "evolve", ...]    # command line as given
//! version = "0.1.0 (abc1234)"        # crate version and git describe
//! output = "track.tsv"
//! started = "2026-01-01T00:00:00Z"   # RFC 3339, UTC
//! finished = "2026-01-01T00:00:12Z"
//! workers = 8                        # worker-pool size
//!
//! [config]       # every flag after the config document was applied
//! [parameters]   # scaled parameters handed to the solvers
//! [termination]  # how the run ended and its summary numbers
//! ```

use std::fs::OpenOptions;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use toml::Table;

use crate::error::{usage, CliError, CliResult};

pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (", env!("LRBEC_GIT_DESCRIBE"), ")");

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub version: String,
    pub output: String,
    pub started: String,
    pub finished: String,
    pub workers: usize,
    pub config: Table,
    pub parameters: Table,
    pub termination: Table,
}

pub fn sidecar(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.toml");
    PathBuf::from(name)
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Refuses to start a run that would replace an existing file.
pub fn ensure_fresh(paths: &[&Path], overwrite: bool) -> CliResult<()> {
    if overwrite {
        return Ok(());
    }
    match paths.iter().find(|p| p.exists()) {
        Some(p) => Err(usage(format!("{} exists; pass --overwrite to replace it", p.display()))),
        None => Ok(()),
    }
}

impl RunManifest {
    pub fn write(&self, path: &Path, overwrite: bool) -> CliResult<()> {
        let text = toml::to_string_pretty(self).map_err(|e| usage(format!("manifest: {e}")))?;
        let mut opts = OpenOptions::new();
        opts.write(true);
        if overwrite {
            opts.create(true).truncate(true);
        } else {
            opts.create_new(true);
        }
        let mut file = opts.open(path).map_err(|e| match e.kind() {
            ErrorKind::AlreadyExists => usage(format!("{} exists; manifests are write-once", path.display())),
            _ => CliError::Io { path: path.to_owned(), source: e },
        })?;
        file.write_all(text.as_bytes()).map_err(CliError::io(path))
    }
}
