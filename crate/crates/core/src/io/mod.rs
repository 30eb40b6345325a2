//! Files and synthetic data.

pub mod config;
pub mod csv;
pub mod report;
pub mod synth;

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub use config::ExperimentConfig;
pub use csv::{ingest_bh_csv, write_bh_csv};
pub use report::ExperimentReport;
pub use synth::{generate_synthetic, sinusoidal_field, steady_state_magnetization};

/// Writes `bytes` through a temporary file in the target directory and
/// renames it into place. With `clobber == false` an existing target is an error.
pub fn write_atomic(path: &Path, bytes: &[u8], clobber: bool) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    let persisted = if clobber {
        tmp.persist(path).map(|_| ())
    } else {
        tmp.persist_noclobber(path).map(|_| ())
    };
    persisted.map_err(|e| Error::io(path, e.error))
}

/// Writes `<dir>/<stem>.<extension>` without replacing anything: when the name
/// is taken, `<stem>.1`, `<stem>.2`, ... are tried in turn. Returns the path
/// written and the stem used.
pub fn write_unique(dir: &Path, stem: &str, extension: &str, bytes: &[u8]) -> Result<(PathBuf, String)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for attempt in 0usize.. {
        let used = if attempt == 0 {
            stem.to_string()
        } else {
            format!("{stem}.{attempt}")
        };
        let path = dir.join(format!("{used}.{extension}"));
        match write_atomic(&path, bytes, false) {
            Ok(()) => return Ok((path, used)),
            Err(Error::Io { source, .. }) if source.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e),
        }
    }
    unreachable!("unbounded attempt counter")
}
