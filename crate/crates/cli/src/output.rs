//! Exit-code classification, atomic file output and run manifests.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

impl From<zipfbpe::Error> for Failure {
    fn from(err: zipfbpe::Error) -> Self {
        use zipfbpe::Error::*;
        match err {
            InvalidTarget { .. } | InvalidConfig(_) | ModeMismatch { .. } | UnsupportedMode(_) => {
                Failure::usage(err.to_string())
            }
            _ => Failure::data(err.to_string()),
        }
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

/// Loads a vocabulary file; any failure is a usage error.
pub fn load_vocab(path: &Path) -> CliResult<zipfbpe::Vocabulary> {
    zipfbpe::Vocabulary::load(path)
        .map_err(|e| Failure::usage(format!("cannot load vocabulary {}: {e}", path.display())))
}

/// Writes `contents` next to `path` and renames it into place, so readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: io::Error| Failure::data(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let fail = |e: io::Error| Failure::data(format!("cannot read {}: {e}", path.display()));
    let mut file = File::open(path).map_err(fail)?;
    let mut hasher = Sha256::new();
    io::copy(&mut file, &mut hasher).map_err(fail)?;
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Everything needed to reproduce a run. Output paths are recorded by file
/// name only, so moving the output directory keeps the manifest valid.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub version: &'static str,
    pub corpus_sha256: String,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &'static str, corpus: &Path, config: serde_json::Value) -> CliResult<Self> {
        Ok(RunManifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            corpus_sha256: sha256_file(corpus)?,
            config,
            outputs: Vec::new(),
        })
    }

    pub fn add_output(&mut self, path: &Path) {
        let name = path.file_name().map_or_else(
            || path.display().to_string(),
            |n| n.to_string_lossy().into_owned(),
        );
        self.outputs.push(name);
    }

    pub fn write(&self, path: &Path) -> CliResult {
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        write_atomic(path, json.as_bytes())
    }
}

pub fn default_manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}
