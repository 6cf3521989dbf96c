//! Atomic file outputs and input hashing.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use stlf_core::Error;

/// A set of files written all-or-nothing: contents are staged in memory
/// and flushed through temp-file + rename only once every producer has
/// succeeded.
#[derive(Default)]
pub struct OutputSet {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl OutputSet {
    pub fn add(&mut self, path: PathBuf, content: Vec<u8>) {
        self.files.push((path, content));
    }

    /// Writes every staged file via `<name>.tmp` + rename.
    pub fn commit(self) -> Result<(), Error> {
        for (path, content) in &self.files {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|source| Error::Io {
                    path: parent.to_path_buf(),
                    source,
                })?;
            }
            let file_name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "out".into());
            let tmp = path.with_file_name(format!(".{file_name}.tmp"));
            std::fs::write(&tmp, content).map_err(|source| Error::Io {
                path: tmp.clone(),
                source,
            })?;
            std::fs::rename(&tmp, path).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
        }
        Ok(())
    }
}

/// Hex SHA-256 of a file's bytes.
pub fn sha256_file(path: &Path) -> Result<String, Error> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
