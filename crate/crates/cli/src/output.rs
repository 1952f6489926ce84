//! Output files that are removed again unless the command completes, and
//! the run manifest written last.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rgm::RgmError;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

fn digest(path: String, bytes: &[u8]) -> FileDigest {
    FileDigest {
        path,
        bytes: bytes.len() as u64,
        sha256: hex::encode(Sha256::digest(bytes)),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Model(RgmError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Reads input files and remembers their digests.
#[derive(Debug, Default)]
pub struct Inputs {
    files: Vec<FileDigest>,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> CliResult<String> {
        let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
        self.files.push(digest(path.display().to_string(), &bytes));
        String::from_utf8(bytes).map_err(|_| {
            CliError::Model(RgmError::Format {
                path: path.display().to_string(),
                reason: "not valid UTF-8".into(),
            })
        })
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    /// Wall-clock seconds; the only field that differs between reruns.
    pub duration_seconds: f64,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

/// Files written by one command. Dropping it without [`Output::finish`]
/// deletes everything it wrote, and the directory too if it created it.
pub struct Output {
    root: PathBuf,
    manifest_name: String,
    created_root: bool,
    written: Vec<FileDigest>,
    started: Instant,
    done: bool,
}

impl Output {
    /// An output directory holding `manifest.json`.
    pub fn dir(root: &Path) -> CliResult<Self> {
        Self::open(root, "manifest.json".into())
    }

    /// A single output file with a `<name>.manifest.json` sidecar.
    pub fn file(path: &Path) -> CliResult<(Self, String)> {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| CliError::Usage(format!("output path '{}' has no file name", path.display())))?
            .to_string();
        let parent = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        Ok((Self::open(parent, format!("{name}.manifest.json"))?, name))
    }

    fn open(root: &Path, manifest_name: String) -> CliResult<Self> {
        let created_root = !root.exists();
        fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
        Ok(Output {
            root: root.to_path_buf(),
            manifest_name,
            created_root,
            written: Vec::new(),
            started: Instant::now(),
            done: false,
        })
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> CliResult<()> {
        let bytes = bytes.as_ref();
        let path = self.root.join(name);
        // Record before writing so a half-written file is still cleaned up.
        self.written.push(digest(name.to_string(), bytes));
        fs::write(&path, bytes).map_err(|e| io_err(&path, e))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("output serializes");
        text.push('\n');
        self.write(name, text)
    }

    pub fn finish(
        mut self,
        command: &str,
        seed: Option<u64>,
        config: serde_json::Value,
        inputs: Inputs,
    ) -> CliResult<()> {
        let manifest = RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            duration_seconds: self.started.elapsed().as_secs_f64(),
            inputs: inputs.files,
            outputs: self.written.clone(),
        };
        let name = self.manifest_name.clone();
        self.write_json(&name, &manifest)?;
        self.done = true;
        Ok(())
    }
}

impl Drop for Output {
    fn drop(&mut self) {
        if self.done {
            return;
        }
        if self.created_root {
            let _ = fs::remove_dir_all(&self.root);
        } else {
            for f in &self.written {
                let _ = fs::remove_file(self.root.join(&f.path));
            }
        }
    }
}
