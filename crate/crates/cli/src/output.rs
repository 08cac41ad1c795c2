use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub versions: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub outputs: Vec<OutputFile>,
}

/// Writes command outputs into one directory and records their hashes in
/// `manifest.json`. Nothing time- or host-dependent goes into the manifest.
pub struct OutputDir {
    dir: PathBuf,
    manifest: Manifest,
}

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

impl OutputDir {
    pub fn create(dir: &Path, command: &str, seed: Option<u64>) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        let versions = BTreeMap::from([
            (
                "hyperstab".to_string(),
                env!("CARGO_PKG_VERSION").to_string(),
            ),
            (
                "hyperstab-core".to_string(),
                hyperstab_core::VERSION.to_string(),
            ),
        ]);
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            manifest: Manifest {
                command: command.to_string(),
                inputs: BTreeMap::new(),
                versions,
                seed,
                outputs: Vec::new(),
            },
        })
    }

    pub fn input(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.manifest
            .inputs
            .insert(key.to_string(), value.to_string());
        self
    }

    pub fn write(&mut self, name: &str, contents: &str) -> io::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.manifest.outputs.push(OutputFile {
            file: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(path)
    }

    pub fn finish(mut self) -> io::Result<Manifest> {
        self.manifest.outputs.sort_by(|a, b| a.file.cmp(&b.file));
        let text =
            serde_json::to_string_pretty(&self.manifest).expect("manifest serializes") + "\n";
        fs::write(self.dir.join(MANIFEST_NAME), text)?;
        Ok(self.manifest)
    }
}
