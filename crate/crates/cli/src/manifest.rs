//! Run manifests: what was run, on which inputs, and the hash of every
//! output. Wall-clock time is recorded but kept out of every hash.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exit::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: u32,
    pub command: String,
    pub config: Option<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<OutputEntry>,
    pub seed: u64,
    pub version: String,
    pub threads: usize,
    pub wall_clock_s: f64,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Collects outputs for one command run inside `dir`.
pub struct Recorder {
    dir: PathBuf,
    command: &'static str,
    config: Option<String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    seed: u64,
    start: Instant,
}

impl Recorder {
    pub fn new(dir: &Path, command: &'static str, seed: u64) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            config: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed,
            start: Instant::now(),
        })
    }

    pub fn config(&mut self, path: &Path) {
        self.config = Some(path.display().to_string());
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }

    /// Path of an output file; it is hashed when the manifest is written.
    pub fn output(&mut self, name: &str) -> PathBuf {
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.to_string());
        }
        self.dir.join(name)
    }

    pub fn finish(self) -> Result<RunManifest, CliError> {
        let outputs = self
            .outputs
            .iter()
            .map(|name| {
                Ok(OutputEntry {
                    path: name.clone(),
                    sha256: sha256_file(&self.dir.join(name))?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let manifest = RunManifest {
            schema: SCHEMA,
            command: self.command.to_string(),
            config: self.config,
            inputs: self.inputs,
            outputs,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads: rayon::current_num_threads(),
            wall_clock_s: self.start.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let path = self.dir.join(MANIFEST_FILE);
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest, CliError> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let m: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if m.schema != SCHEMA {
        return Err(CliError::input(format!(
            "{}: unsupported schema {} (expected {SCHEMA})",
            path.display(),
            m.schema
        )));
    }
    Ok(m)
}

/// Output entries whose current hash differs from the recorded one.
pub fn verify(dir: &Path, manifest: &RunManifest) -> Result<Vec<String>, CliError> {
    let mut bad = Vec::new();
    for o in &manifest.outputs {
        let path = dir.join(&o.path);
        match sha256_file(&path) {
            Ok(h) if h == o.sha256 => {}
            _ => bad.push(o.path.clone()),
        }
    }
    Ok(bad)
}
