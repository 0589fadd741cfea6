//! Run manifests: everything needed to re-execute a run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};

use crate::args::{Cli, ReplayArgs};
use crate::error::{CliError, CliResult};
use crate::output::{read_text, sha256_file, OutputDir};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name.
    pub command_line: Vec<String>,
    pub working_directory: String,
    pub master_seed: Option<u64>,
    pub rng_algorithm: String,
    /// SHA-256 of every input file, keyed by path as given.
    pub inputs: BTreeMap<String, String>,
    pub parameters: serde_json::Value,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
    pub timestamp: String,
}

pub struct ManifestInfo<'a> {
    pub command: &'a str,
    pub argv: &'a [String],
    pub master_seed: Option<u64>,
    pub parameters: serde_json::Value,
    pub inputs: &'a [PathBuf],
}

pub fn write_manifest(out: &mut OutputDir, info: ManifestInfo<'_>) -> CliResult<RunManifest> {
    let mut inputs = BTreeMap::new();
    for path in info.inputs {
        inputs.insert(path.display().to_string(), sha256_file(path)?);
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: info.command.to_string(),
        command_line: info.argv.to_vec(),
        working_directory: std::env::current_dir()
            .map(|d| d.display().to_string())
            .unwrap_or_default(),
        master_seed: info.master_seed,
        rng_algorithm: coverenc::rng::RNG_ALGORITHM.to_string(),
        inputs,
        parameters: info.parameters,
        outputs: out.written().to_vec(),
        timestamp: chrono::Utc::now().to_rfc3339(),
    };
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Runtime(format!("serializing manifest: {e}")))?;
    out.write(MANIFEST_FILE, &(text + "\n"))?;
    Ok(manifest)
}

pub fn read_manifest(path: &Path) -> CliResult<RunManifest> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::input(path, e))
}

/// Re-executes a recorded run after checking that its inputs are unchanged.
/// Returns the argument vector that was executed.
pub fn replay_argv(args: &ReplayArgs) -> CliResult<Vec<String>> {
    let manifest = read_manifest(&args.manifest)?;
    for (path, digest) in &manifest.inputs {
        let current = sha256_file(Path::new(path))?;
        if &current != digest {
            return Err(CliError::Runtime(format!(
                "input {path} changed since the recorded run (sha256 {current}, recorded {digest})"
            )));
        }
    }
    let mut argv = manifest.command_line.clone();
    if let Some(out) = &args.out {
        argv.push("--out".into());
        argv.push(out.display().to_string());
    }
    if args.force {
        argv.push("--force".into());
    }
    // Reject manifests whose command line no longer parses before running.
    Cli::try_parse_from(std::iter::once("coverenc".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| CliError::Parameter(format!("recorded command line: {e}")))?;
    Ok(argv)
}
