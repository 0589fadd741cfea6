//! Experiment files: a whole gen → compare → clusters pipeline in one TOML
//! document.
//!
//! ```toml
//! out = "results/desk"
//! seed = 1
//! instances = 30
//! side = 12
//! t = [1000, 10000, 100000]
//! tau = [1000]
//! samples = 1000
//! ```
//!
//! Each stage runs as its own subcommand in a subdirectory of `out`
//! (`instances`, `compare`, `clusters`) with seed `task_seed(seed, stage)`,
//! so every stage has a replayable manifest of its own.

use std::path::{Path, PathBuf};

use coverenc::rng::task_seed;
use serde::{Deserialize, Serialize};

use crate::args::RunArgs;
use crate::commands::{compare, configure_threads, execute, parse};
use crate::error::{CliError, CliResult};
use crate::manifest::{write_manifest, ManifestInfo, MANIFEST_FILE};
use crate::output::{format_list, read_text, OutputDir};

#[derive(Deserialize, Serialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub instances: usize,
    pub side: usize,
    pub t: Vec<u64>,
    pub tau: Vec<u64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    1000
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Parameter(format!("experiment file: {e}")))
    }

    /// Checks every parameter before anything runs.
    pub fn validate(&self) -> CliResult<()> {
        if self.instances == 0 {
            return Err(CliError::Parameter("instances must be at least 1".into()));
        }
        if self.side < 3 {
            return Err(CliError::Parameter(format!(
                "side = {} is below 3; periodic grids that small have parallel bonds",
                self.side
            )));
        }
        if self.samples == 0 {
            return Err(CliError::Parameter("samples must be at least 1".into()));
        }
        compare::pairs(&self.t, &self.tau)?;
        Ok(())
    }

    /// Argument vectors of the three stages.
    pub fn stages(&self, out: &Path, force: bool, threads: usize) -> Vec<Vec<String>> {
        let dir = |name: &str| out.join(name).display().to_string();
        let mut stages = vec![
            vec![
                "gen".into(),
                "--side".into(),
                self.side.to_string(),
                "--count".into(),
                self.instances.to_string(),
                "--seed".into(),
                task_seed(self.seed, 0).to_string(),
                "--out".into(),
                dir("instances"),
            ],
            vec![
                "compare".into(),
                "--instances".into(),
                dir("instances"),
                "--t".into(),
                format_list(&self.t),
                "--tau".into(),
                format_list(&self.tau),
                "--samples".into(),
                self.samples.to_string(),
                "--seed".into(),
                task_seed(self.seed, 1).to_string(),
                "--out".into(),
                dir("compare"),
            ],
            vec![
                "clusters".into(),
                "--states".into(),
                out.join("compare").join("states").display().to_string(),
                "--seed".into(),
                task_seed(self.seed, 2).to_string(),
                "--out".into(),
                dir("clusters"),
            ],
        ];
        for stage in &mut stages {
            if force {
                stage.push("--force".into());
            }
            if threads > 0 {
                stage.push("--threads".into());
                stage.push(threads.to_string());
            }
        }
        stages
    }
}

pub fn run(args: &RunArgs, argv: &[String]) -> CliResult<()> {
    let config = ExperimentConfig::parse(&read_text(&args.config)?)?;
    config.validate()?;
    let root = args
        .out
        .clone()
        .or_else(|| config.out.clone())
        .ok_or_else(|| {
            CliError::Parameter("no output directory: set `out` or pass --out".into())
        })?;
    configure_threads(args.threads);
    let mut out = OutputDir::create(&root, args.force)?;
    for (stage, name) in config.stages(&root, args.force, args.threads).iter().zip([
        "instances",
        "compare",
        "clusters",
    ]) {
        execute(&parse(stage)?.command, stage)?;
        out.record(&format!("{name}/{MANIFEST_FILE}"));
    }
    write_manifest(
        &mut out,
        ManifestInfo {
            command: "run",
            argv,
            master_seed: Some(config.seed),
            parameters: serde_json::to_value(&config).unwrap_or(serde_json::Value::Null),
            inputs: std::slice::from_ref(&args.config),
        },
    )?;
    Ok(())
}
