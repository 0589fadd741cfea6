pub mod clusters;
pub mod compare;
pub mod gen;
pub mod ground_truth;
pub mod npp;
pub mod semigroup;
pub mod walk;

use clap::Parser;
use serde::Serialize;

use crate::args::{Cli, Command, Common};
use crate::config;
use crate::error::{CliError, CliResult};
use crate::manifest::{replay_argv, write_manifest, ManifestInfo};
use crate::output::OutputDir;

/// Runs a parsed command line; `argv` is what the manifest records.
pub fn execute(command: &Command, argv: &[String]) -> CliResult<()> {
    match command {
        Command::Replay(args) => {
            let argv = replay_argv(args)?;
            let cli = parse(&argv)?;
            execute(&cli.command, &argv)
        }
        Command::Run(args) => config::run(args, argv),
        _ => run_recorded(command, argv),
    }
}

pub fn parse(argv: &[String]) -> CliResult<Cli> {
    Cli::try_parse_from(std::iter::once("coverenc".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| CliError::Parameter(e.to_string()))
}

pub fn configure_threads(threads: usize) {
    if threads > 0 {
        // A second configuration in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn common(command: &Command) -> &Common {
    match command {
        Command::Gen(a) => &a.common,
        Command::Walk(a) => &a.common,
        Command::Compare(a) => &a.common,
        Command::Clusters(a) => &a.common,
        Command::Npp(a) => &a.common,
        Command::SemigroupCheck(a) => &a.common,
        Command::GroundTruth(a) => &a.common,
        Command::Replay(_) | Command::Run(_) => unreachable!("not a recorded command"),
    }
}

fn parameters<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}

/// Runs a single subcommand into its output directory and writes the
/// manifest next to its outputs.
fn run_recorded(command: &Command, argv: &[String]) -> CliResult<()> {
    let common = common(command);
    configure_threads(common.threads);
    let mut out = OutputDir::create(&common.out, common.force)?;
    let (inputs, params) = match command {
        Command::Gen(a) => (gen::run(a, &mut out)?, parameters(a)),
        Command::Walk(a) => (walk::run(a, &mut out)?, parameters(a)),
        Command::Compare(a) => (compare::run(a, &mut out)?, parameters(a)),
        Command::Clusters(a) => (clusters::run(a, &mut out)?, parameters(a)),
        Command::Npp(a) => (npp::run(a, &mut out)?, parameters(a)),
        Command::SemigroupCheck(a) => (semigroup::run(a, &mut out)?, parameters(a)),
        Command::GroundTruth(a) => (ground_truth::run(a, &mut out)?, parameters(a)),
        Command::Replay(_) | Command::Run(_) => unreachable!("dispatched by execute"),
    };
    write_manifest(
        &mut out,
        ManifestInfo {
            command: command.name(),
            argv,
            master_seed: Some(common.seed),
            parameters: params,
            inputs: &inputs,
        },
    )?;
    Ok(())
}
