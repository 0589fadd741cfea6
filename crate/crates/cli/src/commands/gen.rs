use std::path::PathBuf;

use coverenc::io::write_instance;
use coverenc::rng::task_seed;
use coverenc::spinglass::gen_grid_instance;

use crate::args::GenArgs;
use crate::error::{CliError, CliResult};
use crate::output::OutputDir;

/// `instance_<k>.json` for k = 0..count, instance k seeded with
/// `task_seed(seed, k)`.
pub fn run(args: &GenArgs, out: &mut OutputDir) -> CliResult<Vec<PathBuf>> {
    if args.count == 0 {
        return Err(CliError::Parameter("--count must be at least 1".into()));
    }
    let width = (args.count - 1).to_string().len().max(3);
    for k in 0..args.count {
        let inst = gen_grid_instance(args.side, task_seed(args.common.seed, k as u64))?;
        out.write(
            &format!("instance_{k:0width$}.json"),
            &write_instance(&inst),
        )?;
    }
    Ok(Vec::new())
}
