use std::path::PathBuf;

use coverenc::npp::brute_force_npp;
use coverenc::spinglass::brute_force_ground_state;
use serde_json::json;

use crate::args::GroundTruthArgs;
use crate::commands::walk::pretty;
use crate::error::CliResult;
use crate::output::{load_instance, load_numbers, OutputDir};

/// Writes `ground_truth.json` with the exhaustive optimum.
pub fn run(args: &GroundTruthArgs, out: &mut OutputDir) -> CliResult<Vec<PathBuf>> {
    let (doc, input) = match (&args.source.instance, &args.source.numbers) {
        (Some(path), _) => {
            let inst = load_instance(path)?;
            let (x, energy) = brute_force_ground_state(&inst)?;
            let doc = json!({
                "kind": "spin-glass",
                "n_sites": inst.n_sites(),
                "energy": energy,
                "spins": x.spins(),
            });
            (doc, path.clone())
        }
        (None, Some(path)) => {
            let inst = load_numbers(path)?;
            let (discrepancy, s) = brute_force_npp(&inst)?;
            let doc = json!({
                "kind": "number-partitioning",
                "n": inst.len(),
                "discrepancy": discrepancy,
                "signs": s.signs(),
            });
            (doc, path.clone())
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    out.write("ground_truth.json", &pretty(&doc)?)?;
    Ok(vec![input])
}
