use std::path::{Path, PathBuf};

use coverenc::encoding::{heuristic_g, Forest};
use coverenc::io::{forest_from_json, forest_to_json};
use coverenc::search::{adaptive_walk_direct, adaptive_walk_encoded};
use coverenc::spinglass::SpinGlassInstance;
use serde_json::json;

use crate::args::{WalkArgs, WalkKind};
use crate::error::{CliError, CliResult};
use crate::output::{load_instance, read_text, OutputDir};

pub fn run(args: &WalkArgs, out: &mut OutputDir) -> CliResult<Vec<PathBuf>> {
    let inst = load_instance(&args.instance)?;
    let mut record_at = if args.record_at.is_empty() {
        vec![args.t]
    } else {
        args.record_at.clone()
    };
    record_at.sort_unstable();
    record_at.dedup();
    if let Some(&late) = record_at.iter().find(|&&r| r > args.t) {
        return Err(CliError::Parameter(format!(
            "--record-at {late} lies beyond --t {}",
            args.t
        )));
    }
    let seed = args.common.seed;
    let (samples, state) = match args.kind {
        WalkKind::Encoded => {
            let trace = adaptive_walk_encoded(&inst, args.t, seed, &record_at)?;
            let state = encoded_state(&inst, &trace.final_state, args.t, seed)?;
            (trace.samples, state)
        }
        WalkKind::Direct => {
            let trace = adaptive_walk_direct(&inst, args.t, seed, &record_at)?;
            let state = json!({
                "kind": "direct",
                "n_sites": inst.n_sites(),
                "t": args.t,
                "seed": seed,
                "value": trace.final_value(),
                "spins": trace.final_state.spins(),
            });
            (trace.samples, state)
        }
    };
    let mut csv = out.csv("trace.csv")?;
    csv.write_record(["t", "value"])?;
    for (t, value) in samples
        .iter()
        .filter(|(t, _)| record_at.binary_search(t).is_ok())
    {
        csv.write_record([t.to_string(), value.to_string()])?;
    }
    csv.flush().map_err(|e| CliError::io(out.root(), e))?;
    out.write("state.json", &pretty(&state)?)?;
    Ok(vec![args.instance.clone()])
}

/// Final state of an encoded walk: the forest and the configuration G
/// assigns to it.
pub fn encoded_state(
    inst: &SpinGlassInstance,
    y: &Forest,
    t: u64,
    seed: u64,
) -> CliResult<serde_json::Value> {
    let (value, x) = heuristic_g(inst, y)?;
    Ok(json!({
        "kind": "encoded",
        "n_sites": inst.n_sites(),
        "t": t,
        "seed": seed,
        "value": value,
        "components": y.n_components(),
        "forest": forest_to_json(y),
        "spins": x.spins(),
    }))
}

/// Forest of an encoded-walk state file.
pub fn load_encoded_forest(path: &Path) -> CliResult<Forest> {
    let doc: serde_json::Value =
        serde_json::from_str(&read_text(path)?).map_err(|e| CliError::input(path, e))?;
    if doc["kind"] != "encoded" {
        return Err(CliError::input(
            path,
            "not an encoded-walk state (kind != \"encoded\")",
        ));
    }
    let n_sites = doc["n_sites"]
        .as_u64()
        .ok_or_else(|| CliError::input(path, "missing n_sites"))? as usize;
    forest_from_json(n_sites, &doc["forest"]).map_err(|e| CliError::input(path, e))
}

pub fn pretty(value: &serde_json::Value) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Runtime(format!("serializing JSON: {e}")))
}
