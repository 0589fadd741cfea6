use std::path::PathBuf;

use coverenc::analysis::{empirical_pvalue, mean_and_std, PValueReport};
use coverenc::rng::task_seed;
use coverenc::search::adaptive_walk_encoded;
use rayon::prelude::*;

use crate::args::CompareArgs;
use crate::commands::walk::{encoded_state, pretty};
use crate::error::{CliError, CliResult};
use crate::output::{json_files, load_instance, stem, OutputDir};

/// Checks the (t, tau) grid: every t and tau positive, every tau dividing
/// every t. Returns the pairs in row order.
pub fn pairs(ts: &[u64], taus: &[u64]) -> CliResult<Vec<(u64, u64)>> {
    if ts.is_empty() || taus.is_empty() {
        return Err(CliError::Parameter(
            "--t and --tau need at least one value".into(),
        ));
    }
    let mut pairs = Vec::new();
    for &t in ts {
        for &tau in taus {
            if t == 0 || tau == 0 || !t.is_multiple_of(tau) {
                return Err(CliError::Parameter(format!(
                    "restart period tau = {tau} must be positive and divide t = {t}"
                )));
            }
            pairs.push((t, tau));
        }
    }
    Ok(pairs)
}

struct InstanceResult {
    id: String,
    reports: Vec<PValueReport>,
    state: serde_json::Value,
}

/// For instance k (files sorted by name): encoded walk seeded with
/// `task_seed(seed, 2k)` and run to the largest t; p-value m of the
/// instance sampled with `task_seed(task_seed(seed, 2k + 1), m)`.
pub fn run(args: &CompareArgs, out: &mut OutputDir) -> CliResult<Vec<PathBuf>> {
    let pairs = pairs(&args.t, &args.tau)?;
    if args.samples == 0 {
        return Err(CliError::Parameter("--samples must be at least 1".into()));
    }
    let files = json_files(&args.instances)?;
    if files.is_empty() {
        return Err(CliError::Parameter(format!(
            "no instance files in {}",
            args.instances.display()
        )));
    }
    let t_max = *args.t.iter().max().expect("validated non-empty");
    let seed = args.common.seed;

    let results: Vec<InstanceResult> = files
        .par_iter()
        .enumerate()
        .map(|(k, path)| -> CliResult<InstanceResult> {
            let k = k as u64;
            let inst = load_instance(path)?;
            let walk_seed = task_seed(seed, 2 * k);
            let trace = adaptive_walk_encoded(&inst, t_max, walk_seed, &args.t)?;
            let sample_seed = task_seed(seed, 2 * k + 1);
            let reports = pairs
                .iter()
                .enumerate()
                .map(|(m, &(t, tau))| {
                    let eta = trace
                        .samples
                        .iter()
                        .find(|s| s.0 == t)
                        .expect("every requested t is recorded")
                        .1;
                    empirical_pvalue(
                        &inst,
                        eta,
                        t,
                        tau,
                        args.samples,
                        task_seed(sample_seed, m as u64),
                    )
                })
                .collect::<coverenc::Result<Vec<_>>>()?;
            Ok(InstanceResult {
                id: stem(path),
                reports,
                state: encoded_state(&inst, &trace.final_state, t_max, walk_seed)?,
            })
        })
        .collect::<CliResult<_>>()?;

    let mut rows = out.csv("pvalues.csv")?;
    rows.write_record(["instance_id", "t", "tau", "eta_min", "p"])?;
    for r in &results {
        for rep in &r.reports {
            rows.write_record([
                r.id.clone(),
                rep.t.to_string(),
                rep.tau.to_string(),
                rep.eta_min.to_string(),
                rep.p.to_string(),
            ])?;
        }
    }
    rows.flush().map_err(|e| CliError::io(out.root(), e))?;

    let mut summary = out.csv("summary.csv")?;
    summary.write_record(["t", "tau", "n_instances", "mean_p", "std_p"])?;
    for (m, &(t, tau)) in pairs.iter().enumerate() {
        let ps: Vec<f64> = results.iter().map(|r| r.reports[m].p).collect();
        let (mean, std) = mean_and_std(&ps);
        summary.write_record([
            t.to_string(),
            tau.to_string(),
            ps.len().to_string(),
            mean.to_string(),
            std.to_string(),
        ])?;
    }
    summary.flush().map_err(|e| CliError::io(out.root(), e))?;

    for r in &results {
        out.write(&format!("states/{}.json", r.id), &pretty(&r.state)?)?;
    }
    Ok(files)
}
