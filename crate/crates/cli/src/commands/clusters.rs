use std::path::PathBuf;

use coverenc::analysis::{cluster_stats, cumulative_distribution, surrogate_forest, ClusterStats};
use coverenc::rng::task_seed;

use crate::args::ClustersArgs;
use crate::commands::walk::load_encoded_forest;
use crate::error::{CliError, CliResult};
use crate::output::{json_files, stem, OutputDir};
use crate::svg::{scatter, Series};

/// State file k (in argument order, directories expanded by name) is paired
/// with a surrogate forest seeded with `task_seed(seed, k)`.
pub fn run(args: &ClustersArgs, out: &mut OutputDir) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in &args.states {
        files.extend(json_files(path)?);
    }
    if files.is_empty() {
        return Err(CliError::Parameter("no state files given".into()));
    }
    let mut rows: Vec<(String, &str, ClusterStats)> = Vec::new();
    let mut max_sites = 0;
    for (k, path) in files.iter().enumerate() {
        let y = load_encoded_forest(path)?;
        max_sites = max_sites.max(y.n_sites());
        let surrogate = surrogate_forest(
            y.n_sites(),
            y.n_edges(),
            task_seed(args.common.seed, k as u64),
        )?;
        rows.push((stem(path), "encoded", cluster_stats(&y)));
        rows.push((stem(path), "surrogate", cluster_stats(&surrogate)));
    }

    let mut csv = out.csv("clusters.csv")?;
    csv.write_record(["instance_id", "kind", "largest", "second_largest"])?;
    for (id, kind, stats) in &rows {
        csv.write_record([
            id.clone(),
            kind.to_string(),
            stats.largest.to_string(),
            stats.second_largest.to_string(),
        ])?;
    }
    csv.flush().map_err(|e| CliError::io(out.root(), e))?;

    let mut cumulative = out.csv("cumulative.csv")?;
    cumulative.write_record(["kind", "size", "fraction"])?;
    for kind in ["encoded", "surrogate"] {
        let pooled: Vec<usize> = rows
            .iter()
            .filter(|r| r.1 == kind)
            .flat_map(|r| r.2.sizes.iter().copied())
            .collect();
        for (size, fraction) in cumulative_distribution(&pooled) {
            cumulative.write_record([kind.to_string(), size.to_string(), fraction.to_string()])?;
        }
    }
    cumulative
        .flush()
        .map_err(|e| CliError::io(out.root(), e))?;

    let points = |kind: &str| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r.1 == kind)
            .map(|r| (r.2.largest as f64, r.2.second_largest as f64))
            .collect()
    };
    let series = [
        Series {
            name: "encoded walk",
            color: "#1f77b4",
            points: points("encoded"),
        },
        Series {
            name: "surrogate",
            color: "#d62728",
            points: points("surrogate"),
        },
    ];
    let svg = scatter(
        &series,
        "largest cluster",
        "second largest cluster",
        max_sites as f64,
    );
    out.write("scatter.svg", &svg)?;
    Ok(files)
}
