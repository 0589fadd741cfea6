use std::collections::BTreeSet;
use std::path::PathBuf;

use coverenc::encoding::Forest;
use coverenc::semigroup::{
    build_forest_class_digraph, build_forest_digraph, build_schema_digraph_with, check_condition_r,
    forest_member_masks, EncodingDigraph, Schema,
};
use serde_json::json;

use crate::args::{SemigroupArgs, Space};
use crate::commands::walk::pretty;
use crate::error::{CliError, CliResult};
use crate::output::OutputDir;

/// Writes `report.json` with the violations of the reachability condition.
pub fn run(args: &SemigroupArgs, out: &mut OutputDir) -> CliResult<Vec<PathBuf>> {
    if args.no_sideways && args.space != Space::Schema {
        return Err(CliError::Parameter(
            "--no-sideways applies to --space schema only".into(),
        ));
    }
    let report = match args.space {
        Space::Schema => {
            let dg = build_schema_digraph_with(args.n, !args.no_sideways)?;
            check(args, dg, |s: &Schema| s.to_string(), Schema::member_masks)?
        }
        Space::Forest => check(
            args,
            build_forest_digraph(args.n)?,
            forest_label,
            forest_member_masks,
        )?,
        Space::ForestClasses => check(
            args,
            build_forest_class_digraph(args.n)?,
            forest_label,
            forest_member_masks,
        )?,
    };
    out.write("report.json", &pretty(&report)?)?;
    Ok(Vec::new())
}

/// `0-1,2-3` for a forest, `{}` for the empty one.
fn forest_label(y: &Forest) -> String {
    if y.n_edges() == 0 {
        return "{}".into();
    }
    y.sorted_edges()
        .iter()
        .map(|(i, j)| format!("{i}-{j}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn check<V, L, M>(
    args: &SemigroupArgs,
    mut dg: EncodingDigraph<V>,
    label: L,
    members: M,
) -> CliResult<serde_json::Value>
where
    L: Fn(&V) -> String,
    M: Fn(&V) -> BTreeSet<u64>,
{
    let labels: Vec<String> = dg.vertices().iter().map(&label).collect();
    let mut dropped = serde_json::Value::Null;
    if let Some(spec) = &args.drop_arc {
        let (tail, head) = spec.split_once("->").ok_or_else(|| {
            CliError::Parameter(format!("--drop-arc {spec:?}: expected TAIL->HEAD"))
        })?;
        let find = |l: &str| {
            labels
                .iter()
                .position(|x| x == l.trim())
                .ok_or_else(|| CliError::Parameter(format!("--drop-arc: no vertex labelled {l:?}")))
        };
        let (t, h) = (find(tail)?, find(head)?);
        dg = dg.without_arc(t, h)?;
        dropped = json!([labels[t], labels[h]]);
    }
    let violations = check_condition_r(&dg, members);
    Ok(json!({
        "space": args.space,
        "n": args.n,
        "sideways": !args.no_sideways,
        "vertices": dg.len(),
        "arcs": dg.arcs().len(),
        "dropped_arc": dropped,
        "holds": violations.is_empty(),
        "violations": violations
            .iter()
            .map(|v| json!({"from": labels[v.from], "to": labels[v.to]}))
            .collect::<Vec<_>>(),
    }))
}
