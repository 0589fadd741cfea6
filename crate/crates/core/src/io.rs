//! Text formats for instances and forests.
//!
//! Spin-glass instances are JSON documents:
//!
//! ```json
//! {
//!   "n_sites": 9,
//!   "grid": {"L": 3, "periodic": true},
//!   "seed": 7,
//!   "bonds": [[0, 1, -4.1873520359474916e-1], ...],
//!   "fields": [0.0000000000000000e0, ...]
//! }
//! ```
//!
//! Reals are written with 17 significant digits, which round-trips every
//! `f64` exactly. `grid` and `seed` may be `null`.

use std::fmt::Write as _;

use serde::Deserialize;

use crate::encoding::Forest;
use crate::npp::NppInstance;
use crate::spinglass::{GridMeta, SpinGlassInstance};
use crate::{Error, Result};

/// `x` with 17 significant digits in scientific notation.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_instance(inst: &SpinGlassInstance) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"n_sites\": {},", inst.n_sites());
    match inst.grid() {
        Some(g) => {
            let _ = writeln!(
                out,
                "  \"grid\": {{\"L\": {}, \"periodic\": {}}},",
                g.side, g.periodic
            );
        }
        None => out.push_str("  \"grid\": null,\n"),
    }
    match inst.seed() {
        Some(s) => {
            let _ = writeln!(out, "  \"seed\": {s},");
        }
        None => out.push_str("  \"seed\": null,\n"),
    }
    out.push_str("  \"bonds\": [");
    for (k, b) in inst.bonds().iter().enumerate() {
        out.push_str(if k == 0 { "\n" } else { ",\n" });
        let _ = write!(out, "    [{}, {}, {}]", b.i, b.j, format_real(b.coupling));
    }
    out.push_str(if inst.bonds().is_empty() {
        "],\n"
    } else {
        "\n  ],\n"
    });
    out.push_str("  \"fields\": [");
    let fields: Vec<String> = inst.fields().iter().map(|&b| format_real(b)).collect();
    out.push_str(&fields.join(", "));
    out.push_str("]\n}\n");
    out
}

#[derive(Deserialize)]
struct GridDoc {
    #[serde(rename = "L")]
    side: usize,
    periodic: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    n_sites: usize,
    #[serde(default)]
    grid: Option<GridDoc>,
    #[serde(default)]
    seed: Option<u64>,
    bonds: Vec<(usize, usize, f64)>,
    fields: Option<Vec<f64>>,
}

pub fn parse_instance(text: &str) -> Result<SpinGlassInstance> {
    let doc: InstanceDoc =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("instance file: {e}")))?;
    let fields = doc.fields.unwrap_or_else(|| vec![0.0; doc.n_sites]);
    let mut inst = SpinGlassInstance::new(doc.n_sites, doc.bonds, fields)?;
    if let Some(g) = doc.grid {
        inst = inst.with_grid(GridMeta {
            side: g.side,
            periodic: g.periodic,
        });
    }
    if let Some(s) = doc.seed {
        inst = inst.with_seed(s);
    }
    Ok(inst)
}

/// Sorted edge list `[[i, j], ...]`.
pub fn forest_to_json(y: &Forest) -> serde_json::Value {
    serde_json::Value::Array(
        y.sorted_edges()
            .into_iter()
            .map(|(i, j)| serde_json::json!([i, j]))
            .collect(),
    )
}

pub fn forest_from_json(n_sites: usize, value: &serde_json::Value) -> Result<Forest> {
    let edges: Vec<(usize, usize)> = serde_json::from_value(value.clone())
        .map_err(|e| Error::Format(format!("forest edge list: {e}")))?;
    Forest::from_edges(n_sites, edges)
}

/// Numbers for a partitioning instance: a JSON array, or decimals separated
/// by whitespace or commas.
pub fn parse_numbers(text: &str) -> Result<NppInstance> {
    let trimmed = text.trim();
    let numbers: Vec<f64> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| Error::Format(format!("numbers file: {e}")))?
    } else {
        trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| Error::Format(format!("number {t:?}: {e}")))
            })
            .collect::<Result<_>>()?
    };
    NppInstance::new(numbers)
}
