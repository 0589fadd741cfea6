use std::path::PathBuf;

use coverenc::npp::{kk_differencing, npp_adaptive_walk, npp_heuristic_g, SignVector};

use crate::args::{NppArgs, NppMode};
use crate::error::{CliError, CliResult};
use crate::output::{load_numbers, OutputDir};

pub fn run(args: &NppArgs, out: &mut OutputDir) -> CliResult<Vec<PathBuf>> {
    let inst = load_numbers(&args.numbers)?;
    let (mode, discrepancy, signs) = match args.mode {
        NppMode::Kk => {
            let (d, s) = kk_differencing(&inst);
            ("kk", d, s)
        }
        NppMode::Walk => {
            let trace = npp_adaptive_walk(&inst, args.t, args.common.seed)?;
            let mut csv = out.csv("trace.csv")?;
            csv.write_record(["t", "value"])?;
            for (t, value) in &trace.samples {
                csv.write_record([t.to_string(), value.to_string()])?;
            }
            csv.flush().map_err(|e| CliError::io(out.root(), e))?;
            let (d, s) = npp_heuristic_g(&inst, &trace.final_state)?;
            ("walk", d, s)
        }
    };
    let mut csv = out.csv("result.csv")?;
    csv.write_record(["mode", "n", "discrepancy", "signs"])?;
    csv.write_record([
        mode.to_string(),
        inst.len().to_string(),
        discrepancy.to_string(),
        sign_string(&signs),
    ])?;
    csv.flush().map_err(|e| CliError::io(out.root(), e))?;
    Ok(vec![args.numbers.clone()])
}

/// Signs as a string of `+` and `-`, one per number.
fn sign_string(s: &SignVector) -> String {
    s.signs()
        .iter()
        .map(|&x| if x > 0 { '+' } else { '-' })
        .collect()
}
