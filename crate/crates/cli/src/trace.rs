//! CSV form of the per-iteration energy trace.

use std::io::{self, Write};

use elastica_core::{EnergyRecord, EnergyTrace};

pub const TRACE_HEADER: &str =
    "iter,E_total,E_elastica,E_fidelity,E_p13,E_lam13,E_proj23,E_u,rel_err";

/// Scientific notation with 16 significant digits.
pub fn format_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.15e}")
    } else {
        v.to_string()
    }
}

pub fn format_record(r: &EnergyRecord<f64>) -> String {
    let values = [
        r.total,
        r.elastica,
        r.fidelity,
        r.shrink,
        r.lambda,
        r.projection,
        r.update,
        r.rel_err,
    ];
    let mut line = r.iter.to_string();
    for v in values {
        line.push(',');
        line.push_str(&format_value(v));
    }
    line
}

pub fn write_trace(mut out: impl Write, trace: &EnergyTrace<f64>) -> io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in trace.records() {
        writeln!(out, "{}", format_record(r))?;
    }
    out.flush()
}

/// Parses a trace written by [`write_trace`] into rows of numbers, the first
/// column being the iteration.
pub fn parse_trace(text: &str) -> Result<Vec<Vec<f64>>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRACE_HEADER => {}
        other => return Err(format!("unexpected trace header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let row = line
                .split(',')
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|_| format!("row {}: bad value {c:?}", k + 1))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != 9 {
                return Err(format!("row {}: {} columns", k + 1, row.len()));
            }
            Ok(row)
        })
        .collect()
}
