//! CSV trace output.

use std::io::Write;

use submax::TraceRecord;

pub const HEADER: [&str; 7] = [
    "iter",
    "time_ms",
    "dual_bound",
    "oracle_value",
    "best_primal",
    "n_vertices",
    "inner_steps",
];

/// Writes the trace; `time_ms` is 0 when `timing` is off.
pub fn write_trace<W: Write>(out: W, trace: &[TraceRecord], timing: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in trace {
        let time = if timing { r.time_ms } else { 0.0 };
        w.write_record([
            r.iter.to_string(),
            time.to_string(),
            r.dual_bound.to_string(),
            r.oracle_value.to_string(),
            r.best_primal.to_string(),
            r.n_vertices.to_string(),
            r.inner_steps.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
