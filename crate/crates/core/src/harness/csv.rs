use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use super::{HarnessError, RunReport, TraceRow};

pub const CSV_HEADER: &str = "t_ms,eye_ir,ppg_ir,eye_closed,perclos,bpm,slowdown,level,buzzer,vibrator_duty";

/// Writes the per-tick trace: header plus one LF-terminated row per tick,
/// decimals to four places, booleans as 0/1.
pub fn write_csv<W: Write>(report: &RunReport, mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in &report.trace {
        write_row(&mut out, row)?;
    }
    out.flush()
}

fn write_row<W: Write>(out: &mut W, r: &TraceRow) -> io::Result<()> {
    writeln!(
        out,
        "{},{:.4},{:.4},{},{:.4},{:.4},{},{},{},{}",
        r.t_ms,
        r.eye_ir,
        r.ppg_ir,
        u8::from(r.eye_closed),
        r.perclos,
        r.bpm,
        u8::from(r.slowdown),
        r.level,
        u8::from(r.buzzer),
        r.vibrator_duty,
    )
}

pub fn emit_csv(report: &RunReport, path: &Path) -> Result<(), HarnessError> {
    let io_err = |source| HarnessError::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    write_csv(report, BufWriter::new(file)).map_err(io_err)
}
