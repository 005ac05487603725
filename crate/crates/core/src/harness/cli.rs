use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use super::{canonical, emit_csv, load_scenario, run, write_csv, HarnessError, RunConfig};
use crate::device::encode_gsm_at;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "drowsy", about = "Drowsy-driver detection and alert simulator")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario through the detection and alert pipeline.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Write the per-tick trace here (overrides `output.csv`).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Replace the scenario's noise seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a config file and the scenario it names.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Regenerate the golden fixtures.
    Goldens {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
    },
}

/// Entry point shared by the binary and tests. Returns the exit code.
pub fn cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(args) => args,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_VALIDATION,
            };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match args.command {
        Command::Run { config, csv, seed } => cmd_run(&config, csv, seed, out),
        Command::Validate { config } => cmd_validate(&config, out),
        Command::Goldens { dir } => write_goldens(&dir, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_io() {
                EXIT_IO
            } else {
                EXIT_VALIDATION
            }
        }
    }
}

fn cmd_run(
    path: &Path,
    csv: Option<PathBuf>,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> Result<(), HarnessError> {
    let mut config = RunConfig::load(path)?;
    if seed.is_some() {
        config.seed = seed;
    }
    if csv.is_some() {
        config.csv = csv;
    }
    let report = run(&config)?;
    if let Some(csv) = &config.csv {
        emit_csv(&report, csv)?;
    }
    let _ = out.write_all(report.summary().as_bytes());
    Ok(())
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<(), HarnessError> {
    let config = RunConfig::load(path)?;
    load_scenario(&config)?
        .validate()
        .map_err(|source| HarnessError::Scenario { path: config.scenario.clone(), source })?;
    let _ = writeln!(out, "ok");
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    std::fs::write(path, bytes).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

/// Writes the GSM golden, every canonical scenario with a default config,
/// and the golden trace with its expected CSV.
pub(crate) fn write_goldens(dir: &Path, out: &mut dyn Write) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_path_buf(), source })?;
    let defaults = RunConfig::new("");
    write_file(&dir.join("gsm_alert.bin"), &encode_gsm_at(&defaults.escalate.alert))?;

    let mut scenarios: Vec<_> = canonical::all().into_iter().map(|c| (c.name, c.scenario)).collect();
    scenarios.push(("golden_trace", canonical::golden_trace()));
    for (name, scenario) in &scenarios {
        write_file(&dir.join(format!("{name}.scn")), scenario.to_text().as_bytes())?;
        let cfg = RunConfig::new(format!("{name}.scn"));
        write_file(&dir.join(format!("{name}.cfg")), cfg.to_config_string().as_bytes())?;
    }

    let trace_cfg = RunConfig::load(&dir.join("golden_trace.cfg"))?;
    let report = run(&trace_cfg)?;
    let mut csv = Vec::new();
    write_csv(&report, &mut csv)
        .map_err(|source| HarnessError::Io { path: dir.join("golden_trace.csv"), source })?;
    write_file(&dir.join("golden_trace.csv"), &csv)?;
    let _ = writeln!(out, "wrote {} fixtures to {}", 2 * scenarios.len() + 2, dir.display());
    Ok(())
}
