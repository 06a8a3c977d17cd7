use crate::{CliResult, Failure};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::validation(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure::numerical(format!("write failed: {e}"))
}

/// CSV with a header row to `path`, or stdout.
pub fn write_csv<R: Serialize>(path: Option<&Path>, rows: &[R]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    for r in rows {
        w.serialize(r).map_err(io_failure)?;
    }
    w.flush().map_err(io_failure)
}

/// Pretty-printed JSON to `path`, or stdout.
pub fn write_json<T: Serialize + ?Sized>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(io_failure)?;
    writeln!(w).map_err(io_failure)?;
    w.flush().map_err(io_failure)
}

pub fn write_json_stderr<T: Serialize + ?Sized>(value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(io_failure)?;
    eprintln!("{text}");
    Ok(())
}
