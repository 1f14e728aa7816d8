//! CSV input of income series and CSV/JSON output of results.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use scale_smooth_core::smoother::IncomeSeries;

use crate::{CliError, Result};

pub const INPUT_HEADER: [&str; 2] = ["time", "income"];
pub const LONG_HEADER: [&str; 3] = ["scale", "x", "value"];

/// 17 significant digits; parses back to the same bits.
pub fn format_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Reads `time,income` rows, checks strictly increasing times and shifts them
/// so the latest sample sits at 0.
pub fn read_series<R: Read>(reader: R, label: &str) -> Result<IncomeSeries> {
    let bad = |line: usize, message: String| CliError::Input { path: label.to_string(), line, message };
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        None => return Err(bad(1, "empty file, expected header `time,income`".into())),
        Some(rec) => rec.map_err(|e| bad(1, e.to_string()))?,
    };
    let names: Vec<&str> = header.iter().collect();
    if names.as_slice() != INPUT_HEADER {
        return Err(bad(1, format!("expected header `time,income`, found `{}`", names.join(","))));
    }

    let mut samples: Vec<(f64, f64)> = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| bad(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != 2 {
            return Err(bad(line, format!("expected 2 fields, found {}", rec.len())));
        }
        let parse = |i: usize, what: &str| -> Result<f64> {
            let raw = &rec[i];
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(bad(line, format!("{what} `{raw}` is not a finite number"))),
            }
        };
        let time = parse(0, "time")?;
        let income = parse(1, "income")?;
        if let Some(&(prev, _)) = samples.last() {
            if time <= prev {
                return Err(bad(line, format!("time {time} does not increase (previous {prev})")));
            }
        }
        samples.push((time, income));
    }
    if samples.is_empty() {
        return Err(bad(1, "no data rows".into()));
    }
    Ok(IncomeSeries::from_unnormalized(samples)?)
}

pub fn read_series_file(path: &Path) -> Result<IncomeSeries> {
    let file = std::fs::File::open(path)?;
    read_series(file, &path.display().to_string())
}

pub fn write_rows<W: Write>(out: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| format_value(v)))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, T: Serialize> {
    config: &'a C,
    results: &'a [T],
}

/// `{config, results[]}`
pub fn write_json<W: Write, C: Serialize, T: Serialize>(mut out: W, config: &C, results: &[T]) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &Envelope { config, results })?;
    writeln!(out)?;
    Ok(())
}

/// Writes to `path`, or stdout when `None`.
pub fn with_output<F>(path: Option<&Path>, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(p)?);
            body(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)
        }
    }
}

/// `dir/stem.<tag>.csv` next to `path`.
pub fn companion_path(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}
