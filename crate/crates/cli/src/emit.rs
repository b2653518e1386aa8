//! Machine-readable result emission: CSV/JSON scan tables and binary field
//! snapshots.
//!
//! CSV column order is fixed (`scheme,eps,t,local_error,est_deviation,
//! observed_order`); floats are written as the shortest decimal that parses
//! back to the same bits, so `parse_csv(emit(r)) == r` exactly. Missing
//! optional values are empty cells.

use crate::scan::ScanRecord;
use crate::{HarnessError, Result};
use nlsplit_core::grid::WaveField;
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(HarnessError::BadConfig(format!(
                "unknown format `{other}` (csv or json)"
            ))),
        }
    }
}

pub const CSV_HEADER: &str = "scheme,eps,t,local_error,est_deviation,observed_order";

/// Renders records in the requested format.
pub fn render(records: &[ScanRecord], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in records {
                let _ = write!(out, "{},{},{},{}", r.scheme, r.eps, r.t, r.local_error);
                match r.est_deviation {
                    Some(d) => {
                        let _ = write!(out, ",{d}");
                    }
                    None => out.push(','),
                }
                match r.observed_order {
                    Some(o) => {
                        let _ = write!(out, ",{o}");
                    }
                    None => out.push(','),
                }
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            serde_json::to_string_pretty(records).expect("records serialize") + "\n"
        }
    }
}

/// Writes records to `path`.
pub fn emit(records: &[ScanRecord], path: &Path, format: OutputFormat) -> Result<()> {
    let text = render(records, format);
    std::fs::write(path, text).map_err(HarnessError::io(path.display().to_string()))
}

/// Parses a CSV table produced by [`render`].
pub fn parse_csv(text: &str) -> Result<Vec<ScanRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(HarnessError::Parse(format!("bad header: {other:?}"))),
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(HarnessError::Parse(format!(
                "line {}: expected 6 columns, got {}",
                lineno + 2,
                cols.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| HarnessError::Parse(format!("line {}: {e}", lineno + 2)))
        };
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s).map(Some)
            }
        };
        records.push(ScanRecord {
            scheme: cols[0].to_string(),
            eps: num(cols[1])?,
            t: num(cols[2])?,
            local_error: num(cols[3])?,
            est_deviation: opt(cols[4])?,
            observed_order: opt(cols[5])?,
        });
    }
    Ok(records)
}

/// Renders a trajectory's accepted-step trace as CSV
/// (`time,h,est_norm,accepted,rejected_count`). Fixed-step runs leave the
/// estimator column empty.
pub fn trace_csv(traj: &nlsplit_core::Trajectory) -> String {
    let mut out = String::from("time,h,est_norm,accepted,rejected_count\n");
    for s in &traj.steps {
        let est = s.est_norm.map(|e| e.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},true,{}", s.time, s.h, est, s.rejected);
    }
    out
}

#[derive(Debug, Serialize)]
struct SnapshotMeta<'a> {
    dim: usize,
    n: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    layout: &'a str,
    encoding: &'a str,
    time: f64,
}

/// Writes a field as flat binary little-endian f64 (re, im) pairs in
/// row-major order, plus a JSON sidecar `<path>.json` with the grid
/// metadata.
pub fn write_snapshot(u: &WaveField, time: f64, path: &Path) -> Result<()> {
    let g = u.grid();
    let mut buf = Vec::with_capacity(16 * u.values().len());
    for v in u.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    let mut f =
        std::fs::File::create(path).map_err(HarnessError::io(path.display().to_string()))?;
    f.write_all(&buf)
        .map_err(HarnessError::io(path.display().to_string()))?;

    let meta = SnapshotMeta {
        dim: g.dim(),
        n: g.axes().iter().map(|a| a.n).collect(),
        lower: g.axes().iter().map(|a| a.lower).collect(),
        upper: g.axes().iter().map(|a| a.upper).collect(),
        layout: "row-major",
        encoding: "little-endian f64 (re, im) pairs",
        time,
    };
    let sidecar = path.with_extension(format!(
        "{}json",
        path.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    std::fs::write(
        &sidecar,
        serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n",
    )
    .map_err(HarnessError::io(sidecar.display().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ScanRecord> {
        vec![
            ScanRecord {
                scheme: "strang".into(),
                eps: 1.0,
                t: 0.0625,
                local_error: 2.2962679e-4,
                est_deviation: Some(3.1e-5),
                observed_order: None,
            },
            ScanRecord {
                scheme: "strang".into(),
                eps: 0.1,
                t: 0.03125,
                local_error: 1.0 / 3.0,
                est_deviation: None,
                observed_order: Some(2.9613453333),
            },
        ]
    }

    #[test]
    fn empty_record_list_gives_header_only_csv() {
        let text = render(&[], OutputFormat::Csv);
        assert_eq!(text, format!("{CSV_HEADER}\n"));
        assert!(parse_csv(&text).unwrap().is_empty());
    }

    #[test]
    fn one_record_gives_two_lines() {
        let text = render(&sample()[..1], OutputFormat::Csv);
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let records = sample();
        let text = render(&records, OutputFormat::Csv);
        let back = parse_csv(&text).unwrap();
        assert_eq!(records, back);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let records = sample();
        let text = render(&records, OutputFormat::Json);
        let back: Vec<ScanRecord> = serde_json::from_str(&text).unwrap();
        assert_eq!(records, back);
    }

    #[test]
    fn snapshot_binary_layout() {
        use nlsplit_core::{make_grid, WaveField};
        use num_complex::Complex64;
        let dir = tempfile::tempdir().unwrap();
        let g = make_grid(1, -1.0, 1.0, 8).unwrap();
        let u = WaveField::from_fn(&g, |x, _| Complex64::new(x, -x));
        let path = dir.path().join("field.bin");
        write_snapshot(&u, 1.5, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.len(), 8 * 16);
        let re0 = f64::from_le_bytes(bytes[0..8].try_into().unwrap());
        let im0 = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
        assert_eq!(re0, -1.0);
        assert_eq!(im0, 1.0);
        let meta: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("field.bin.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(meta["n"][0], 8);
        assert_eq!(meta["time"], 1.5);
    }
}
