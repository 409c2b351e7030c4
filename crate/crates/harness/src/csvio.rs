//! CSV emission for experiment results.
//!
//! Two files per experiment: an aggregate file (`t,algo,mean,std,stderr,n`)
//! and a per-run raw file
//! (`run_id,seed,algo,t,metric,grad_norm,eta_t,noisy_step,wall_nanos`).
//! Floats are printed with 17 significant digits so parsing them back
//! recovers the exact f64; rows are sorted by (algo, t), with raw rows
//! additionally keyed by run.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::experiment::{AggregateRow, RawRun};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("failed to write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub const AGGREGATE_HEADER: &str = "t,algo,mean,std,stderr,n";
pub const RAW_HEADER: &str = "run_id,seed,algo,t,metric,grad_norm,eta_t,noisy_step,wall_nanos";

fn write_file(path: &Path, contents: &str) -> Result<(), CsvError> {
    let wrap = |source| CsvError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(wrap)?;
        }
    }
    let mut file = fs::File::create(path).map_err(wrap)?;
    file.write_all(contents.as_bytes()).map_err(wrap)?;
    file.flush().map_err(wrap)
}

/// Renders the aggregate rows; callers pass rows already sorted by (algo, t).
pub fn render_aggregate(rows: &[AggregateRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(AGGREGATE_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.t,
            row.algo.name(),
            format_float(row.mean),
            format_float(row.std),
            format_float(row.stderr),
            row.n
        );
    }
    out
}

/// Renders the raw per-run rows in run order (runs are sorted by (algo,
/// repeat) upstream and each trace is in iteration order).
pub fn render_raw(runs: &[RawRun]) -> String {
    let total: usize = runs.iter().map(|r| r.records.len()).sum();
    let mut out = String::with_capacity(96 * (total + 1));
    out.push_str(RAW_HEADER);
    out.push('\n');
    for run in runs {
        for rec in &run.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                run.run_id,
                run.seed,
                run.algo.name(),
                rec.iterate_index,
                format_float(rec.value_or_error),
                format_float(rec.grad_norm),
                format_float(rec.eta_t),
                u8::from(rec.noisy_step),
                rec.wall_nanos
            );
        }
    }
    out
}

/// Writes `<out_dir>/<name>_aggregate.csv` and `<out_dir>/<name>_runs.csv`,
/// returning the two paths.
pub fn emit_csv(
    rows: &[AggregateRow],
    runs: &[RawRun],
    out_dir: &Path,
    name: &str,
) -> Result<(PathBuf, PathBuf), CsvError> {
    let aggregate_path = out_dir.join(format!("{name}_aggregate.csv"));
    let raw_path = out_dir.join(format!("{name}_runs.csv"));
    write_file(&aggregate_path, &render_aggregate(rows))?;
    write_file(&raw_path, &render_raw(runs))?;
    Ok((aggregate_path, raw_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use saddle_ngd::optimizers::Algo;

    #[test]
    fn zero_rows_render_header_only() {
        assert_eq!(render_aggregate(&[]), format!("{AGGREGATE_HEADER}\n"));
        assert_eq!(render_raw(&[]), format!("{RAW_HEADER}\n"));
    }

    #[test]
    fn single_row_renders_two_lines() {
        let rows = vec![AggregateRow {
            t: 0,
            algo: Algo::Gd,
            mean: 1.0,
            std: 0.0,
            stderr: 0.0,
            n: 1,
        }];
        let text = render_aggregate(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], AGGREGATE_HEADER);
        assert_eq!(lines[1], "0,gd,1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,1");
    }

    #[test]
    fn formatted_floats_round_trip_exactly() {
        for x in [
            1.0,
            -0.051_234_567_890_123_45,
            3.141592653589793e-7,
            6.02214076e23,
            f64::MIN_POSITIVE,
        ] {
            let parsed: f64 = format_float(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits(), "{x}");
        }
    }
}
