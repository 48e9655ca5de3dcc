//! Result rows, their CSV form, and per-cell aggregation.
//!
//! CSV layout (header row, comma-separated, `.` decimals, LF):
//!
//! ```text
//! config,n,k,d_max_ms,algorithm,seed,d_avg_ms,k_achieved,feasible,note,wall_ms
//! ```
//!
//! `k` is empty on budget sweeps, `d_max_ms` on fixed-count sweeps. Rows
//! whose solver was skipped (search budget, timeout, stranded capacity)
//! leave the metric fields empty and explain themselves in `note`. The
//! wall-clock column is deliberately last: determinism checks compare
//! everything before the final comma.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Algorithm, BenchError};

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub config: String,
    pub n: u32,
    pub k: Option<usize>,
    pub d_max_ms: Option<f64>,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub d_avg_ms: Option<f64>,
    pub k_achieved: Option<usize>,
    pub feasible: Option<bool>,
    /// Semicolon-joined markers: `cap=...`, `met=...`, `skipped=budget`,
    /// `timeout`, `error=...`.
    pub note: String,
    pub wall_ms: f64,
}

impl ResultRow {
    /// Metrics present and re-certification passed.
    pub fn usable(&self) -> bool {
        self.feasible == Some(true)
    }

    fn axis_key(&self) -> (u32, Option<usize>, u64) {
        (self.n, self.k, self.d_max_ms.unwrap_or(0.0).to_bits())
    }
}

pub const CSV_HEADER: &str =
    "config,n,k,d_max_ms,algorithm,seed,d_avg_ms,k_achieved,feasible,note,wall_ms";

fn opt_str<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

/// Serializes rows to CSV text, header first. Row order is preserved.
pub fn write_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.config,
            r.n,
            opt_str(&r.k),
            opt_str(&r.d_max_ms),
            r.algorithm,
            r.seed,
            opt_str(&r.d_avg_ms),
            opt_str(&r.k_achieved),
            opt_str(&r.feasible),
            r.note,
            r.wall_ms,
        );
    }
    out
}

/// Parses CSV text produced by [`write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<ResultRow>, BenchError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(BenchError::Csv(format!(
                "bad header {other:?}; expected {CSV_HEADER:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| BenchError::Csv(format!("line {}: {msg}", i + 2));
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(err(format!("expected 11 fields, got {}", fields.len())));
        }
        fn opt_parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<Option<T>, String> {
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| format!("bad {what} {s:?}"))
        }
        rows.push(ResultRow {
            config: fields[0].to_string(),
            n: fields[1].parse().map_err(|_| err(format!("bad n {:?}", fields[1])))?,
            k: opt_parse(fields[2], "k").map_err(&err)?,
            d_max_ms: opt_parse(fields[3], "d_max_ms").map_err(&err)?,
            algorithm: Algorithm::parse(fields[4])
                .ok_or_else(|| err(format!("bad algorithm {:?}", fields[4])))?,
            seed: fields[5].parse().map_err(|_| err(format!("bad seed {:?}", fields[5])))?,
            d_avg_ms: opt_parse(fields[6], "d_avg_ms").map_err(&err)?,
            k_achieved: opt_parse(fields[7], "k_achieved").map_err(&err)?,
            feasible: opt_parse(fields[8], "feasible").map_err(&err)?,
            note: fields[9].to_string(),
            wall_ms: fields[10].parse().map_err(|_| err(format!("bad wall_ms {:?}", fields[10])))?,
        });
    }
    Ok(rows)
}

/// Per-(point, algorithm) aggregate. Means cover usable rows only; skipped
/// and failed rows are counted, never averaged in.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub config: String,
    pub n: u32,
    pub k: Option<usize>,
    pub d_max_ms: Option<f64>,
    pub algorithm: Algorithm,
    pub reps: u32,
    pub skipped: u32,
    pub failed: u32,
    pub d_avg_mean: Option<f64>,
    pub d_avg_std: Option<f64>,
    pub k_mean: Option<f64>,
    /// Mean delay relative to the exact solver at the same point; empty
    /// when the exact rows are missing or were all skipped.
    pub ratio_delay: Option<f64>,
    /// Mean achieved count relative to the exact solver at the same point.
    pub ratio_k: Option<f64>,
    pub wall_ms_mean: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn ratio(num: Option<f64>, den: Option<f64>) -> Option<f64> {
    match (num, den) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        (Some(a), Some(b)) if b == 0.0 && a == 0.0 => Some(1.0),
        _ => None,
    }
}

/// Aggregates raw rows into one row per (point, algorithm), with
/// ratio-to-exact columns where exact rows exist. Rows must come from a
/// single experiment.
pub fn summarize(rows: &[ResultRow]) -> Result<Vec<SummaryRow>, BenchError> {
    let first = rows
        .first()
        .ok_or_else(|| BenchError::Config("no rows to summarize".into()))?;
    if let Some(other) = rows.iter().find(|r| r.config != first.config) {
        return Err(BenchError::MixedConfigs(
            first.config.clone(),
            other.config.clone(),
        ));
    }

    type CellKey = ((u32, Option<usize>, u64), Algorithm);
    let mut cells: BTreeMap<CellKey, Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        cells.entry((r.axis_key(), r.algorithm)).or_default().push(r);
    }

    // Exact-solver means per point, looked up by the non-exact rows.
    let mut opt_means: BTreeMap<(u32, Option<usize>, u64), (Option<f64>, Option<f64>)> =
        BTreeMap::new();
    for ((axis, alg), cell) in &cells {
        if *alg != Algorithm::Opt {
            continue;
        }
        let usable: Vec<&&ResultRow> = cell.iter().filter(|r| r.usable()).collect();
        let d = usable.iter().filter_map(|r| r.d_avg_ms).collect::<Vec<_>>();
        let k = usable
            .iter()
            .filter_map(|r| r.k_achieved.map(|v| v as f64))
            .collect::<Vec<_>>();
        let dm = (!d.is_empty()).then(|| mean_std(&d).0);
        let km = (!k.is_empty()).then(|| mean_std(&k).0);
        opt_means.insert(*axis, (dm, km));
    }

    let mut out = Vec::with_capacity(cells.len());
    for ((axis, alg), cell) in &cells {
        let usable: Vec<&&ResultRow> = cell.iter().filter(|r| r.usable()).collect();
        let skipped = cell.iter().filter(|r| r.feasible.is_none()).count() as u32;
        let failed = cell.iter().filter(|r| r.feasible == Some(false)).count() as u32;
        let d: Vec<f64> = usable.iter().filter_map(|r| r.d_avg_ms).collect();
        let k: Vec<f64> = usable
            .iter()
            .filter_map(|r| r.k_achieved.map(|v| v as f64))
            .collect();
        let (d_avg_mean, d_avg_std) = if d.is_empty() {
            (None, None)
        } else {
            let (m, s) = mean_std(&d);
            (Some(m), Some(s))
        };
        let k_mean = (!k.is_empty()).then(|| mean_std(&k).0);
        let (opt_d, opt_k) = opt_means.get(axis).copied().unwrap_or((None, None));
        let sample = cell[0];
        out.push(SummaryRow {
            config: sample.config.clone(),
            n: sample.n,
            k: sample.k,
            d_max_ms: sample.d_max_ms,
            algorithm: *alg,
            reps: cell.len() as u32,
            skipped,
            failed,
            d_avg_mean,
            d_avg_std,
            k_mean,
            ratio_delay: ratio(d_avg_mean, opt_d),
            ratio_k: ratio(k_mean, opt_k),
            wall_ms_mean: {
                let w: Vec<f64> = cell.iter().map(|r| r.wall_ms).collect();
                mean_std(&w).0
            },
        });
    }
    Ok(out)
}

pub const SUMMARY_HEADER: &str = "config,n,k,d_max_ms,algorithm,reps,skipped,failed,\
     d_avg_mean,d_avg_std,k_mean,ratio_delay,ratio_k,wall_ms_mean";

/// Summary rows as CSV.
pub fn summary_csv(summary: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for s in summary {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.config,
            s.n,
            opt_str(&s.k),
            opt_str(&s.d_max_ms),
            s.algorithm,
            s.reps,
            s.skipped,
            s.failed,
            opt_str(&s.d_avg_mean),
            opt_str(&s.d_avg_std),
            opt_str(&s.k_mean),
            opt_str(&s.ratio_delay),
            opt_str(&s.ratio_k),
            s.wall_ms_mean,
        );
    }
    out
}

/// Summary rows as an aligned text table for terminals.
pub fn summary_text(summary: &[SummaryRow]) -> String {
    let headers = [
        "n", "k", "d_max", "algorithm", "reps", "skip", "fail", "d_avg", "std", "k_mean",
        "r_delay", "r_k", "wall_ms",
    ];
    let f3 = |v: &Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
    let mut grid: Vec<Vec<String>> = vec![headers.iter().map(|s| s.to_string()).collect()];
    for s in summary {
        grid.push(vec![
            s.n.to_string(),
            s.k.map(|k| k.to_string()).unwrap_or_else(|| "-".into()),
            f3(&s.d_max_ms),
            s.algorithm.to_string(),
            s.reps.to_string(),
            s.skipped.to_string(),
            s.failed.to_string(),
            f3(&s.d_avg_mean),
            f3(&s.d_avg_std),
            f3(&s.k_mean),
            f3(&s.ratio_delay),
            f3(&s.ratio_k),
            format!("{:.3}", s.wall_ms_mean),
        ]);
    }
    let widths: Vec<usize> = (0..headers.len())
        .map(|c| grid.iter().map(|row| row[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &grid {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let _ = write!(line, "{cell:>width$}", width = widths[c]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}
