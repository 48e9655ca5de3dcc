//! Gnuplot-ready series extraction from summary rows.
//!
//! Each figure id picks an x axis and a y metric; the emitter writes one
//! whitespace-separated `.dat` file per algorithm plus a driver script
//! stub. Output is a list of (file name, content) pairs so callers decide
//! where files land. Byte-stable for a fixed summary.

use std::fmt::Write as _;

use super::rows::SummaryRow;
use super::{Algorithm, BenchError};

/// Known figure ids, one per experiment family.
pub const FIGURE_IDS: [&str; 6] = [
    "delay_vs_k_small",
    "delay_vs_k_large",
    "delay_vs_n",
    "runtime_vs_n",
    "k_vs_d",
    "k_vs_n",
];

enum XAxis {
    K,
    N,
    D,
}

enum YMetric {
    DelayMean,
    WallMean,
    KMean,
}

fn figure_spec(id: &str) -> Option<(XAxis, YMetric, &'static str, &'static str)> {
    match id {
        "delay_vs_k_small" | "delay_vs_k_large" => Some((
            XAxis::K,
            YMetric::DelayMean,
            "cloudlets K",
            "average access delay (ms)",
        )),
        "delay_vs_n" => Some((
            XAxis::N,
            YMetric::DelayMean,
            "network size n",
            "average access delay (ms)",
        )),
        "runtime_vs_n" => Some((XAxis::N, YMetric::WallMean, "network size n", "wall time (ms)")),
        "k_vs_d" => Some((XAxis::D, YMetric::KMean, "delay bound D (ms)", "cloudlets placed")),
        "k_vs_n" => Some((XAxis::N, YMetric::KMean, "network size n", "cloudlets placed")),
        _ => None,
    }
}

/// Extracts one series file per algorithm plus a `.gp` driver stub.
/// Summary cells without a usable mean are dropped from their series.
pub fn emit_plotdata(
    summary: &[SummaryRow],
    figure_id: &str,
) -> Result<Vec<(String, String)>, BenchError> {
    let (x_axis, y_metric, xlabel, ylabel) = figure_spec(figure_id)
        .ok_or_else(|| BenchError::UnknownFigure(figure_id.to_string()))?;
    if summary.is_empty() {
        return Err(BenchError::Config("empty summary, nothing to plot".into()));
    }

    let mut files = Vec::new();
    let mut plotted = Vec::new();
    for alg in Algorithm::ALL {
        let mut points: Vec<(f64, f64)> = Vec::new();
        for row in summary.iter().filter(|r| r.algorithm == alg) {
            let x = match x_axis {
                XAxis::K => match row.k {
                    Some(k) => k as f64,
                    None => continue,
                },
                XAxis::N => row.n as f64,
                XAxis::D => match row.d_max_ms {
                    Some(d) => d,
                    None => continue,
                },
            };
            let y = match y_metric {
                YMetric::DelayMean => row.d_avg_mean,
                YMetric::WallMean => Some(row.wall_ms_mean),
                YMetric::KMean => row.k_mean,
            };
            if let Some(y) = y {
                points.push((x, y));
            }
        }
        if points.is_empty() {
            continue;
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut body = format!("# {figure_id}: {alg}\n# x = {xlabel}, y = {ylabel}\n");
        for (x, y) in points {
            let _ = writeln!(body, "{x} {y}");
        }
        let name = format!("{figure_id}.{alg}.dat");
        plotted.push((name.clone(), alg));
        files.push((name, body));
    }
    if files.is_empty() {
        return Err(BenchError::Config(format!(
            "summary has no usable cells for {figure_id}"
        )));
    }

    let mut gp = String::new();
    let _ = writeln!(gp, "set terminal pngcairo size 900,600");
    let _ = writeln!(gp, "set output '{figure_id}.png'");
    let _ = writeln!(gp, "set xlabel '{xlabel}'");
    let _ = writeln!(gp, "set ylabel '{ylabel}'");
    let _ = writeln!(gp, "set key top right");
    let series: Vec<String> = plotted
        .iter()
        .map(|(name, alg)| format!("'{name}' using 1:2 with linespoints title '{alg}'"))
        .collect();
    let _ = writeln!(gp, "plot {}", series.join(", \\\n     "));
    files.push((format!("{figure_id}.gp"), gp));
    Ok(files)
}
