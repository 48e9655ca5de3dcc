//! Drive a full benchmark sweep from code: parse a config, run every
//! (point, algorithm, repetition) cell, and print the aggregate table.
//!
//! ```sh
//! cargo run --release --example run_benchmark
//! ```

use cloudlet_place::bench::{
    emit_plotdata, run_experiment, summarize, summary_text, write_csv, ExperimentConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = "\
# delay versus cloudlet count, three heuristics against the optimum
name = demo
n = 14
k = 2 3 4
algs = opt mdc mde topk
capacity = identical
reps = 10
seed = 5
request_range = 4 12
demand_range = 1 1
";
    let cfg = ExperimentConfig::parse(text, std::env::temp_dir().as_path())?;
    let rows = run_experiment(&cfg)?;

    let dir = std::env::temp_dir();
    let csv = dir.join("demo.csv");
    std::fs::write(&csv, write_csv(&rows))?;
    println!("wrote {} ({} rows)\n", csv.display(), rows.len());

    let summary = summarize(&rows)?;
    print!("{}", summary_text(&summary));

    // Gnuplot-ready series, one file per algorithm plus a driver script.
    for (name, content) in emit_plotdata(&summary, "delay_vs_k_small")? {
        std::fs::write(dir.join(&name), content)?;
        println!("wrote {}", dir.join(&name).display());
    }
    Ok(())
}
