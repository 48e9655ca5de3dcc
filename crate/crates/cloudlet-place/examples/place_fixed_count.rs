//! Place a fixed number of cloudlets with each heuristic and compare the
//! average access delay they achieve.
//!
//! ```sh
//! cargo run --example place_fixed_count
//! ```

use cloudlet_place::delaymap::all_pairs_delay;
use cloudlet_place::netmodel::{generate, CloudletSpec, GenParams};
use cloudlet_place::qoecp::{
    evaluate, heuristic_baseline, mdc, mde, random_placement, topk_placement, Placement,
    DEFAULT_MAX_ITERS,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GenParams { n: 60, ..GenParams::default() };
    let inst = generate(&params, 7)?;
    let map = all_pairs_delay(&inst)?;
    let k = 6;

    // Capacity covering the total demand is not enough for the greedy
    // packers when demands are lumpy; 25% headroom per cloudlet keeps
    // every request placeable.
    let per = inst.gamma_sum().div_ceil(k as u64) * 5 / 4;
    let spec = CloudletSpec::designated(vec![per; k])?;

    let mut results: Vec<(&str, Placement)> = vec![
        // Clustering ignores capacities; it only needs the count.
        ("mdc (clustering)", mdc(&inst, &map, k, 1, DEFAULT_MAX_ITERS)?),
        ("mde (greedy)", mde(&inst, &map, &spec)?),
        ("repeated-sorting", heuristic_baseline(&inst, &map, &spec)?),
        ("random", random_placement(&inst, &map, &spec, 1)?),
        ("top-k demand", topk_placement(&inst, &map, &spec)?),
    ];
    results.sort_by(|a, b| a.1.avg_delay_ms.total_cmp(&b.1.avg_delay_ms));

    println!("{k} cloudlets on {} APs, {} requests\n", inst.n(), inst.r_tot());
    println!("{:<18} {:>12} {:>28}", "algorithm", "avg delay", "locations");
    for (name, p) in &results {
        // evaluate() recomputes everything from the raw assignment and
        // rejects capacity or coverage violations.
        let report = evaluate(&inst, &map, p)?;
        let locs: Vec<String> = p.locations.iter().map(ToString::to_string).collect();
        println!("{:<18} {:>9.3} ms {:>28}", name, report.avg_delay_ms, locs.join(" "));
    }
    Ok(())
}
