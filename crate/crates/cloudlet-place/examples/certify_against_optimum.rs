//! Measure each heuristic against the exhaustive optimum on instances
//! small enough to solve exactly.
//!
//! ```sh
//! cargo run --release --example certify_against_optimum
//! ```

use cloudlet_place::delaymap::all_pairs_delay;
use cloudlet_place::exact::{opt_qoecp, DEFAULT_SUBSET_LIMIT};
use cloudlet_place::netmodel::{generate, CloudletSpec, GenParams};
use cloudlet_place::qoecp::{mdc, mde, random_placement, topk_placement, DEFAULT_MAX_ITERS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GenParams {
        n: 16,
        edge_prob: 0.3,
        delay_range: (2.0, 20.0),
        request_range: (4, 12),
        demand_range: (1, 1),
    };
    let k = 4;
    let seeds: Vec<u64> = (1..=20).collect();

    let mut sums = [0.0f64; 5];
    for &seed in &seeds {
        let inst = generate(&params, seed)?;
        let map = all_pairs_delay(&inst)?;
        let per = inst.gamma_sum().div_ceil(k as u64);
        let spec = CloudletSpec::designated(vec![per; k])?;

        let opt = opt_qoecp(&inst, &map, &spec, DEFAULT_SUBSET_LIMIT)?;
        sums[0] += opt.avg_delay_ms;
        sums[1] += mdc(&inst, &map, k, seed, DEFAULT_MAX_ITERS)?.avg_delay_ms;
        sums[2] += mde(&inst, &map, &spec)?.avg_delay_ms;
        sums[3] += random_placement(&inst, &map, &spec, seed)?.avg_delay_ms;
        sums[4] += topk_placement(&inst, &map, &spec)?.avg_delay_ms;
    }

    let opt_mean = sums[0] / seeds.len() as f64;
    println!("n = {}, k = {k}, {} seeds\n", params.n, seeds.len());
    println!("{:<14} {:>12} {:>10}", "algorithm", "mean delay", "vs opt");
    for (name, sum) in [
        ("optimal", sums[0]),
        ("mdc", sums[1]),
        ("mde", sums[2]),
        ("random", sums[3]),
        ("top-k demand", sums[4]),
    ] {
        let mean = sum / seeds.len() as f64;
        println!("{:<14} {:>9.3} ms {:>9.3}x", name, mean, mean / opt_mean);
    }
    Ok(())
}
