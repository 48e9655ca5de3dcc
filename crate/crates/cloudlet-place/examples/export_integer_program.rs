//! Write both placement problems as CPLEX LP text for an external solver.
//! Useful when an instance is too large for the built-in exhaustive search.
//!
//! ```sh
//! cargo run --example export_integer_program
//! ```

use cloudlet_place::delaymap::all_pairs_delay;
use cloudlet_place::dbocp::DelayBudget;
use cloudlet_place::exact::{lp_export, LpKind};
use cloudlet_place::netmodel::{generate, CloudletSpec, GenParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GenParams {
        n: 8,
        edge_prob: 0.35,
        delay_range: (2.0, 20.0),
        request_range: (2, 5),
        demand_range: (1, 2),
    };
    let inst = generate(&params, 3)?;
    let map = all_pairs_delay(&inst)?;

    // Fixed count: minimize average delay with two designated cloudlets.
    let spec = CloudletSpec::designated(vec![inst.gamma_sum(), inst.gamma_sum()])?;
    let fixed = lp_export(&inst, &map, &LpKind::Qoecp(spec));

    // Budget: minimize the cloudlet count subject to a 9 ms average.
    let counted = lp_export(
        &inst,
        &map,
        &LpKind::Dbocp { budget: DelayBudget::new(9.0)?, pool: None },
    );

    let dir = std::env::temp_dir();
    let a = dir.join("placement_fixed_count.lp");
    let b = dir.join("placement_min_count.lp");
    std::fs::write(&a, &fixed)?;
    std::fs::write(&b, &counted)?;
    println!("wrote {}", a.display());
    println!("wrote {}", b.display());

    let rows = |t: &str| t.lines().filter(|l| l.starts_with(" c") && l.contains(':')).count();
    println!("\nfixed-count program: {} constraint rows", rows(&fixed));
    println!("min-count program:   {} constraint rows", rows(&counted));
    println!("\nhead of the fixed-count program:");
    for line in fixed.lines().take(6) {
        println!("  {line}");
    }
    Ok(())
}
