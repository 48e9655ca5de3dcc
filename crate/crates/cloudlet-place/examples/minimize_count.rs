//! Find the fewest cloudlets that keep the average access delay under a
//! budget, sweeping the budget to show the cost of tightening it.
//!
//! ```sh
//! cargo run --example minimize_count
//! ```

use cloudlet_place::delaymap::all_pairs_delay;
use cloudlet_place::dbocp::{mkc, mkh, CapacityRule, DelayBudget};
use cloudlet_place::netmodel::{generate, GenParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Unit demands so identical capacities sized to the total always pack;
    // mixed demands need headroom (see the capacity pool below).
    let params = GenParams {
        n: 80,
        edge_prob: 0.1,
        delay_range: (5.0, 50.0),
        request_range: (20, 60),
        demand_range: (1, 1),
    };
    let inst = generate(&params, 11)?;
    let map = all_pairs_delay(&inst)?;
    let k_cap = inst.sites().len();

    println!("{} APs, {} requests\n", inst.n(), inst.r_tot());
    println!("{:>11} {:>14} {:>14}", "budget", "mkc (uncap)", "mkh (identical)");
    for budget_ms in [40.0, 30.0, 25.0, 20.0, 16.0] {
        let budget = DelayBudget::new(budget_ms)?;
        let a = mkc(&inst, &map, budget, 1, k_cap)?;
        let b = mkh(&inst, &map, budget, &CapacityRule::Identical, k_cap)?;
        // `met` is recomputed from the assignment, not trusted from the scan.
        assert!(a.met && b.met);
        println!(
            "{:>8} ms {:>8} ({:>6.2} ms) {:>5} ({:>6.2} ms)",
            budget_ms, a.k, a.placement.avg_delay_ms, b.k, b.placement.avg_delay_ms
        );
    }

    // A fixed pool caps how many cloudlets the scan may try.
    let pool = CapacityRule::FixedPool(vec![1600, 1200, 800, 600]);
    let sol = mkh(&inst, &map, DelayBudget::new(25.0)?, &pool, k_cap)?;
    println!(
        "\nfixed pool of 4: k = {}, met = {}, capacities = {:?}",
        sol.k,
        sol.met,
        sol.placement.capacity_limits.as_deref().unwrap_or(&[])
    );
    Ok(())
}
