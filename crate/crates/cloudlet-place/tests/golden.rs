//! Byte-level regression pins for every serialized surface: instance text,
//! exact-solver reports, LP exports, and the benchmark CSV pipeline.
//!
//! Each check renders a deterministic artifact and compares it to a file
//! under `golden/`. Set `GOLDEN_REGEN=1` to rewrite the files after an
//! intentional output change; the diff then documents the change in review.

use std::fmt::Write as _;
use std::path::PathBuf;

use cloudlet_place::bench::{summarize, summary_csv, write_csv, ExperimentConfig};
use cloudlet_place::dbocp::{CapacityRule, DelayBudget, KSolution};
use cloudlet_place::delaymap::all_pairs_delay;
use cloudlet_place::exact::{lp_export, opt_dbocp, opt_qoecp, LpKind, DEFAULT_SUBSET_LIMIT};
use cloudlet_place::netmodel::{generate, save_instance, CloudletSpec, GenParams, NetworkInstance};
use cloudlet_place::qoecp::Placement;

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden")
}

fn check(name: &str, rendered: &str) {
    let path = golden_dir().join(name);
    if std::env::var_os("GOLDEN_REGEN").is_some() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&path, rendered).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| {
        panic!("missing golden file {} ({e}); run with GOLDEN_REGEN=1 to create it", path.display())
    });
    assert_eq!(rendered, want, "{name} drifted from its golden copy");
}

/// Small homogeneous instance: unit demands, every AP a candidate site.
fn unit_instance() -> NetworkInstance {
    let params = GenParams {
        n: 10,
        edge_prob: 0.3,
        delay_range: (2.0, 20.0),
        request_range: (4, 12),
        demand_range: (1, 1),
    };
    generate(&params, 3).unwrap()
}

/// Mixed-demand instance at oracle scale (about 20 requests) so the
/// capacitated branch-and-bound kernel stays fast.
fn mixed_instance() -> NetworkInstance {
    let params = GenParams {
        n: 12,
        edge_prob: 0.3,
        delay_range: (2.0, 20.0),
        request_range: (1, 2),
        demand_range: (1, 3),
    };
    generate(&params, 5).unwrap()
}

fn placement_text(p: &Placement) -> String {
    let mut s = String::new();
    let locs: Vec<String> = p.locations.iter().map(ToString::to_string).collect();
    writeln!(s, "locations: {}", locs.join(" ")).unwrap();
    if let Some(caps) = &p.capacity_limits {
        let caps: Vec<String> = caps.iter().map(ToString::to_string).collect();
        writeln!(s, "capacities_mhz: {}", caps.join(" ")).unwrap();
    }
    writeln!(s, "avg_delay_ms: {}", p.avg_delay_ms).unwrap();
    writeln!(s, "total_delay_ms: {}", p.total_delay_ms).unwrap();
    for load in &p.loads {
        writeln!(s, "load: {} {} {}", load.site, load.requests, load.demand_mhz).unwrap();
    }
    s
}

fn ksolution_text(sol: &KSolution) -> String {
    format!("k: {}\nmet: {}\n{}", sol.k, sol.met, placement_text(&sol.placement))
}

#[test]
fn instance_serialization_is_pinned() {
    check("unit_n10_s3.txt", &save_instance(&unit_instance()));
    check("mixed_n12_s5.txt", &save_instance(&mixed_instance()));
}

#[test]
fn exact_fixed_count_reports_are_pinned() {
    let inst = unit_instance();
    let map = all_pairs_delay(&inst).unwrap();
    let spec = CloudletSpec::undesignated(2).unwrap();
    let p = opt_qoecp(&inst, &map, &spec, DEFAULT_SUBSET_LIMIT).unwrap();
    check("opt_unit_k2.txt", &placement_text(&p));

    let inst = mixed_instance();
    let map = all_pairs_delay(&inst).unwrap();
    let per = inst.gamma_sum().div_ceil(3);
    let spec = CloudletSpec::designated(vec![per; 3]).unwrap();
    let p = opt_qoecp(&inst, &map, &spec, DEFAULT_SUBSET_LIMIT).unwrap();
    check("opt_mixed_k3_identical.txt", &placement_text(&p));
}

#[test]
fn exact_count_minimization_report_is_pinned() {
    let inst = unit_instance();
    let map = all_pairs_delay(&inst).unwrap();
    let budget = DelayBudget::new(6.0).unwrap();
    let sol = opt_dbocp(&inst, &map, budget, None, DEFAULT_SUBSET_LIMIT).unwrap();
    check("opt_unit_d6.txt", &ksolution_text(&sol));

    let gamma = inst.gamma_sum();
    let pool = CapacityRule::FixedPool(vec![gamma, gamma.div_ceil(2), gamma.div_ceil(2)]);
    let sol = opt_dbocp(&inst, &map, budget, Some(&pool), DEFAULT_SUBSET_LIMIT).unwrap();
    check("opt_unit_d6_pool.txt", &ksolution_text(&sol));
}

#[test]
fn lp_exports_are_pinned() {
    let inst = unit_instance();
    let map = all_pairs_delay(&inst).unwrap();
    let spec = CloudletSpec::undesignated(2).unwrap();
    check("unit_k2.lp", &lp_export(&inst, &map, &LpKind::Qoecp(spec)));

    let inst = mixed_instance();
    let map = all_pairs_delay(&inst).unwrap();
    let gamma = inst.gamma_sum();
    let kind = LpKind::Dbocp {
        budget: DelayBudget::new(6.0).unwrap(),
        pool: Some(vec![gamma, gamma.div_ceil(2)]),
    };
    check("mixed_d6_pool.lp", &lp_export(&inst, &map, &kind));
}

#[test]
fn bench_pipeline_is_pinned_without_timings() {
    let text = "\
name = golden
n = 10
k = 2 3
algs = opt mdc mde random topk
capacity = identical
reps = 3
seed = 9
request_range = 4 12
demand_range = 1 1
";
    let cfg = ExperimentConfig::parse(text, golden_dir().as_path()).unwrap();
    let rows = cloudlet_place::bench::run_experiment(&cfg).unwrap();

    // The trailing wall-clock column is the one nondeterministic field.
    let stripped: String = write_csv(&rows)
        .lines()
        .map(|l| {
            let (rest, _wall) = l.rsplit_once(',').unwrap();
            format!("{rest}\n")
        })
        .collect();
    check("bench_rows.csv", &stripped);

    let summary = summarize(&rows).unwrap();
    let stripped: String = summary_csv(&summary)
        .lines()
        .map(|l| {
            let (rest, _wall) = l.rsplit_once(',').unwrap();
            format!("{rest}\n")
        })
        .collect();
    check("bench_summary.csv", &stripped);
}
