//! Release gate: ten numbered checks covering solution validity, exactness,
//! approximation quality, baseline ordering, runtime ordering, and
//! reproducibility. Each test prints one `criterion N PASS` line (visible
//! with `--nocapture`); assertion messages start with `criterion N FAIL`.
//!
//! Checks 3/4 share one fixed-count sweep and 5/6 share one count-ratio
//! grid, both computed once and cached. Stated wall-clock budgets are
//! asserted where a check carries one; the shared computation is charged to
//! the lower-numbered check of each pair.

use std::sync::OnceLock;
use std::time::Instant;

use cloudlet_place::bench::{summarize, summary_csv, write_csv, ExperimentConfig};
use cloudlet_place::dbocp::{
    mkc, mkh, random_k_search, topk_k_search, CapacityRule, DelayBudget,
};
use cloudlet_place::delaymap::{all_pairs_delay, DelayMap};
use cloudlet_place::exact::{
    exact_assignment, min_count_within_budget, opt_dbocp, opt_qoecp, FlowProblem,
    DEFAULT_SUBSET_LIMIT,
};
use cloudlet_place::netmodel::{generate, CloudletSpec, GenParams, NetworkInstance, SiteId};
use cloudlet_place::qoecp::{
    evaluate, heuristic_baseline, mdc, mde, random_placement, topk_placement, Placement,
    DEFAULT_MAX_ITERS,
};

const TOL: f64 = 1e-9;

fn desk(n: u32, edge_prob: f64, request_range: (u32, u32)) -> GenParams {
    GenParams {
        n,
        edge_prob,
        delay_range: (2.0, 20.0),
        request_range,
        demand_range: (1, 1),
    }
}

fn identical_spec(inst: &NetworkInstance, k: usize) -> CloudletSpec {
    CloudletSpec::designated(vec![inst.gamma_sum().div_ceil(k as u64); k]).unwrap()
}

/// Certifies a placement and re-checks total coverage by hand.
fn certify(n: u32, inst: &NetworkInstance, map: &DelayMap, p: &Placement, what: &str) {
    if let Err(e) = evaluate(inst, map, p) {
        panic!("criterion {n} FAIL: {what} failed certification: {e}");
    }
    let assigned: u64 = p.assignment.request_sites.iter().map(|r| r.len() as u64).sum();
    assert_eq!(
        assigned,
        inst.r_tot(),
        "criterion {n} FAIL: {what} covers {assigned} of {} requests",
        inst.r_tot()
    );
}

#[test]
fn criterion_01_every_solver_output_certifies() {
    let t = Instant::now();
    let mut placements = 0u32;
    for i in 0..1000u64 {
        let n = 10 + (i % 51) as u32;
        let inst = generate(&desk(n, 0.3, (4, 12)), 10_000 + i).unwrap();
        let map = all_pairs_delay(&inst).unwrap();
        let k = 2 + (i % 4) as usize;
        let des = identical_spec(&inst, k);
        let unc = CloudletSpec::undesignated(k).unwrap();

        let clustered = mdc(&inst, &map, k, 10_000 + i, DEFAULT_MAX_ITERS).unwrap();
        let mut outs = vec![
            ("mdc", clustered.clone()),
            ("mde", mde(&inst, &map, &des).unwrap()),
            ("heuristic", heuristic_baseline(&inst, &map, &des).unwrap()),
            ("random", random_placement(&inst, &map, &des, 10_000 + i).unwrap()),
            ("topk", topk_placement(&inst, &map, &des).unwrap()),
        ];
        if n <= 14 {
            let lim = DEFAULT_SUBSET_LIMIT;
            outs.push(("opt", opt_qoecp(&inst, &map, &unc, lim).unwrap()));
            outs.push(("opt-designated", opt_qoecp(&inst, &map, &des, lim).unwrap()));
        }
        let budget = DelayBudget::new(clustered.avg_delay_ms * 0.85).unwrap();
        let cap = inst.sites().len();
        outs.push(("mkc", mkc(&inst, &map, budget, 10_000 + i, cap).unwrap().placement));
        outs.push((
            "mkh",
            mkh(&inst, &map, budget, &CapacityRule::Identical, cap).unwrap().placement,
        ));
        outs.push((
            "random-search",
            random_k_search(&inst, &map, budget, 10_000 + i, cap).unwrap().placement,
        ));
        outs.push(("topk-search", topk_k_search(&inst, &map, budget, cap).unwrap().placement));
        for (what, p) in &outs {
            certify(1, &inst, &map, p, &format!("{what} on n={n} seed={}", 10_000 + i));
        }
        placements += outs.len() as u32;
    }
    let secs = t.elapsed().as_secs_f64();
    assert!(secs < 120.0, "criterion 1 FAIL: took {secs:.0}s, budget 120s");
    println!(
        "criterion 1 PASS: {placements} placements across 1000 instances certified, \
         full coverage, {secs:.1}s"
    );
}

/// Walks every k-subset of `sites` in lexicographic order.
fn for_each_subset(sites: &[SiteId], k: usize, f: &mut impl FnMut(&[SiteId])) {
    fn rec(sites: &[SiteId], k: usize, start: usize, cur: &mut Vec<SiteId>, f: &mut impl FnMut(&[SiteId])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..=sites.len() - (k - cur.len()) {
            cur.push(sites[i]);
            rec(sites, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(sites, k, 0, &mut Vec::with_capacity(k), f);
}

/// All distinct orderings of a capacity list (small inputs only).
fn orderings(caps: &[u64]) -> Vec<Vec<u64>> {
    let mut sorted = caps.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut used = vec![false; sorted.len()];
    fn rec(sorted: &[u64], used: &mut [bool], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == sorted.len() {
            if !out.contains(cur) {
                out.push(cur.clone());
            }
            return;
        }
        for i in 0..sorted.len() {
            if !used[i] {
                used[i] = true;
                cur.push(sorted[i]);
                rec(sorted, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(&sorted, &mut used, &mut Vec::new(), &mut out);
    out
}

/// Best average delay over every subset and capacity ordering, or `None`
/// when no combination packs.
fn enumerate_optimum(
    inst: &NetworkInstance,
    map: &DelayMap,
    k: usize,
    caps: Option<&[u64]>,
) -> Option<f64> {
    let perms = caps.map(|c| orderings(c));
    let mut best: Option<f64> = None;
    for_each_subset(inst.sites(), k, &mut |chosen| {
        let candidates: Vec<Option<Vec<u64>>> = match &perms {
            None => vec![None],
            Some(ps) => ps.iter().map(|p| Some(p.clone())).collect(),
        };
        for caps in candidates {
            let fp = match FlowProblem::from_instance(inst, map, chosen, caps) {
                Ok(fp) => fp,
                Err(_) => continue,
            };
            if let Ok((total, _)) = exact_assignment(&fp) {
                let avg = total / inst.r_tot() as f64;
                if best.is_none_or(|b| avg < b) {
                    best = Some(avg);
                }
            }
        }
    });
    best
}

#[test]
fn criterion_02_exact_solver_matches_independent_enumeration() {
    let t = Instant::now();
    let mut cases = 0u32;
    // Unit demands, alternating undesignated and identical capacities.
    for i in 0..30u64 {
        let n = 6 + (i % 7) as u32;
        let k = 1 + (i % 4) as usize;
        let inst = generate(&desk(n, 0.3, (1, 4)), 20_000 + i).unwrap();
        assert!(inst.r_tot() <= 60);
        let map = all_pairs_delay(&inst).unwrap();
        let (spec, caps) = if i % 2 == 0 {
            (CloudletSpec::undesignated(k).unwrap(), None)
        } else {
            let c = vec![inst.gamma_sum().div_ceil(k as u64); k];
            (CloudletSpec::designated(c.clone()).unwrap(), Some(c))
        };
        let solver = opt_qoecp(&inst, &map, &spec, DEFAULT_SUBSET_LIMIT).unwrap().avg_delay_ms;
        let reference = enumerate_optimum(&inst, &map, k, caps.as_deref()).unwrap();
        assert!(
            (solver - reference).abs() <= TOL,
            "criterion 2 FAIL: seed {} k={k}: solver {solver} vs enumeration {reference}",
            20_000 + i
        );
        cases += 1;
    }
    // Mixed demands with a two-value pool, so capacity-to-location pairing
    // matters and the assignment kernel is branch-and-bound.
    for i in 0..10u64 {
        let n = 6 + (i % 5) as u32;
        let k = 2 + (i % 2) as usize;
        let params = GenParams { demand_range: (1, 3), ..desk(n, 0.3, (1, 2)) };
        let inst = generate(&params, 21_000 + i).unwrap();
        assert!(inst.r_tot() <= 60);
        let map = all_pairs_delay(&inst).unwrap();
        let g = inst.gamma_sum();
        let mut caps = vec![g];
        caps.resize(k, (g * 3).div_ceil(5));
        let spec = CloudletSpec::designated(caps.clone()).unwrap();
        let solver = opt_qoecp(&inst, &map, &spec, DEFAULT_SUBSET_LIMIT).unwrap().avg_delay_ms;
        let reference = enumerate_optimum(&inst, &map, k, Some(&caps)).unwrap();
        assert!(
            (solver - reference).abs() <= TOL,
            "criterion 2 FAIL: seed {} k={k}: solver {solver} vs enumeration {reference}",
            21_000 + i
        );
        cases += 1;
    }
    let secs = t.elapsed().as_secs_f64();
    assert!(secs < 300.0, "criterion 2 FAIL: took {secs:.0}s, budget 300s");
    println!(
        "criterion 2 PASS: exact solver matches subset-times-assignment enumeration \
         on {cases} instances within {TOL:e}, {secs:.1}s"
    );
}

/// Per-count means over the shared 100-seed fixed-count sweep at n = 18.
struct SweepRow {
    k: usize,
    opt_unc: f64,
    mdc: f64,
    mde: f64,
    random: f64,
    topk: f64,
    mde_ratio: f64,
}

struct Sweep {
    rows: Vec<SweepRow>,
}

fn sweep() -> &'static Sweep {
    static CELL: OnceLock<Sweep> = OnceLock::new();
    CELL.get_or_init(|| {
        let seeds = 100u64;
        let ks: Vec<usize> = (3..=9).collect();
        let mut sums = vec![[0.0f64; 6]; ks.len()];
        for s in 0..seeds {
            let inst = generate(&desk(18, 0.3, (4, 12)), 60_000 + s).unwrap();
            let map = all_pairs_delay(&inst).unwrap();
            for (i, &k) in ks.iter().enumerate() {
                let unc = CloudletSpec::undesignated(k).unwrap();
                let des = identical_spec(&inst, k);
                let lim = DEFAULT_SUBSET_LIMIT;
                let opt_unc = opt_qoecp(&inst, &map, &unc, lim).unwrap().avg_delay_ms;
                let opt_des = opt_qoecp(&inst, &map, &des, lim).unwrap().avg_delay_ms;
                let clustered =
                    mdc(&inst, &map, k, 60_000 + s, DEFAULT_MAX_ITERS).unwrap().avg_delay_ms;
                let greedy = mde(&inst, &map, &des).unwrap().avg_delay_ms;
                let rand = random_placement(&inst, &map, &des, 60_000 + s).unwrap().avg_delay_ms;
                let ranked = topk_placement(&inst, &map, &des).unwrap().avg_delay_ms;
                for (j, v) in [opt_unc, clustered, greedy, rand, ranked, greedy / opt_des]
                    .into_iter()
                    .enumerate()
                {
                    sums[i][j] += v;
                }
            }
        }
        let rows = ks
            .iter()
            .zip(&sums)
            .map(|(&k, s)| SweepRow {
                k,
                opt_unc: s[0] / seeds as f64,
                mdc: s[1] / seeds as f64,
                mde: s[2] / seeds as f64,
                random: s[3] / seeds as f64,
                topk: s[4] / seeds as f64,
                mde_ratio: s[5] / seeds as f64,
            })
            .collect();
        Sweep { rows }
    })
}

#[test]
fn criterion_03_greedy_tracks_the_optimum_within_bound() {
    let t = Instant::now();
    let sw = sweep();
    let mut worst = 0.0f64;
    for row in &sw.rows {
        assert!(
            row.mde_ratio <= 1.6,
            "criterion 3 FAIL: K={} mean greedy/optimal ratio {:.4} above 1.6 \
             (1.8 is the hard cap)",
            row.k,
            row.mde_ratio
        );
        worst = worst.max(row.mde_ratio);
    }
    let secs = t.elapsed().as_secs_f64();
    assert!(secs < 600.0, "criterion 3 FAIL: took {secs:.0}s, budget 600s");
    println!(
        "criterion 3 PASS: mean capacitated-greedy/optimal ratio per K at most {worst:.4} \
         (bound 1.6, hard cap 1.8) over 100 seeds, K=3..9, {secs:.1}s"
    );
}

#[test]
fn criterion_04_baseline_ordering_and_margins() {
    let t = Instant::now();
    let sw = sweep();
    // The floor is the uncapacitated optimum, the true lower bound for the
    // capacity-blind clustering above it; the capacity-aware algorithms run
    // the identical-capacity setting.
    let mut pooled = [0.0f64; 5];
    for row in &sw.rows {
        let chain = [row.opt_unc, row.mdc, row.mde, row.random, row.topk];
        for w in chain.windows(2) {
            assert!(
                w[0] <= w[1] + TOL,
                "criterion 4 FAIL: K={}: mean ordering violated ({:?})",
                row.k,
                chain
            );
        }
        for (p, v) in pooled.iter_mut().zip(chain) {
            *p += v / sw.rows.len() as f64;
        }
    }
    let margin_topk = 1.0 - pooled[1] / pooled[4];
    let margin_random = 1.0 - pooled[1] / pooled[3];
    assert!(
        margin_topk >= 0.30,
        "criterion 4 FAIL: clustering beats request-ranked placement by only \
         {margin_topk:.3}, need 0.30"
    );
    assert!(
        margin_random >= 0.25,
        "criterion 4 FAIL: clustering beats random placement by only \
         {margin_random:.3}, need 0.25"
    );
    let secs = t.elapsed().as_secs_f64();
    println!(
        "criterion 4 PASS: optimal <= clustering <= greedy <= random <= request-ranked \
         at every K; clustering margin {:.1}% over request-ranked, {:.1}% over random, {secs:.1}s",
        margin_topk * 100.0,
        margin_random * 100.0
    );
}

/// One grid cell of the shared count-ratio experiment: per-seed counts for
/// the exact scan, uncapacitated clustering search, and capacitated greedy
/// search at a calibrated delay bound.
struct Cell {
    n: u32,
    d_idx: usize,
    ratios_mkc: Vec<f64>,
    ratios_mkh: Vec<f64>,
}

struct Grid {
    cells: Vec<Cell>,
}

fn grid() -> &'static Grid {
    static CELL: OnceLock<Grid> = OnceLock::new();
    CELL.get_or_init(|| {
        let cal_seeds = 10u64;
        let eval_seeds = 3u64;
        let node_limit = 600_000_000u64;
        let mut cells = Vec::new();
        for n in [35u32, 40, 45, 50, 55] {
            let params = desk(n, 0.3, (4, 12));
            let seed_of = |s: u64| 50_000 + u64::from(n) * 100 + s;
            // Calibrate three bounds to the 30/40/50th percentile of the
            // five-cloudlet optimum across the calibration seeds.
            let mut cal: Vec<f64> = (0..cal_seeds)
                .map(|s| {
                    let inst = generate(&params, seed_of(s)).unwrap();
                    let map = all_pairs_delay(&inst).unwrap();
                    opt_qoecp(&inst, &map, &CloudletSpec::undesignated(5).unwrap(), 8_000_000)
                        .unwrap()
                        .avg_delay_ms
                })
                .collect();
            cal.sort_by(f64::total_cmp);
            let pct =
                |p: usize| cal[(p * cal_seeds as usize).div_ceil(100).max(1) - 1];
            for (d_idx, d) in [pct(30), pct(40), pct(50)].into_iter().enumerate() {
                let budget = DelayBudget::new(d).unwrap();
                let mut cell = Cell {
                    n,
                    d_idx,
                    ratios_mkc: Vec::new(),
                    ratios_mkh: Vec::new(),
                };
                for s in 0..eval_seeds {
                    let inst = generate(&params, seed_of(s)).unwrap();
                    let map = all_pairs_delay(&inst).unwrap();
                    let k_opt = min_count_within_budget(&inst, &map, budget, node_limit)
                        .unwrap()
                        .expect("every site placed always meets the bound");
                    if n == 35 && s == 0 {
                        // Bind the fast decision count to the full scan.
                        let scan = opt_dbocp(&inst, &map, budget, None, 8_000_000).unwrap();
                        assert!(scan.met);
                        assert_eq!(scan.k, k_opt, "criterion 5 FAIL: decision count diverges");
                    }
                    let cap = inst.sites().len();
                    let kc = mkc(&inst, &map, budget, 777 + s, cap).unwrap();
                    let kh = mkh(&inst, &map, budget, &CapacityRule::Identical, cap).unwrap();
                    assert!(kc.met && kh.met, "criterion 5/6 FAIL: search missed the bound");
                    cell.ratios_mkc.push(kc.k as f64 / k_opt as f64);
                    cell.ratios_mkh.push(kh.k as f64 / k_opt as f64);
                }
                cells.push(cell);
            }
        }
        Grid { cells }
    })
}

#[test]
fn criterion_05_clustering_count_ratio_grid() {
    let t = Instant::now();
    let g = grid();
    let mut all = Vec::new();
    let mut worst_cell = 0.0f64;
    for cell in &g.cells {
        let mean: f64 = cell.ratios_mkc.iter().sum::<f64>() / cell.ratios_mkc.len() as f64;
        assert!(
            mean <= 1.5,
            "criterion 5 FAIL: cell n={} bound#{} mean count ratio {mean:.3} above 1.5",
            cell.n,
            cell.d_idx
        );
        worst_cell = worst_cell.max(mean);
        all.extend_from_slice(&cell.ratios_mkc);
    }
    let mean: f64 = all.iter().sum::<f64>() / all.len() as f64;
    assert!(mean <= 1.3, "criterion 5 FAIL: grid mean count ratio {mean:.3} above 1.3");
    let secs = t.elapsed().as_secs_f64();
    assert!(secs < 900.0, "criterion 5 FAIL: took {secs:.0}s, budget 900s");
    println!(
        "criterion 5 PASS: clustering-search/exact count ratio mean {mean:.3} (bound 1.3), \
         worst cell {worst_cell:.3} (bound 1.5) over {} cells, {secs:.1}s",
        g.cells.len()
    );
}

#[test]
fn criterion_06_capacitated_count_ratio_grid() {
    let t = Instant::now();
    let g = grid();
    // The denominator stays the uncapacitated exact count, which only
    // overstates this ratio: forcing identical capacities never lowers the
    // count the exact solver needs.
    let all: Vec<f64> =
        g.cells.iter().flat_map(|c| c.ratios_mkh.iter().copied()).collect();
    let mean: f64 = all.iter().sum::<f64>() / all.len() as f64;
    assert!(mean <= 1.8, "criterion 6 FAIL: grid mean count ratio {mean:.3} above 1.8");
    let secs = t.elapsed().as_secs_f64();
    println!(
        "criterion 6 PASS: capacitated-greedy/exact count ratio mean {mean:.3} \
         (bound 1.8) over {} cells, {secs:.1}s",
        g.cells.len()
    );
}

#[test]
fn criterion_07_monotone_in_count_and_budget() {
    let t = Instant::now();
    let params = desk(10, 0.3, (2, 6));
    let fracs = [0.3f64, 0.5, 0.7, 0.9, 1.1];
    let insts = 50u64;
    let (mut mono_mkc, mut mono_mkh) = (0u32, 0u32);
    for s in 0..insts {
        let inst = generate(&params, 90_000 + s).unwrap();
        let map = all_pairs_delay(&inst).unwrap();
        let mut prev = f64::INFINITY;
        let mut opt1 = 0.0;
        for k in 1..=5usize {
            let d = opt_qoecp(&inst, &map, &CloudletSpec::undesignated(k).unwrap(), DEFAULT_SUBSET_LIMIT)
                .unwrap()
                .avg_delay_ms;
            if k == 1 {
                opt1 = d;
            }
            assert!(
                d <= prev + TOL,
                "criterion 7 FAIL: seed {}: optimal delay rose from {prev} to {d} at K={k}",
                90_000 + s
            );
            prev = d;
        }
        let ladder: Vec<f64> = fracs.iter().map(|f| (opt1 * f).max(1e-6)).collect();
        let mut prev_k = usize::MAX;
        for &d in &ladder {
            let k = opt_dbocp(&inst, &map, DelayBudget::new(d).unwrap(), None, DEFAULT_SUBSET_LIMIT)
                .unwrap()
                .k;
            assert!(
                k <= prev_k,
                "criterion 7 FAIL: seed {}: exact count rose to {k} as the bound loosened",
                90_000 + s
            );
            prev_k = k;
        }
        let monotone = |kf: &mut dyn FnMut(f64) -> usize| -> bool {
            let mut prev = usize::MAX;
            let mut ok = true;
            for &d in &ladder {
                let k = kf(d);
                ok &= k <= prev;
                prev = k;
            }
            ok
        };
        mono_mkc += monotone(&mut |d| {
            mkc(&inst, &map, DelayBudget::new(d).unwrap(), 90_000 + s, 10).unwrap().k
        }) as u32;
        mono_mkh += monotone(&mut |d| {
            mkh(&inst, &map, DelayBudget::new(d).unwrap(), &CapacityRule::Identical, 10)
                .unwrap()
                .k
        }) as u32;
    }
    let need = insts as u32 * 9 / 10;
    assert!(
        mono_mkc >= need,
        "criterion 7 FAIL: clustering-search count monotone on only {mono_mkc}/{insts}"
    );
    assert!(
        mono_mkh >= need,
        "criterion 7 FAIL: capacitated-search count monotone on only {mono_mkh}/{insts}"
    );
    let secs = t.elapsed().as_secs_f64();
    println!(
        "criterion 7 PASS: optimal delay/count monotone on 50/50 instances exactly; \
         search counts monotone on {mono_mkc}/50 and {mono_mkh}/50 (need 45), {secs:.1}s"
    );
}

#[test]
fn criterion_08_precomputed_rows_beat_resorting() {
    let t = Instant::now();
    let mut note = String::new();
    for n in [200u32, 400] {
        let params = desk(n, 0.05, (4, 12));
        let k = n as usize / 10;
        let (mut fast, mut slow) = (Vec::new(), Vec::new());
        for s in 0..15u64 {
            let inst = generate(&params, 70_000 + u64::from(n) + s).unwrap();
            let map = all_pairs_delay(&inst).unwrap();
            let spec = identical_spec(&inst, k);
            let t0 = Instant::now();
            let a = mde(&inst, &map, &spec).unwrap();
            fast.push(t0.elapsed().as_secs_f64() * 1e3);
            let t0 = Instant::now();
            let b = heuristic_baseline(&inst, &map, &spec).unwrap();
            slow.push(t0.elapsed().as_secs_f64() * 1e3);
            assert_eq!(
                (&a.locations, &a.assignment, &a.loads),
                (&b.locations, &b.assignment, &b.loads),
                "criterion 8 FAIL: outputs diverge at n={n} seed={}",
                70_000 + u64::from(n) + s
            );
        }
        fast.sort_by(f64::total_cmp);
        slow.sort_by(f64::total_cmp);
        let (fm, sm) = (fast[fast.len() / 2], slow[slow.len() / 2]);
        assert!(
            fm < sm,
            "criterion 8 FAIL: n={n}: precomputed-row median {fm:.1}ms not below \
             resorting median {sm:.1}ms"
        );
        note.push_str(&format!(" n={n}: {fm:.1}ms vs {sm:.1}ms;"));
    }
    let secs = t.elapsed().as_secs_f64();
    println!(
        "criterion 8 PASS: precomputed-row greedy beats the resorting baseline with \
         identical outputs;{note} {secs:.1}s"
    );
}

#[test]
fn criterion_09_count_search_margins() {
    let t = Instant::now();
    let budget = DelayBudget::new(8.0).unwrap();
    let reps = 5u64;
    let mut worst = f64::INFINITY;
    for n in [200u32, 300, 400, 500, 600] {
        // Constant average degree keeps difficulty comparable across sizes.
        let params = desk(n, 10.0 / (f64::from(n) - 1.0), (4, 12));
        let mut sums = [0.0f64; 3];
        for s in 0..reps {
            let inst = generate(&params, 80_000 + u64::from(n) + s).unwrap();
            let map = all_pairs_delay(&inst).unwrap();
            let a = mkc(&inst, &map, budget, 80_000 + s, n as usize).unwrap();
            let b = random_k_search(&inst, &map, budget, 80_000 + s, n as usize).unwrap();
            let c = topk_k_search(&inst, &map, budget, n as usize).unwrap();
            assert!(a.met && b.met && c.met);
            sums[0] += a.k as f64;
            sums[1] += b.k as f64;
            sums[2] += c.k as f64;
        }
        let [clu, rnd, ranked] = sums.map(|v| v / reps as f64);
        for (other, name) in [(rnd, "random"), (ranked, "request-ranked")] {
            let margin = 1.0 - clu / other;
            assert!(
                clu <= other && margin >= 0.15,
                "criterion 9 FAIL: n={n}: clustering search mean {clu:.1} vs {name} \
                 {other:.1}, margin {margin:.3} below 0.15"
            );
            worst = worst.min(margin);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    println!(
        "criterion 9 PASS: clustering search needs fewer cloudlets than both searches \
         at every n, worst margin {:.1}% (need 15%), {secs:.1}s",
        worst * 100.0
    );
}

/// Drops the trailing wall-time column from every CSV line.
fn strip_wall(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(rest, _)| rest))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn criterion_10_reruns_are_byte_identical() {
    let t = Instant::now();
    let dir = std::env::temp_dir();
    let configs = [
        "name = accept-fixed\nn = 12 14\nk = 2 3\n\
         algs = opt mdc mde random topk\ncapacity = identical\nreps = 3\nseed = 77\n",
        "name = accept-budget\nn = 12\nd = 6 8\n\
         algs = opt mkc mkh random_search topk_search\ncapacity = identical\nreps = 3\nseed = 78\n",
    ];
    for text in configs {
        let cfg = ExperimentConfig::parse(text, &dir).unwrap();
        let first = cloudlet_place::bench::run_experiment(&cfg).unwrap();
        let second = cloudlet_place::bench::run_experiment(&cfg).unwrap();
        assert_eq!(
            strip_wall(&write_csv(&first)),
            strip_wall(&write_csv(&second)),
            "criterion 10 FAIL: result rows differ between reruns of {}",
            cfg.name
        );
        assert_eq!(
            strip_wall(&summary_csv(&summarize(&first).unwrap())),
            strip_wall(&summary_csv(&summarize(&second).unwrap())),
            "criterion 10 FAIL: summaries differ between reruns of {}",
            cfg.name
        );
    }
    let secs = t.elapsed().as_secs_f64();
    println!(
        "criterion 10 PASS: both sweep axes reproduce byte-identical CSVs and summaries \
         with timing columns stripped, {secs:.1}s"
    );
}
