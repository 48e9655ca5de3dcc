//! Cell execution: expand a config, run every (point, algorithm,
//! repetition), re-certify, and collect sorted rows.

use std::time::Instant;

use rayon::prelude::*;

use super::config::{CapacityRegime, ExperimentConfig};
use super::rows::ResultRow;
use super::{point_seed, Algorithm, BenchError, SweepPoint};
use crate::dbocp::{
    mkc, mkh, random_k_search, topk_k_search, CapacityRule, DelayBudget, KSolution,
};
use crate::delaymap::{all_pairs_delay, DelayMap};
use crate::exact::{opt_dbocp, opt_qoecp, OptError};
use crate::netmodel::{CloudletSpec, ModelError, NetworkInstance};
use crate::qoecp::{
    evaluate, heuristic_baseline, mdc, mde, random_placement, topk_placement, PlaceError,
    Placement, DEFAULT_MAX_ITERS,
};
use crate::DELAY_EPS;

/// Runs every cell of the experiment. Rows come back sorted by (point,
/// algorithm, seed) and are deterministic apart from `wall_ms`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, BenchError> {
    let cells: Vec<(SweepPoint, Algorithm)> = cfg
        .points()
        .into_iter()
        .flat_map(|p| cfg.algs.iter().map(move |&a| (p, a)))
        .collect();
    let mut rows: Vec<ResultRow> = cells
        .par_iter()
        .map(|&(point, alg)| run_cell(cfg, point, alg))
        .collect::<Result<Vec<Vec<ResultRow>>, BenchError>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by(|a, b| {
        (a.n, a.k, a.d_max_ms.unwrap_or(0.0).to_bits(), a.algorithm, a.seed).cmp(&(
            b.n,
            b.k,
            b.d_max_ms.unwrap_or(0.0).to_bits(),
            b.algorithm,
            b.seed,
        ))
    });
    Ok(rows)
}

fn run_cell(
    cfg: &ExperimentConfig,
    point: SweepPoint,
    alg: Algorithm,
) -> Result<Vec<ResultRow>, BenchError> {
    let started = Instant::now();
    let mut rows = Vec::with_capacity(cfg.reps as usize);
    for rep in 0..cfg.reps {
        let seed = point_seed(cfg.base_seed, point, rep);
        let timed_out = cfg
            .time_limit_ms
            .is_some_and(|lim| started.elapsed().as_millis() >= u128::from(lim));
        if timed_out {
            rows.push(blank_row(cfg, point, alg, seed, "timeout".into(), 0.0));
            continue;
        }
        let inst = crate::netmodel::generate(&cfg.gen_params(point.n()), seed)?;
        let map = all_pairs_delay(&inst)?;
        let t0 = Instant::now();
        let outcome = run_alg(cfg, point, alg, &inst, &map, seed);
        let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
        rows.push(certify(cfg, point, alg, seed, &inst, &map, outcome, wall_ms));
    }
    Ok(rows)
}

/// What one solver call produced; `Skip` rows carry only a marker.
enum Outcome {
    Placed(Placement, String),
    Counted(KSolution, String),
    Skip(String),
}

fn cap_note(regime: &CapacityRegime, k: usize, gamma: u64) -> String {
    match regime {
        CapacityRegime::None => "cap=none".into(),
        CapacityRegime::Identical => {
            format!("cap=identical:{}x{}", gamma.div_ceil(k as u64).max(1), k)
        }
        CapacityRegime::Pool(pool) => {
            let mut caps = pool.clone();
            caps.sort_unstable_by(|a, b| b.cmp(a));
            caps.truncate(k);
            let joined: Vec<String> = caps.iter().map(u64::to_string).collect();
            format!("cap=pool:{}", joined.join("+"))
        }
    }
}

/// Capacity spec for a fixed-count point, or a skip marker when the regime
/// cannot produce K cloudlets.
fn spec_for(
    regime: &CapacityRegime,
    k: usize,
    gamma: u64,
) -> Result<CloudletSpec, Result<String, ModelError>> {
    match regime {
        CapacityRegime::None => CloudletSpec::undesignated(k).map_err(Err),
        CapacityRegime::Identical => {
            CloudletSpec::designated(CapacityRule::Identical.capacities(k, gamma)).map_err(Err)
        }
        CapacityRegime::Pool(pool) => {
            if pool.len() < k {
                return Err(Ok(format!("error=pool-short:{}<{k}", pool.len())));
            }
            CloudletSpec::designated(CapacityRule::FixedPool(pool.clone()).capacities(k, gamma))
                .map_err(Err)
        }
    }
}

fn run_alg(
    cfg: &ExperimentConfig,
    point: SweepPoint,
    alg: Algorithm,
    inst: &NetworkInstance,
    map: &DelayMap,
    seed: u64,
) -> Outcome {
    let gamma = inst.gamma_sum();
    match point {
        SweepPoint::FixedCount { k, .. } => {
            // The clustering solver is capacity-blind; everything else
            // honors the configured regime.
            let regime = if alg == Algorithm::Mdc { &CapacityRegime::None } else { &cfg.capacity };
            let note = cap_note(regime, k, gamma);
            let spec = match spec_for(regime, k, gamma) {
                Ok(s) => s,
                Err(Ok(marker)) => return Outcome::Skip(marker),
                Err(Err(e)) => return Outcome::Skip(format!("error=model:{e}")),
            };
            let placed = match alg {
                Algorithm::Mdc => mdc(inst, map, k, seed, DEFAULT_MAX_ITERS),
                Algorithm::Mde => mde(inst, map, &spec),
                Algorithm::Heuristic => heuristic_baseline(inst, map, &spec),
                Algorithm::Random => random_placement(inst, map, &spec, seed),
                Algorithm::TopK => topk_placement(inst, map, &spec),
                Algorithm::Opt => {
                    return match opt_qoecp(inst, map, &spec, cfg.subset_limit) {
                        Ok(p) => Outcome::Placed(p, note),
                        Err(e) => Outcome::Skip(opt_marker(e)),
                    }
                }
                _ => unreachable!("axis validated at parse"),
            };
            match placed {
                Ok(p) => Outcome::Placed(p, note),
                Err(e) => Outcome::Skip(place_marker(e)),
            }
        }
        SweepPoint::Budget { d_max_ms, .. } => {
            let budget = match DelayBudget::new(d_max_ms) {
                Ok(b) => b,
                Err(e) => return Outcome::Skip(format!("error=model:{e}")),
            };
            let k_cap = inst.sites().len();
            let rule = match &cfg.capacity {
                CapacityRegime::None => None,
                CapacityRegime::Identical => Some(CapacityRule::Identical),
                CapacityRegime::Pool(pool) => Some(CapacityRule::FixedPool(pool.clone())),
            };
            let note = "cap=".to_string()
                + match &cfg.capacity {
                    CapacityRegime::None => "none",
                    CapacityRegime::Identical => "identical",
                    CapacityRegime::Pool(_) => "pool",
                };
            let sol = match alg {
                Algorithm::Mkc => mkc(inst, map, budget, seed, k_cap),
                Algorithm::Mkh => match &rule {
                    Some(r) => mkh(inst, map, budget, r, k_cap),
                    None => return Outcome::Skip("error=needs-capacities".into()),
                },
                Algorithm::RandomSearch => random_k_search(inst, map, budget, seed, k_cap),
                Algorithm::TopKSearch => topk_k_search(inst, map, budget, k_cap),
                Algorithm::Opt => {
                    return match opt_dbocp(inst, map, budget, rule.as_ref(), cfg.subset_limit) {
                        Ok(s) => Outcome::Counted(s, note),
                        Err(e) => Outcome::Skip(opt_marker(e)),
                    }
                }
                _ => unreachable!("axis validated at parse"),
            };
            match sol {
                Ok(s) => Outcome::Counted(s, note),
                Err(e) => Outcome::Skip(place_marker(e)),
            }
        }
    }
}

fn opt_marker(e: OptError) -> String {
    match e {
        OptError::SubsetBudget { .. } => "skipped=budget".into(),
        OptError::TooManyRequests { .. } => "skipped=requests".into(),
        OptError::Infeasible => "infeasible=packing".into(),
        OptError::Model(m) => format!("infeasible=model:{m}"),
        other => format!("error=opt:{other}"),
    }
}

fn place_marker(e: PlaceError) -> String {
    match e {
        PlaceError::Stranded { ap, demand_mhz } => {
            format!("infeasible=stranded:ap{ap}:{demand_mhz}mhz")
        }
        PlaceError::Model(m) => format!("infeasible=model:{m}"),
        other => format!("error=solver:{other}"),
    }
}

fn blank_row(
    cfg: &ExperimentConfig,
    point: SweepPoint,
    alg: Algorithm,
    seed: u64,
    note: String,
    wall_ms: f64,
) -> ResultRow {
    let (k, d_max_ms) = match point {
        SweepPoint::FixedCount { k, .. } => (Some(k), None),
        SweepPoint::Budget { d_max_ms, .. } => (None, Some(d_max_ms)),
    };
    ResultRow {
        config: cfg.name.clone(),
        n: point.n(),
        k,
        d_max_ms,
        algorithm: alg,
        seed,
        d_avg_ms: None,
        k_achieved: None,
        feasible: None,
        note,
        wall_ms,
    }
}

/// Re-certifies the solver output and fills the row. `feasible` reflects
/// the independent recomputation, never the solver's own claim; budget
/// solutions must also self-report `met` consistently with the bound.
#[allow(clippy::too_many_arguments)]
fn certify(
    cfg: &ExperimentConfig,
    point: SweepPoint,
    alg: Algorithm,
    seed: u64,
    inst: &NetworkInstance,
    map: &DelayMap,
    outcome: Outcome,
    wall_ms: f64,
) -> ResultRow {
    let mut row = blank_row(cfg, point, alg, seed, String::new(), wall_ms);
    let (placement, met, note) = match outcome {
        Outcome::Skip(marker) => {
            row.note = marker;
            return row;
        }
        Outcome::Placed(p, note) => (p, None, note),
        Outcome::Counted(sol, note) => {
            row.k_achieved = Some(sol.k);
            (sol.placement, Some(sol.met), note)
        }
    };
    if row.k_achieved.is_none() {
        row.k_achieved = Some(placement.locations.len());
    }
    row.note = note;
    match evaluate(inst, map, &placement) {
        Ok(report) => {
            row.d_avg_ms = Some(report.avg_delay_ms);
            let mut ok = true;
            if let (Some(met), SweepPoint::Budget { d_max_ms, .. }) = (met, point) {
                let within = report.avg_delay_ms <= d_max_ms + DELAY_EPS;
                row.note.push_str(&format!(";met={met}"));
                ok = met == within;
            }
            row.feasible = Some(ok);
        }
        Err(e) => {
            row.feasible = Some(false);
            row.note.push_str(&format!(";error=recertify:{e}"));
        }
    }
    row
}
