//! Cloudlet-count minimization under an average-delay bound.
//!
//! Given a bound `D` on the average access delay, find the smallest cloudlet
//! count `K'` whose placement (by a chosen fixed-count solver) satisfies
//! `D_avg <= D`. All searchers share one outer loop: try `K' = 1, 2, ...` up
//! to `k_cap` and return the first satisfying count; heuristic `D_avg` is not
//! guaranteed monotone in `K'`, so a linear scan is used rather than a binary
//! search. If no count within `k_cap` satisfies the bound, the `k_cap`
//! placement is returned with `met = false`.
//!
//! Whether the bound is met is decided by [`evaluate`]'s independent
//! recomputation of the average delay, never by a solver's self-report.

use crate::delaymap::DelayMap;
use crate::netmodel::{CloudletSpec, ModelError, NetworkInstance};
use crate::qoecp::{
    evaluate, mdc, mde, random_placement, topk_placement, Placement, PlaceError,
    DEFAULT_MAX_ITERS,
};
use crate::DELAY_EPS;

/// The average-delay bound `D`, in milliseconds. Strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayBudget {
    d_max_ms: f64,
}

impl DelayBudget {
    pub fn new(d_max_ms: f64) -> Result<Self, PlaceError> {
        if !(d_max_ms > 0.0) || !d_max_ms.is_finite() {
            return Err(PlaceError::InvalidConfig(format!(
                "delay budget must be positive and finite, got {d_max_ms}"
            )));
        }
        Ok(DelayBudget { d_max_ms })
    }

    pub fn d_max_ms(&self) -> f64 {
        self.d_max_ms
    }
}

/// Outcome of a count-minimization scan.
///
/// `met` records whether the placement's independently recomputed average
/// delay is within the budget; when the scan exhausts `k_cap` without
/// success, the `k_cap` placement is carried with `met = false`.
#[derive(Debug, Clone, PartialEq)]
pub struct KSolution {
    pub k: usize,
    pub placement: Placement,
    pub met: bool,
}

/// How [`mkh`] derives the designated capacity list for each tried count.
#[derive(Debug, Clone)]
pub enum CapacityRule {
    /// `K'` identical cloudlets of `ceil(gamma_sum / K')` MHz each.
    Identical,
    /// A fixed pool of capacities; each `K'` uses the `K'` largest. The scan
    /// cannot try counts beyond the pool size.
    FixedPool(Vec<u64>),
    /// Caller-supplied schedule: `f(k, gamma_sum)` must return `k` positive
    /// capacities.
    Custom(fn(usize, u64) -> Vec<u64>),
}

impl CapacityRule {
    /// Capacity list for a count of `k`, largest first.
    pub fn capacities(&self, k: usize, gamma_sum: u64) -> Vec<u64> {
        match self {
            CapacityRule::Identical => vec![gamma_sum.div_ceil(k as u64).max(1); k],
            CapacityRule::FixedPool(pool) => {
                let mut caps = pool.clone();
                caps.sort_unstable_by(|a, b| b.cmp(a));
                caps.truncate(k);
                caps
            }
            CapacityRule::Custom(f) => f(k, gamma_sum),
        }
    }

    pub(crate) fn max_k(&self) -> Option<usize> {
        match self {
            CapacityRule::FixedPool(pool) => Some(pool.len()),
            _ => None,
        }
    }
}

/// Minimizes the cloudlet count using the uncapacitated clustering solver.
///
/// The `K'`-th attempt clusters with seed `seed ^ K'` so attempts are
/// independent but reproducible.
pub fn mkc(
    inst: &NetworkInstance,
    map: &DelayMap,
    budget: DelayBudget,
    seed: u64,
    k_cap: usize,
) -> Result<KSolution, PlaceError> {
    scan(inst, map, budget, k_cap, |k| {
        mdc(inst, map, k, seed ^ k as u64, DEFAULT_MAX_ITERS)
    })
}

/// Minimizes the cloudlet count using the greedy capacitated solver, with
/// per-count capacities from `rule`.
///
/// A count whose capacities cannot cover or pack the demand (total short, or
/// a request stranded by fragmentation) is skipped as unsatisfiable rather
/// than aborting the scan; only the final count propagates such errors.
pub fn mkh(
    inst: &NetworkInstance,
    map: &DelayMap,
    budget: DelayBudget,
    rule: &CapacityRule,
    k_cap: usize,
) -> Result<KSolution, PlaceError> {
    let k_cap = match rule.max_k() {
        Some(m) if m < k_cap => m,
        _ => k_cap,
    };
    let gamma = inst.gamma_sum();
    scan(inst, map, budget, k_cap, |k| {
        let spec = CloudletSpec::designated(rule.capacities(k, gamma))?;
        mde(inst, map, &spec)
    })
}

/// Count-minimization with uniformly random locations per attempt
/// (nearest-site assignment). The `K'`-th draw uses seed `seed ^ K'`.
pub fn random_k_search(
    inst: &NetworkInstance,
    map: &DelayMap,
    budget: DelayBudget,
    seed: u64,
    k_cap: usize,
) -> Result<KSolution, PlaceError> {
    scan(inst, map, budget, k_cap, |k| {
        let spec = CloudletSpec::undesignated(k)?;
        random_placement(inst, map, &spec, seed ^ k as u64)
    })
}

/// Count-minimization placing each attempt on the first sites of the
/// ascending-request ranking (nearest-site assignment).
pub fn topk_k_search(
    inst: &NetworkInstance,
    map: &DelayMap,
    budget: DelayBudget,
    k_cap: usize,
) -> Result<KSolution, PlaceError> {
    scan(inst, map, budget, k_cap, |k| {
        let spec = CloudletSpec::undesignated(k)?;
        topk_placement(inst, map, &spec)
    })
}

fn scan(
    inst: &NetworkInstance,
    map: &DelayMap,
    budget: DelayBudget,
    k_cap: usize,
    mut attempt: impl FnMut(usize) -> Result<Placement, PlaceError>,
) -> Result<KSolution, PlaceError> {
    if k_cap == 0 || k_cap > inst.sites().len() {
        return Err(PlaceError::InvalidConfig(format!(
            "count cap {k_cap} outside 1..={}",
            inst.sites().len()
        )));
    }
    for k in 1..=k_cap {
        let placement = match attempt(k) {
            Ok(p) => p,
            // This count cannot carry the demand; a larger one may.
            Err(
                e @ (PlaceError::Stranded { .. }
                | PlaceError::Model(ModelError::InfeasibleCapacity { .. })),
            ) => {
                if k == k_cap {
                    return Err(e);
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let report = evaluate(inst, map, &placement)?;
        let met = report.avg_delay_ms <= budget.d_max_ms + DELAY_EPS;
        if met || k == k_cap {
            return Ok(KSolution { k, placement, met });
        }
    }
    unreachable!("scan returns at k_cap");
}
