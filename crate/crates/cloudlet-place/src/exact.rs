//! Ground-truth optimal solvers for desk-scale instances, plus an LP-format
//! exporter for anything bigger.
//!
//! [`opt_qoecp`] enumerates every K-subset of candidate sites (depth-first,
//! in lexicographic order, pruned by an uncapacitated lower bound) and solves
//! the exact assignment on each: nearest-site when capacities are
//! undesignated, otherwise a min-cost-flow or branch-and-bound kernel from
//! [`exact_assignment`], trying every distinct pairing of the capacity
//! multiset onto the chosen locations. [`opt_dbocp`] scans K upward and
//! returns the first count whose optimum meets the delay bound.
//!
//! Everything here is exponential by nature and guarded: subset counts above
//! `subset_limit` and mixed-demand instances above [`MAX_SEARCH_REQUESTS`]
//! requests are refused with errors that point at [`lp_export`], which writes
//! the full integer program for an external solver instead.

mod assign;
mod lp;

pub use assign::{exact_assignment, FlowProblem};
pub use lp::{lp_export, LpKind};

use thiserror::Error;

use crate::dbocp::{CapacityRule, DelayBudget, KSolution};
use crate::delaymap::DelayMap;
use crate::netmodel::{ApId, CloudletSpec, ModelError, NetworkInstance, SiteId};
use crate::qoecp::{build_placement, evaluate, mdc, mde, EvalError, Placement, DEFAULT_MAX_ITERS};
use crate::DELAY_EPS;

/// Default cap on enumerated location subsets (`C(|sites|, K)`).
pub const DEFAULT_SUBSET_LIMIT: u64 = 2_000_000;

/// Cap on total requests for the mixed-demand branch-and-bound kernel.
pub const MAX_SEARCH_REQUESTS: u64 = 200;

#[derive(Debug, Error)]
pub enum OptError {
    #[error("invalid optimization task: {0}")]
    Config(String),
    #[error(
        "{subsets} candidate location subsets exceed the search budget of {limit}; \
         raise the limit or solve the program written by export-lp externally"
    )]
    SubsetBudget { subsets: u128, limit: u64 },
    #[error(
        "{r_tot} requests with mixed demands exceed the exact-assignment cap of {cap}; \
         solve the program written by export-lp externally"
    )]
    TooManyRequests { r_tot: u64, cap: u64 },
    #[error("no capacity pairing can pack the demand on any candidate subset")]
    Infeasible,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("optimal placement failed recertification: {0}")]
    Recertify(#[from] EvalError),
}

/// Optimal fixed-count placement by exhaustive subset search.
///
/// Ties between equal-cost optima go to the lexicographically smallest
/// location list. `subset_limit` bounds `C(|sites|, K)`.
pub fn opt_qoecp(
    inst: &NetworkInstance,
    map: &DelayMap,
    spec: &CloudletSpec,
    subset_limit: u64,
) -> Result<Placement, OptError> {
    let m = inst.sites().len();
    let k = spec.count();
    if k == 0 || k > m {
        return Err(OptError::Config(format!("cloudlet count {k} outside 1..={m}")));
    }
    let subsets = binomial(m as u64, k as u64);
    if subsets > u128::from(subset_limit) {
        return Err(OptError::SubsetBudget { subsets, limit: subset_limit });
    }
    match spec.designated_capacities() {
        None => opt_undesignated(inst, map, k),
        Some(caps) => {
            spec.check_against(inst)?;
            let demands: Vec<Vec<u32>> = inst
                .aps()
                .iter()
                .map(|ap| ap.requests.iter().map(|r| r.demand_mhz).collect())
                .collect();
            let mut flat = demands.iter().flatten();
            let mixed = match flat.next() {
                Some(first) => flat.any(|d| d != first),
                None => false,
            };
            if mixed && inst.r_tot() > MAX_SEARCH_REQUESTS {
                return Err(OptError::TooManyRequests {
                    r_tot: inst.r_tot(),
                    cap: MAX_SEARCH_REQUESTS,
                });
            }
            opt_designated(inst, map, caps, &demands)
        }
    }
}

fn opt_undesignated(
    inst: &NetworkInstance,
    map: &DelayMap,
    k: usize,
) -> Result<Placement, OptError> {
    // Any feasible cost works as a warm pruning bound; clustering is cheap
    // and usually close.
    let warm = mdc(inst, map, k, 0, DEFAULT_MAX_ITERS)
        .map(|p| subset_cost(inst, map, &p.locations))
        .unwrap_or(f64::INFINITY);
    let found = subset_search(inst, map, k, warm, |_chosen, cur_min| {
        let mut total = 0.0;
        for ap in inst.aps() {
            total += ap.omega() as f64 * cur_min[ap.id.index()];
        }
        Some((total, ()))
    });
    let (_, locations, ()) = found.ok_or(OptError::Infeasible)?;
    let request_sites = crate::qoecp::nearest_whole_assignment(inst, map, &locations);
    Ok(build_placement(inst, map, locations, None, request_sites))
}

fn opt_designated(
    inst: &NetworkInstance,
    map: &DelayMap,
    caps: &[u64],
    demands: &[Vec<u32>],
) -> Result<Placement, OptError> {
    let k = caps.len();
    let perms = distinct_perms(caps);
    let warm = match mde(inst, map, &CloudletSpec::designated(caps.to_vec())?) {
        Ok(p) => {
            let mut locs = p.locations.clone();
            locs.sort_unstable();
            pairing_optimum(inst, map, demands, &locs, &perms)
                .expect("request cap pre-checked")
                .map(|(c, ..)| c)
                .unwrap_or(f64::INFINITY)
        }
        Err(_) => f64::INFINITY,
    };
    let found = subset_search(inst, map, k, warm, |chosen, _cur_min| {
        pairing_optimum(inst, map, demands, chosen, &perms)
            .expect("request cap pre-checked")
            .map(|(cost, perm, sites)| (cost, (perm, sites)))
    });
    let (_, locations, (perm, request_sites)) = found.ok_or(OptError::Infeasible)?;
    Ok(build_placement(inst, map, locations, Some(perm), request_sites))
}

/// Best assignment over every distinct capacity-to-location pairing; `None`
/// when no pairing packs. Ties keep the earliest pairing in enumeration
/// order (capacities descending).
fn pairing_optimum(
    inst: &NetworkInstance,
    map: &DelayMap,
    demands: &[Vec<u32>],
    chosen: &[SiteId],
    perms: &[Vec<u64>],
) -> Result<Option<(f64, Vec<u64>, Vec<Vec<SiteId>>)>, OptError> {
    let costs: Vec<Vec<f64>> = inst
        .aps()
        .iter()
        .map(|ap| chosen.iter().map(|&s| map.delay(ap.id, s)).collect())
        .collect();
    let mut best: Option<(f64, Vec<u64>, Vec<Vec<SiteId>>)> = None;
    for perm in perms {
        if let Some((cost, sites)) = assign::solve_capacitated(demands, chosen, perm, &costs)? {
            if best.as_ref().map_or(true, |(bc, ..)| cost < bc - DELAY_EPS) {
                best = Some((cost, perm.clone(), sites));
            }
        }
    }
    Ok(best)
}

/// Uncapacitated cost of serving every AP from its nearest listed location.
fn subset_cost(inst: &NetworkInstance, map: &DelayMap, locations: &[SiteId]) -> f64 {
    let mut total = 0.0;
    for ap in inst.aps() {
        let d = locations
            .iter()
            .map(|&s| map.delay(ap.id, s))
            .fold(f64::INFINITY, f64::min);
        total += ap.omega() as f64 * d;
    }
    total
}

/// Depth-first lexicographic K-subset search with an uncapacitated lower
/// bound. `leaf` returns a candidate's exact cost and payload, or `None`
/// when the subset is infeasible. `warm_bound` is a known-achievable cost
/// used for pruning before the first incumbent is found.
///
/// Replacement requires strictly lower cost (beyond [`DELAY_EPS`]), so the
/// lexicographically earliest optimum wins ties.
fn subset_search<P>(
    inst: &NetworkInstance,
    map: &DelayMap,
    k: usize,
    warm_bound: f64,
    leaf: impl FnMut(&[SiteId], &[f64]) -> Option<(f64, P)>,
) -> Option<(f64, Vec<SiteId>, P)> {
    let sites = inst.sites();
    let n = inst.n();
    let m = sites.len();
    // suffix_min[pos * n + ap]: cheapest delay from `ap` to any of sites[pos..].
    let mut suffix_min = vec![f64::INFINITY; (m + 1) * n];
    for pos in (0..m).rev() {
        for ap in 0..n {
            let d = map.delay(ApId(ap as u32), sites[pos]);
            suffix_min[pos * n + ap] = d.min(suffix_min[(pos + 1) * n + ap]);
        }
    }
    let weights: Vec<f64> = inst.aps().iter().map(|ap| ap.omega() as f64).collect();

    struct Dfs<'a, P, L: FnMut(&[SiteId], &[f64]) -> Option<(f64, P)>> {
        sites: &'a [SiteId],
        map: &'a DelayMap,
        weights: &'a [f64],
        suffix_min: &'a [f64],
        n: usize,
        k: usize,
        warm_bound: f64,
        leaf: L,
        chosen: Vec<SiteId>,
        cur_min: Vec<f64>,
        best: Option<(f64, Vec<SiteId>, P)>,
    }

    impl<P, L: FnMut(&[SiteId], &[f64]) -> Option<(f64, P)>> Dfs<'_, P, L> {
        fn cutoff(&self) -> f64 {
            match &self.best {
                Some((bc, ..)) => bc - DELAY_EPS,
                None => self.warm_bound + DELAY_EPS,
            }
        }

        fn walk(&mut self, pos: usize) {
            if self.chosen.len() == self.k {
                let mut lb = 0.0;
                for ap in 0..self.n {
                    lb += self.weights[ap] * self.cur_min[ap];
                }
                if lb > self.cutoff() {
                    return;
                }
                if let Some((cost, payload)) = (self.leaf)(&self.chosen, &self.cur_min) {
                    let accept = match &self.best {
                        Some((bc, ..)) => cost < bc - DELAY_EPS,
                        None => cost <= self.warm_bound + DELAY_EPS,
                    };
                    if accept {
                        self.best = Some((cost, self.chosen.clone(), payload));
                    }
                }
                return;
            }
            let mut lb = 0.0;
            for ap in 0..self.n {
                lb += self.weights[ap] * self.cur_min[ap].min(self.suffix_min[pos * self.n + ap]);
            }
            if lb > self.cutoff() {
                return;
            }
            let remaining = self.k - self.chosen.len();
            for next in pos..=self.sites.len() - remaining {
                let site = self.sites[next];
                let mut undo: Vec<(usize, f64)> = Vec::new();
                for ap in 0..self.n {
                    let d = self.map.delay(ApId(ap as u32), site);
                    if d < self.cur_min[ap] {
                        undo.push((ap, self.cur_min[ap]));
                        self.cur_min[ap] = d;
                    }
                }
                self.chosen.push(site);
                self.walk(next + 1);
                self.chosen.pop();
                for (ap, old) in undo {
                    self.cur_min[ap] = old;
                }
            }
        }
    }

    let mut dfs = Dfs {
        sites,
        map,
        weights: &weights,
        suffix_min: &suffix_min,
        n,
        k,
        warm_bound,
        leaf,
        chosen: Vec::with_capacity(k),
        cur_min: vec![f64::INFINITY; n],
        best: None,
    };
    dfs.walk(0);
    dfs.best
}

/// Minimal cloudlet count whose optimal placement meets the budget: a linear
/// scan over K, exact at every step. `rule: None` searches uncapacitated;
/// `Some(rule)` derives designated capacities per count.
pub fn opt_dbocp(
    inst: &NetworkInstance,
    map: &DelayMap,
    budget: DelayBudget,
    rule: Option<&CapacityRule>,
    subset_limit: u64,
) -> Result<KSolution, OptError> {
    let m = inst.sites().len();
    let k_max = match rule.and_then(|r| r.max_k()) {
        Some(mk) if mk < m => mk,
        _ => m,
    };
    if k_max == 0 {
        return Err(OptError::Config("empty capacity pool".into()));
    }
    let gamma = inst.gamma_sum();
    for k in 1..=k_max {
        let spec = match rule {
            None => CloudletSpec::undesignated(k)?,
            Some(r) => CloudletSpec::designated(r.capacities(k, gamma))?,
        };
        let placement = match opt_qoecp(inst, map, &spec, subset_limit) {
            Ok(p) => p,
            // This count cannot pack the demand; a larger one may.
            Err(e @ (OptError::Infeasible | OptError::Model(ModelError::InfeasibleCapacity { .. }))) => {
                if k == k_max {
                    return Err(e);
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let met = evaluate(inst, map, &placement)?.avg_delay_ms <= budget.d_max_ms() + DELAY_EPS;
        if met || k == k_max {
            return Ok(KSolution { k, placement, met });
        }
    }
    unreachable!("scan returns at k_max");
}

/// Smallest count whose best uncapacitated placement meets the budget,
/// decided without recovering that placement.
///
/// Equals the count [`opt_dbocp`] finds with no capacity rule, but each
/// scanned count runs a yes/no search that prunes against the budget itself
/// and stops at the first qualifying subset, so counts just above feasible
/// stay affordable where full optimization would walk the whole level.
/// `node_limit` caps total visited search nodes across the scan; `Ok(None)`
/// means even placing on every site misses the budget.
pub fn min_count_within_budget(
    inst: &NetworkInstance,
    map: &DelayMap,
    budget: DelayBudget,
    node_limit: u64,
) -> Result<Option<usize>, OptError> {
    let sites = inst.sites();
    let n = inst.n();
    let m = sites.len();
    // suffix_min[pos * n + ap]: cheapest delay from `ap` to any of sites[pos..].
    let mut suffix_min = vec![f64::INFINITY; (m + 1) * n];
    for pos in (0..m).rev() {
        for ap in 0..n {
            let d = map.delay(ApId(ap as u32), sites[pos]);
            suffix_min[pos * n + ap] = d.min(suffix_min[(pos + 1) * n + ap]);
        }
    }
    let weights: Vec<f64> = inst.aps().iter().map(|ap| ap.omega() as f64).collect();
    // Same accept rule as the scan: avg <= d_max + eps, scaled to totals.
    let target = (budget.d_max_ms() + DELAY_EPS) * inst.r_tot() as f64;

    struct Decide<'a> {
        sites: &'a [SiteId],
        map: &'a DelayMap,
        weights: &'a [f64],
        suffix_min: &'a [f64],
        n: usize,
        k: usize,
        target: f64,
        node_limit: u64,
        visited: u64,
        cur_min: Vec<f64>,
    }

    impl Decide<'_> {
        /// `Ok(true)` on the first subset at or under target; `Err` when the
        /// node budget runs out mid-search.
        fn walk(&mut self, pos: usize, depth: usize) -> Result<bool, ()> {
            self.visited += 1;
            if self.visited > self.node_limit {
                return Err(());
            }
            if depth == self.k {
                let mut cost = 0.0;
                for ap in 0..self.n {
                    cost += self.weights[ap] * self.cur_min[ap];
                }
                return Ok(cost <= self.target);
            }
            let mut lb = 0.0;
            for ap in 0..self.n {
                lb += self.weights[ap] * self.cur_min[ap].min(self.suffix_min[pos * self.n + ap]);
            }
            if lb > self.target {
                return Ok(false);
            }
            let remaining = self.k - depth;
            for next in pos..=self.sites.len() - remaining {
                let site = self.sites[next];
                let mut undo: Vec<(usize, f64)> = Vec::new();
                for ap in 0..self.n {
                    let d = self.map.delay(ApId(ap as u32), site);
                    if d < self.cur_min[ap] {
                        undo.push((ap, self.cur_min[ap]));
                        self.cur_min[ap] = d;
                    }
                }
                let hit = self.walk(next + 1, depth + 1);
                for (ap, old) in undo {
                    self.cur_min[ap] = old;
                }
                if hit? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }

    let mut decide = Decide {
        sites,
        map,
        weights: &weights,
        suffix_min: &suffix_min,
        n,
        k: 0,
        target,
        node_limit,
        visited: 0,
        cur_min: vec![f64::INFINITY; n],
    };
    for k in 1..=m {
        decide.k = k;
        match decide.walk(0, 0) {
            Ok(true) => return Ok(Some(k)),
            Ok(false) => {}
            Err(()) => {
                return Err(OptError::SubsetBudget {
                    subsets: u128::from(decide.visited),
                    limit: node_limit,
                })
            }
        }
    }
    Ok(None)
}

/// `C(n, k)` with saturation; anything astronomically large only needs to
/// compare greater than a limit.
fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(u128::from(n - i)) / u128::from(i + 1);
    }
    r
}

/// All distinct permutations of a capacity multiset, values descending in
/// the first result; deterministic order.
fn distinct_perms(values: &[u64]) -> Vec<Vec<u64>> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(sorted.len());
    let mut used = vec![false; sorted.len()];
    fn rec(sorted: &[u64], used: &mut [bool], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == sorted.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..sorted.len() {
            if used[i] || (i > 0 && sorted[i] == sorted[i - 1] && !used[i - 1]) {
                continue;
            }
            used[i] = true;
            cur.push(sorted[i]);
            rec(sorted, used, cur, out);
            cur.pop();
            used[i] = false;
        }
    }
    rec(&sorted, &mut used, &mut cur, &mut out);
    out
}
