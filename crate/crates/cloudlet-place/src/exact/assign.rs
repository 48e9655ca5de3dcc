//! Exact minimum-cost assignment of requests to fixed sinks.
//!
//! Three regimes, dispatched by [`exact_assignment`]:
//!
//! * uncapacitated: each AP goes wholly to its cheapest sink (separable);
//! * capacitated, all demands equal: integral min-cost flow over capacity
//!   slots, solved by successive shortest paths;
//! * capacitated, mixed demands: branch and bound over per-request choices.
//!   This embeds bin packing, so it is capped at [`MAX_SEARCH_REQUESTS`]
//!   requests and meant for oracle-scale instances only.

use crate::delaymap::DelayMap;
use crate::netmodel::{NetworkInstance, SiteId};
use crate::qoecp::Assignment;
use crate::DELAY_EPS;

use super::{OptError, MAX_SEARCH_REQUESTS};

/// A capacitated assignment subproblem: per-AP request demands, chosen sink
/// sites with optional capacities, and a per-(AP, sink) delay cost applied to
/// each assigned request.
#[derive(Debug, Clone)]
pub struct FlowProblem {
    demands: Vec<Vec<u32>>,
    sinks: Vec<SiteId>,
    caps: Option<Vec<u64>>,
    costs: Vec<Vec<f64>>,
}

impl FlowProblem {
    /// Validates shape, nonnegative finite costs, positive capacities, and
    /// that total capacity covers total demand.
    pub fn new(
        demands: Vec<Vec<u32>>,
        sinks: Vec<SiteId>,
        caps: Option<Vec<u64>>,
        costs: Vec<Vec<f64>>,
    ) -> Result<Self, OptError> {
        if sinks.is_empty() {
            return Err(OptError::Config("no sinks".into()));
        }
        let mut distinct = sinks.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != sinks.len() {
            return Err(OptError::Config("duplicate sink".into()));
        }
        if costs.len() != demands.len() {
            return Err(OptError::Config("cost rows must match APs".into()));
        }
        if costs.iter().any(|row| row.len() != sinks.len()) {
            return Err(OptError::Config("cost columns must match sinks".into()));
        }
        if costs.iter().flatten().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(OptError::Config("costs must be finite and nonnegative".into()));
        }
        if let Some(caps) = &caps {
            if caps.len() != sinks.len() {
                return Err(OptError::Config("capacity list must match sinks".into()));
            }
            if caps.iter().any(|&c| c == 0) {
                return Err(OptError::Config("capacities must be positive".into()));
            }
            let supply: u64 = demands.iter().flatten().map(|&d| u64::from(d)).sum();
            let cap: u64 = caps.iter().sum();
            if supply > cap {
                return Err(OptError::Model(
                    crate::netmodel::ModelError::InfeasibleCapacity {
                        available: cap,
                        required: supply,
                    },
                ));
            }
        }
        Ok(FlowProblem { demands, sinks, caps, costs })
    }

    /// Problem for assigning every request of `inst` to the placed `sinks`,
    /// with costs from the delay map.
    pub fn from_instance(
        inst: &NetworkInstance,
        map: &DelayMap,
        sinks: &[SiteId],
        caps: Option<Vec<u64>>,
    ) -> Result<Self, OptError> {
        let demands = inst
            .aps()
            .iter()
            .map(|ap| ap.requests.iter().map(|r| r.demand_mhz).collect())
            .collect();
        let costs = inst
            .aps()
            .iter()
            .map(|ap| sinks.iter().map(|&s| map.delay(ap.id, s)).collect())
            .collect();
        FlowProblem::new(demands, sinks.to_vec(), caps, costs)
    }
}

/// Minimum total delay-cost assignment of every request to a sink, with the
/// total cost recomputed in canonical (AP, request) order so equal optima
/// compare bitwise-stably.
pub fn exact_assignment(problem: &FlowProblem) -> Result<(f64, Assignment), OptError> {
    let request_sites = match &problem.caps {
        None => nearest_sites(&problem.demands, &problem.sinks, &problem.costs),
        Some(caps) => {
            match solve_capacitated(&problem.demands, &problem.sinks, caps, &problem.costs)? {
                Some((_, sites)) => sites,
                // FlowProblem::new checked total capacity, so a failure here
                // is packing fragmentation.
                None => return Err(OptError::Infeasible),
            }
        }
    };
    let cost = canonical_cost(&problem.sinks, &problem.costs, &request_sites);
    Ok((cost, Assignment { request_sites }))
}

/// Uncapacitated optimum: every request of an AP to the cheapest sink, ties
/// to the lowest site id.
pub(crate) fn nearest_sites(
    demands: &[Vec<u32>],
    sinks: &[SiteId],
    costs: &[Vec<f64>],
) -> Vec<Vec<SiteId>> {
    demands
        .iter()
        .zip(costs)
        .map(|(reqs, row)| {
            let mut best = 0usize;
            for pos in 1..sinks.len() {
                if row[pos] < row[best] || (row[pos] == row[best] && sinks[pos] < sinks[best]) {
                    best = pos;
                }
            }
            vec![sinks[best]; reqs.len()]
        })
        .collect()
}

/// Capacitated dispatch. `Ok(None)` means the demand cannot be packed into
/// these capacities even though the totals fit.
pub(crate) fn solve_capacitated(
    demands: &[Vec<u32>],
    sinks: &[SiteId],
    caps: &[u64],
    costs: &[Vec<f64>],
) -> Result<Option<(f64, Vec<Vec<SiteId>>)>, OptError> {
    let mut flat = demands.iter().flatten().copied();
    let Some(first) = flat.next() else {
        return Ok(Some((0.0, demands.iter().map(|_| Vec::new()).collect())));
    };
    if flat.all(|d| d == first) {
        let supplies: Vec<u64> = demands.iter().map(|r| r.len() as u64).collect();
        let slots: Vec<u64> = caps.iter().map(|&c| c / u64::from(first)).collect();
        let Some((z, _)) = min_cost_counts(&supplies, &slots, costs) else {
            return Ok(None);
        };
        let sites = counts_to_sites(&z, sinks, demands);
        let cost = canonical_cost(sinks, costs, &sites);
        return Ok(Some((cost, sites)));
    }
    let r_tot: u64 = demands.iter().map(|r| r.len() as u64).sum();
    if r_tot > MAX_SEARCH_REQUESTS {
        return Err(OptError::TooManyRequests { r_tot, cap: MAX_SEARCH_REQUESTS });
    }
    match min_cost_items(demands, caps, costs) {
        Some((positions, _)) => {
            let sites: Vec<Vec<SiteId>> = positions
                .iter()
                .map(|row| row.iter().map(|&pos| sinks[pos]).collect())
                .collect();
            let cost = canonical_cost(sinks, costs, &sites);
            Ok(Some((cost, sites)))
        }
        None => Ok(None),
    }
}

/// Total cost summed in (AP ascending, request index ascending) order.
fn canonical_cost(sinks: &[SiteId], costs: &[Vec<f64>], request_sites: &[Vec<SiteId>]) -> f64 {
    let mut total = 0.0;
    for (ap, row) in request_sites.iter().enumerate() {
        for &site in row {
            let pos = sinks.iter().position(|&s| s == site).expect("known sink");
            total += costs[ap][pos];
        }
    }
    total
}

/// Spreads per-(AP, sink) counts over concrete requests: requests in index
/// order fill sinks in position order. Only valid when demands are equal, so
/// the choice of which request goes where cannot change cost or feasibility.
fn counts_to_sites(z: &[Vec<u64>], sinks: &[SiteId], demands: &[Vec<u32>]) -> Vec<Vec<SiteId>> {
    z.iter()
        .zip(demands)
        .map(|(row, reqs)| {
            let mut out = Vec::with_capacity(reqs.len());
            for (pos, &count) in row.iter().enumerate() {
                for _ in 0..count {
                    out.push(sinks[pos]);
                }
            }
            debug_assert_eq!(out.len(), reqs.len());
            out
        })
        .collect()
}

/// Integral min-cost flow by successive shortest paths with potentials.
///
/// Sources supply whole requests, sinks offer capacity slots; returns
/// per-(source, sink) request counts and the path-accumulated cost, or
/// `None` when the slots cannot hold the supply.
pub(crate) fn min_cost_counts(
    supplies: &[u64],
    slots: &[u64],
    costs: &[Vec<f64>],
) -> Option<(Vec<Vec<u64>>, f64)> {
    let ns = supplies.len();
    let nk = slots.len();
    let total: u64 = supplies.iter().sum();
    if total > slots.iter().sum() {
        return None;
    }
    if total == 0 {
        return Some((vec![vec![0; nk]; ns], 0.0));
    }

    // Node layout: 0 = source, 1..=ns = APs, ns+1..=ns+nk = sinks, last = tap.
    let v = ns + nk + 2;
    let tap = v - 1;
    let mut g = Mcf::new(v);
    for (i, &s) in supplies.iter().enumerate() {
        if s > 0 {
            g.add(0, 1 + i, s, 0.0);
        }
    }
    let mut arc_idx = vec![vec![usize::MAX; nk]; ns];
    for (i, row) in costs.iter().enumerate() {
        if supplies[i] == 0 {
            continue;
        }
        for (j, &c) in row.iter().enumerate() {
            arc_idx[i][j] = g.add(1 + i, 1 + ns + j, supplies[i], c);
        }
    }
    for (j, &s) in slots.iter().enumerate() {
        if s > 0 {
            g.add(1 + ns + j, tap, s, 0.0);
        }
    }

    let mut pushed = 0u64;
    let mut cost = 0.0f64;
    let mut potential = vec![0.0f64; v];
    while pushed < total {
        let (dist, prev) = g.dijkstra(0, &potential);
        if !dist[tap].is_finite() {
            return None;
        }
        for (p, &d) in potential.iter_mut().zip(&dist) {
            if d.is_finite() {
                *p += d;
            }
        }
        let mut bottleneck = total - pushed;
        let mut node = tap;
        while node != 0 {
            let (from, idx) = prev[node];
            bottleneck = bottleneck.min(g.arcs[from][idx].residual);
            node = from;
        }
        let mut node = tap;
        while node != 0 {
            let (from, idx) = prev[node];
            cost += g.arcs[from][idx].cost * bottleneck as f64;
            g.push(from, idx, bottleneck);
            node = from;
        }
        pushed += bottleneck;
    }

    let mut z = vec![vec![0u64; nk]; ns];
    for (i, row) in z.iter_mut().enumerate() {
        for (j, count) in row.iter_mut().enumerate() {
            if arc_idx[i][j] != usize::MAX {
                *count = g.arcs[1 + i][arc_idx[i][j]].flow;
            }
        }
    }
    Some((z, cost))
}

struct Arc {
    to: usize,
    /// Remaining pushable amount on this residual arc.
    residual: u64,
    /// Net flow through the forward direction (always 0 on reverse arcs).
    flow: u64,
    cost: f64,
    rev: usize,
    forward: bool,
}

struct Mcf {
    arcs: Vec<Vec<Arc>>,
}

impl Mcf {
    fn new(v: usize) -> Self {
        Mcf { arcs: (0..v).map(|_| Vec::new()).collect() }
    }

    /// Adds a forward arc and its zero-capacity reverse; returns the forward
    /// arc's index within `from`'s list.
    fn add(&mut self, from: usize, to: usize, cap: u64, cost: f64) -> usize {
        let idx_fwd = self.arcs[from].len();
        let idx_rev = self.arcs[to].len();
        self.arcs[from]
            .push(Arc { to, residual: cap, flow: 0, cost, rev: idx_rev, forward: true });
        self.arcs[to]
            .push(Arc { to: from, residual: 0, flow: 0, cost: -cost, rev: idx_fwd, forward: false });
        idx_fwd
    }

    /// Pushing on a forward arc raises its net flow; pushing on a reverse
    /// arc cancels flow on its pair.
    fn push(&mut self, from: usize, idx: usize, amount: u64) {
        let (to, rev, forward) = {
            let a = &mut self.arcs[from][idx];
            a.residual -= amount;
            (a.to, a.rev, a.forward)
        };
        self.arcs[to][rev].residual += amount;
        if forward {
            self.arcs[from][idx].flow += amount;
        } else {
            self.arcs[to][rev].flow -= amount;
        }
    }

    /// Dense Dijkstra over reduced costs; graphs here are tiny, so a scan
    /// beats a heap. Returns distances and the parent (node, arc index).
    fn dijkstra(&self, src: usize, potential: &[f64]) -> (Vec<f64>, Vec<(usize, usize)>) {
        let v = self.arcs.len();
        let mut dist = vec![f64::INFINITY; v];
        let mut prev = vec![(usize::MAX, usize::MAX); v];
        let mut done = vec![false; v];
        dist[src] = 0.0;
        loop {
            let mut node = usize::MAX;
            let mut best = f64::INFINITY;
            for u in 0..v {
                if !done[u] && dist[u] < best {
                    best = dist[u];
                    node = u;
                }
            }
            if node == usize::MAX {
                break;
            }
            done[node] = true;
            for (idx, a) in self.arcs[node].iter().enumerate() {
                if a.residual == 0 || done[a.to] {
                    continue;
                }
                let reduced = a.cost + potential[node] - potential[a.to];
                let cand = dist[node] + reduced;
                if cand < dist[a.to] {
                    dist[a.to] = cand;
                    prev[a.to] = (node, idx);
                }
            }
        }
        (dist, prev)
    }
}

/// Branch and bound over per-request sink choices for mixed demands.
///
/// Requests branch in descending-demand order; the bound is the sum of each
/// unassigned request's cheapest currently-fitting sink, plus a volume check.
/// Returns per-AP sink positions per request.
pub(crate) fn min_cost_items(
    demands: &[Vec<u32>],
    caps: &[u64],
    costs: &[Vec<f64>],
) -> Option<(Vec<Vec<usize>>, f64)> {
    let mut items: Vec<(usize, usize, u32)> = Vec::new();
    for (ap, reqs) in demands.iter().enumerate() {
        for (idx, &d) in reqs.iter().enumerate() {
            items.push((ap, idx, d));
        }
    }
    items.sort_by(|a, b| b.2.cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let nk = caps.len();
    let order: Vec<Vec<usize>> = costs
        .iter()
        .map(|row| {
            let mut o: Vec<usize> = (0..nk).collect();
            o.sort_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap().then(a.cmp(&b)));
            o
        })
        .collect();
    let suffix_demand: Vec<u64> = {
        let mut s = vec![0u64; items.len() + 1];
        for i in (0..items.len()).rev() {
            s[i] = s[i + 1] + u64::from(items[i].2);
        }
        s
    };

    struct State<'a> {
        items: &'a [(usize, usize, u32)],
        order: &'a [Vec<usize>],
        costs: &'a [Vec<f64>],
        suffix_demand: &'a [u64],
        free: Vec<u64>,
        pick: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
    }

    impl State<'_> {
        /// Admissible optimistic completion, or `None` if some remaining
        /// request fits nowhere / the volume cannot fit.
        fn bound(&self, from: usize) -> Option<f64> {
            if self.suffix_demand[from] > self.free.iter().sum::<u64>() {
                return None;
            }
            let mut lb = 0.0;
            for &(ap, _, d) in &self.items[from..] {
                let mut cheapest = f64::INFINITY;
                for &pos in &self.order[ap] {
                    if self.free[pos] >= u64::from(d) {
                        cheapest = self.costs[ap][pos];
                        break;
                    }
                }
                if !cheapest.is_finite() {
                    return None;
                }
                lb += cheapest;
            }
            Some(lb)
        }

        fn dfs(&mut self, i: usize, cost: f64) {
            let Some(lb) = self.bound(i) else { return };
            if let Some((bc, _)) = &self.best {
                if cost + lb >= bc - DELAY_EPS {
                    return;
                }
            }
            if i == self.items.len() {
                self.best = Some((cost, self.pick.clone()));
                return;
            }
            let (ap, _, d) = self.items[i];
            // Twin requests (same AP, same demand) are interchangeable, so
            // force their sink positions non-decreasing to break symmetry.
            let floor = match i.checked_sub(1).map(|p| self.items[p]) {
                Some((pap, _, pd)) if pap == ap && pd == d => self.pick[i - 1],
                _ => 0,
            };
            for &pos in &self.order[ap] {
                if pos < floor || self.free[pos] < u64::from(d) {
                    continue;
                }
                self.free[pos] -= u64::from(d);
                self.pick[i] = pos;
                self.dfs(i + 1, cost + self.costs[ap][pos]);
                self.free[pos] += u64::from(d);
            }
        }
    }

    let mut st = State {
        items: &items,
        order: &order,
        costs,
        suffix_demand: &suffix_demand,
        free: caps.to_vec(),
        pick: vec![0; items.len()],
        best: None,
    };
    st.dfs(0, 0.0);
    let (cost, pick) = st.best?;
    let mut out: Vec<Vec<usize>> = demands.iter().map(|r| vec![0; r.len()]).collect();
    for (&slot, &(ap, idx, _)) in pick.iter().zip(&items) {
        out[ap][idx] = slot;
    }
    Some((out, cost))
}
