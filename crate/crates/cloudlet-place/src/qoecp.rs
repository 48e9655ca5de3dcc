//! Fixed-count cloudlet placement: given `K` (and optionally per-cloudlet
//! capacities), choose locations and assign every user request to exactly one
//! placed cloudlet, minimizing the average access delay over all requests.
//!
//! Solvers:
//!
//! * [`mdc`]: iterative request-weighted clustering for uncapacitated
//!   cloudlets (each AP's whole request set goes to its nearest center);
//! * [`mde`]: greedy capacitated placement: cloudlets are placed one at a
//!   time, largest capacity first, each at the site that can absorb the
//!   cheapest-by-delay pending demand;
//! * [`heuristic_baseline`]: identical placement semantics to [`mde`], but
//!   re-sorts its candidate AP list from scratch for every (cloudlet, site)
//!   evaluation instead of using the delay map's precomputed rows; kept
//!   solely as the runtime comparison target;
//! * [`random_placement`] / [`topk_placement`]: location baselines (uniform
//!   random sites; the first sites of the ascending-request ranking).
//!
//! [`evaluate`] independently recomputes a placement's delays and loads and
//! checks every structural constraint; all solvers promise their output
//! passes it.

mod baselines;
mod cluster;
mod greedy;

pub use baselines::{random_placement, topk_placement};
pub(crate) use baselines::nearest_whole_assignment;
pub use cluster::{mdc, DEFAULT_MAX_ITERS};
pub use greedy::{heuristic_baseline, mde};

use thiserror::Error;

use crate::delaymap::DelayMap;
use crate::netmodel::{ApId, ModelError, NetworkInstance, SiteId};
use crate::DELAY_EPS;

/// Which cloudlet location serves each request: `request_sites[j][m]` is the
/// site serving request `m` of AP `j`. Requests are indexed in instance
/// (generation/file) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub request_sites: Vec<Vec<SiteId>>,
}

impl Assignment {
    /// Number of requests of AP `j` served at `site` (the integer `z`
    /// variable of the underlying program).
    pub fn count(&self, ap: ApId, site: SiteId) -> u64 {
        self.request_sites[ap.index()].iter().filter(|&&s| s == site).count() as u64
    }
}

/// Assigned load of one placed cloudlet, in both bookkeeping units: demand
/// (MHz) is what capacities constrain; the request count is reported
/// alongside because cloudlet sizing is often quoted in requests served.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CloudletLoad {
    pub site: SiteId,
    pub demand_mhz: u64,
    pub requests: u64,
}

/// A complete placement: locations, per-request assignment, per-cloudlet
/// loads, and the self-reported delay totals.
///
/// `locations` keeps the solver's placement order (capacity-descending for
/// the greedy solvers, ascending site id for clustering). When capacities
/// were designated, `capacity_limits` is aligned with `locations`.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub locations: Vec<SiteId>,
    pub capacity_limits: Option<Vec<u64>>,
    pub assignment: Assignment,
    pub loads: Vec<CloudletLoad>,
    pub total_delay_ms: f64,
    pub avg_delay_ms: f64,
}

impl Placement {
    pub fn k(&self) -> usize {
        self.locations.len()
    }
}

/// Independently recomputed totals and loads for a valid placement.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub total_delay_ms: f64,
    pub avg_delay_ms: f64,
    pub loads: Vec<CloudletLoad>,
}

/// Structural constraint violations and self-report drift found by
/// [`evaluate`].
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("placement has no locations")]
    Empty,
    #[error("location {0} is placed twice")]
    DuplicateLocation(SiteId),
    #[error("location {0} is not a candidate site of the instance")]
    NotASite(SiteId),
    #[error("AP {ap}: assignment covers {assigned} of {expected} requests")]
    RequestCountMismatch { ap: ApId, assigned: usize, expected: usize },
    #[error("request {request} of AP {ap} is assigned to unplaced site {site}")]
    AssignedOutsidePlacement { ap: ApId, request: usize, site: SiteId },
    #[error("capacity list length {caps} does not match {locations} locations")]
    CapacityListMismatch { caps: usize, locations: usize },
    #[error("cloudlet at {site} is loaded with {load_mhz} MHz over its capacity {cap_mhz} MHz")]
    CapacityExceeded { site: SiteId, load_mhz: u64, cap_mhz: u64 },
    #[error("self-reported {what} diverges from recomputation: {reported} vs {computed}")]
    SelfReportDrift { what: &'static str, reported: f64, computed: f64 },
    #[error("self-reported load at {site} diverges from recomputation")]
    LoadDrift { site: SiteId },
}

/// Errors from the fixed-count solvers.
#[derive(Debug, Error)]
pub enum PlaceError {
    #[error("invalid placement task: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("request of {demand_mhz} MHz at AP {ap} fits no placed cloudlet's free capacity")]
    Stranded { ap: ApId, demand_mhz: u32 },
    #[error("solver output failed recertification: {0}")]
    Recertify(#[from] EvalError),
}

/// Recomputes delays and loads from the raw assignment and verifies:
/// locations are distinct candidate sites; every request of every AP is
/// assigned to exactly one placed location; designated capacities are
/// respected in demand units; and the placement's self-reported totals and
/// loads match the recomputation.
pub fn evaluate(
    inst: &NetworkInstance,
    map: &DelayMap,
    placement: &Placement,
) -> Result<EvalReport, EvalError> {
    let k = placement.locations.len();
    if k == 0 {
        return Err(EvalError::Empty);
    }
    let mut pos_of = std::collections::HashMap::with_capacity(k);
    for (pos, &loc) in placement.locations.iter().enumerate() {
        if pos_of.insert(loc, pos).is_some() {
            return Err(EvalError::DuplicateLocation(loc));
        }
        if inst.sites().binary_search(&loc).is_err() {
            return Err(EvalError::NotASite(loc));
        }
    }
    if let Some(caps) = &placement.capacity_limits {
        if caps.len() != k {
            return Err(EvalError::CapacityListMismatch { caps: caps.len(), locations: k });
        }
    }

    if placement.assignment.request_sites.len() != inst.n() {
        return Err(EvalError::RequestCountMismatch {
            ap: ApId(placement.assignment.request_sites.len().min(inst.n()) as u32),
            assigned: placement.assignment.request_sites.len(),
            expected: inst.n(),
        });
    }

    let mut demand = vec![0u64; k];
    let mut count = vec![0u64; k];
    let mut total = 0.0f64;
    for ap in inst.aps() {
        let row = &placement.assignment.request_sites[ap.id.index()];
        if row.len() != ap.requests.len() {
            return Err(EvalError::RequestCountMismatch {
                ap: ap.id,
                assigned: row.len(),
                expected: ap.requests.len(),
            });
        }
        let mut z = vec![0u64; k];
        for (m, (&site, req)) in row.iter().zip(&ap.requests).enumerate() {
            let Some(&pos) = pos_of.get(&site) else {
                return Err(EvalError::AssignedOutsidePlacement { ap: ap.id, request: m, site });
            };
            z[pos] += 1;
            demand[pos] += u64::from(req.demand_mhz);
        }
        for (pos, &zc) in z.iter().enumerate() {
            if zc > 0 {
                total += zc as f64 * map.delay(ap.id, placement.locations[pos]);
                count[pos] += zc;
            }
        }
    }

    if let Some(caps) = &placement.capacity_limits {
        for pos in 0..k {
            if demand[pos] > caps[pos] {
                return Err(EvalError::CapacityExceeded {
                    site: placement.locations[pos],
                    load_mhz: demand[pos],
                    cap_mhz: caps[pos],
                });
            }
        }
    }

    let r_tot = inst.r_tot();
    let avg = if r_tot == 0 { 0.0 } else { total / r_tot as f64 };
    let loads: Vec<CloudletLoad> = placement
        .locations
        .iter()
        .enumerate()
        .map(|(pos, &site)| CloudletLoad { site, demand_mhz: demand[pos], requests: count[pos] })
        .collect();

    if (placement.avg_delay_ms - avg).abs() > DELAY_EPS {
        return Err(EvalError::SelfReportDrift {
            what: "average delay",
            reported: placement.avg_delay_ms,
            computed: avg,
        });
    }
    let rel = placement.total_delay_ms.abs().max(total.abs()).max(1.0);
    if (placement.total_delay_ms - total).abs() > DELAY_EPS * rel {
        return Err(EvalError::SelfReportDrift {
            what: "total delay",
            reported: placement.total_delay_ms,
            computed: total,
        });
    }
    for (reported, computed) in placement.loads.iter().zip(&loads) {
        if reported != computed {
            return Err(EvalError::LoadDrift { site: computed.site });
        }
    }
    Ok(EvalReport { total_delay_ms: total, avg_delay_ms: avg, loads })
}

/// Builds a placement whose self-reported fields come from the same
/// recomputation [`evaluate`] performs.
pub(crate) fn build_placement(
    inst: &NetworkInstance,
    map: &DelayMap,
    locations: Vec<SiteId>,
    capacity_limits: Option<Vec<u64>>,
    request_sites: Vec<Vec<SiteId>>,
) -> Placement {
    let k = locations.len();
    let mut pos_of = std::collections::HashMap::with_capacity(k);
    for (pos, &loc) in locations.iter().enumerate() {
        pos_of.insert(loc, pos);
    }
    let mut demand = vec![0u64; k];
    let mut count = vec![0u64; k];
    let mut total = 0.0f64;
    for ap in inst.aps() {
        let row = &request_sites[ap.id.index()];
        let mut z = vec![0u64; k];
        for (&site, req) in row.iter().zip(&ap.requests) {
            let pos = pos_of[&site];
            z[pos] += 1;
            demand[pos] += u64::from(req.demand_mhz);
        }
        for (pos, &zc) in z.iter().enumerate() {
            if zc > 0 {
                total += zc as f64 * map.delay(ap.id, locations[pos]);
                count[pos] += zc;
            }
        }
    }
    let r_tot = inst.r_tot();
    let avg = if r_tot == 0 { 0.0 } else { total / r_tot as f64 };
    let loads = locations
        .iter()
        .enumerate()
        .map(|(pos, &site)| CloudletLoad { site, demand_mhz: demand[pos], requests: count[pos] })
        .collect();
    Placement {
        locations,
        capacity_limits,
        assignment: Assignment { request_sites },
        loads,
        total_delay_ms: total,
        avg_delay_ms: avg,
    }
}

/// Per-AP pool of still-unassigned requests, consumed cheapest-demand-first.
///
/// `order` holds request indices sorted ascending by (demand, index); `head`
/// marks how many have been consumed. Partial consumption always takes a
/// prefix of the remaining order, which is exactly how the greedy solvers
/// split an AP.
#[derive(Debug, Clone)]
pub(crate) struct RequestPool {
    pub order: Vec<u32>,
    pub demands: Vec<u32>,
    pub head: usize,
    pub remaining_demand: u64,
}

impl RequestPool {
    pub fn new(demands_in_order: &[u32]) -> Self {
        let mut order: Vec<u32> = (0..demands_in_order.len() as u32).collect();
        order.sort_by_key(|&i| (demands_in_order[i as usize], i));
        let demands = order.iter().map(|&i| demands_in_order[i as usize]).collect();
        let remaining_demand = demands_in_order.iter().map(|&d| u64::from(d)).sum();
        RequestPool { order, demands, head: 0, remaining_demand }
    }

    pub fn remaining_count(&self) -> usize {
        self.order.len() - self.head
    }

    /// Demand of the cheapest remaining request, if any.
    pub fn peek(&self) -> Option<u32> {
        self.demands.get(self.head).copied()
    }

    /// Consumes the cheapest remaining request, returning its original index.
    pub fn pop(&mut self) -> u32 {
        let idx = self.order[self.head];
        self.remaining_demand -= u64::from(self.demands[self.head]);
        self.head += 1;
        idx
    }
}
