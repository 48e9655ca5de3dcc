//! Greedy capacitated placement.
//!
//! Cloudlets are placed one at a time, largest designated capacity first.
//! For the cloudlet at hand, every still-unoccupied site is scored by
//! simulating what the cloudlet would absorb there: walk the site's APs in
//! ascending delay order (ties by id), absorbing each AP's pending requests
//! whole while they fit; at the first AP whose pending demand would
//! overshoot, take its cheapest-demand requests one by one while they fit,
//! then stop the walk. The score is the delay sum of that tentative load, and
//! the cloudlet is committed to the lowest-scoring site (ties to the lowest
//! site id).
//!
//! Requests the walks never absorbed are repaired afterwards: each one goes
//! to the placed cloudlet with enough free capacity at minimum delay. Total
//! designated capacity at least the total demand is required up front; if a
//! request still fits nowhere (capacity stranded in slivers none of which
//! covers it), the solver reports it rather than violating a capacity.

use crate::delaymap::DelayMap;
use crate::netmodel::{ApId, CloudletSpec, NetworkInstance, SiteId};
use crate::qoecp::{build_placement, Placement, PlaceError, RequestPool};

/// How a (cloudlet, site) evaluation obtains its AP ordering.
#[derive(Clone, Copy, PartialEq, Eq)]
enum RowOrder {
    /// Walk the delay map's precomputed sorted row, skipping drained APs.
    Precomputed,
    /// Rebuild and sort the live AP list from scratch on every evaluation.
    Resort,
}

/// Greedy capacitated placement using the delay map's precomputed rows.
pub fn mde(
    inst: &NetworkInstance,
    map: &DelayMap,
    spec: &CloudletSpec,
) -> Result<Placement, PlaceError> {
    place(inst, map, spec, RowOrder::Precomputed)
}

/// Same placement semantics and output as [`mde`], but every (cloudlet,
/// site) evaluation re-sorts its candidate AP list from scratch instead of
/// reusing precomputed rows. Exists as the runtime comparison target.
pub fn heuristic_baseline(
    inst: &NetworkInstance,
    map: &DelayMap,
    spec: &CloudletSpec,
) -> Result<Placement, PlaceError> {
    place(inst, map, spec, RowOrder::Resort)
}

fn place(
    inst: &NetworkInstance,
    map: &DelayMap,
    spec: &CloudletSpec,
    order: RowOrder,
) -> Result<Placement, PlaceError> {
    let caps = spec
        .designated_capacities()
        .ok_or_else(|| PlaceError::InvalidConfig("designated capacities required".into()))?;
    if spec.count() > inst.sites().len() {
        return Err(PlaceError::InvalidConfig(format!(
            "{} cloudlets exceed {} candidate sites",
            spec.count(),
            inst.sites().len()
        )));
    }
    spec.check_against(inst)?;

    let n = inst.n();
    let mut pools: Vec<RequestPool> =
        inst.aps().iter().map(|ap| RequestPool::new(&demands_of(ap))).collect();
    let mut assigned: Vec<Vec<Option<SiteId>>> =
        inst.aps().iter().map(|ap| vec![None; ap.requests.len()]).collect();
    let mut occupied = vec![false; n];
    let mut locations: Vec<SiteId> = Vec::with_capacity(caps.len());
    let mut free: Vec<u64> = Vec::with_capacity(caps.len());

    let mut resort_buf: Vec<u32> = Vec::with_capacity(n);
    for &cap in caps {
        let mut best: Option<(f64, SiteId)> = None;
        for &site in inst.sites() {
            if occupied[site.index()] {
                continue;
            }
            let score = match order {
                RowOrder::Precomputed => {
                    score_walk(map, cap, &pools, map.sorted_row(site).iter().map(|a| a.0), site)
                }
                RowOrder::Resort => {
                    resort_buf.clear();
                    resort_buf.extend(
                        (0..n as u32).filter(|&a| pools[a as usize].remaining_count() > 0),
                    );
                    resort_buf.sort_by(|&a, &b| {
                        map.delay(ApId(a), site)
                            .partial_cmp(&map.delay(ApId(b), site))
                            .unwrap()
                            .then(a.cmp(&b))
                    });
                    score_walk(map, cap, &pools, resort_buf.iter().copied(), site)
                }
            };
            // Sites iterate ascending, so a strict win keeps the lowest id.
            if best.map_or(true, |(s, _)| score < s) {
                best = Some((score, site));
            }
        }
        let (_, site) = best.expect("at least one unoccupied site remains");
        let used = commit_walk(map, cap, &mut pools, &mut assigned, site);
        occupied[site.index()] = true;
        locations.push(site);
        free.push(cap - used);
    }

    // Repair pass: anything the walks never absorbed goes to the placed
    // cloudlet with enough free capacity at minimum delay.
    for ap in 0..n {
        while let Some(demand) = pools[ap].peek() {
            let mut choice: Option<(f64, usize)> = None;
            for (pos, &loc) in locations.iter().enumerate() {
                if free[pos] < u64::from(demand) {
                    continue;
                }
                let d = map.delay(ApId(ap as u32), loc);
                let better = match choice {
                    None => true,
                    Some((bd, bpos)) => {
                        d < bd || (d == bd && loc < locations[bpos])
                    }
                };
                if better {
                    choice = Some((d, pos));
                }
            }
            let Some((_, pos)) = choice else {
                return Err(PlaceError::Stranded { ap: ApId(ap as u32), demand_mhz: demand });
            };
            let idx = pools[ap].pop();
            assigned[ap][idx as usize] = Some(locations[pos]);
            free[pos] -= u64::from(demand);
        }
    }

    let request_sites = assigned
        .into_iter()
        .map(|row| row.into_iter().map(|s| s.expect("every request assigned")).collect())
        .collect();
    Ok(build_placement(inst, map, locations, Some(caps.to_vec()), request_sites))
}

fn demands_of(ap: &crate::netmodel::Ap) -> Vec<u32> {
    ap.requests.iter().map(|r| r.demand_mhz).collect()
}

/// Tentative absorption walk; returns the delay sum of what would be taken.
fn score_walk(
    map: &DelayMap,
    cap: u64,
    pools: &[RequestPool],
    order: impl Iterator<Item = u32>,
    site: SiteId,
) -> f64 {
    let mut rem = cap;
    let mut score = 0.0;
    for ap in order {
        if rem == 0 {
            break;
        }
        let pool = &pools[ap as usize];
        if pool.remaining_count() == 0 {
            continue;
        }
        let d = map.delay(ApId(ap), site);
        if pool.remaining_demand <= rem {
            score += pool.remaining_count() as f64 * d;
            rem -= pool.remaining_demand;
        } else {
            let mut taken = 0u64;
            for &dm in &pool.demands[pool.head..] {
                if u64::from(dm) <= rem {
                    rem -= u64::from(dm);
                    taken += 1;
                } else {
                    break;
                }
            }
            score += taken as f64 * d;
            break;
        }
    }
    score
}

/// Replays the walk for the winning site, consuming the pools.
fn commit_walk(
    map: &DelayMap,
    cap: u64,
    pools: &mut [RequestPool],
    assigned: &mut [Vec<Option<SiteId>>],
    site: SiteId,
) -> u64 {
    let mut rem = cap;
    for &ap in map.sorted_row(site) {
        if rem == 0 {
            break;
        }
        let pool = &mut pools[ap.index()];
        if pool.remaining_count() == 0 {
            continue;
        }
        if pool.remaining_demand <= rem {
            rem -= pool.remaining_demand;
            while pool.remaining_count() > 0 {
                let idx = pool.pop();
                assigned[ap.index()][idx as usize] = Some(site);
            }
        } else {
            while let Some(dm) = pool.peek() {
                if u64::from(dm) > rem {
                    break;
                }
                rem -= u64::from(dm);
                let idx = pool.pop();
                assigned[ap.index()][idx as usize] = Some(site);
            }
            break;
        }
    }
    cap - rem
}
