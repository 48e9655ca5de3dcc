//! Placement baselines: random sites and request-ranked sites.
//!
//! Both fix cloudlet locations by a rule that ignores delays entirely, then
//! assign requests nearest-first. They exist as comparison points for the
//! delay-aware solvers, not as serious algorithms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::delaymap::DelayMap;
use crate::netmodel::{CloudletSpec, NetworkInstance, SiteId};
use crate::qoecp::{build_placement, Placement, PlaceError, RequestPool};

/// Places cloudlets on `k` distinct sites drawn uniformly at random.
///
/// With designated capacities the largest capacity pairs with the first
/// drawn site, the next with the second, and so on.
pub fn random_placement(
    inst: &NetworkInstance,
    map: &DelayMap,
    spec: &CloudletSpec,
    seed: u64,
) -> Result<Placement, PlaceError> {
    let k = check_k(inst, spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, inst.sites().len(), k);
    let locations: Vec<SiteId> = picks.iter().map(|i| inst.sites()[i]).collect();
    assemble(inst, map, spec, locations)
}

/// Places cloudlets on the first `k` sites of the ascending-request ranking,
/// i.e. the `k` sites whose APs hold the fewest requests.
///
/// Ties break toward the lower site id. With designated capacities the
/// largest capacity pairs with the first-ranked site.
pub fn topk_placement(
    inst: &NetworkInstance,
    map: &DelayMap,
    spec: &CloudletSpec,
) -> Result<Placement, PlaceError> {
    let k = check_k(inst, spec)?;
    let mut ranked: Vec<SiteId> = inst.sites().to_vec();
    ranked.sort_by(|&a, &b| {
        inst.aps()[a.index()]
            .omega()
            .cmp(&inst.aps()[b.index()].omega())
            .then(a.cmp(&b))
    });
    ranked.truncate(k);
    assemble(inst, map, spec, ranked)
}

fn check_k(inst: &NetworkInstance, spec: &CloudletSpec) -> Result<usize, PlaceError> {
    let k = spec.count();
    if k == 0 || k > inst.sites().len() {
        return Err(PlaceError::InvalidConfig(format!(
            "cloudlet count {k} outside 1..={}",
            inst.sites().len()
        )));
    }
    Ok(k)
}

fn assemble(
    inst: &NetworkInstance,
    map: &DelayMap,
    spec: &CloudletSpec,
    locations: Vec<SiteId>,
) -> Result<Placement, PlaceError> {
    match spec.designated_capacities() {
        None => {
            let request_sites = nearest_whole_assignment(inst, map, &locations);
            Ok(build_placement(inst, map, locations, None, request_sites))
        }
        Some(caps) => {
            spec.check_against(inst)?;
            let request_sites = capacity_walk_assignment(inst, map, &locations, caps)?;
            Ok(build_placement(inst, map, locations, Some(caps.to_vec()), request_sites))
        }
    }
}

/// Every request of an AP goes to the nearest placed site (ties by id).
pub(crate) fn nearest_whole_assignment(
    inst: &NetworkInstance,
    map: &DelayMap,
    locations: &[SiteId],
) -> Vec<Vec<SiteId>> {
    inst.aps()
        .iter()
        .map(|ap| {
            let mut best = locations[0];
            let mut best_d = map.delay(ap.id, best);
            for &loc in &locations[1..] {
                let d = map.delay(ap.id, loc);
                if d < best_d || (d == best_d && loc < best) {
                    best = loc;
                    best_d = d;
                }
            }
            vec![best; ap.requests.len()]
        })
        .collect()
}

/// Per-AP walk over the placed sites by ascending delay (ties by id),
/// taking the ascending-demand prefix that fits each site's free capacity.
fn capacity_walk_assignment(
    inst: &NetworkInstance,
    map: &DelayMap,
    locations: &[SiteId],
    caps: &[u64],
) -> Result<Vec<Vec<SiteId>>, PlaceError> {
    let mut free: Vec<u64> = caps.to_vec();
    let mut out: Vec<Vec<SiteId>> = Vec::with_capacity(inst.n());
    for ap in inst.aps() {
        let demands: Vec<u32> = ap.requests.iter().map(|r| r.demand_mhz).collect();
        let mut pool = RequestPool::new(&demands);
        let mut assigned: Vec<Option<SiteId>> = vec![None; demands.len()];
        let mut order: Vec<usize> = (0..locations.len()).collect();
        order.sort_by(|&a, &b| {
            map.delay(ap.id, locations[a])
                .partial_cmp(&map.delay(ap.id, locations[b]))
                .unwrap()
                .then(locations[a].cmp(&locations[b]))
        });
        for pos in order {
            if pool.remaining_count() == 0 {
                break;
            }
            while let Some(dm) = pool.peek() {
                if u64::from(dm) > free[pos] {
                    break;
                }
                free[pos] -= u64::from(dm);
                let idx = pool.pop();
                assigned[idx as usize] = Some(locations[pos]);
            }
        }
        if let Some(dm) = pool.peek() {
            return Err(PlaceError::Stranded { ap: ap.id, demand_mhz: dm });
        }
        out.push(assigned.into_iter().map(|s| s.expect("pool drained")).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaymap::all_pairs_delay;
    use crate::netmodel::{generate, GenParams};
    use crate::qoecp::evaluate;
    use crate::qoecp::mdc;
    use crate::netmodel::ApId;
    use crate::testutil::{line_instance, line_with_demands};

    #[test]
    fn topk_with_all_sites_hits_zero_delay() {
        let inst = line_instance(&[2.0, 3.0, 1.0], &[4, 2, 5, 1], 10);
        let map = all_pairs_delay(&inst).unwrap();
        let spec = CloudletSpec::undesignated(inst.n()).unwrap();
        let p = topk_placement(&inst, &map, &spec).unwrap();
        assert_eq!(p.avg_delay_ms, 0.0);
        evaluate(&inst, &map, &p).unwrap();
    }

    #[test]
    fn topk_ranks_by_ascending_request_count() {
        let inst = line_instance(&[1.0, 1.0], &[500, 50, 50], 1);
        let map = all_pairs_delay(&inst).unwrap();
        // Ties fall to the lower id: AP1 and AP2 both hold 50.
        let spec = CloudletSpec::undesignated(1).unwrap();
        let p = topk_placement(&inst, &map, &spec).unwrap();
        assert_eq!(p.locations, vec![ApId(1)]);
        let spec2 = CloudletSpec::undesignated(2).unwrap();
        let p2 = topk_placement(&inst, &map, &spec2).unwrap();
        assert_eq!(p2.locations, vec![ApId(1), ApId(2)]);
    }

    #[test]
    fn random_draws_are_seeded_and_distinct() {
        let inst = line_instance(&[1.0; 7], &[2; 8], 10);
        let map = all_pairs_delay(&inst).unwrap();
        let spec = CloudletSpec::undesignated(5).unwrap();
        let a = random_placement(&inst, &map, &spec, 9).unwrap();
        let b = random_placement(&inst, &map, &spec, 9).unwrap();
        assert_eq!(a, b);
        let mut locs = a.locations.clone();
        locs.sort();
        locs.dedup();
        assert_eq!(locs.len(), 5);
        let c = random_placement(&inst, &map, &spec, 10).unwrap();
        evaluate(&inst, &map, &c).unwrap();
    }

    #[test]
    fn designated_walk_splits_by_ascending_demand() {
        let inst = line_with_demands(&[1.0], &[&[2, 5], &[3]]);
        let map = all_pairs_delay(&inst).unwrap();
        let spec = CloudletSpec::designated(vec![6, 5]).unwrap();
        let p = topk_placement(&inst, &map, &spec).unwrap();
        // AP1 holds fewer requests, so site 1 carries the 6-MHz cloudlet.
        assert_eq!(p.locations, vec![ApId(1), ApId(0)]);
        assert_eq!(p.assignment.request_sites[0], vec![ApId(0), ApId(1)]);
        assert_eq!(p.assignment.request_sites[1], vec![ApId(0)]);
        assert!((p.total_delay_ms - 2.0).abs() <= crate::DELAY_EPS);
        let report = evaluate(&inst, &map, &p).unwrap();
        assert_eq!(report.loads[0].demand_mhz, 5);
        assert_eq!(report.loads[1].demand_mhz, 5);
    }

    #[test]
    fn designated_walk_strands_honestly() {
        let inst = line_with_demands(&[1.0], &[&[2, 5], &[3]]);
        let map = all_pairs_delay(&inst).unwrap();
        let spec = CloudletSpec::designated(vec![6, 4]).unwrap();
        assert!(matches!(
            topk_placement(&inst, &map, &spec),
            Err(PlaceError::Stranded { ap: ApId(1), demand_mhz: 3 })
        ));
    }

    #[test]
    fn delay_aware_clustering_beats_random_on_average() {
        let mut random_sum = 0.0;
        let mut mdc_sum = 0.0;
        for seed in 0..100u64 {
            let params = GenParams {
                n: 18,
                edge_prob: 0.15,
                request_range: (5, 15),
                demand_range: (50, 200),
                ..GenParams::default()
            };
            let inst = generate(&params, 7000 + seed).unwrap();
            let map = all_pairs_delay(&inst).unwrap();
            let spec = CloudletSpec::undesignated(5).unwrap();
            random_sum += random_placement(&inst, &map, &spec, seed).unwrap().avg_delay_ms;
            mdc_sum += mdc(&inst, &map, 5, seed, crate::qoecp::DEFAULT_MAX_ITERS)
                .unwrap()
                .avg_delay_ms;
        }
        assert!(mdc_sum < random_sum, "mdc {mdc_sum} vs random {random_sum}");
    }
}
