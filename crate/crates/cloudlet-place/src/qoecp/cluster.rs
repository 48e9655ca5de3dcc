//! Request-weighted clustering placement for uncapacitated cloudlets.
//!
//! Starting from `k` distinct centers drawn uniformly from the candidate
//! sites, the loop alternates two steps until the center set stops changing
//! or `max_iters` rounds have run:
//!
//! 1. every AP (its whole request set) is assigned to the center with the
//!    smallest delay, ties to the lowest center id;
//! 2. each cluster's center moves to the member site minimizing the cluster's
//!    request-weighted delay sum, ties to the lowest site id.
//!
//! If the iteration cap is hit, the best center set seen (lowest average
//! delay) is returned, so oscillation between equal-cost configurations
//! cannot degrade the result.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::delaymap::DelayMap;
use crate::netmodel::{NetworkInstance, SiteId};
use crate::qoecp::{build_placement, Placement, PlaceError};

/// Iteration cap used by the searches and the CLI when none is given.
pub const DEFAULT_MAX_ITERS: usize = 100;

/// Clustering placement of `k` uncapacitated cloudlets.
///
/// Randomness is limited to the initial center draw; identical arguments
/// yield the identical placement.
pub fn mdc(
    inst: &NetworkInstance,
    map: &DelayMap,
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<Placement, PlaceError> {
    let sites = inst.sites();
    if k == 0 || k > sites.len() {
        return Err(PlaceError::InvalidConfig(format!(
            "k must be in [1, {}], got {k}",
            sites.len()
        )));
    }
    if max_iters == 0 {
        return Err(PlaceError::InvalidConfig("max_iters must be >= 1".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<SiteId> = rand::seq::index::sample(&mut rng, sites.len(), k)
        .into_iter()
        .map(|i| sites[i])
        .collect();
    centers.sort_unstable();

    let mut best_cost = f64::INFINITY;
    let mut best_centers = centers.clone();
    for _ in 0..max_iters {
        let (membership, cost) = assign(inst, map, &centers);
        if cost < best_cost {
            best_cost = cost;
            best_centers = centers.clone();
        }

        let mut next: Vec<SiteId> = membership
            .iter()
            .enumerate()
            .map(|(c, members)| swap_center(inst, map, centers[c], members))
            .collect();
        next.sort_unstable();
        next.dedup();
        if next == centers {
            break;
        }
        centers = next;
    }

    let (membership, _) = assign(inst, map, &best_centers);
    let mut request_sites = vec![Vec::new(); inst.n()];
    for (c, members) in membership.iter().enumerate() {
        for &j in members {
            request_sites[j] = vec![best_centers[c]; inst.aps()[j].requests.len()];
        }
    }
    Ok(build_placement(inst, map, best_centers, None, request_sites))
}

/// Nearest-center assignment; returns per-center member lists and the
/// request-weighted delay total.
fn assign(
    inst: &NetworkInstance,
    map: &DelayMap,
    centers: &[SiteId],
) -> (Vec<Vec<usize>>, f64) {
    let mut membership = vec![Vec::new(); centers.len()];
    let mut cost = 0.0;
    for ap in inst.aps() {
        let mut best = 0usize;
        let mut best_d = map.delay(ap.id, centers[0]);
        for (c, &center) in centers.iter().enumerate().skip(1) {
            let d = map.delay(ap.id, center);
            // Centers are sorted ascending, so a strict win keeps ties at the
            // lowest center id.
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        membership[best].push(ap.id.index());
        cost += ap.omega() as f64 * best_d;
    }
    (membership, cost)
}

/// Best member site for one cluster by request-weighted delay sum, ties to
/// the lowest site id. Keeps the old center if the cluster has no member
/// site (cannot happen while the center itself is a member).
fn swap_center(
    inst: &NetworkInstance,
    map: &DelayMap,
    current: SiteId,
    members: &[usize],
) -> SiteId {
    let mut best = current;
    let mut best_score = f64::INFINITY;
    for &cand_idx in members {
        let cand = inst.aps()[cand_idx].id;
        if inst.sites().binary_search(&cand).is_err() {
            continue;
        }
        let score: f64 = members
            .iter()
            .map(|&j| inst.aps()[j].omega() as f64 * map.delay(inst.aps()[j].id, cand))
            .sum();
        if score < best_score || (score == best_score && cand < best) {
            best = cand;
            best_score = score;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaymap::all_pairs_delay;
    use crate::netmodel::{generate, ApId, GenParams};
    use crate::qoecp::evaluate;
    use crate::testutil::line_instance;

    #[test]
    fn one_median_on_a_path_by_oracle() {
        // Path 0-1-2, unit delays, one request per AP. Brute-force scores:
        // center 0 -> 0+1+2 = 3, center 1 -> 2, center 2 -> 3.
        let inst = line_instance(&[1.0, 1.0], &[1, 1, 1], 10);
        let map = all_pairs_delay(&inst).unwrap();

        let oracle: Vec<f64> = (0..3)
            .map(|c| {
                (0..3)
                    .map(|j| map.delay(ApId(j), ApId(c)) * inst.aps()[j as usize].omega() as f64)
                    .sum()
            })
            .collect();
        assert_eq!(oracle, vec![3.0, 2.0, 3.0]);

        for seed in 0..6 {
            let p = mdc(&inst, &map, 1, seed, DEFAULT_MAX_ITERS).unwrap();
            assert_eq!(p.locations, vec![ApId(1)], "seed {seed}");
            assert!((p.avg_delay_ms - 2.0 / 3.0).abs() <= crate::DELAY_EPS);
            evaluate(&inst, &map, &p).unwrap();
        }
    }

    #[test]
    fn k_equal_to_site_count_gives_zero_delay() {
        let inst = line_instance(&[2.0, 3.0, 1.5], &[2, 1, 3, 1], 10);
        let map = all_pairs_delay(&inst).unwrap();
        let p = mdc(&inst, &map, 4, 9, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(p.avg_delay_ms, 0.0);
        assert_eq!(p.locations.len(), 4);
        evaluate(&inst, &map, &p).unwrap();
    }

    #[test]
    fn weighted_pull_moves_the_center() {
        // Heavy AP at one end: center must sit on it.
        let inst = line_instance(&[1.0, 1.0], &[10, 1, 1], 10);
        let map = all_pairs_delay(&inst).unwrap();
        let p = mdc(&inst, &map, 1, 3, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(p.locations, vec![ApId(0)]);
        evaluate(&inst, &map, &p).unwrap();
    }

    #[test]
    fn deterministic_per_seed_and_feasible() {
        let params = GenParams { n: 24, edge_prob: 0.12, ..GenParams::default() };
        let inst = generate(&params, 5).unwrap();
        let map = all_pairs_delay(&inst).unwrap();
        for seed in [0u64, 1, 2] {
            let a = mdc(&inst, &map, 4, seed, DEFAULT_MAX_ITERS).unwrap();
            let b = mdc(&inst, &map, 4, seed, DEFAULT_MAX_ITERS).unwrap();
            assert_eq!(a, b);
            let report = evaluate(&inst, &map, &a).unwrap();
            assert_eq!(report.loads.iter().map(|l| l.requests).sum::<u64>(), inst.r_tot());
        }
    }

    #[test]
    fn iteration_cap_still_returns_a_valid_placement() {
        let params = GenParams { n: 20, edge_prob: 0.15, ..GenParams::default() };
        let inst = generate(&params, 8).unwrap();
        let map = all_pairs_delay(&inst).unwrap();
        let capped = mdc(&inst, &map, 3, 1, 1).unwrap();
        let full = mdc(&inst, &map, 3, 1, DEFAULT_MAX_ITERS).unwrap();
        evaluate(&inst, &map, &capped).unwrap();
        evaluate(&inst, &map, &full).unwrap();
        assert!(full.avg_delay_ms <= capped.avg_delay_ms + crate::DELAY_EPS);
    }

    #[test]
    fn rejects_bad_k() {
        let inst = line_instance(&[1.0], &[1, 1], 10);
        let map = all_pairs_delay(&inst).unwrap();
        assert!(matches!(mdc(&inst, &map, 0, 0, 10), Err(PlaceError::InvalidConfig(_))));
        assert!(matches!(mdc(&inst, &map, 3, 0, 10), Err(PlaceError::InvalidConfig(_))));
    }
}
