//! Hand-construction helpers shared by the unit tests: path topologies with
//! explicit delays and demands, small enough to verify by hand.

use crate::netmodel::{Ap, ApId, Edge, NetworkInstance, UserRequest};

/// Path of APs where AP `i` carries `omegas[i]` requests of `demand` MHz
/// each; every AP is a candidate site.
pub(crate) fn line_instance(delays: &[f64], omegas: &[usize], demand: u32) -> NetworkInstance {
    let per_ap: Vec<Vec<u32>> = omegas.iter().map(|&w| vec![demand; w]).collect();
    let slices: Vec<&[u32]> = per_ap.iter().map(|v| v.as_slice()).collect();
    line_with_demands(delays, &slices)
}

/// Path of APs with explicit per-request demands; every AP is a site.
pub(crate) fn line_with_demands(delays: &[f64], demands: &[&[u32]]) -> NetworkInstance {
    let n = demands.len();
    assert_eq!(delays.len() + 1, n);
    let aps = demands
        .iter()
        .enumerate()
        .map(|(i, ds)| Ap {
            id: ApId(i as u32),
            requests: ds.iter().map(|&d| UserRequest { demand_mhz: d }).collect(),
        })
        .collect();
    let edges = delays
        .iter()
        .enumerate()
        .map(|(i, &d)| Edge { a: ApId(i as u32), b: ApId(i as u32 + 1), delay_ms: d })
        .collect();
    NetworkInstance::new(aps, edges, (0..n as u32).map(ApId).collect(), 0).unwrap()
}
