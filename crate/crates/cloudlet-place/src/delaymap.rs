//! All-pairs shortest-delay matrix over a network instance.
//!
//! Construction runs one Dijkstra per source (sources may be processed in
//! parallel; each row is an independent computation, so the result does not
//! depend on scheduling). Alongside the dense matrix, every AP gets a
//! neighbor row sorted by ascending delay, ties broken by ascending AP id;
//! the greedy placement solvers walk these rows.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use thiserror::Error;

use crate::netmodel::{ApId, NetworkInstance};

/// Dense `n x n` shortest-delay matrix plus per-AP delay-sorted rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayMap {
    n: usize,
    delay: Vec<f64>,
    sorted: Vec<ApId>,
}

#[derive(Debug, Error)]
pub enum DelayMapError {
    #[error("AP {0} cannot reach AP {1}: topology is disconnected")]
    Disconnected(ApId, ApId),
}

impl DelayMap {
    /// Shortest delay in ms between two APs; zero on the diagonal.
    #[inline]
    pub fn delay(&self, a: ApId, b: ApId) -> f64 {
        self.delay[a.index() * self.n + b.index()]
    }

    /// Full delay row for one source AP, indexed by destination AP.
    #[inline]
    pub fn row(&self, a: ApId) -> &[f64] {
        &self.delay[a.index() * self.n..(a.index() + 1) * self.n]
    }

    /// All APs sorted by ascending delay from `a`, ties by ascending id.
    /// The first entry is always `a` itself.
    #[inline]
    pub fn sorted_row(&self, a: ApId) -> &[ApId] {
        &self.sorted[a.index() * self.n..(a.index() + 1) * self.n]
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Builds the delay map for a connected instance.
pub fn all_pairs_delay(inst: &NetworkInstance) -> Result<DelayMap, DelayMapError> {
    let n = inst.n();
    let adj = inst.adjacency();
    let rows: Vec<Vec<f64>> =
        (0..n).into_par_iter().map(|src| dijkstra(&adj, src)).collect();

    let mut delay = Vec::with_capacity(n * n);
    let mut sorted = Vec::with_capacity(n * n);
    for (src, row) in rows.into_iter().enumerate() {
        if let Some(dst) = row.iter().position(|d| d.is_infinite()) {
            return Err(DelayMapError::Disconnected(ApId(src as u32), ApId(dst as u32)));
        }
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by(|&a, &b| {
            row[a as usize].partial_cmp(&row[b as usize]).unwrap().then(a.cmp(&b))
        });
        sorted.extend(order.into_iter().map(ApId));
        delay.extend(row);
    }
    Ok(DelayMap { n, delay, sorted })
}

struct HeapEntry {
    dist: f64,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.node == other.node
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // Reversed so the max-heap pops the smallest distance first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then_with(|| other.node.cmp(&self.node))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], src: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    dist[src] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry { dist: 0.0, node: src });
    while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapEntry { dist: nd, node: v });
            }
        }
    }
    dist
}
