//! Cloudlet placement and request assignment for metropolitan access-point
//! networks.
//!
//! A metropolitan wireless network is modeled as a connected graph of access
//! points (APs). Each AP carries a set of user requests with integer compute
//! demands (MHz), and each edge carries a positive transmission delay (ms).
//! Cloudlets (small in-network data centers) can be placed at a subset of
//! candidate AP locations; every user request must be served by exactly one
//! placed cloudlet, and the quality metric is the average access delay over
//! all requests.
//!
//! Two problems are covered, each with heuristics and an exact oracle:
//!
//! * fixed-count placement ([`qoecp`]): place exactly `K` cloudlets so the
//!   average access delay is minimized;
//! * minimum-count placement ([`dbocp`]): place as few cloudlets as possible
//!   so the average access delay stays within a budget.
//!
//! Module map:
//!
//! * [`netmodel`]: instances (topology, requests, candidate sites), seeded
//!   generation, and the line-oriented instance file format;
//! * [`delaymap`]: all-pairs shortest-delay matrix plus delay-sorted
//!   neighbor rows;
//! * [`qoecp`]: fixed-count solvers (`mdc`, `mde`, baselines) and the
//!   feasibility evaluator;
//! * [`dbocp`]: minimum-count searches (`mkc`, `mkh`, baseline searches);
//! * [`exact`]: exhaustive optimal oracles and ILP text export;
//! * [`bench`]: experiment configs, sweep runner, summaries, plot data.
//!
//! The `examples/` directory holds one runnable example per capability; the
//! `cloudlet-place` binary wraps the same entry points as subcommands.

pub mod bench;
pub mod dbocp;
pub mod delaymap;
pub mod exact;
pub mod netmodel;
pub mod qoecp;

#[cfg(test)]
pub(crate) mod testutil;

/// Absolute tolerance for comparing delay values (ms) and delay averages.
///
/// Delays are real-valued; sums over different association orders may differ
/// in the last bits. Every "equal" or "within budget" comparison on delays in
/// this crate uses this tolerance.
pub const DELAY_EPS: f64 = 1e-9;
