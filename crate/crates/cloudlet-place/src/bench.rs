//! Experiment harness: seeded sweeps over instance sizes and budgets,
//! re-certified CSV results, aggregate summaries, and gnuplot-ready series.
//!
//! An experiment is a plain key=value config file (see [`ExperimentConfig`])
//! expanded into (sweep point, algorithm, repetition) cells. Every cell
//! derives its instance seed as `base_seed XOR mix(point, rep)` so all
//! algorithms at a point see identical instances while repetitions stay
//! independent. Rows are sorted by (point, algorithm, seed) before writing;
//! the CSV is byte-stable across runs except for the trailing wall-clock
//! column.

mod config;
mod plot;
mod rows;
mod runner;

pub use config::{load_pool, CapacityRegime, ExperimentConfig, KRule, SweepAxis};
pub use plot::{emit_plotdata, FIGURE_IDS};
pub use rows::{
    read_csv, summarize, summary_csv, summary_text, write_csv, ResultRow, SummaryRow,
};
pub use runner::run_experiment;

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("bad experiment config: {0}")]
    Config(String),
    #[error("config I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed result row: {0}")]
    Csv(String),
    #[error("rows from different configs in one summary: {0:?} vs {1:?}")]
    MixedConfigs(String, String),
    #[error("unknown figure id {0:?}")]
    UnknownFigure(String),
    #[error("instance generation failed: {0}")]
    Model(#[from] crate::netmodel::ModelError),
    #[error("delay map construction failed: {0}")]
    DelayMap(#[from] crate::delaymap::DelayMapError),
}

/// Every solver the harness can run. Fixed-count sweeps take the first six,
/// budget sweeps take `Opt` plus the four searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Opt,
    Mdc,
    Mde,
    Heuristic,
    Random,
    TopK,
    Mkc,
    Mkh,
    RandomSearch,
    TopKSearch,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::Opt,
        Algorithm::Mdc,
        Algorithm::Mde,
        Algorithm::Heuristic,
        Algorithm::Random,
        Algorithm::TopK,
        Algorithm::Mkc,
        Algorithm::Mkh,
        Algorithm::RandomSearch,
        Algorithm::TopKSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Opt => "opt",
            Algorithm::Mdc => "mdc",
            Algorithm::Mde => "mde",
            Algorithm::Heuristic => "heuristic",
            Algorithm::Random => "random",
            Algorithm::TopK => "topk",
            Algorithm::Mkc => "mkc",
            Algorithm::Mkh => "mkh",
            Algorithm::RandomSearch => "random_search",
            Algorithm::TopKSearch => "topk_search",
        }
    }

    pub fn parse(s: &str) -> Option<Algorithm> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s)
    }

    /// Valid in a fixed-count (K) sweep.
    pub fn places_fixed_count(self) -> bool {
        matches!(
            self,
            Algorithm::Opt
                | Algorithm::Mdc
                | Algorithm::Mde
                | Algorithm::Heuristic
                | Algorithm::Random
                | Algorithm::TopK
        )
    }

    /// Valid in a delay-budget (D) sweep.
    pub fn minimizes_count(self) -> bool {
        matches!(
            self,
            Algorithm::Opt
                | Algorithm::Mkc
                | Algorithm::Mkh
                | Algorithm::RandomSearch
                | Algorithm::TopKSearch
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One sweep coordinate: a fixed cloudlet count or a delay budget, at a
/// network size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepPoint {
    FixedCount { n: u32, k: usize },
    Budget { n: u32, d_max_ms: f64 },
}

impl SweepPoint {
    pub fn n(self) -> u32 {
        match self {
            SweepPoint::FixedCount { n, .. } | SweepPoint::Budget { n, .. } => n,
        }
    }

    /// Stable mixing bits for seed derivation; the axis tag keeps a K-sweep
    /// and a D-sweep at equal coordinates from colliding.
    fn mix_bits(self) -> (u64, u64, u64) {
        match self {
            SweepPoint::FixedCount { n, k } => (1, n as u64, k as u64),
            SweepPoint::Budget { n, d_max_ms } => (2, n as u64, d_max_ms.to_bits()),
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Instance seed for one (point, repetition) cell, shared by every
/// algorithm at that cell.
pub fn point_seed(base: u64, point: SweepPoint, rep: u32) -> u64 {
    let (tag, a, b) = point.mix_bits();
    let mut h = splitmix64(tag);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ rep as u64);
    base ^ h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_roundtrip() {
        for a in Algorithm::ALL {
            assert_eq!(Algorithm::parse(a.name()), Some(a));
        }
        assert_eq!(Algorithm::parse("simplex"), None);
    }

    #[test]
    fn seeds_separate_points_reps_and_axes() {
        let p = SweepPoint::FixedCount { n: 18, k: 5 };
        assert_eq!(point_seed(7, p, 3), point_seed(7, p, 3));
        assert_ne!(point_seed(7, p, 3), point_seed(7, p, 4));
        assert_ne!(
            point_seed(7, p, 3),
            point_seed(7, SweepPoint::FixedCount { n: 18, k: 6 }, 3)
        );
        // Same coordinates, different axis meaning.
        assert_ne!(
            point_seed(7, SweepPoint::FixedCount { n: 18, k: 5 }, 0),
            point_seed(7, SweepPoint::Budget { n: 18, d_max_ms: 5.0 }, 0)
        );
        // Base folds in by XOR, so flipping a base bit flips the seed bit.
        assert_eq!(point_seed(0, p, 3) ^ 1, point_seed(1, p, 3));
    }
}
