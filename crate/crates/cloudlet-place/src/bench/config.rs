//! Experiment config files: one experiment per file, `key = value` lines,
//! `#` comments. Lists are whitespace-separated. Keys:
//!
//! ```text
//! name = small_k_sweep
//! n = 18                  # network sizes (list)
//! k = 3 4 5 6 7 8 9       # fixed-count sweep; or: k = 10%n
//! # d = 20 25 30          # delay-budget sweep (ms); exactly one of k/d
//! algs = opt mdc mde random topk
//! capacity = identical    # none | identical | pool <path>
//! reps = 100
//! seed = 1
//! edge_prob = 0.3
//! delay_range = 2 20
//! request_range = 4 12
//! demand_range = 1 1
//! subset_limit = 2000000
//! time_limit_ms = 60000   # optional, per (point, algorithm) cell
//! ```
//!
//! A pool file holds one capacity (MHz) per line. Sweeps that include the
//! exact solver are capped at n = 300, heuristic-only sweeps at n = 1000;
//! this is a desk-scale harness.

use std::path::Path;

use super::{Algorithm, BenchError, SweepPoint};
use crate::exact::DEFAULT_SUBSET_LIMIT;
use crate::netmodel::GenParams;

/// How a sweep chooses cloudlet counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KRule {
    List(Vec<usize>),
    /// `K = 10% of n`, rounded to nearest, at least 1.
    TenPercent,
}

impl KRule {
    pub fn counts_for(&self, n: u32) -> Vec<usize> {
        match self {
            KRule::List(ks) => ks.clone(),
            KRule::TenPercent => vec![((n as f64 * 0.10).round() as usize).max(1)],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    FixedCounts(KRule),
    Budgets(Vec<f64>),
}

/// Capacity regime applied to capacity-aware algorithms at each point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CapacityRegime {
    /// Uncapacitated.
    None,
    /// K identical cloudlets of ceil(total demand / K) MHz each.
    Identical,
    /// Fixed descending pool; the K largest serve a K-cloudlet point.
    Pool(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub n_sweep: Vec<u32>,
    pub axis: SweepAxis,
    pub algs: Vec<Algorithm>,
    pub capacity: CapacityRegime,
    pub reps: u32,
    pub base_seed: u64,
    pub edge_prob: f64,
    pub delay_range: (f64, f64),
    pub request_range: (u32, u32),
    pub demand_range: (u32, u32),
    pub subset_limit: u64,
    pub time_limit_ms: Option<u64>,
}

impl ExperimentConfig {
    /// Parses config text; `dir` anchors relative pool paths.
    pub fn parse(text: &str, dir: &Path) -> Result<ExperimentConfig, BenchError> {
        let bad = |msg: String| BenchError::Config(msg);
        let mut name = None;
        let mut n_sweep: Option<Vec<u32>> = None;
        let mut k_rule: Option<KRule> = None;
        let mut budgets: Option<Vec<f64>> = None;
        let mut algs: Option<Vec<Algorithm>> = None;
        let mut capacity = CapacityRegime::None;
        let mut reps = 100u32;
        let mut base_seed = 1u64;
        let mut edge_prob = 0.3f64;
        let mut delay_range = (2.0, 20.0);
        let mut request_range = (4, 12);
        let mut demand_range = (1, 1);
        let mut subset_limit = DEFAULT_SUBSET_LIMIT;
        let mut time_limit_ms = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| bad(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(at(format!("{key} has no value")));
            }
            match key {
                "name" => {
                    if value.contains(',') {
                        return Err(at("name must not contain commas".into()));
                    }
                    name = Some(value.to_string());
                }
                "n" => n_sweep = Some(parse_list(value).map_err(at)?),
                "k" => {
                    k_rule = Some(if value == "10%n" {
                        KRule::TenPercent
                    } else {
                        KRule::List(parse_list(value).map_err(at)?)
                    });
                }
                "d" => budgets = Some(parse_list(value).map_err(at)?),
                "algs" => {
                    let mut list = Vec::new();
                    for tok in value.split_whitespace() {
                        list.push(
                            Algorithm::parse(tok)
                                .ok_or_else(|| at(format!("unknown algorithm {tok:?}")))?,
                        );
                    }
                    algs = Some(list);
                }
                "capacity" => {
                    capacity = match value.split_whitespace().collect::<Vec<_>>().as_slice() {
                        ["none"] => CapacityRegime::None,
                        ["identical"] => CapacityRegime::Identical,
                        ["pool", path] => CapacityRegime::Pool(load_pool(&dir.join(path))?),
                        _ => return Err(at(format!("capacity must be none, identical, or pool <file>, got {value:?}"))),
                    };
                }
                "reps" => reps = parse_one(value).map_err(at)?,
                "seed" => base_seed = parse_one(value).map_err(at)?,
                "edge_prob" => edge_prob = parse_one(value).map_err(at)?,
                "delay_range" => delay_range = parse_pair(value).map_err(at)?,
                "request_range" => request_range = parse_pair(value).map_err(at)?,
                "demand_range" => demand_range = parse_pair(value).map_err(at)?,
                "subset_limit" => subset_limit = parse_one(value).map_err(at)?,
                "time_limit_ms" => time_limit_ms = Some(parse_one(value).map_err(at)?),
                _ => return Err(at(format!("unknown key {key:?}"))),
            }
        }

        let name = name.ok_or_else(|| bad("missing name".into()))?;
        let n_sweep = n_sweep.ok_or_else(|| bad("missing n sweep".into()))?;
        let algs = algs.ok_or_else(|| bad("missing algs".into()))?;
        let axis = match (k_rule, budgets) {
            (Some(k), None) => SweepAxis::FixedCounts(k),
            (None, Some(ds)) => SweepAxis::Budgets(ds),
            (Some(_), Some(_)) => return Err(bad("k and d sweeps are exclusive".into())),
            (None, None) => return Err(bad("need a k or d sweep".into())),
        };

        if n_sweep.is_empty() {
            return Err(bad("n sweep is empty".into()));
        }
        if algs.is_empty() {
            return Err(bad("algs is empty".into()));
        }
        if reps == 0 {
            return Err(bad("reps must be >= 1".into()));
        }
        match &axis {
            SweepAxis::FixedCounts(KRule::List(ks)) => {
                if ks.is_empty() {
                    return Err(bad("k sweep is empty".into()));
                }
                if ks.contains(&0) {
                    return Err(bad("k must be >= 1".into()));
                }
            }
            SweepAxis::Budgets(ds) => {
                if ds.is_empty() {
                    return Err(bad("d sweep is empty".into()));
                }
                if let Some(d) = ds.iter().find(|d| !d.is_finite() || **d <= 0.0) {
                    return Err(bad(format!("delay budget {d} must be positive")));
                }
            }
            SweepAxis::FixedCounts(KRule::TenPercent) => {}
        }
        let fixed_count = matches!(axis, SweepAxis::FixedCounts(_));
        for &a in &algs {
            let ok = if fixed_count { a.places_fixed_count() } else { a.minimizes_count() };
            if !ok {
                let axis_name = if fixed_count { "k" } else { "d" };
                return Err(bad(format!("{a} does not apply to a {axis_name} sweep")));
            }
            let needs_caps =
                matches!(a, Algorithm::Mde | Algorithm::Heuristic | Algorithm::Mkh);
            if needs_caps && matches!(capacity, CapacityRegime::None) {
                return Err(bad(format!("{a} needs designated capacities")));
            }
        }
        let n_cap = if algs.contains(&Algorithm::Opt) { 300 } else { 1000 };
        if let Some(n) = n_sweep.iter().find(|&&n| n as usize > n_cap) {
            return Err(bad(format!("n = {n} exceeds the desk-scale cap of {n_cap}")));
        }

        Ok(ExperimentConfig {
            name,
            n_sweep,
            axis,
            algs,
            capacity,
            reps,
            base_seed,
            edge_prob,
            delay_range,
            request_range,
            demand_range,
            subset_limit,
            time_limit_ms,
        })
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, BenchError> {
        let text = std::fs::read_to_string(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        ExperimentConfig::parse(&text, dir)
    }

    /// Cross product of the n sweep and the axis, in declaration order.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for &n in &self.n_sweep {
            match &self.axis {
                SweepAxis::FixedCounts(rule) => {
                    for k in rule.counts_for(n) {
                        out.push(SweepPoint::FixedCount { n, k });
                    }
                }
                SweepAxis::Budgets(ds) => {
                    for &d_max_ms in ds {
                        out.push(SweepPoint::Budget { n, d_max_ms });
                    }
                }
            }
        }
        out
    }

    pub fn gen_params(&self, n: u32) -> GenParams {
        GenParams {
            n,
            edge_prob: self.edge_prob,
            delay_range: self.delay_range,
            request_range: self.request_range,
            demand_range: self.demand_range,
        }
    }
}

fn parse_one<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse {value:?}"))
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>, String> {
    value.split_whitespace().map(parse_one).collect()
}

fn parse_pair<T: std::str::FromStr + Copy>(value: &str) -> Result<(T, T), String> {
    let items: Vec<T> = parse_list(value)?;
    match items.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected two values, got {value:?}")),
    }
}

/// Loads a capacity pool file: one positive MHz value per line, `#`
/// comments allowed.
pub fn load_pool(path: &Path) -> Result<Vec<u64>, BenchError> {
    let text = std::fs::read_to_string(path)?;
    let mut pool = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let c: u64 = line.parse().map_err(|_| {
            BenchError::Config(format!(
                "{}:{}: bad capacity {line:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        if c == 0 {
            return Err(BenchError::Config(format!(
                "{}:{}: capacity must be positive",
                path.display(),
                lineno + 1
            )));
        }
        pool.push(c);
    }
    if pool.is_empty() {
        return Err(BenchError::Config(format!(
            "{}: empty capacity pool",
            path.display()
        )));
    }
    Ok(pool)
}
