//! Network instances: APs with user requests, delay-weighted edges, candidate
//! cloudlet sites, seeded random generation, and a line-oriented file format.
//!
//! # Random generation
//!
//! [`generate`] is a pure function of its arguments. All randomness comes from
//! a ChaCha8 generator seeded with the 64-bit instance seed, and the draw
//! order is part of the format contract:
//!
//! 1. attempt `t` (starting at 0) seeds a fresh generator with `seed + t`
//!    (wrapping) and draws, for every AP pair `(i, j)` with `i < j` in
//!    lexicographic order, one `f64` coin against `edge_prob`, followed by one
//!    uniform delay draw from `delay_range` when the coin lands;
//! 2. if the topology is connected the same generator then draws, for each AP
//!    in id order, a request count from `request_range` followed by that many
//!    demands from `demand_range`;
//! 3. a disconnected topology is regenerated (step 1) with the next sub-seed,
//!    up to 64 attempts; if all fail, the last attempt's generator draws a
//!    uniform permutation of the APs and walks it, adding an edge (delay drawn
//!    from `delay_range`) for each adjacent pair that still lies in different
//!    components, which connects the graph with the minimum number of extra
//!    edges; requests are then drawn as in step 2.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Identifier of an access point: an index in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ApId(pub u32);

/// Candidate cloudlet locations are APs, so site ids share the AP id space.
pub type SiteId = ApId;

impl ApId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ApId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One user request, with a positive compute demand in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UserRequest {
    pub demand_mhz: u32,
}

/// An access point and the user requests it aggregates.
///
/// Requests are kept in generation (file) order; algorithms that need another
/// order sort locally and stably.
#[derive(Debug, Clone, PartialEq)]
pub struct Ap {
    pub id: ApId,
    pub requests: Vec<UserRequest>,
}

impl Ap {
    /// Number of requests at this AP.
    pub fn omega(&self) -> u64 {
        self.requests.len() as u64
    }

    /// Total demand (MHz) of the requests at this AP.
    pub fn demand_sum(&self) -> u64 {
        self.requests.iter().map(|r| u64::from(r.demand_mhz)).sum()
    }
}

/// An undirected edge with a positive transmission delay in ms.
///
/// Stored with `a < b`; at most one edge per AP pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: ApId,
    pub b: ApId,
    pub delay_ms: f64,
}

/// A connected metropolitan network instance.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkInstance {
    aps: Vec<Ap>,
    edges: Vec<Edge>,
    sites: Vec<SiteId>,
    seed: u64,
}

/// Parameters for [`generate`]. Defaults match the metropolitan regime the
/// benchmark sweeps scale down from.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub n: u32,
    /// Probability of an edge between any AP pair, in `(0, 1]`.
    pub edge_prob: f64,
    /// Uniform real edge delay range in ms; both ends positive.
    pub delay_range: (f64, f64),
    /// Uniform integer per-AP request count range.
    pub request_range: (u32, u32),
    /// Uniform integer per-request demand range in MHz; lower end >= 1.
    pub demand_range: (u32, u32),
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 200,
            edge_prob: 0.02,
            delay_range: (5.0, 50.0),
            request_range: (50, 500),
            demand_range: (50, 200),
        }
    }
}

/// Capacity side of a placement task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Capacities {
    /// Cloudlets are uncapacitated; capacity is derived from assigned load.
    Undesignated,
    /// Fixed per-cloudlet capacities in MHz, stored sorted descending.
    Designated(Vec<u64>),
}

/// What to place: how many cloudlets, and whether their capacities are fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CloudletSpec {
    count: usize,
    capacities: Capacities,
}

impl CloudletSpec {
    /// `count` uncapacitated cloudlets.
    pub fn undesignated(count: usize) -> Result<Self, ModelError> {
        if count == 0 {
            return Err(ModelError::InvalidSpec("cloudlet count must be >= 1".into()));
        }
        Ok(CloudletSpec { count, capacities: Capacities::Undesignated })
    }

    /// Cloudlets with the given capacities (MHz); the list is sorted
    /// descending and its length fixes the count.
    pub fn designated(mut caps: Vec<u64>) -> Result<Self, ModelError> {
        if caps.is_empty() {
            return Err(ModelError::InvalidSpec("capacity list must be nonempty".into()));
        }
        if caps.iter().any(|&c| c == 0) {
            return Err(ModelError::InvalidSpec("capacities must be positive".into()));
        }
        caps.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CloudletSpec { count: caps.len(), capacities: Capacities::Designated(caps) })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn capacities(&self) -> &Capacities {
        &self.capacities
    }

    /// Designated capacities, if any, sorted descending.
    pub fn designated_capacities(&self) -> Option<&[u64]> {
        match &self.capacities {
            Capacities::Undesignated => None,
            Capacities::Designated(c) => Some(c),
        }
    }

    /// Total designated capacity must cover the instance's total demand.
    pub fn check_against(&self, inst: &NetworkInstance) -> Result<(), ModelError> {
        if let Capacities::Designated(caps) = &self.capacities {
            let total: u64 = caps.iter().sum();
            let need = inst.gamma_sum();
            if total < need {
                return Err(ModelError::InfeasibleCapacity { available: total, required: need });
            }
        }
        Ok(())
    }
}

/// Errors from instance construction, generation, and capacity validation.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid generation parameters: {0}")]
    InvalidParams(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid cloudlet spec: {0}")]
    InvalidSpec(String),
    #[error("designated capacity {available} MHz cannot cover total demand {required} MHz")]
    InfeasibleCapacity { available: u64, required: u64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl NetworkInstance {
    /// Builds and validates an instance: contiguous AP ids, positive demands,
    /// canonical deduplicated edges with positive finite delays, a nonempty
    /// sorted site list, and a connected topology.
    pub fn new(
        aps: Vec<Ap>,
        edges: Vec<Edge>,
        sites: Vec<SiteId>,
        seed: u64,
    ) -> Result<Self, ModelError> {
        let n = aps.len();
        if n == 0 {
            return Err(ModelError::InvalidInstance("instance has no APs".into()));
        }
        for (i, ap) in aps.iter().enumerate() {
            if ap.id.index() != i {
                return Err(ModelError::InvalidInstance(format!(
                    "AP ids must be contiguous: position {i} holds id {}",
                    ap.id
                )));
            }
            if ap.requests.iter().any(|r| r.demand_mhz == 0) {
                return Err(ModelError::InvalidInstance(format!(
                    "AP {} has a zero-demand request",
                    ap.id
                )));
            }
        }
        let mut canon: Vec<Edge> = Vec::with_capacity(edges.len());
        let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.a == e.b {
                return Err(ModelError::InvalidInstance(format!("self-loop at AP {}", e.a)));
            }
            if e.a.index() >= n || e.b.index() >= n {
                return Err(ModelError::InvalidInstance(format!(
                    "edge {}-{} references an unknown AP",
                    e.a, e.b
                )));
            }
            if !(e.delay_ms.is_finite() && e.delay_ms > 0.0) {
                return Err(ModelError::InvalidInstance(format!(
                    "edge {}-{} has non-positive delay {}",
                    e.a, e.b, e.delay_ms
                )));
            }
            let (a, b) = if e.a < e.b { (e.a, e.b) } else { (e.b, e.a) };
            if !seen.insert((a.0, b.0)) {
                return Err(ModelError::InvalidInstance(format!("duplicate edge {a}-{b}")));
            }
            canon.push(Edge { a, b, delay_ms: e.delay_ms });
        }
        canon.sort_by(|x, y| (x.a, x.b).cmp(&(y.a, y.b)));

        if sites.is_empty() {
            return Err(ModelError::InvalidInstance("site list is empty".into()));
        }
        let mut sites = sites;
        sites.sort_unstable();
        for w in sites.windows(2) {
            if w[0] == w[1] {
                return Err(ModelError::InvalidInstance(format!("duplicate site {}", w[0])));
            }
        }
        if sites.last().unwrap().index() >= n {
            return Err(ModelError::InvalidInstance(format!(
                "site {} references an unknown AP",
                sites.last().unwrap()
            )));
        }

        let inst = NetworkInstance { aps, edges: canon, sites, seed };
        if !inst.is_connected() {
            return Err(ModelError::InvalidInstance("topology is not connected".into()));
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.aps.len()
    }

    pub fn aps(&self) -> &[Ap] {
        &self.aps
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Candidate cloudlet sites, sorted ascending.
    pub fn sites(&self) -> &[SiteId] {
        &self.sites
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Total number of user requests.
    pub fn r_tot(&self) -> u64 {
        self.aps.iter().map(Ap::omega).sum()
    }

    /// Total demand in MHz.
    pub fn gamma_sum(&self) -> u64 {
        self.aps.iter().map(Ap::demand_sum).sum()
    }

    /// Adjacency lists as `(neighbor index, delay)` pairs.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n()];
        for e in &self.edges {
            adj[e.a.index()].push((e.b.index(), e.delay_ms));
            adj[e.b.index()].push((e.a.index(), e.delay_ms));
        }
        adj
    }

    fn is_connected(&self) -> bool {
        connected_on(self.n(), &self.edges)
    }
}

fn connected_on(n: usize, edges: &[Edge]) -> bool {
    if n == 0 {
        return false;
    }
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.a.index()].push(e.b.index());
        adj[e.b.index()].push(e.a.index());
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

fn validate_params(p: &GenParams) -> Result<(), ModelError> {
    if p.n < 2 {
        return Err(ModelError::InvalidParams(format!("n must be >= 2, got {}", p.n)));
    }
    if !(p.edge_prob > 0.0 && p.edge_prob <= 1.0) {
        return Err(ModelError::InvalidParams(format!(
            "edge_prob must be in (0, 1], got {}",
            p.edge_prob
        )));
    }
    let (dl, dh) = p.delay_range;
    if !(dl.is_finite() && dh.is_finite() && 0.0 < dl && dl <= dh) {
        return Err(ModelError::InvalidParams(format!("delay range ({dl}, {dh}) is invalid")));
    }
    let (rl, rh) = p.request_range;
    if rl > rh {
        return Err(ModelError::InvalidParams(format!("request range ({rl}, {rh}) is inverted")));
    }
    let (gl, gh) = p.demand_range;
    if gl == 0 || gl > gh {
        return Err(ModelError::InvalidParams(format!("demand range ({gl}, {gh}) is invalid")));
    }
    Ok(())
}

const CONNECT_ATTEMPTS: u64 = 64;

/// Generates a connected instance with all APs as candidate sites.
///
/// Identical arguments produce the bit-identical instance; see the module
/// docs for the draw order.
pub fn generate(params: &GenParams, seed: u64) -> Result<NetworkInstance, ModelError> {
    validate_params(params)?;
    let n = params.n as usize;
    let (dl, dh) = params.delay_range;

    let mut last: Option<(Vec<Edge>, ChaCha8Rng)> = None;
    for attempt in 0..CONNECT_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let mut edges = Vec::new();
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                if rng.random::<f64>() < params.edge_prob {
                    let delay_ms = rng.random_range(dl..=dh);
                    edges.push(Edge { a: ApId(i), b: ApId(j), delay_ms });
                }
            }
        }
        if connected_on(n, &edges) {
            let aps = draw_requests(params, &mut rng);
            let sites = (0..n as u32).map(ApId).collect();
            return NetworkInstance::new(aps, edges, sites, seed);
        }
        last = Some((edges, rng));
    }

    // All attempts disconnected: connect the last topology along a random
    // spanning walk, adding exactly one edge per remaining component.
    let (mut edges, mut rng) = last.unwrap();
    let mut uf = UnionFind::new(n);
    for e in &edges {
        uf.union(e.a.index(), e.b.index());
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    for w in 1..n {
        let (prev, cur) = (perm[w - 1], perm[w]);
        if uf.union(prev, cur) {
            let delay_ms = rng.random_range(dl..=dh);
            let (a, b) = if prev < cur { (prev, cur) } else { (cur, prev) };
            edges.push(Edge { a: ApId(a as u32), b: ApId(b as u32), delay_ms });
        }
    }
    let aps = draw_requests(params, &mut rng);
    let sites = (0..n as u32).map(ApId).collect();
    NetworkInstance::new(aps, edges, sites, seed)
}

fn draw_requests(params: &GenParams, rng: &mut ChaCha8Rng) -> Vec<Ap> {
    let (rl, rh) = params.request_range;
    let (gl, gh) = params.demand_range;
    (0..params.n)
        .map(|id| {
            let count = rng.random_range(rl..=rh);
            let requests = (0..count)
                .map(|_| UserRequest { demand_mhz: rng.random_range(gl..=gh) })
                .collect();
            Ap { id: ApId(id), requests }
        })
        .collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    /// Returns true when the two elements were in different components.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Serializes an instance in canonical form.
///
/// Format, one record per line, `#` starting a comment line:
///
/// ```text
/// wman v1 n=<n> seed=<seed>
/// ap <id> <demand_1> <demand_2> ...
/// edge <u> <v> <delay_ms>
/// sites <id> <id> ...
/// ```
pub fn save_instance(inst: &NetworkInstance) -> String {
    let mut out = String::new();
    out.push_str(&format!("wman v1 n={} seed={}\n", inst.n(), inst.seed()));
    for ap in inst.aps() {
        out.push_str(&format!("ap {}", ap.id));
        for r in &ap.requests {
            out.push_str(&format!(" {}", r.demand_mhz));
        }
        out.push('\n');
    }
    for e in inst.edges() {
        out.push_str(&format!("edge {} {} {}\n", e.a, e.b, e.delay_ms));
    }
    out.push_str("sites");
    for s in inst.sites() {
        out.push_str(&format!(" {s}"));
    }
    out.push('\n');
    out
}

pub fn save_instance_to(path: &Path, inst: &NetworkInstance) -> Result<(), ModelError> {
    std::fs::write(path, save_instance(inst))?;
    Ok(())
}

/// Parses the format produced by [`save_instance`]. Record lines may appear
/// in any order after the header; errors name the offending 1-based line.
pub fn load_instance(text: &str) -> Result<NetworkInstance, ModelError> {
    let perr = |line: usize, msg: String| ModelError::Parse { line, msg };
    let mut header: Option<(usize, u64)> = None;
    let mut aps: Vec<Option<(usize, Ap)>> = Vec::new();
    let mut edges: Vec<(usize, Edge)> = Vec::new();
    let mut sites: Option<(usize, Vec<SiteId>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_ascii_whitespace();
        let head = tok.next().unwrap();
        if header.is_none() {
            if head != "wman" {
                return Err(perr(lineno, format!("expected `wman v1` header, found `{head}`")));
            }
            if tok.next() != Some("v1") {
                return Err(perr(lineno, "unsupported format version".into()));
            }
            let n = parse_kv(tok.next(), "n").map_err(|m| perr(lineno, m))?;
            let seed = parse_kv(tok.next(), "seed").map_err(|m| perr(lineno, m))?;
            if n == 0 {
                return Err(perr(lineno, "n must be >= 1".into()));
            }
            aps = (0..n as usize).map(|_| None).collect();
            header = Some((n as usize, seed));
            continue;
        }
        let n = header.unwrap().0;
        match head {
            "ap" => {
                let id: u32 = parse_num(tok.next(), "AP id").map_err(|m| perr(lineno, m))?;
                if id as usize >= n {
                    return Err(perr(lineno, format!("AP id {id} out of range (n={n})")));
                }
                if aps[id as usize].is_some() {
                    return Err(perr(lineno, format!("duplicate ap line for AP {id}")));
                }
                let mut requests = Vec::new();
                for t in tok {
                    let demand: u32 =
                        parse_num(Some(t), "request demand").map_err(|m| perr(lineno, m))?;
                    if demand == 0 {
                        return Err(perr(lineno, "request demand must be positive".into()));
                    }
                    requests.push(UserRequest { demand_mhz: demand });
                }
                aps[id as usize] = Some((lineno, Ap { id: ApId(id), requests }));
            }
            "edge" => {
                let u: u32 = parse_num(tok.next(), "edge endpoint").map_err(|m| perr(lineno, m))?;
                let v: u32 = parse_num(tok.next(), "edge endpoint").map_err(|m| perr(lineno, m))?;
                let delay: f64 = parse_num(tok.next(), "edge delay").map_err(|m| perr(lineno, m))?;
                if u == v {
                    return Err(perr(lineno, format!("self-loop at AP {u}")));
                }
                if u as usize >= n || v as usize >= n {
                    return Err(perr(lineno, format!("edge {u}-{v} references an unknown AP")));
                }
                if !(delay.is_finite() && delay > 0.0) {
                    return Err(perr(lineno, format!("edge delay must be positive, got {delay}")));
                }
                edges.push((lineno, Edge { a: ApId(u.min(v)), b: ApId(u.max(v)), delay_ms: delay }));
            }
            "sites" => {
                if sites.is_some() {
                    return Err(perr(lineno, "duplicate sites line".into()));
                }
                let mut ids = Vec::new();
                for t in tok {
                    let id: u32 = parse_num(Some(t), "site id").map_err(|m| perr(lineno, m))?;
                    if id as usize >= n {
                        return Err(perr(lineno, format!("site {id} references an unknown AP")));
                    }
                    ids.push(ApId(id));
                }
                if ids.is_empty() {
                    return Err(perr(lineno, "sites line lists no sites".into()));
                }
                sites = Some((lineno, ids));
            }
            other => {
                return Err(perr(lineno, format!("unknown record `{other}`")));
            }
        }
    }

    let (n, seed) = header.ok_or_else(|| perr(text.lines().count().max(1), "missing header".into()))?;
    let last_line = text.lines().count().max(1);
    let mut ap_list = Vec::with_capacity(n);
    for (i, slot) in aps.into_iter().enumerate() {
        match slot {
            Some((_, ap)) => ap_list.push(ap),
            None => return Err(perr(last_line, format!("missing ap line for AP {i}"))),
        }
    }
    {
        let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(edges.len());
        for (lineno, e) in &edges {
            if !seen.insert((e.a.0, e.b.0)) {
                return Err(perr(*lineno, format!("duplicate edge {}-{}", e.a, e.b)));
            }
        }
    }
    let (_, site_ids) = sites.ok_or_else(|| perr(last_line, "missing sites line".into()))?;
    NetworkInstance::new(ap_list, edges.into_iter().map(|(_, e)| e).collect(), site_ids, seed)
}

pub fn load_instance_from(path: &Path) -> Result<NetworkInstance, ModelError> {
    load_instance(&std::fs::read_to_string(path)?)
}

fn parse_kv(tok: Option<&str>, key: &str) -> Result<u64, String> {
    let t = tok.ok_or_else(|| format!("missing `{key}=` field"))?;
    let rest = t
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| format!("expected `{key}=<value>`, found `{t}`"))?;
    rest.parse().map_err(|_| format!("invalid {key} value `{rest}`"))
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T, String> {
    let t = tok.ok_or_else(|| format!("missing {what}"))?;
    t.parse().map_err(|_| format!("invalid {what} `{t}`"))
}
