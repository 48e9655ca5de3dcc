//! Integer-program writer in the CPLEX LP text dialect.
//!
//! The emitted file is self-contained: an external MIP solver can consume it
//! directly, and its optimum can be checked against [`opt_qoecp`] or
//! [`opt_dbocp`] on instances small enough for both.
//!
//! Variables follow the structure of the placement program:
//! `p_i_l` cloudlet `i` sits at location `l`, `x_l_j_m` request `m` of AP `j`
//! is served at `l`, `z_j_l` counts AP `j`'s requests served at `l`.
//! Locations are named by AP id. Constraint rows:
//! `c1_i` every cloudlet placed once (fixed-count program only), `c2_l` at
//! most one cloudlet per location, `c3_j_l` ties `x` to `z`, `c4_j` serves
//! every request, `c5_j_l` allows service only at occupied locations,
//! `c7_l` capacity (designated capacities only), `c8` the delay bound
//! (count-minimization only).
//!
//! [`opt_qoecp`]: super::opt_qoecp
//! [`opt_dbocp`]: super::opt_dbocp

use crate::dbocp::DelayBudget;
use crate::delaymap::DelayMap;
use crate::netmodel::{CloudletSpec, NetworkInstance};

/// Which program to write.
#[derive(Debug, Clone)]
pub enum LpKind {
    /// Fixed cloudlet count, minimize average access delay.
    Qoecp(CloudletSpec),
    /// Minimize the number of placed cloudlets subject to the delay bound.
    /// `pool: None` drops the capacity rows and sizes the cloudlet set at
    /// one per candidate location.
    Dbocp { budget: DelayBudget, pool: Option<Vec<u64>> },
}

const WRAP_COLS: usize = 200;

/// One output row: `" name: term term ... rel rhs"`, wrapped between terms.
struct Row {
    name: String,
    terms: Vec<String>,
    tail: Option<String>,
}

impl Row {
    fn constraint(name: String, terms: Vec<String>, rel: &str, rhs: String) -> Row {
        Row { name, terms, tail: Some(format!("{rel} {rhs}")) }
    }

    fn write(&self, out: &mut String) {
        let mut col = 0usize;
        let mut push = |out: &mut String, tok: &str| {
            if col == 0 {
                out.push(' ');
                col = 1;
            } else if col + 1 + tok.len() > WRAP_COLS {
                out.push_str("\n     ");
                col = 5;
            } else {
                out.push(' ');
                col += 1;
            }
            out.push_str(tok);
            col += tok.len();
        };
        push(out, &format!("{}:", self.name));
        for t in &self.terms {
            push(out, t);
        }
        if let Some(tail) = &self.tail {
            push(out, tail);
        }
        out.push('\n');
    }
}

/// Renders a coefficient with `.` decimals, full round-trip precision.
fn num(v: f64) -> String {
    format!("{v}")
}

/// Writes the integer program for `inst` as CPLEX LP text. Deterministic:
/// the same inputs give byte-identical output.
pub fn lp_export(inst: &NetworkInstance, map: &DelayMap, kind: &LpKind) -> String {
    let sites = inst.sites();
    let aps = inst.aps();
    let r_tot = inst.r_tot().max(1);

    // Cloudlet index set and what it means for C1/C7/C8.
    let (count_min, caps): (bool, Option<Vec<u64>>) = match kind {
        LpKind::Qoecp(spec) => (false, spec.designated_capacities().map(<[u64]>::to_vec)),
        LpKind::Dbocp { pool, .. } => (true, pool.clone()),
    };
    let n_cloudlets = match kind {
        LpKind::Qoecp(spec) => spec.count(),
        LpKind::Dbocp { pool, .. } => pool.as_ref().map_or(sites.len(), Vec::len),
    };

    let p = |i: usize, l: u32| format!("p_{i}_{l}");
    let x = |l: u32, j: u32, m: usize| format!("x_{l}_{j}_{m}");
    let z = |j: u32, l: u32| format!("z_{j}_{l}");
    // First term carries no sign; the rest carry "+"/"-" prefixes so rows
    // wrap between whole terms.
    let term = |first: bool, coeff: Option<String>, var: String| -> String {
        let body = match coeff {
            Some(c) => format!("{c} {var}"),
            None => var,
        };
        if first { body } else { format!("+ {body}") }
    };

    let mut out = String::new();
    out.push_str("\\ cloudlet placement integer program\n");
    match kind {
        LpKind::Qoecp(spec) => {
            out.push_str(&format!(
                "\\ kind: fixed-count delay minimization, K = {}\n",
                spec.count()
            ));
        }
        LpKind::Dbocp { budget, .. } => {
            out.push_str(&format!(
                "\\ kind: count minimization, delay bound = {} ms\n",
                num(budget.d_max_ms())
            ));
        }
    }
    out.push_str(&format!(
        "\\ aps: {}, candidate locations: {}, requests: {}\n",
        inst.n(),
        sites.len(),
        inst.r_tot()
    ));

    out.push_str("Minimize\n");
    let obj = if count_min {
        let mut terms = Vec::new();
        for i in 0..n_cloudlets {
            for &l in sites {
                terms.push(term(terms.is_empty(), None, p(i, l.0)));
            }
        }
        Row { name: "obj".into(), terms, tail: None }
    } else {
        // Average delay per request; zero-delay terms stay so every z
        // appears in the objective.
        let mut terms = Vec::new();
        for ap in aps {
            for &l in sites {
                let coeff = map.delay(ap.id, l) / r_tot as f64;
                terms.push(term(terms.is_empty(), Some(num(coeff)), z(ap.id.0, l.0)));
            }
        }
        Row { name: "obj".into(), terms, tail: None }
    };
    obj.write(&mut out);

    out.push_str("Subject To\n");
    let mut rows: Vec<Row> = Vec::new();

    if !count_min {
        for i in 0..n_cloudlets {
            let terms = sites
                .iter()
                .enumerate()
                .map(|(idx, &l)| term(idx == 0, None, p(i, l.0)))
                .collect();
            rows.push(Row::constraint(format!("c1_{i}"), terms, "=", "1".into()));
        }
    }
    for &l in sites {
        let terms = (0..n_cloudlets)
            .map(|i| term(i == 0, None, p(i, l.0)))
            .collect();
        rows.push(Row::constraint(format!("c2_{}", l.0), terms, "<=", "1".into()));
    }
    for ap in aps {
        for &l in sites {
            let mut terms: Vec<String> = (0..ap.requests.len())
                .map(|m| term(m == 0, None, x(l.0, ap.id.0, m)))
                .collect();
            if terms.is_empty() {
                terms.push(z(ap.id.0, l.0));
            } else {
                terms.push(format!("- {}", z(ap.id.0, l.0)));
            }
            rows.push(Row::constraint(
                format!("c3_{}_{}", ap.id.0, l.0),
                terms,
                "=",
                "0".into(),
            ));
        }
    }
    for ap in aps {
        let terms = sites
            .iter()
            .enumerate()
            .map(|(idx, &l)| term(idx == 0, None, z(ap.id.0, l.0)))
            .collect();
        rows.push(Row::constraint(
            format!("c4_{}", ap.id.0),
            terms,
            "=",
            ap.omega().to_string(),
        ));
    }
    for ap in aps {
        for &l in sites {
            let mut terms = vec![z(ap.id.0, l.0)];
            for i in 0..n_cloudlets {
                terms.push(format!("- {} {}", ap.omega(), p(i, l.0)));
            }
            rows.push(Row::constraint(
                format!("c5_{}_{}", ap.id.0, l.0),
                terms,
                "<=",
                "0".into(),
            ));
        }
    }
    if let Some(caps) = &caps {
        for &l in sites {
            let mut terms = Vec::new();
            for ap in aps {
                for (m, r) in ap.requests.iter().enumerate() {
                    terms.push(term(
                        terms.is_empty(),
                        Some(r.demand_mhz.to_string()),
                        x(l.0, ap.id.0, m),
                    ));
                }
            }
            for (i, c) in caps.iter().enumerate() {
                terms.push(format!("- {c} {}", p(i, l.0)));
            }
            rows.push(Row::constraint(format!("c7_{}", l.0), terms, "<=", "0".into()));
        }
    }
    if let LpKind::Dbocp { budget, .. } = kind {
        let mut terms = Vec::new();
        for ap in aps {
            for &l in sites {
                let d = map.delay(ap.id, l);
                terms.push(term(terms.is_empty(), Some(num(d)), z(ap.id.0, l.0)));
            }
        }
        let rhs = num(budget.d_max_ms() * r_tot as f64);
        rows.push(Row::constraint("c8".into(), terms, "<=", rhs));
    }
    for row in &rows {
        row.write(&mut out);
    }

    out.push_str("Binary\n");
    let mut bin = Row { name: "".into(), terms: Vec::new(), tail: None };
    for i in 0..n_cloudlets {
        for &l in sites {
            bin.terms.push(p(i, l.0));
        }
    }
    for &l in sites {
        for ap in aps {
            for m in 0..ap.requests.len() {
                bin.terms.push(x(l.0, ap.id.0, m));
            }
        }
    }
    // Reuse the wrapper without a row name: drop the leading " :".
    let mut body = String::new();
    bin.write(&mut body);
    out.push_str(body.trim_start_matches(" :").trim_start());
    out.push_str("General\n");
    let mut gen = Row { name: "".into(), terms: Vec::new(), tail: None };
    for ap in aps {
        for &l in sites {
            gen.terms.push(z(ap.id.0, l.0));
        }
    }
    let mut body = String::new();
    gen.write(&mut body);
    out.push_str(body.trim_start_matches(" :").trim_start());
    out.push_str("End\n");
    out
}
