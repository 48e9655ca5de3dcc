//! Thin CLI over the library: generate instances, run one solver, query the
//! exact oracle, export the integer program, and drive benchmark sweeps.
//!
//! Exit codes: 0 success, 2 infeasible instance/spec, 3 search budget or
//! time limit exceeded, 1 anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use cloudlet_place::bench::{
    emit_plotdata, load_pool, read_csv, run_experiment, summarize, summary_csv, summary_text,
    write_csv, ExperimentConfig,
};
use cloudlet_place::dbocp::{
    mkc, mkh, random_k_search, topk_k_search, CapacityRule, DelayBudget, KSolution,
};
use cloudlet_place::delaymap::{all_pairs_delay, DelayMap};
use cloudlet_place::exact::{
    lp_export, opt_dbocp, opt_qoecp, LpKind, OptError, DEFAULT_SUBSET_LIMIT,
};
use cloudlet_place::netmodel::{
    generate, load_instance_from, save_instance, CloudletSpec, ModelError, NetworkInstance,
};
use cloudlet_place::qoecp::{
    evaluate, heuristic_baseline, mdc, mde, random_placement, topk_placement, PlaceError,
    Placement, DEFAULT_MAX_ITERS,
};

#[derive(Parser)]
#[command(
    name = "cloudlet-place",
    version,
    about = "Cloudlet placement solvers and benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded instance using a config's generator block.
    Gen {
        /// Experiment config file; the first n of its sweep sets the size.
        #[arg(long)]
        config: PathBuf,
        /// Instance seed; defaults to the config's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for the instance file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one heuristic on an instance file.
    Solve {
        /// Instance file.
        #[arg(long)]
        config: PathBuf,
        /// mdc | mde | heuristic | random | topk (with --k), or
        /// mkc | mkh | random_search | topk_search (with --dmax).
        #[arg(long)]
        alg: String,
        /// Cloudlet count for fixed-count placement.
        #[arg(long)]
        k: Option<usize>,
        /// Delay budget (ms) for count minimization.
        #[arg(long)]
        dmax: Option<f64>,
        /// none | identical | path to a capacity pool file.
        #[arg(long, default_value = "none")]
        capacities: String,
        /// Seed for randomized solvers.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Directory to also write the report into.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact optimum via exhaustive search (small instances).
    Opt {
        /// Instance file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        dmax: Option<f64>,
        #[arg(long, default_value = "none")]
        capacities: String,
        /// Abort when the location subset count exceeds this.
        #[arg(long, default_value_t = DEFAULT_SUBSET_LIMIT)]
        subset_limit: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the integer program (CPLEX LP text) for an external solver.
    ExportLp {
        /// Instance file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        dmax: Option<f64>,
        #[arg(long, default_value = "none")]
        capacities: String,
        /// Directory for the .lp file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a config's full sweep and write the result CSV.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for <name>.csv (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate a result CSV into per-cell means and ratios.
    Summarize {
        /// Result CSV produced by bench.
        #[arg(long)]
        config: PathBuf,
        /// Directory to write <name>.summary.csv; prints text either way.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract gnuplot series for one figure from bench results.
    Plotdata {
        /// delay_vs_k_small | delay_vs_k_large | delay_vs_n | runtime_vs_n |
        /// k_vs_d | k_vs_n
        figure: String,
        /// Result CSV produced by bench (summarized on the fly).
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // Rust ignores SIGPIPE, so a pipeline that closes stdout early (`... |
    // head`) would otherwise panic mid-print; die quietly like any filter.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::FAILURE;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

/// Error plus the process exit code it maps to.
struct Fail {
    msg: String,
    code: u8,
}

impl Fail {
    fn new(code: u8, msg: impl Into<String>) -> Fail {
        Fail { msg: msg.into(), code }
    }
}

trait IntoFail {
    fn code(&self) -> u8;
}

impl IntoFail for PlaceError {
    fn code(&self) -> u8 {
        match self {
            PlaceError::Stranded { .. } => 2,
            PlaceError::Model(ModelError::InfeasibleCapacity { .. }) => 2,
            _ => 1,
        }
    }
}

impl IntoFail for OptError {
    fn code(&self) -> u8 {
        match self {
            OptError::Infeasible => 2,
            OptError::Model(ModelError::InfeasibleCapacity { .. }) => 2,
            OptError::SubsetBudget { .. } | OptError::TooManyRequests { .. } => 3,
            _ => 1,
        }
    }
}

fn fail<E: IntoFail + std::fmt::Display>(e: E) -> Fail {
    Fail::new(e.code(), e.to_string())
}

fn plain<E: std::fmt::Display>(e: E) -> Fail {
    Fail::new(1, e.to_string())
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Cmd::Gen { config, seed, out } => {
            let cfg = ExperimentConfig::load(&config).map_err(plain)?;
            let n = cfg.n_sweep[0];
            let seed = seed.unwrap_or(cfg.base_seed);
            let inst = generate(&cfg.gen_params(n), seed).map_err(plain)?;
            let text = save_instance(&inst);
            match out {
                Some(dir) => {
                    let path = dir.join(format!("instance-n{n}-s{seed}.txt"));
                    write_file(&path, &text)?;
                    println!("{}", path.display());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Cmd::Solve { config, alg, k, dmax, capacities, seed, out } => {
            let inst = load_instance_from(&config).map_err(plain)?;
            let map = all_pairs_delay(&inst).map_err(plain)?;
            let report = match (k, dmax) {
                (Some(k), None) => {
                    let spec = spec_from(&capacities, &inst, k)?;
                    let p = match alg.as_str() {
                        "mdc" => mdc(&inst, &map, k, seed, DEFAULT_MAX_ITERS),
                        "mde" => mde(&inst, &map, &spec),
                        "heuristic" => heuristic_baseline(&inst, &map, &spec),
                        "random" => random_placement(&inst, &map, &spec, seed),
                        "topk" => topk_placement(&inst, &map, &spec),
                        other => return Err(Fail::new(1, format!("unknown fixed-count algorithm {other:?}"))),
                    }
                    .map_err(fail)?;
                    placement_report(&alg, &inst, &map, &p, None)?
                }
                (None, Some(d)) => {
                    let budget = DelayBudget::new(d).map_err(fail)?;
                    let k_cap = inst.sites().len();
                    let sol = match alg.as_str() {
                        "mkc" => mkc(&inst, &map, budget, seed, k_cap),
                        "mkh" => {
                            let rule = rule_from(&capacities)?
                                .ok_or_else(|| Fail::new(1, "mkh needs --capacities identical or a pool file"))?;
                            mkh(&inst, &map, budget, &rule, k_cap)
                        }
                        "random_search" => random_k_search(&inst, &map, budget, seed, k_cap),
                        "topk_search" => topk_k_search(&inst, &map, budget, k_cap),
                        other => return Err(Fail::new(1, format!("unknown budget algorithm {other:?}"))),
                    }
                    .map_err(fail)?;
                    ksolution_report(&alg, &inst, &map, &sol, d)?
                }
                _ => return Err(Fail::new(1, "pass exactly one of --k or --dmax")),
            };
            print!("{report}");
            if let Some(dir) = out {
                let stem = config.file_stem().unwrap_or_default().to_string_lossy();
                write_file(&dir.join(format!("{stem}.{alg}.txt")), &report)?;
            }
            Ok(())
        }
        Cmd::Opt { config, k, dmax, capacities, subset_limit, out } => {
            let inst = load_instance_from(&config).map_err(plain)?;
            let map = all_pairs_delay(&inst).map_err(plain)?;
            let report = match (k, dmax) {
                (Some(k), None) => {
                    let spec = spec_from(&capacities, &inst, k)?;
                    let p = opt_qoecp(&inst, &map, &spec, subset_limit).map_err(fail)?;
                    placement_report("opt", &inst, &map, &p, None)?
                }
                (None, Some(d)) => {
                    let budget = DelayBudget::new(d).map_err(fail)?;
                    let rule = rule_from(&capacities)?;
                    let sol = opt_dbocp(&inst, &map, budget, rule.as_ref(), subset_limit)
                        .map_err(fail)?;
                    ksolution_report("opt", &inst, &map, &sol, d)?
                }
                _ => return Err(Fail::new(1, "pass exactly one of --k or --dmax")),
            };
            print!("{report}");
            if let Some(dir) = out {
                let stem = config.file_stem().unwrap_or_default().to_string_lossy();
                write_file(&dir.join(format!("{stem}.opt.txt")), &report)?;
            }
            Ok(())
        }
        Cmd::ExportLp { config, k, dmax, capacities, out } => {
            let inst = load_instance_from(&config).map_err(plain)?;
            let map = all_pairs_delay(&inst).map_err(plain)?;
            let (kind, tag) = match (k, dmax) {
                (Some(k), None) => (LpKind::Qoecp(spec_from(&capacities, &inst, k)?), format!("k{k}")),
                (None, Some(d)) => {
                    let budget = DelayBudget::new(d).map_err(fail)?;
                    let pool = match rule_from(&capacities)? {
                        None => None,
                        Some(CapacityRule::Identical) => {
                            return Err(Fail::new(
                                1,
                                "identical capacities depend on the variable count; \
                                 export with a pool file or none",
                            ))
                        }
                        Some(CapacityRule::FixedPool(pool)) => Some(pool),
                        Some(_) => None,
                    };
                    (LpKind::Dbocp { budget, pool }, format!("d{d}"))
                }
                _ => return Err(Fail::new(1, "pass exactly one of --k or --dmax")),
            };
            let text = lp_export(&inst, &map, &kind);
            match out {
                Some(dir) => {
                    let stem = config.file_stem().unwrap_or_default().to_string_lossy();
                    let path = dir.join(format!("{stem}.{tag}.lp"));
                    write_file(&path, &text)?;
                    println!("{}", path.display());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Cmd::Bench { config, out } => {
            let cfg = ExperimentConfig::load(&config).map_err(plain)?;
            let rows = run_experiment(&cfg).map_err(plain)?;
            let dir = out.unwrap_or_else(|| PathBuf::from("."));
            let path = dir.join(format!("{}.csv", cfg.name));
            write_file(&path, &write_csv(&rows))?;
            println!("{}", path.display());
            let skipped = rows.iter().filter(|r| r.feasible.is_none()).count();
            if skipped > 0 {
                eprintln!("note: {skipped} of {} rows skipped (see note column)", rows.len());
            }
            Ok(())
        }
        Cmd::Summarize { config, out } => {
            let rows = read_csv(&std::fs::read_to_string(&config).map_err(plain)?).map_err(plain)?;
            let summary = summarize(&rows).map_err(plain)?;
            print!("{}", summary_text(&summary));
            if let Some(dir) = out {
                let stem = config.file_stem().unwrap_or_default().to_string_lossy();
                let path = dir.join(format!("{stem}.summary.csv"));
                write_file(&path, &summary_csv(&summary))?;
                println!("{}", path.display());
            }
            Ok(())
        }
        Cmd::Plotdata { figure, config, out } => {
            let rows = read_csv(&std::fs::read_to_string(&config).map_err(plain)?).map_err(plain)?;
            let summary = summarize(&rows).map_err(plain)?;
            let files = emit_plotdata(&summary, &figure).map_err(plain)?;
            let dir = out.unwrap_or_else(|| PathBuf::from("."));
            for (name, content) in files {
                let path = dir.join(name);
                write_file(&path, &content)?;
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

/// Fixed-count capacity spec from the --capacities flag.
fn spec_from(capacities: &str, inst: &NetworkInstance, k: usize) -> Result<CloudletSpec, Fail> {
    let gamma = inst.gamma_sum();
    let caps = match capacities {
        "none" => return CloudletSpec::undesignated(k).map_err(plain),
        "identical" => CapacityRule::Identical.capacities(k, gamma),
        path => {
            let pool = load_pool(Path::new(path)).map_err(plain)?;
            if pool.len() < k {
                return Err(Fail::new(
                    2,
                    format!("pool holds {} cloudlets, {k} requested", pool.len()),
                ));
            }
            CapacityRule::FixedPool(pool).capacities(k, gamma)
        }
    };
    CloudletSpec::designated(caps).map_err(plain)
}

/// Budget-mode capacity rule from the --capacities flag; None = uncapacitated.
fn rule_from(capacities: &str) -> Result<Option<CapacityRule>, Fail> {
    match capacities {
        "none" => Ok(None),
        "identical" => Ok(Some(CapacityRule::Identical)),
        path => Ok(Some(CapacityRule::FixedPool(
            load_pool(Path::new(path)).map_err(plain)?,
        ))),
    }
}

fn placement_report(
    alg: &str,
    inst: &NetworkInstance,
    map: &DelayMap,
    p: &Placement,
    met: Option<(f64, bool)>,
) -> Result<String, Fail> {
    let report = evaluate(inst, map, p).map_err(plain)?;
    let mut out = String::new();
    out.push_str(&format!("algorithm: {alg}\n"));
    if let Some((d, met)) = met {
        out.push_str(&format!("budget_ms: {d}\nmet: {met}\n"));
    }
    let locs: Vec<String> = p.locations.iter().map(|l| l.to_string()).collect();
    out.push_str(&format!("k: {}\nlocations: {}\n", p.locations.len(), locs.join(" ")));
    if let Some(caps) = &p.capacity_limits {
        let caps: Vec<String> = caps.iter().map(u64::to_string).collect();
        out.push_str(&format!("capacities_mhz: {}\n", caps.join(" ")));
    }
    out.push_str(&format!(
        "avg_delay_ms: {}\ntotal_delay_ms: {}\n",
        report.avg_delay_ms, report.total_delay_ms
    ));
    for load in &p.loads {
        out.push_str(&format!(
            "load: site {} serves {} requests, {} MHz\n",
            load.site, load.requests, load.demand_mhz
        ));
    }
    Ok(out)
}

fn ksolution_report(
    alg: &str,
    inst: &NetworkInstance,
    map: &DelayMap,
    sol: &KSolution,
    d: f64,
) -> Result<String, Fail> {
    placement_report(alg, inst, map, &sol.placement, Some((d, sol.met)))
}

fn write_file(path: &Path, content: &str) -> Result<(), Fail> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(plain)?;
        }
    }
    std::fs::write(path, content).map_err(plain)
}
