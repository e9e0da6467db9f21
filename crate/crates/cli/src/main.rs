//! Command-line front end: tradeoff tables, optimality verification,
//! bit-exact scheme simulation, and index-coding graph export.
//!
//! Exit codes: 0 success, 1 verification/decoding failure, 2 usage or
//! precondition error. All output is deterministic for a fixed invocation.

mod report;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coded_caching::combinatorics::permutations_of;
use coded_caching::converse;
use coded_caching::index_coding::{build_graph, permutation_acyclic_set, UncodedSplit};
use coded_caching::schemes::{cut_set_bound, man_load, DemandVector, ProblemInstance};
use coded_caching::simulator::{
    coded_small_cache_scheme, decode_all, man_delivery, man_placement,
};
use coded_caching::{exact, Exact};

use report::{dec, rat};

/// Subfile payload size used by `simulate`; any positive value works, the
/// loads are normalized by file size.
const SIM_SUBFILE_BITS: usize = 8;

/// Cap on N^K when sweeping every demand vector.
const MAX_DEMAND_SWEEP: u64 = 100_000;

#[derive(Parser)]
#[command(
    name = "coded-caching",
    version,
    about = "Coded caching: achievable tradeoff curves, exact converse verification, and bit-level scheme simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate achievable load and converse bounds over a memory grid
    Tradeoff {
        /// Number of files N
        #[arg(long)]
        n: usize,
        /// Number of users K
        #[arg(long)]
        k: usize,
        /// Grid density g: memories j*N/(g*K) for j = 0..=g*K
        #[arg(long, default_value_t = 2)]
        grid: usize,
        /// Output file path
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Check achievable == converse for one N >= K; prints a JSON report
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Place, deliver, and decode a scheme bit for bit, reporting exact load
    Simulate {
        #[arg(long, value_enum)]
        scheme: Scheme,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Cache parameter t (required for man, M = tN/K)
        #[arg(long)]
        t: Option<usize>,
        /// Comma-separated demand vector, e.g. 1,2,3
        #[arg(long, value_delimiter = ',', conflicts_with = "all_demands")]
        demands: Option<Vec<usize>>,
        /// Sweep every one of the N^K demand vectors
        #[arg(long)]
        all_demands: bool,
        /// Seed for sampling a demand vector when none is given
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit a JSON report instead of text
        #[arg(long)]
        json: bool,
    },
    /// Export the index-coding side-information graph as text
    Graph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Comma-separated distinct demand vector
        #[arg(long, value_delimiter = ',', required = true)]
        demands: Vec<usize>,
        /// Use the t-subset split instead of the uniform 1/2^K split
        #[arg(long)]
        t: Option<usize>,
        /// Output file path
        #[arg(long)]
        out: PathBuf,
        /// Also list every permutation acyclic set with its bound value
        #[arg(long)]
        sets: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Man,
    CodedSmall,
}

enum Failure {
    /// Bad arguments or an unsatisfiable precondition: exit 2.
    Usage(String),
    /// The run completed but a check did not hold: exit 1.
    Verification(String),
}

impl From<coded_caching::Error> for Failure {
    fn from(e: coded_caching::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("io error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(format!("csv error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Tradeoff {
            n,
            k,
            grid,
            out,
            format,
        } => cmd_tradeoff(n, k, grid, &out, format),
        Command::Verify { n, k } => cmd_verify(n, k),
        Command::Simulate {
            scheme,
            n,
            k,
            t,
            demands,
            all_demands,
            seed,
            json,
        } => cmd_simulate(scheme, n, k, t, demands, all_demands, seed, json),
        Command::Graph {
            n,
            k,
            demands,
            t,
            out,
            sets,
        } => cmd_graph(n, k, demands, t, &out, sets),
    }
}

fn cmd_tradeoff(
    n: usize,
    k: usize,
    grid: usize,
    out: &PathBuf,
    format: Format,
) -> Result<(), Failure> {
    if n == 0 || k == 0 {
        return Err(Failure::Usage("N and K must be positive".into()));
    }
    if grid == 0 {
        return Err(Failure::Usage("--grid must be positive".into()));
    }
    let steps = grid * k;
    let with_converse = n >= k;
    let mut rows = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let m = exact((j * n) as i64, steps as i64);
        let man: Exact = man_load(n, k, &m);
        let cut: Exact = cut_set_bound(n, k, &m);
        let (lower, lp) = if with_converse {
            let lb = converse::lower_bound(n, k, &m)?;
            let lp = converse::lp_oracle(n, k, &m)?;
            (Some(lb), Some(lp))
        } else {
            (None, None)
        };
        rows.push(report::TradeoffRow {
            memory: rat(&m),
            man_load: rat(&man),
            cut_set: rat(&cut),
            lower_bound: lower.as_ref().map(rat),
            lp_oracle: lp.as_ref().map(rat),
            memory_dec: dec(&m),
            man_load_dec: dec(&man),
            cut_set_dec: dec(&cut),
            lower_bound_dec: lower.as_ref().map(dec),
            lp_oracle_dec: lp.as_ref().map(dec),
        });
    }
    let table = report::TradeoffReport { n, k, grid, rows };
    match format {
        Format::Csv => report::write_csv(out, &table)?,
        Format::Json => fs::write(out, report::to_pretty_json(&table))?,
    }
    println!("wrote {} rows to {}", table.rows.len(), out.display());
    Ok(())
}

fn cmd_verify(n: usize, k: usize) -> Result<(), Failure> {
    let rep = converse::verify_uncoded_optimality::<Exact>(n, k)?;
    print!("{}", report::to_pretty_json(&report::verify_report(&rep)));
    if rep.passed() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "verification failed for N={n} K={k}"
        )))
    }
}

fn demand_sweep(n: usize, k: usize) -> Result<Vec<DemandVector>, Failure> {
    let count = (n as u64)
        .checked_pow(k as u32)
        .filter(|&c| c <= MAX_DEMAND_SWEEP)
        .ok_or_else(|| {
            Failure::Usage(format!(
                "demand sweep too large: N^K exceeds {MAX_DEMAND_SWEEP}"
            ))
        })?;
    let all = DemandVector::all_vectors(n, k);
    debug_assert_eq!(all.len() as u64, count);
    Ok(all)
}

fn sample_demand(n: usize, k: usize, seed: u64) -> Result<DemandVector, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..k).map(|_| rng.gen_range(1..=n)).collect();
    Ok(DemandVector::new(entries, n)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    scheme: Scheme,
    n: usize,
    k: usize,
    t: Option<usize>,
    demands: Option<Vec<usize>>,
    all_demands: bool,
    seed: u64,
    json: bool,
) -> Result<(), Failure> {
    let demand_list = if all_demands {
        demand_sweep(n, k)?
    } else if let Some(d) = demands {
        vec![DemandVector::new(d, n)?]
    } else {
        vec![sample_demand(n, k, seed)?]
    };

    let (scheme_name, t_used, memory) = match scheme {
        Scheme::Man => {
            let t = t.ok_or_else(|| {
                Failure::Usage("--t is required for --scheme man".into())
            })?;
            ("man", Some(t), exact((t * n) as i64, k as i64))
        }
        Scheme::CodedSmall => {
            if t.is_some() {
                return Err(Failure::Usage(
                    "--t applies only to --scheme man".into(),
                ));
            }
            ("coded-small", None, exact(1, k as i64))
        }
    };
    let inst = ProblemInstance::new(n, k, memory.clone(), SIM_SUBFILE_BITS)?;

    let man_p = match scheme {
        Scheme::Man => Some(man_placement(&inst, t_used.unwrap())?),
        Scheme::CodedSmall => None,
    };

    let mut runs = Vec::with_capacity(demand_list.len());
    for d in &demand_list {
        let (load, transmissions, decode) = match scheme {
            Scheme::Man => {
                let p = man_p.as_ref().unwrap();
                let s = man_delivery(p, d)?;
                (s.load(), s.transmissions(), decode_all(p, d, &s))
            }
            Scheme::CodedSmall => {
                let (p, s) = coded_small_cache_scheme(&inst, d)?;
                (s.load(), s.transmissions(), decode_all(&p, d, &s))
            }
        };
        runs.push(report::SimRun {
            demands: d.entries().to_vec(),
            transmissions,
            load: rat(&load),
            load_dec: dec(&load),
            all_ok: decode.all_ok(),
            users: decode
                .users
                .iter()
                .map(|u| report::SimUser {
                    user: u.user,
                    ok: u.ok,
                    missing: u.missing.iter().map(|id| id.to_string()).collect(),
                })
                .collect(),
        });
    }
    let all_ok = runs.iter().all(|r| r.all_ok);
    let sim = report::SimReport {
        scheme: scheme_name.to_string(),
        n,
        k,
        t: t_used,
        memory: rat(&memory),
        runs,
        all_ok,
    };

    if json {
        print!("{}", report::to_pretty_json(&sim));
    } else {
        print_sim_text(&sim);
    }
    if all_ok {
        Ok(())
    } else {
        let failed = sim.runs.iter().filter(|r| !r.all_ok).count();
        Err(Failure::Verification(format!(
            "decoding failed in {failed} of {} runs",
            sim.runs.len()
        )))
    }
}

fn print_sim_text(sim: &report::SimReport) {
    match sim.t {
        Some(t) => println!(
            "scheme {} N={} K={} t={} M={}",
            sim.scheme, sim.n, sim.k, t, sim.memory
        ),
        None => println!("scheme {} N={} K={} M={}", sim.scheme, sim.n, sim.k, sim.memory),
    }
    for run in &sim.runs {
        let d = run
            .demands
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",");
        let verdict = if run.all_ok { "ok" } else { "FAILED" };
        println!(
            "demands {d}: transmissions {} load {} ({:.6}) decode {verdict}",
            run.transmissions, run.load, run.load_dec
        );
        for u in run.users.iter().filter(|u| !u.ok) {
            println!("  user {} missing {}", u.user, u.missing.join(" "));
        }
    }
    let ok = sim.runs.iter().filter(|r| r.all_ok).count();
    println!("decoded {ok} of {} runs", sim.runs.len());
}

fn cmd_graph(
    n: usize,
    k: usize,
    demands: Vec<usize>,
    t: Option<usize>,
    out: &PathBuf,
    sets: bool,
) -> Result<(), Failure> {
    let d = DemandVector::new(demands, n)?;
    if d.k() != k {
        return Err(Failure::Usage(format!(
            "--demands must list exactly K = {k} entries"
        )));
    }
    let (split, split_label) = match t {
        Some(t) => {
            if t > k {
                return Err(Failure::Usage(format!(
                    "--t must be at most K = {k}"
                )));
            }
            (UncodedSplit::<Exact>::man(n, k, t), format!("man-t{t}"))
        }
        None => (UncodedSplit::<Exact>::uniform(n, k), "uniform".to_string()),
    };
    let g = build_graph(&split, &d)?;

    let mut text = format!(
        "graph N={n} K={k} d=({}) split={split_label}\n",
        d.entries()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    );
    text.push_str(&g.export_text());
    if sets {
        let us = permutations_of(k)?;
        writeln!(text, "sets {}", us.len()).unwrap();
        for (i, u) in us.iter().enumerate() {
            let set = permutation_acyclic_set(u);
            let idxs = set.node_indices(&g)?;
            let bound = set.bound_value(&g)?;
            writeln!(
                text,
                "set {i} u=({}) size={} bound={} nodes={}",
                u.entries()
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
                idxs.len(),
                bound,
                idxs.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )
            .unwrap();
        }
    }
    fs::write(out, text)?;
    println!(
        "wrote graph with {} nodes and {} edges to {}",
        g.node_count(),
        g.edge_count(),
        out.display()
    );
    Ok(())
}
