//! Command-line front end: generators, runners, oracle, reports.
//!
//! Every command is deterministic given its full flag set (seed included),
//! regardless of thread count. JSON objects serialize with sorted keys; the
//! `report` command is the stable CSV surface across runners.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};

use matchstream::generators::{gen, Family, GeneratorSpec};
use matchstream::layered::{build_layered, enumerate_good_pairs, random_bipartition};
use matchstream::multipass::{solve, MultipassConfig};
use matchstream::oracle::{exact_mwm, OracleBudget};
use matchstream::random_arrival::{rand_arr_matching, RandArrParams};
use matchstream::report::report_files;
use matchstream::rounding::parse_ratio;
use matchstream::stream::{MemoryMeter, MeterMode, StreamSession};
use matchstream::testkit::mcm_blossom;
use matchstream::unweighted::{random_arrival_unweighted, UnweightedBranch};
use matchstream::wgt_aug_paths::WapParams;
use matchstream::{Error, Matching, Result, WeightedGraph};

#[derive(Parser)]
#[command(
    name = "matchstream",
    version,
    about = "Semi-streaming weighted matching: generators, runners, oracles, reports"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph file from a seeded family.
    Gen(GenArgs),
    /// Exact maximum weight matching of a graph file.
    Oracle(OracleArgs),
    /// Single-pass random-arrival maximum cardinality run.
    RunUnweighted(RunUnweightedArgs),
    /// Single-pass random-arrival weighted run.
    RunRandomArrival(RunRandomArrivalArgs),
    /// Multi-pass layered-graph improvement run.
    RunMultipass(RunMultipassArgs),
    /// Dump one layered graph with its origin-map sidecar.
    LayeredDump(LayeredDumpArgs),
    /// Merge runner JSON files into a CSV table.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// One of: erdos_renyi, tight_half, cycle_family, weight_classes.
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: u32,
    /// Edge count; only erdos_renyi and weight_classes consume it.
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 8)]
    weight_max: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = OracleBudget::default().max_vertices)]
    max_vertices: usize,
    #[arg(long, default_value_t = OracleBudget::default().max_edges)]
    max_edges: usize,
}

/// Memory-meter flags shared by the streaming runners. The default budget is
/// c·n·(log₂ n)^k edges; strict mode turns violations into errors.
#[derive(Args)]
struct MemFlags {
    #[arg(long, default_value_t = 8.0)]
    mem_c: f64,
    #[arg(long, default_value_t = 2)]
    mem_logk: u32,
    #[arg(long)]
    strict_memory: bool,
}

impl MemFlags {
    fn meter(&self, n: u32) -> MemoryMeter {
        let mode = if self.strict_memory {
            MeterMode::Strict
        } else {
            MeterMode::Lenient
        };
        MemoryMeter::new(n, self.mem_c, self.mem_logk, mode)
    }
}

#[derive(Args)]
struct RunUnweightedArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of the stream consumed by the greedy prefix.
    #[arg(long)]
    p: f64,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    mem: MemFlags,
}

#[derive(Args)]
struct RunRandomArrivalArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Phase-1 fraction; defaults to 100/log₂ n clamped into [1/m, ½].
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = WapParams::default().alpha)]
    alpha: f64,
    #[arg(long, default_value_t = WapParams::default().beta)]
    beta: f64,
    /// Also compute the exact optimum and report the ratio.
    #[arg(long)]
    with_oracle: bool,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    mem: MemFlags,
}

#[derive(Args)]
struct RunMultipassArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    eps: f64,
    /// Granularity as an exact rational ("1/8", "0.125"); overrides the mode default.
    #[arg(long)]
    g: Option<String>,
    /// Maximum boundary-sequence length; overrides the mode default.
    #[arg(long = "kmax")]
    k_max: Option<usize>,
    /// Improvement rounds; overrides the mode default.
    #[arg(long)]
    iters: Option<usize>,
    /// Theory constants g = ε¹² and the full length bound (needs eps < 1/16).
    #[arg(long)]
    paper_faithful: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    with_oracle: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct LayeredDumpArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Matching file: one "u v" pair per line, each an edge of the graph.
    #[arg(long)]
    matching: PathBuf,
    /// Index into the enumerated good pairs (lexicographic order).
    #[arg(long)]
    pair_index: usize,
    /// Weight scale W as an exact rational.
    #[arg(long = "W")]
    w: String,
    #[arg(long, default_value_t = 0.4)]
    eps: f64,
    #[arg(long, default_value = "1/8")]
    g: String,
    #[arg(long = "kmax", default_value_t = 9)]
    k_max: usize,
    /// Bipartition seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumeration guard on the good-pair count.
    #[arg(long, default_value_t = 100_000)]
    cap: usize,
}

#[derive(Args)]
struct ReportArgs {
    /// Runner JSON files, one row each.
    files: Vec<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads().and_then(|()| run(cli)) {
        eprintln!("error: {e}");
        let code = u8::try_from(e.exit_code()).unwrap_or(1);
        return ExitCode::from(code);
    }
    ExitCode::SUCCESS
}

fn configure_threads() -> Result<()> {
    if let Ok(s) = std::env::var("MATCHSTREAM_THREADS") {
        let k: usize = s
            .parse()
            .map_err(|_| Error::Param(format!("MATCHSTREAM_THREADS must be a count, got {s:?}")))?;
        if k == 0 {
            return Err(Error::Param("MATCHSTREAM_THREADS must be positive".into()));
        }
        // Ignore the error from a pool that is already initialized.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Oracle(a) => cmd_oracle(a),
        Cmd::RunUnweighted(a) => cmd_run_unweighted(a),
        Cmd::RunRandomArrival(a) => cmd_run_random_arrival(a),
        Cmd::RunMultipass(a) => cmd_run_multipass(a),
        Cmd::LayeredDump(a) => cmd_layered_dump(a),
        Cmd::Report(a) => cmd_report(a),
    }
}

fn load_graph(path: &PathBuf) -> Result<WeightedGraph> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    WeightedGraph::parse(&text)
}

fn emit(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

/// Print a JSON object either raw or as sorted key=value lines.
fn emit_record(v: &Value, json: bool) {
    if json {
        println!("{v}");
        return;
    }
    let obj = v.as_object().expect("records are objects");
    for (k, val) in obj {
        match val {
            Value::String(s) => println!("{k}={s}"),
            other => println!("{k}={other}"),
        }
    }
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let spec = GeneratorSpec {
        family: a.family,
        n: a.n,
        m: a.m,
        weight_max: a.weight_max,
        seed: a.seed,
    };
    let g = gen(&spec)?;
    emit(&a.out, &g.serialize())
}

fn cmd_oracle(a: OracleArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let budget = OracleBudget {
        max_vertices: a.max_vertices,
        max_edges: a.max_edges,
    };
    let m = exact_mwm(&g, &budget)?;
    println!("weight={}", m.weight());
    for e in m.edges() {
        println!("{} {} {}", e.u, e.v, e.w);
    }
    Ok(())
}

fn cmd_run_unweighted(a: RunUnweightedArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let (n, m_edges) = (g.n(), g.m());
    let opt_size = mcm_blossom(&g).len();
    let session = StreamSession::new(g, a.seed);
    let mut meter = a.mem.meter(n);
    let out = random_arrival_unweighted(&session, a.p, &mut meter)?;
    let size = out.matching.len();
    let ratio = if opt_size == 0 {
        1.0
    } else {
        size as f64 / opt_size as f64
    };
    let branch = match out.branch {
        UnweightedBranch::FreePairs => "free_pairs",
        UnweightedBranch::Greedy => "greedy",
        UnweightedBranch::ThreeAug => "three_aug",
    };
    let rec = json!({
        "schema": 1,
        "algorithm": "unweighted",
        "seed": a.seed,
        "n": n,
        "m": m_edges,
        "size": size,
        "opt_size": opt_size,
        "ratio": ratio,
        "weight": size,
        "opt": opt_size,
        "passes": 1,
        "peak_edges": meter.peak(),
        "branch": branch,
    });
    emit_record(&rec, a.json);
    Ok(())
}

fn cmd_run_random_arrival(a: RunRandomArrivalArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let (n, m_edges) = (g.n(), g.m());
    let session = StreamSession::new(g, a.seed);
    let mut meter = a.mem.meter(n);
    let params = RandArrParams {
        p: a.p,
        wap: WapParams::new(a.alpha, a.beta)?,
        budget: OracleBudget::default(),
        compute_opt: a.with_oracle,
    };
    let (_, report) = rand_arr_matching(&session, &params, &mut meter)?;
    let rec = json!({
        "schema": 1,
        "algorithm": "random_arrival",
        "seed": a.seed,
        "n": n,
        "m": m_edges,
        "weight": report.weight,
        "opt_weight": report.opt_weight,
        "opt": report.opt_weight,
        "ratio": report.ratio,
        "peak_edges": report.peak_edges,
        "branch_chosen": format!("{:?}", report.branch_chosen),
        "p_used": report.p_used,
        "t_exact": report.t_exact,
        "passes": 1,
    });
    emit_record(&rec, a.json);
    Ok(())
}

fn cmd_run_multipass(a: RunMultipassArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let mut cfg = if a.paper_faithful {
        MultipassConfig::paper_faithful(a.eps)?
    } else {
        MultipassConfig::relaxed(a.eps)?
    };
    if let Some(s) = &a.g {
        cfg.g = parse_ratio(s)?;
    }
    if let Some(k) = a.k_max {
        cfg.k_max = k;
    }
    if let Some(it) = a.iters {
        cfg.iters = it;
    }
    cfg.seed = a.seed;
    cfg.validate()?;
    let outcome = solve(&g, &cfg)?;
    let weight = outcome.matching.weight();
    let opt_weight = if a.with_oracle {
        Some(exact_mwm(&g, &OracleBudget::default())?.weight())
    } else {
        None
    };
    let ratio = opt_weight.map(|o| {
        if o == 0 {
            1.0
        } else {
            weight as f64 / o as f64
        }
    });
    let rec = json!({
        "schema": 1,
        "algorithm": "multipass",
        "seed": a.seed,
        "n": g.n(),
        "m": g.m(),
        "final_weight": weight,
        "weight": weight,
        "opt_weight": opt_weight,
        "opt": opt_weight,
        "ratio": ratio,
        "iterations_run": outcome.iterations_run,
        "per_iteration_gains": outcome.per_iteration_gains,
        "passes": outcome.passes,
        "peak_edges": outcome.peak_edges,
    });
    emit_record(&rec, a.json);
    Ok(())
}

fn load_matching(path: &PathBuf, g: &WeightedGraph) -> Result<Matching> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    let bad = |line: usize, msg: String| Error::Input {
        path: path.display().to_string(),
        msg: format!("line {}: {msg}", line + 1),
    };
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (u, v) = match (it.next(), it.next(), it.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => return Err(bad(i, "expected exactly \"u v\"".into())),
        };
        let u: u32 = u.parse().map_err(|_| bad(i, format!("bad vertex {u:?}")))?;
        let v: u32 = v.parse().map_err(|_| bad(i, format!("bad vertex {v:?}")))?;
        let e = g
            .find_edge(u, v)
            .ok_or_else(|| bad(i, format!("({u}, {v}) is not a graph edge")))?;
        edges.push(e);
    }
    Matching::from_edges(g.n(), edges)
}

fn cmd_layered_dump(a: LayeredDumpArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let m = load_matching(&a.matching, &g)?;
    let gran = parse_ratio(&a.g)?;
    let w = parse_ratio(&a.w)?;
    let eps_rat = BigRational::from_float(a.eps)
        .filter(|_| a.eps > 0.0 && a.eps < 1.0)
        .ok_or_else(|| Error::Param(format!("eps must be in (0, 1), got {}", a.eps)))?;
    let sum_b_max = BigRational::one() + (&eps_rat).pow(4i32);
    let pairs = enumerate_good_pairs(a.eps, &gran, a.k_max, &sum_b_max, a.cap)?;
    let pair = pairs.get(a.pair_index).ok_or_else(|| {
        Error::Param(format!(
            "pair index {} out of range; {} good pairs exist",
            a.pair_index,
            pairs.len()
        ))
    })?;
    let p = random_bipartition(&g, &m, a.seed);
    let lg = build_layered(&p, pair, &w, &m);

    // Graph-format view: copies get dense ids in sorted (vertex, layer)
    // order; X edges print before Y edges, weights are origin weights.
    let ids = lg.vertex_ids();
    let all: Vec<_> = lg.x.iter().chain(lg.y.iter()).collect();
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", ids.len(), all.len()));
    for e in &all {
        out.push_str(&format!("{} {} {}\n", ids[&e.from], ids[&e.to], e.origin.w));
    }
    // Origin-map sidecar: one line per printed edge.
    for (i, e) in all.iter().enumerate() {
        out.push_str(&format!(
            "{} {} {} {}\n",
            i, e.origin.u, e.origin.v, e.from.1
        ));
    }
    print!("{out}");
    Ok(())
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let csv = report_files(&a.files)?;
    emit(&a.out, &csv)
}
