//! `vc`: exact minimum / parameterized vertex cover from the command line.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, ValueEnum};
use serde_json::{json, Map, Value};
use vc_core::ingest::{read_graph, Format};
use vc_core::{solve, DegreeWidth, Error, Mode, SolverConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Mvc,
    Pvc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Edgelist,
    Mtx,
}

#[derive(Debug, Parser)]
#[command(name = "vc", version, about = "Exact minimum and parameterized vertex cover")]
struct Args {
    /// Graph file: edge list or MatrixMarket coordinate.
    graph: PathBuf,

    #[arg(long, value_enum, default_value = "mvc")]
    mode: ModeArg,

    /// Cover size bound for --mode pvc.
    #[arg(short)]
    k: Option<u32>,

    /// Worker threads (default: available hardware parallelism).
    #[arg(long)]
    workers: Option<usize>,

    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,

    #[arg(long)]
    no_components: bool,

    #[arg(long)]
    no_root_reduce: bool,

    #[arg(long)]
    no_bounds: bool,

    #[arg(long)]
    no_crown: bool,

    /// Keep nodes on per-worker stacks instead of sharing them through the worklist.
    #[arg(long)]
    no_load_balance: bool,

    /// Single worker, reproducible statistics.
    #[arg(long)]
    deterministic: bool,

    /// Bits per degree entry.
    #[arg(long, value_parser = ["8", "16", "32"])]
    width: Option<String>,

    /// Include the cover vertices in the output.
    #[arg(long)]
    record_cover: bool,

    /// Include search statistics in the output.
    #[arg(long)]
    stats: bool,

    /// Give up after this many seconds and report the best cover found.
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(Error),
    Solver(Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Solver(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Input(e) => write!(f, "cannot load graph: {e}"),
            Failure::Solver(e) => write!(f, "solver error: {e}"),
        }
    }
}

fn config(args: &Args) -> Result<SolverConfig, Failure> {
    let mode = match (args.mode, args.k) {
        (ModeArg::Mvc, None) => Mode::Mvc,
        (ModeArg::Mvc, Some(_)) => return Err(Failure::Usage("-k only applies to --mode pvc".into())),
        (ModeArg::Pvc, Some(k)) => Mode::Pvc { k },
        (ModeArg::Pvc, None) => return Err(Failure::Usage("--mode pvc requires -k".into())),
    };
    let timeout = match args.timeout {
        None => None,
        Some(t) if t.is_finite() && t >= 0.0 => Some(Duration::from_secs_f64(t)),
        Some(t) => return Err(Failure::Usage(format!("invalid timeout {t}"))),
    };
    let mut cfg = SolverConfig {
        mode,
        components: !args.no_components,
        root_reduce: !args.no_root_reduce,
        bounds: !args.no_bounds,
        crown: !args.no_crown,
        load_balance: !args.no_load_balance,
        deterministic: args.deterministic,
        width: args.width.as_deref().map(|w| DegreeWidth::from_bits(w.parse().unwrap()).unwrap()),
        record_cover: args.record_cover,
        timeout,
        ..SolverConfig::default()
    };
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(Failure::Usage("--workers must be at least 1".into()));
        }
        cfg.workers = w;
    }
    Ok(cfg)
}

fn run(args: &Args) -> Result<Value, Failure> {
    let cfg = config(args)?;
    let format = match args.format {
        FormatArg::Auto => Format::Auto,
        FormatArg::Edgelist => Format::EdgeList,
        FormatArg::Mtx => Format::MatrixMarket,
    };
    let g = read_graph(&args.graph, format).map_err(Failure::Input)?;
    let result = solve(&g, &cfg).map_err(|e| if e.is_input_error() { Failure::Input(e) } else { Failure::Solver(e) })?;

    let mut doc = Map::new();
    doc.insert("mode".into(), json!(match cfg.mode { Mode::Mvc => "mvc", Mode::Pvc { .. } => "pvc" }));
    if let Mode::Pvc { k } = cfg.mode {
        doc.insert("k".into(), json!(k));
    }
    doc.insert("vertices".into(), json!(g.num_vertices()));
    doc.insert("edges".into(), json!(g.num_edges()));
    doc.insert("cover_size".into(), json!(result.cover_size));
    doc.insert("found".into(), json!(result.found));
    doc.insert("exact".into(), json!(result.exact));
    if let Some(cover) = &result.cover {
        doc.insert("cover".into(), json!(cover));
    }
    if args.stats {
        doc.insert("stats".into(), serde_json::to_value(&result.stats).expect("stats serialize"));
    }
    Ok(Value::Object(doc))
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&args) {
        Ok(doc) => {
            println!("{}", serde_json::to_string_pretty(&doc).expect("json output"));
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("vc: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
