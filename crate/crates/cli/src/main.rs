use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rsft::graph::{n_block_graph, Graph, DEFAULT_PATH_CAP};
use rsft::harness::{self, fmt_float, ExperimentConfig, Metric, XAxis};
use rsft::invariants::{self, Caps};
use rsft::limits::{emptiness_bounds, i_infinity_pmf, limit_entropy, zeta_inverse};
use rsft::random::exact_enumerate;
use rsft::spectral::perron_data;
use rsft::{exec, Error};

/// Random shifts of finite type: invariants, limit laws and Monte Carlo sweeps.
#[derive(Parser)]
#[command(name = "rsft", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural invariants and Perron data of a graph.
    Analyze(AnalyzeArgs),
    /// Analytic limit values at one alpha.
    Limits(LimitsArgs),
    /// Run a Monte Carlo sweep described by a JSON config.
    Simulate(SimulateArgs),
    /// Exact distribution of the random subshift by enumerating every edge mask.
    Oracle(OracleArgs),
    /// Turn a results CSV into long-format plot data.
    PlotData(PlotArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// golden, full:A, cycle:L, or a JSON graph file.
    graph: String,
    /// Replace the graph by its N-block graph.
    #[arg(long, value_name = "N")]
    n_block: Option<usize>,
}

impl GraphArgs {
    fn load(&self) -> rsft::Result<Graph> {
        let g = Graph::from_spec(&self.graph)?;
        match self.n_block {
            Some(n) if n >= 1 => n_block_graph(&g, n, DEFAULT_PATH_CAP),
            Some(_) => Err(Error::Config("--n-block must be at least 1".into())),
            None => Ok(g),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Analyze the whole sequence of block graphs 1..=N and report condition trends.
    #[arg(long)]
    sequence: bool,
    #[arg(long, default_value_t = invariants::DEFAULT_Z_CAP)]
    z_cap: u64,
    #[arg(long, default_value_t = invariants::DEFAULT_U_CAP)]
    u_cap: u64,
    #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
    orbit_walk_cap: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct LimitsArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 12)]
    k_max: usize,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    config: PathBuf,
    /// Worker threads; 1 runs serially.
    #[arg(long)]
    threads: Option<usize>,
    /// Override the master seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Write here instead of the config's output path (or stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Omit the timestamp comment line.
    #[arg(long)]
    no_timestamp: bool,
    /// Compare every estimate with the exact oracle columns; exit 3 on disagreement.
    #[arg(long)]
    self_check: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    alpha: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Empty,
    Entropy,
    Components,
    Unique,
}

#[derive(Clone, Copy, ValueEnum)]
enum XArg {
    N,
    Alpha,
}

#[derive(Args)]
struct PlotArgs {
    results: PathBuf,
    #[arg(long, value_enum)]
    metric: MetricArg,
    #[arg(long, value_enum, default_value = "n")]
    x: XArg,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Failure classes, mapped to exit codes.
enum Failure {
    Lib(Error),
    SelfCheck(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Error::Config(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let caps = Caps {
        z: args.z_cap,
        u: args.u_cap,
        orbit_walks: args.orbit_walk_cap,
        ..Caps::default()
    };
    let mut out = output(None)?;
    if args.sequence {
        let last = args.graph.n_block.unwrap_or(1).max(1);
        let base = Graph::from_spec(&args.graph.graph)?;
        let gs = (1..=last)
            .map(|n| n_block_graph(&base, n, DEFAULT_PATH_CAP))
            .collect::<rsft::Result<Vec<_>>>()?;
        let report = invariants::condition_report(&gs, &caps)?;
        match args.format {
            Format::Csv => {
                invariants::write_report_csv(&report.rows, 1, &mut out)?;
                eprintln!("{}", serde_json::to_string_pretty(&report.flags).map_err(Error::Json)?);
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &report).map_err(Error::Json)?;
                writeln!(out)?;
            }
        }
    } else {
        let g = args.graph.load()?;
        let report = invariants::analyze(&g, &caps)?;
        match args.format {
            Format::Csv => invariants::write_report_csv(
                std::slice::from_ref(&report),
                args.graph.n_block.unwrap_or(1),
                &mut out,
            )?,
            Format::Json => {
                let data = perron_data(&g)?;
                let spectrum = data
                    .nonzero_spectrum()
                    .ok()
                    .map(|s| s.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>());
                let value = json!({
                    "invariants": report,
                    "spectral": {
                        "lambda": data.lambda,
                        "left": data.left,
                        "right": data.right,
                        "char_poly": data.char_poly.as_ref()
                            .map(|c| c.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
                        "nonzero_spectrum": spectrum,
                    },
                });
                serde_json::to_writer_pretty(&mut out, &value).map_err(Error::Json)?;
                writeln!(out)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn limits(args: &LimitsArgs) -> Result<(), Failure> {
    if !(0.0..=1.0).contains(&args.alpha) {
        return Err(Error::InvalidAlpha(args.alpha).into());
    }
    let g = args.graph.load()?;
    let lambda = rsft::spectral::spectral_radius(&g)?;
    let zeta = zeta_inverse(&g, args.alpha)?;
    let bounds = emptiness_bounds(&g, args.alpha)?;
    let subcritical = lambda == 0.0 || args.alpha * lambda < 1.0;
    let pmf = if subcritical {
        Some(i_infinity_pmf(&g, args.alpha, args.k_max, args.eps)?)
    } else {
        None
    };
    let entropy = limit_entropy(args.alpha, &g).ok();

    let mut out = output(None)?;
    if args.json {
        let value = json!({
            "alpha": args.alpha,
            "lambda": lambda,
            "zeta_inverse": zeta,
            "alpha_lambda": args.alpha * lambda,
            "emptiness": bounds,
            "i_inf_pmf": pmf,
            "limit_entropy": entropy,
        });
        serde_json::to_writer_pretty(&mut out, &value).map_err(Error::Json)?;
        writeln!(out)?;
    } else {
        writeln!(out, "lambda={}", fmt_float(lambda))?;
        writeln!(out, "zeta_inverse={}", fmt_float(zeta))?;
        writeln!(out, "alpha_lambda={}", fmt_float(args.alpha * lambda))?;
        writeln!(out, "z={}", bounds.z)?;
        writeln!(out, "empty_lower={}", fmt_float(bounds.lower))?;
        writeln!(out, "empty_upper={}", fmt_float(bounds.upper))?;
        if let Some(p) = &pmf {
            let head: Vec<String> = p
                .probs
                .iter()
                .enumerate()
                .map(|(k, x)| format!("{k}:{}", fmt_float(*x)))
                .collect();
            writeln!(out, "i_inf_pmf={}", head.join(";"))?;
            writeln!(out, "i_inf_bound={}", fmt_float(p.bound))?;
        }
        if let Some(e) = entropy {
            writeln!(out, "beta_limit={}", fmt_float(e.beta))?;
            writeln!(out, "entropy_limit={}", fmt_float(e.entropy))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<bool, Failure> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let threads = args.threads.unwrap_or(0);
    if args.threads == Some(0) {
        return Err(Error::Config("--threads must be at least 1".into()).into());
    }
    let rows = if threads == 0 {
        harness::run_experiment(&cfg, rsft::Execution::Parallel)?
    } else {
        exec::with_threads(threads, |e| harness::run_experiment(&cfg, e))?
    };
    let timestamp = (!args.no_timestamp).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let path = args.output.clone().or_else(|| cfg.output.clone());
    let mut out = output(path.as_ref())?;
    harness::write_results_csv(&rows, timestamp, &mut out)?;
    out.flush()?;

    for r in rows.iter().filter(|r| r.failed()) {
        log::error!("cell n={} alpha={} failed: {}", r.n, r.alpha, r.errors.join("; "));
    }
    if args.self_check {
        let failures = harness::self_check(&rows);
        let checked = rows.iter().filter(|r| r.oracle.is_some()).count();
        if !failures.is_empty() {
            return Err(Failure::SelfCheck(failures));
        }
        eprintln!("self-check passed on {checked} rows with oracle columns");
    }
    Ok(rows.iter().any(|r| r.cap_violation))
}

fn oracle(args: &OracleArgs) -> Result<(), Failure> {
    let g = args.graph.load()?;
    let d = exact_enumerate(&g, args.alpha)?;
    let mut out = output(None)?;
    let value = json!({
        "alpha": d.alpha,
        "edges": d.edge_count,
        "p_empty": d.p_empty,
        "p_zero_entropy": d.p_zero_entropy,
        "mean_components": d.mean_components(),
        "component_pmf": d.component_pmf,
        "beta_pmf": d.beta_pmf.iter()
            .map(|(b, p)| json!({"beta": *b as f64 * rsft::random::BETA_BUCKET, "p": p}))
            .collect::<Vec<_>>(),
        "p_unique": d.p_unique,
    });
    serde_json::to_writer_pretty(&mut out, &value).map_err(Error::Json)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn plot(args: &PlotArgs) -> Result<(), Failure> {
    let input = File::open(&args.results)
        .map_err(|e| Error::Config(format!("cannot open {}: {e}", args.results.display())))?;
    let metric = match args.metric {
        MetricArg::Empty => Metric::Empty,
        MetricArg::Entropy => Metric::Entropy,
        MetricArg::Components => Metric::Components,
        MetricArg::Unique => Metric::Unique,
    };
    let x = match args.x {
        XArg::N => XAxis::N,
        XArg::Alpha => XAxis::Alpha,
    };
    let mut out = output(args.output.as_ref())?;
    harness::plot_data(input, metric, x, &mut out)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a).map(|_| false),
        Command::Limits(a) => limits(a).map(|_| false),
        Command::Simulate(a) => simulate(a),
        Command::Oracle(a) => oracle(a).map(|_| false),
        Command::PlotData(a) => plot(a).map(|_| false),
    };
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_cap_violation() { 2 } else { 1 })
        }
        Err(Failure::SelfCheck(failures)) => {
            for f in &failures {
                eprintln!("self-check: {f}");
            }
            ExitCode::from(3)
        }
    }
}
