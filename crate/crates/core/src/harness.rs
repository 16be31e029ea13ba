//! Declarative Monte Carlo sweeps over `(n, alpha)` cells, with analytic
//! and exact reference columns, CSV output and a tidy plot-data export.
//!
//! Every trial is seeded from `(master seed, cell, trial index)` alone and
//! trial summaries are reduced in index order, so the output does not depend
//! on thread count or scheduling.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed_init, Execution};
use crate::graph::{essential_vertices, n_block_graph, period, Graph, DEFAULT_PATH_CAP};
use crate::invariants::{compute_z, DEFAULT_Z_CAP};
use crate::limits::{
    i_infinity_pmf, orbit_counts, zeta_inverse, EmptinessBounds, OrbitCensus,
    LARGE_GRAPH_VERIFIED_PERIODS,
};
use crate::random::{
    exact_enumerate_many, mix, sample_omega, ExactDistribution, RealizationSummary, Realizer,
    ORACLE_MAX_EDGES,
};
use crate::spectral::{spectral_radius, CHARPOLY_MAX_VERTICES};

/// Tolerances of the entropy-concentration event `|beta - alpha lambda| < eps`.
pub const BETA_EPS: [f64; 3] = [0.05, 0.1, 0.2];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    /// Exact columns whenever `|E| <= caps.oracle_edges`.
    #[default]
    Auto,
    /// Exact columns for every cell; cells above the oracle limit fail.
    Force,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessCaps {
    /// Largest edge count of a constructed block graph.
    pub block_edges: u64,
    /// Largest edge count for the exact oracle in auto mode.
    pub oracle_edges: usize,
    pub z: u64,
    /// Closed walks enumerated per period while computing z.
    pub orbit_walks: u64,
    /// Largest period with exact orbit counts for the emptiness lower bound.
    pub census_periods: usize,
    pub pmf_k_max: usize,
    pub pmf_eps: f64,
}

impl Default for HarnessCaps {
    fn default() -> Self {
        HarnessCaps {
            block_edges: DEFAULT_PATH_CAP,
            oracle_edges: ORACLE_MAX_EDGES,
            z: DEFAULT_Z_CAP,
            orbit_walks: DEFAULT_PATH_CAP,
            census_periods: 1 << 14,
            pmf_k_max: 8,
            pmf_eps: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Built-in name (`golden`, `full:A`, `cycle:L`) or path to a graph JSON file.
    pub graph: String,
    pub n_min: usize,
    pub n_max: usize,
    pub alphas: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub oracle: OracleMode,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub caps: HarnessCaps,
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            Error::Config(format!("cannot read {}: {e}", path.as_ref().display()))
        })?;
        ExperimentConfig::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_min == 0 || self.n_min > self.n_max {
            return bad(format!("need 1 <= n_min <= n_max, got {}..{}", self.n_min, self.n_max));
        }
        if self.alphas.is_empty() {
            return bad("alphas must not be empty".into());
        }
        if let Some(a) = self.alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return bad(format!("alpha {a} is outside [0, 1]"));
        }
        if !(self.caps.pmf_eps > 0.0) {
            return bad("caps.pmf_eps must be positive".into());
        }
        Ok(())
    }
}

/// Stable identifier of an `(n, alpha)` cell: FNV-1a of `"{n}:{alpha}"`.
pub fn cell_id(n: usize, alpha: f64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in format!("{n}:{alpha}").bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn cell_seed(master: u64, n: usize, alpha: f64) -> u64 {
    mix(master, cell_id(n, alpha))
}

/// Exact reference values attached to a row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleColumns {
    pub p_empty: f64,
    pub p_zero_entropy: f64,
    pub mean_components: f64,
    pub var_components: f64,
    pub p_unique: f64,
}

impl From<&ExactDistribution> for OracleColumns {
    fn from(d: &ExactDistribution) -> Self {
        OracleColumns {
            p_empty: d.p_empty,
            p_zero_entropy: d.p_zero_entropy,
            mean_components: d.mean_components(),
            var_components: d.var_components(),
            p_unique: d.p_unique,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub n: usize,
    pub vertices: usize,
    pub edges: usize,
    pub alpha: f64,
    pub trials: u64,
    pub p_empty: f64,
    pub p_empty_se: f64,
    pub p_zero_entropy: f64,
    pub p_zero_entropy_se: f64,
    pub mean_components: f64,
    /// `(k, count)` pairs, ascending in `k`.
    pub components_hist: Vec<(usize, u64)>,
    pub mean_beta: f64,
    pub median_beta: f64,
    /// Fractions of trials with `|beta - alpha lambda| < eps` for [`BETA_EPS`].
    pub p_beta_near: [f64; 3],
    pub p_unique: f64,
    pub p_unique_se: f64,
    pub zeta_inverse: Option<f64>,
    pub empty_lower: Option<f64>,
    pub empty_upper: Option<f64>,
    pub i_inf_pmf: Option<Vec<f64>>,
    pub alpha_lambda: f64,
    pub oracle: Option<OracleColumns>,
    /// Messages of the steps that failed in this cell.
    pub errors: Vec<String>,
    /// True when a failure was caused by a size or enumeration cap.
    #[serde(skip)]
    pub cap_violation: bool,
}

impl ResultRow {
    pub fn failed(&self) -> bool {
        !self.errors.is_empty()
    }
}

pub fn stderr(p: f64, trials: u64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// The limiting PMF, or the failure message and whether a cap caused it.
type PmfOutcome = std::result::Result<Vec<f64>, (String, bool)>;

/// Values of the base graph shared by every cell: block graphs have the
/// same traces, zeta function and Perron root as the graph they come from.
struct BaseAnalysis {
    lambda: f64,
    per: Option<usize>,
    census: OrbitCensus,
    tail_constant: f64,
    /// Per alpha: `1/zeta(alpha)` and the limiting component-count PMF.
    per_alpha: Vec<(f64, Option<PmfOutcome>)>,
}

fn base_analysis(
    g1: &Graph,
    alphas: &[f64],
    caps: &HarnessCaps,
    largest_edges: usize,
) -> Result<BaseAnalysis> {
    let lambda = spectral_radius(g1)?;
    let horizon = if g1.vertex_count() <= CHARPOLY_MAX_VERTICES {
        largest_edges.clamp(1, caps.census_periods)
    } else {
        largest_edges.clamp(1, LARGE_GRAPH_VERIFIED_PERIODS)
    };
    let mut per_alpha = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let zeta = zeta_inverse(g1, alpha)?;
        let pmf = (lambda == 0.0 || alpha * lambda < 1.0).then(|| {
            i_infinity_pmf(g1, alpha, caps.pmf_k_max, caps.pmf_eps)
                .map(|p| p.probs)
                .map_err(|e| (e.to_string(), e.is_cap_violation()))
        });
        per_alpha.push((zeta, pmf));
    }
    Ok(BaseAnalysis {
        lambda,
        per: period(g1),
        census: orbit_counts(g1, horizon),
        tail_constant: essential_vertices(g1).len() as f64,
        per_alpha,
    })
}

fn fold_summaries(row: &mut ResultRow, summaries: &[RealizationSummary], per: Option<usize>) {
    let t = summaries.len() as f64;
    let mut empty = 0u64;
    let mut zero = 0u64;
    let mut unique = 0u64;
    let mut components = 0u64;
    let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
    let mut beta_sum = 0.0;
    let mut near = [0u64; 3];
    let mut betas = Vec::with_capacity(summaries.len());
    for s in summaries {
        empty += u64::from(s.is_empty);
        zero += u64::from(s.zero_entropy);
        unique += u64::from(s.unique_positive_entropy && s.positive_component_period == per);
        components += s.component_count as u64;
        *hist.entry(s.component_count).or_default() += 1;
        beta_sum += s.beta;
        for (count, eps) in near.iter_mut().zip(BETA_EPS) {
            *count += u64::from((s.beta - row.alpha_lambda).abs() < eps);
        }
        betas.push(s.beta);
    }
    betas.sort_by(f64::total_cmp);
    let mid = betas.len() / 2;
    row.median_beta = if betas.len() % 2 == 1 {
        betas[mid]
    } else {
        0.5 * (betas[mid - 1] + betas[mid])
    };
    row.p_empty = empty as f64 / t;
    row.p_zero_entropy = zero as f64 / t;
    row.p_unique = unique as f64 / t;
    row.p_empty_se = stderr(row.p_empty, row.trials);
    row.p_zero_entropy_se = stderr(row.p_zero_entropy, row.trials);
    row.p_unique_se = stderr(row.p_unique, row.trials);
    row.mean_components = components as f64 / t;
    row.components_hist = hist.into_iter().collect();
    row.mean_beta = beta_sum / t;
    row.p_beta_near = near.map(|c| c as f64 / t);
}

/// Runs `trials` realizations of one cell, returned in trial order.
pub fn simulate_cell(
    g: &Graph,
    alpha: f64,
    seed: u64,
    trials: u64,
    exec: Execution,
) -> Result<Vec<RealizationSummary>> {
    map_indexed_init(
        trials,
        exec,
        || Realizer::new(g),
        |realizer, i| {
            let w = sample_omega(g, alpha, seed, i)?;
            realizer.classify(&w.allowed)
        },
    )
    .into_iter()
    .collect()
}

/// Runs every cell of the sweep; rows are ordered by `(n, alpha)`.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let g1 = Graph::from_spec(&cfg.graph)?;
    let mut alphas = cfg.alphas.clone();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();

    let mut blocks = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        blocks.push((n, n_block_graph(&g1, n, cfg.caps.block_edges)));
    }
    let largest_edges = blocks
        .iter()
        .filter_map(|(_, g)| g.as_ref().ok().map(Graph::edge_count))
        .max()
        .unwrap_or(1);
    let base = base_analysis(&g1, &alphas, &cfg.caps, largest_edges)?;

    let mut rows = Vec::new();
    for (n, built) in blocks {
        let g = match built {
            Ok(g) => g,
            Err(e) => {
                log::error!("n = {n}: {e}");
                for &alpha in &alphas {
                    rows.push(failed_row(n, alpha, cfg.trials, &e));
                }
                continue;
            }
        };
        rows.extend(run_block(cfg, exec, &g, n, &alphas, &base));
    }
    Ok(rows)
}

fn failed_row(n: usize, alpha: f64, trials: u64, e: &Error) -> ResultRow {
    ResultRow {
        n,
        vertices: 0,
        edges: 0,
        alpha,
        trials,
        p_empty: f64::NAN,
        p_empty_se: f64::NAN,
        p_zero_entropy: f64::NAN,
        p_zero_entropy_se: f64::NAN,
        mean_components: f64::NAN,
        components_hist: Vec::new(),
        mean_beta: f64::NAN,
        median_beta: f64::NAN,
        p_beta_near: [f64::NAN; 3],
        p_unique: f64::NAN,
        p_unique_se: f64::NAN,
        zeta_inverse: None,
        empty_lower: None,
        empty_upper: None,
        i_inf_pmf: None,
        alpha_lambda: f64::NAN,
        oracle: None,
        errors: vec![e.to_string()],
        cap_violation: e.is_cap_violation(),
    }
}

fn run_block(
    cfg: &ExperimentConfig,
    exec: Execution,
    g: &Graph,
    n: usize,
    alphas: &[f64],
    base: &BaseAnalysis,
) -> Vec<ResultRow> {
    let mut block_errors: Vec<Error> = Vec::new();
    let z = compute_z(g, cfg.caps.z, cfg.caps.orbit_walks)
        .map_err(|e| log::warn!("n = {n}: z(G) unavailable: {e}"))
        .ok();
    if z.is_none() {
        block_errors.push(Error::CapExceeded {
            what: "z(G) orbit enumeration",
            cap: cfg.caps.orbit_walks,
        });
    }
    let want_oracle = match cfg.oracle {
        OracleMode::Off => false,
        OracleMode::Auto => g.edge_count() <= cfg.caps.oracle_edges.min(ORACLE_MAX_EDGES),
        OracleMode::Force => true,
    };
    let oracle: Option<Vec<ExactDistribution>> = if want_oracle {
        match exact_enumerate_many(g, alphas, exec) {
            Ok(d) => Some(d),
            Err(e) => {
                log::error!("n = {n}: oracle failed: {e}");
                block_errors.push(e);
                None
            }
        }
    } else {
        None
    };

    alphas
        .iter()
        .enumerate()
        .map(|(ai, &alpha)| {
            let mut row = failed_row(n, alpha, cfg.trials, &Error::Domain(String::new()));
            row.errors.clear();
            row.cap_violation = false;
            row.vertices = g.vertex_count();
            row.edges = g.edge_count();
            row.alpha_lambda = alpha * base.lambda;
            let note = |row: &mut ResultRow, e: &Error| {
                row.errors.push(e.to_string());
                row.cap_violation |= e.is_cap_violation();
            };
            for e in &block_errors {
                note(&mut row, e);
            }

            let seed = cell_seed(cfg.seed, n, alpha);
            match simulate_cell(g, alpha, seed, cfg.trials, exec) {
                Ok(summaries) => fold_summaries(&mut row, &summaries, base.per),
                Err(e) => note(&mut row, &e),
            }

            let (zeta, pmf) = &base.per_alpha[ai];
            row.zeta_inverse = Some(*zeta);
            if let Some(z) = z {
                match EmptinessBounds::from_census(
                    &base.census,
                    z,
                    g.edge_count(),
                    alpha,
                    base.lambda,
                    base.tail_constant,
                ) {
                    Ok(b) => {
                        row.empty_lower = Some(b.lower);
                        row.empty_upper = Some(b.upper);
                    }
                    Err(e) => note(&mut row, &e),
                }
            }
            match pmf {
                Some(Ok(p)) => row.i_inf_pmf = Some(p.clone()),
                Some(Err((msg, cap))) => {
                    row.errors.push(msg.clone());
                    row.cap_violation |= cap;
                }
                None => {}
            }
            row.oracle = oracle.as_ref().map(|d| OracleColumns::from(&d[ai]));
            row
        })
        .collect()
}

/// Oracle agreement: every Monte Carlo estimate within 4 standard errors of
/// the exact value. The standard error uses the exact probability (or the
/// exact variance of I), and zero variance requires equality.
pub fn self_check(rows: &[ResultRow]) -> Vec<String> {
    let mut failures = Vec::new();
    for r in rows {
        let Some(o) = &r.oracle else { continue };
        let t = r.trials;
        let checks = [
            ("p_empty", r.p_empty, o.p_empty, stderr(o.p_empty, t)),
            ("p_zero_entropy", r.p_zero_entropy, o.p_zero_entropy, stderr(o.p_zero_entropy, t)),
            (
                "mean_components",
                r.mean_components,
                o.mean_components,
                (o.var_components / t as f64).sqrt(),
            ),
            ("p_unique", r.p_unique, o.p_unique, stderr(o.p_unique, t)),
        ];
        for (name, est, exact, se) in checks {
            let ok = if se < 1e-12 {
                (est - exact).abs() <= 1e-9
            } else {
                (est - exact).abs() <= 4.0 * se
            };
            if !ok {
                failures.push(format!(
                    "n={} alpha={} {name}: estimate {est} vs exact {exact} (se {se})",
                    r.n, r.alpha
                ));
            }
        }
    }
    failures
}

/// `%.12g`-style formatting.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub const RESULT_COLUMNS: [&str; 30] = [
    "n",
    "vertices",
    "edges",
    "alpha",
    "trials",
    "status",
    "p_empty",
    "p_empty_se",
    "p_zero_entropy",
    "p_zero_entropy_se",
    "mean_components",
    "components_hist",
    "mean_beta",
    "median_beta",
    "p_beta_within_0.05",
    "p_beta_within_0.1",
    "p_beta_within_0.2",
    "p_unique",
    "p_unique_se",
    "zeta_inverse",
    "empty_lower",
    "empty_upper",
    "i_inf_pmf_head",
    "alpha_lambda",
    "oracle_p_empty",
    "oracle_p_zero_entropy",
    "oracle_mean_components",
    "oracle_p_unique",
    "oracle_var_components",
    "error",
];

fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn row_record(r: &ResultRow) -> Vec<String> {
    let hist = r
        .components_hist
        .iter()
        .map(|(k, c)| format!("{k}:{c}"))
        .collect::<Vec<_>>()
        .join(";");
    let pmf = r
        .i_inf_pmf
        .as_ref()
        .map(|p| p.iter().map(|&x| fmt_float(x)).collect::<Vec<_>>().join(";"))
        .unwrap_or_default();
    let o = r.oracle.as_ref();
    vec![
        r.n.to_string(),
        r.vertices.to_string(),
        r.edges.to_string(),
        fmt_float(r.alpha),
        r.trials.to_string(),
        if r.failed() { "failed" } else { "ok" }.to_string(),
        fmt_float(r.p_empty),
        fmt_float(r.p_empty_se),
        fmt_float(r.p_zero_entropy),
        fmt_float(r.p_zero_entropy_se),
        fmt_float(r.mean_components),
        hist,
        fmt_float(r.mean_beta),
        fmt_float(r.median_beta),
        fmt_float(r.p_beta_near[0]),
        fmt_float(r.p_beta_near[1]),
        fmt_float(r.p_beta_near[2]),
        fmt_float(r.p_unique),
        fmt_float(r.p_unique_se),
        opt_float(r.zeta_inverse),
        opt_float(r.empty_lower),
        opt_float(r.empty_upper),
        pmf,
        fmt_float(r.alpha_lambda),
        opt_float(o.map(|o| o.p_empty)),
        opt_float(o.map(|o| o.p_zero_entropy)),
        opt_float(o.map(|o| o.mean_components)),
        opt_float(o.map(|o| o.p_unique)),
        opt_float(o.map(|o| o.var_components)),
        r.errors.join("; "),
    ]
}

/// Writes the results CSV, preceded by a `# generated_at_unix=` line when
/// `timestamp` is given.
pub fn write_results_csv<W: Write>(rows: &[ResultRow], timestamp: Option<u64>, mut out: W) -> Result<()> {
    if let Some(ts) = timestamp {
        writeln!(out, "# generated_at_unix={ts}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_COLUMNS)?;
    for r in rows {
        w.write_record(row_record(r))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Empty,
    Entropy,
    Components,
    Unique,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Metric> {
        match s {
            "empty" => Ok(Metric::Empty),
            "entropy" => Ok(Metric::Entropy),
            "components" => Ok(Metric::Components),
            "unique" => Ok(Metric::Unique),
            other => Err(Error::Config(format!(
                "unknown metric {other:?} (expected empty, entropy, components or unique)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XAxis {
    N,
    Alpha,
}

/// Converts a results CSV into long format `x, series, value, lo, hi`.
/// Monte Carlo series carry a 95% normal interval, reference series none.
pub fn plot_data<R: Read, W: Write>(input: R, metric: Metric, x: XAxis, out: W) -> Result<()> {
    let mut text = String::new();
    let mut input = input;
    input.read_to_string(&mut text)?;
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("results file has no column {name:?}")))
    };
    let (x_col, group_col, group_name) = match x {
        XAxis::N => (col("n")?, col("alpha")?, "alpha"),
        XAxis::Alpha => (col("alpha")?, col("n")?, "n"),
    };
    let trials_col = col("trials")?;
    // (series, value column, standard-error column)
    let series: Vec<(&str, usize, Option<usize>)> = match metric {
        Metric::Empty => vec![
            ("p_empty", col("p_empty")?, Some(col("p_empty_se")?)),
            ("zeta_inverse", col("zeta_inverse")?, None),
            ("empty_lower", col("empty_lower")?, None),
            ("empty_upper", col("empty_upper")?, None),
            ("oracle_p_empty", col("oracle_p_empty")?, None),
        ],
        Metric::Entropy => vec![
            ("mean_beta", col("mean_beta")?, None),
            ("median_beta", col("median_beta")?, None),
            ("alpha_lambda", col("alpha_lambda")?, None),
            ("p_beta_within_0.05", col("p_beta_within_0.05")?, None),
            ("p_beta_within_0.1", col("p_beta_within_0.1")?, None),
            ("p_beta_within_0.2", col("p_beta_within_0.2")?, None),
            ("p_zero_entropy", col("p_zero_entropy")?, Some(col("p_zero_entropy_se")?)),
        ],
        Metric::Components => vec![
            ("mean_components", col("mean_components")?, None),
            ("oracle_mean_components", col("oracle_mean_components")?, None),
        ],
        Metric::Unique => vec![
            ("p_unique", col("p_unique")?, Some(col("p_unique_se")?)),
            ("oracle_p_unique", col("oracle_p_unique")?, None),
        ],
    };
    let within: Vec<bool> = series.iter().map(|s| s.0.starts_with("p_beta_within")).collect();

    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "series", "value", "lo", "hi"])?;
    for rec in reader.records() {
        let rec = rec?;
        let trials: f64 = rec[trials_col].parse().unwrap_or(f64::NAN);
        for ((name, vcol, secol), binomial) in series.iter().zip(&within) {
            let value = &rec[*vcol];
            if value.is_empty() {
                continue;
            }
            let v: f64 = value.parse().unwrap_or(f64::NAN);
            let se = match secol {
                Some(c) => rec[*c].parse().ok(),
                None if *binomial => Some(stderr(v, trials as u64)),
                None => None,
            };
            let (lo, hi) = se
                .map(|se: f64| {
                    (
                        fmt_float((v - 1.96 * se).max(0.0)),
                        fmt_float((v + 1.96 * se).min(1.0)),
                    )
                })
                .unwrap_or_default();
            w.write_record([
                rec[x_col].to_string(),
                format!("{name}@{group_name}={}", &rec[group_col]),
                value.to_string(),
                lo,
                hi,
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
