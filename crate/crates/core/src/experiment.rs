//! Sweep plans, the results CSV and plot-ready series.
//!
//! A plan is a TOML file:
//!
//! ```toml
//! method = "I"             # "I", "II", "III" or "exact"
//! strikes = [90.0, 100.0, 110.0]
//! dims = ["6x6", "7x7"]    # qubits x layers; method III uses K = qubits * layers
//! data_sizes = [250, 1000, 2500]
//! epsilons = [0.01, 0.001] # method III only
//! repetitions = 10
//! seed_base = 7
//!
//! [market]                 # optional, strike is taken from `strikes`
//! s0 = 100.0
//!
//! [training]               # optional overrides of the method defaults
//! epochs = 300
//!
//! [qae]                    # optional, method III
//! shots_per_round = 100
//! ```
//!
//! Every cell (strike, dim, size or ε, repetition) gets its own seed, mixed
//! from `seed_base` and the cell coordinates, so one cell can be rerun alone.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::ansatz::AnsatzSpec;
use crate::fourier;
use crate::market::{self, MarketParams};
use crate::qamc::{self, QaeConfig};
use crate::training::{self, Method, TrainingConfig};

pub const CSV_HEADER_COMMENT: &str = "# qfourier-results v1";
pub const CSV_COLUMNS: [&str; 12] = [
    "method",
    "strike",
    "dim",
    "data_size_or_eps",
    "seed",
    "price",
    "abs_error",
    "rel_error",
    "shots",
    "wall_time_seconds",
    "status",
    "iqr_rel_error",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("schema error: {0}")]
    Schema(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Schema(_) => 4,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// splitmix64 finalizer.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `base` xor a hash of `coords`.
pub fn mix_seed(base: u64, coords: &[u64]) -> u64 {
    base ^ coords.iter().fold(0x243F_6A88_85A3_08D3, |h, &c| splitmix(h ^ c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
pub enum PlanMethod {
    I,
    II,
    III,
    #[serde(rename = "exact")]
    Exact,
}

impl PlanMethod {
    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for PlanMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlanMethod::I => "I",
            PlanMethod::II => "II",
            PlanMethod::III => "III",
            PlanMethod::Exact => "exact",
        })
    }
}

impl FromStr for PlanMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "I" => Ok(PlanMethod::I),
            "II" => Ok(PlanMethod::II),
            "III" => Ok(PlanMethod::III),
            "exact" => Ok(PlanMethod::Exact),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

/// `n x L` circuit shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(try_from = "String")]
pub struct Dim {
    pub n_qubits: usize,
    pub n_layers: usize,
}

impl Dim {
    pub fn spectrum_size(&self) -> usize {
        self.n_qubits * self.n_layers
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_qubits, self.n_layers)
    }
}

impl FromStr for Dim {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (n, l) = s
            .split_once('x')
            .ok_or_else(|| format!("dim {s:?} is not of the form NxL"))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|e| format!("dim {s:?}: {e}"))
        };
        Ok(Dim {
            n_qubits: parse(n)?,
            n_layers: parse(l)?,
        })
    }
}

impl TryFrom<String> for Dim {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketOverrides {
    pub s0: f64,
    pub r: f64,
    pub sigma: f64,
    pub maturity: f64,
    pub t0: f64,
}

impl Default for MarketOverrides {
    fn default() -> Self {
        let m = MarketParams::paper(100.0);
        Self {
            s0: m.s0,
            r: m.r,
            sigma: m.sigma,
            maturity: m.maturity,
            t0: m.t0,
        }
    }
}

impl MarketOverrides {
    pub fn market(&self, strike: f64) -> MarketParams {
        MarketParams {
            s0: self.s0,
            r: self.r,
            sigma: self.sigma,
            maturity: self.maturity,
            strike,
            t0: self.t0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub method: PlanMethod,
    pub strikes: Vec<f64>,
    pub dims: Vec<Dim>,
    #[serde(default)]
    pub data_sizes: Vec<usize>,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed_base: u64,
    /// Worker threads; 0 lets rayon decide.
    #[serde(default)]
    pub threads: usize,
    /// Fill `wall_time_seconds`; off by default so reruns stay byte-identical.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub market: MarketOverrides,
    /// Raw overrides merged over the method's default training config.
    #[serde(default)]
    pub training: Option<toml::Table>,
    #[serde(default)]
    pub qae: QaeConfig,
}

fn one() -> usize {
    1
}

impl ExperimentPlan {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let plan: ExperimentPlan = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.strikes.is_empty() || self.strikes.iter().any(|k| !(*k > 0.0)) {
            return bad("strikes must be a nonempty list of positive numbers".into());
        }
        if self.dims.is_empty() {
            return bad("dims must be nonempty".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        match self.method {
            PlanMethod::I | PlanMethod::II if self.data_sizes.is_empty() => {
                return bad(format!("method {} needs data_sizes", self.method))
            }
            PlanMethod::III if self.epsilons.is_empty() => return bad("method III needs epsilons".into()),
            _ => {}
        }
        for d in &self.dims {
            AnsatzSpec::new(d.n_qubits, d.n_layers).map_err(|e| CliError::Config(format!("dim {d}: {e}")))?;
        }
        self.market
            .market(100.0)
            .validate()
            .map_err(|e| CliError::Config(format!("market: {e}")))?;
        if self.method == PlanMethod::III {
            self.qae.validate().map_err(|e| CliError::Config(format!("qae: {e}")))?;
        }
        if let Some(m) = self.training_method() {
            self.training_config(m)?.validate().map_err(|e| CliError::Config(format!("training: {e}")))?;
        }
        Ok(())
    }

    fn training_method(&self) -> Option<Method> {
        match self.method {
            PlanMethod::I => Some(Method::DensityFit),
            PlanMethod::II => Some(Method::CdfFit),
            _ => None,
        }
    }

    /// Method defaults with the `[training]` table applied on top.
    pub fn training_config(&self, method: Method) -> Result<TrainingConfig, CliError> {
        let base = TrainingConfig::for_method(method);
        let Some(overrides) = &self.training else {
            return Ok(base);
        };
        let mut table = toml::Table::try_from(&base).map_err(|e| CliError::Config(e.to_string()))?;
        for (k, v) in overrides {
            table.insert(k.clone(), v.clone());
        }
        table
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("training: {e}")))
    }

    /// Size-or-ε axis of the sweep.
    fn axis(&self) -> Vec<f64> {
        match self.method {
            PlanMethod::I | PlanMethod::II => self.data_sizes.iter().map(|&s| s as f64).collect(),
            PlanMethod::III => self.epsilons.clone(),
            PlanMethod::Exact => vec![0.0],
        }
    }

    pub fn cells(&self) -> Vec<Cell> {
        let axis = self.axis();
        let mut cells = Vec::new();
        for &strike in &self.strikes {
            for &dim in &self.dims {
                for &x in &axis {
                    for rep in 0..self.repetitions {
                        let seed = mix_seed(
                            self.seed_base,
                            &[
                                self.method.tag(),
                                strike.to_bits(),
                                dim.n_qubits as u64,
                                dim.n_layers as u64,
                                x.to_bits(),
                                rep as u64,
                            ],
                        );
                        cells.push(Cell {
                            method: self.method,
                            strike,
                            dim,
                            size_or_eps: x,
                            seed,
                        });
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub method: PlanMethod,
    pub strike: f64,
    pub dim: Dim,
    pub size_or_eps: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: PlanMethod,
    pub strike: f64,
    pub dim: Dim,
    pub data_size_or_eps: f64,
    /// `None` marks a summary row.
    pub seed: Option<u64>,
    pub price: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub shots: f64,
    pub wall_time_seconds: f64,
    pub status: String,
    pub iqr_rel_error: Option<f64>,
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResultRow {
    fn record(&self) -> Vec<String> {
        vec![
            self.method.to_string(),
            fmt_f(self.strike),
            self.dim.to_string(),
            fmt_f(self.data_size_or_eps),
            self.seed.map_or_else(|| "summary".to_string(), |s| s.to_string()),
            fmt_f(self.price),
            fmt_f(self.abs_error),
            fmt_f(self.rel_error),
            fmt_f(self.shots),
            fmt_f(self.wall_time_seconds),
            self.status.clone(),
            self.iqr_rel_error.map(fmt_f).unwrap_or_default(),
        ]
    }
}

/// Price and shot count for one cell.
fn price_cell(plan: &ExperimentPlan, cell: &Cell) -> Result<(f64, u64), String> {
    let market = plan.market.market(cell.strike);
    let spec = AnsatzSpec::new(cell.dim.n_qubits, cell.dim.n_layers).map_err(|e| e.to_string())?;
    match cell.method {
        PlanMethod::I | PlanMethod::II => {
            let method = plan.training_method().expect("learned method");
            let config = TrainingConfig {
                n_train: cell.size_or_eps as usize,
                seed: cell.seed,
                ..plan.training_config(method).map_err(|e| e.to_string())?
            };
            let trained = training::train(method, &market, &spec, &config).map_err(|e| e.to_string())?;
            let priced = training::price_with_model(method, &trained, &market).map_err(|e| e.to_string())?;
            Ok((priced.price, 0))
        }
        PlanMethod::III => {
            let config = QaeConfig {
                epsilon: cell.size_or_eps,
                ..plan.qae
            };
            let priced = qamc::pipeline_method3(&market, spec.spectrum_size(), &config, cell.seed)
                .map_err(|e| e.to_string())?;
            Ok((priced.price, priced.total_shots))
        }
        PlanMethod::Exact => {
            let interval = market::truncation_interval(&market, market::DEFAULT_TRUNCATION_WIDTH)
                .map_err(|e| e.to_string())?;
            let k = spec.spectrum_size();
            let series = market::exact_density_coeffs(&market, interval, k).map_err(|e| e.to_string())?;
            let payoff = fourier::payoff_coeffs_pdf(&market, interval, k);
            let price = fourier::price_pdf(&series, &payoff, &market).map_err(|e| e.to_string())?;
            Ok((price, 0))
        }
    }
}

pub fn run_cell(plan: &ExperimentPlan, cell: &Cell) -> ResultRow {
    let oracle = market::analytic_put_price(&plan.market.market(cell.strike));
    let start = Instant::now();
    let outcome = price_cell(plan, cell);
    let wall = if plan.record_timing {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };
    let (price, shots, status) = match outcome {
        Ok((p, s)) => (p, s as f64, "ok".to_string()),
        Err(e) => {
            log::warn!("cell {cell:?} failed: {e}");
            (f64::NAN, 0.0, format!("failed: {}", e.replace(['\n', ','], " ")))
        }
    };
    let abs_error = (price - oracle).abs();
    ResultRow {
        method: cell.method,
        strike: cell.strike,
        dim: cell.dim,
        data_size_or_eps: cell.size_or_eps,
        seed: Some(cell.seed),
        price,
        abs_error,
        rel_error: abs_error / oracle,
        shots,
        wall_time_seconds: wall,
        status,
        iqr_rel_error: None,
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted_finite(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Median row per (strike, dim, size) cell group, with the IQR of rel_error.
pub fn summarize(rows: &[ResultRow]) -> Vec<ResultRow> {
    let mut out: Vec<ResultRow> = Vec::new();
    for group in rows.chunk_by(|a, b| {
        a.strike == b.strike && a.dim == b.dim && a.data_size_or_eps == b.data_size_or_eps
    }) {
        let ok: Vec<&ResultRow> = group.iter().filter(|r| r.status == "ok").collect();
        let med = |f: fn(&ResultRow) -> f64| quantile(&sorted_finite(ok.iter().map(|r| f(r))), 0.5);
        let rel = sorted_finite(ok.iter().map(|r| r.rel_error));
        let first = &group[0];
        out.push(ResultRow {
            seed: None,
            price: med(|r| r.price),
            abs_error: med(|r| r.abs_error),
            rel_error: quantile(&rel, 0.5),
            shots: med(|r| r.shots),
            wall_time_seconds: med(|r| r.wall_time_seconds),
            status: format!("summary {}/{}", ok.len(), group.len()),
            iqr_rel_error: Some(quantile(&rel, 0.75) - quantile(&rel, 0.25)),
            ..first.clone()
        });
    }
    out
}

/// Runs every cell of the plan and returns data rows followed by summaries.
pub fn execute(plan: &ExperimentPlan) -> Result<Vec<ResultRow>, CliError> {
    let cells = plan.cells();
    let work = || -> Vec<ResultRow> { cells.par_iter().map(|c| run_cell(plan, c)).collect() };
    let rows = if plan.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(plan.threads)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(work)
    } else {
        work()
    };
    let mut all = rows.clone();
    all.extend(summarize(&rows));
    Ok(all)
}

pub fn write_csv(rows: &[ResultRow], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER_COMMENT}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()
}

/// Runs the plan and writes the results CSV to `out_path`.
pub fn cmd_run(plan: &ExperimentPlan, out_path: &Path) -> Result<Vec<ResultRow>, CliError> {
    // fail on an unwritable path before spending time on the sweep
    let file = fs::File::create(out_path).map_err(|e| CliError::io(out_path, e))?;
    let rows = execute(plan)?;
    let mut buf = std::io::BufWriter::new(file);
    write_csv(&rows, &mut buf).map_err(|e| CliError::io(out_path, e))?;
    buf.flush().map_err(|e| CliError::io(out_path, e))?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactRow {
    pub strike: f64,
    pub analytic: f64,
    pub pdf_price: f64,
    pub cdf_price: f64,
}

impl ExactRow {
    pub fn pdf_rel_error(&self) -> f64 {
        (self.pdf_price - self.analytic).abs() / self.analytic
    }
    pub fn cdf_rel_error(&self) -> f64 {
        (self.cdf_price - self.analytic).abs() / self.analytic
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactReport {
    pub n_terms: usize,
    pub rows: Vec<ExactRow>,
}

impl fmt::Display for ExactReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>8} {:>14} {:>14} {:>10} {:>14} {:>10}",
            "strike", "black_scholes", "fourier_pdf", "rel_err", "fourier_cdf", "rel_err"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>8.2} {:>14.8} {:>14.8} {:>10.2e} {:>14.8} {:>10.2e}",
                r.strike,
                r.analytic,
                r.pdf_price,
                r.pdf_rel_error(),
                r.cdf_price,
                r.cdf_rel_error()
            )?;
        }
        write!(f, "({} Fourier terms, truncation width {})", self.n_terms, market::DEFAULT_TRUNCATION_WIDTH)
    }
}

/// Closed-form price next to both Fourier pricers fed exact coefficients.
pub fn cmd_price_exact(market: &MarketOverrides, strikes: &[f64], n_terms: usize) -> Result<ExactReport, CliError> {
    let err = |e: &dyn fmt::Display| CliError::Config(e.to_string());
    let mut rows = Vec::new();
    for &strike in strikes {
        let m = market.market(strike);
        m.validate().map_err(|e| err(&e))?;
        let iv = market::truncation_interval(&m, market::DEFAULT_TRUNCATION_WIDTH).map_err(|e| err(&e))?;
        let density = market::exact_density_coeffs(&m, iv, n_terms).map_err(|e| err(&e))?;
        let pdf_price = fourier::price_pdf(&density, &fourier::payoff_coeffs_pdf(&m, iv, n_terms), &m)
            .map_err(|e| err(&e))?;
        let cdf = market::exact_cdf_coeffs(&m, iv, n_terms).map_err(|e| err(&e))?;
        let payoff = fourier::payoff_coeffs_cdf(&m, iv, n_terms).map_err(|e| err(&e))?;
        let f_a = fourier::eval_series(&cdf, iv.a);
        let f_b = fourier::eval_series(&cdf, iv.b);
        let cdf_price = fourier::price_cdf(&cdf, &payoff, &m, f_a, f_b).map_err(|e| err(&e))?;
        rows.push(ExactRow {
            strike,
            analytic: market::analytic_put_price(&m),
            pdf_price,
            cdf_price,
        });
    }
    Ok(ExactReport { n_terms, rows })
}

/// Plot-ready series: one (x, median, q25, q75) line per axis value.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub file_name: String,
    pub points: Vec<[f64; 4]>,
}

struct CsvRow {
    method: String,
    strike: f64,
    dim: String,
    x: f64,
    rel_error: f64,
    shots: f64,
}

fn read_rows(text: &str) -> Result<Vec<CsvRow>, CliError> {
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Schema(e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Schema(format!("missing column {name:?}")))
    };
    let idx = [
        col("method")?,
        col("strike")?,
        col("dim")?,
        col("data_size_or_eps")?,
        col("seed")?,
        col("rel_error")?,
        col("shots")?,
        col("status")?,
    ];
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Schema(e.to_string()))?;
        let field = |i: usize| rec.get(idx[i]).unwrap_or("");
        if field(4) == "summary" || field(7) != "ok" {
            continue;
        }
        let num = |i: usize| {
            field(i)
                .parse::<f64>()
                .map_err(|e| CliError::Schema(format!("data row {}: {e}", line + 1)))
        };
        rows.push(CsvRow {
            method: field(0).to_string(),
            strike: num(1)?,
            dim: field(2).to_string(),
            x: num(3)?,
            rel_error: num(5)?,
            shots: num(6)?,
        });
    }
    Ok(rows)
}

fn quartile_points(groups: BTreeMap<u64, Vec<f64>>) -> Vec<[f64; 4]> {
    groups
        .into_iter()
        .map(|(x, v)| {
            let v = sorted_finite(v.into_iter());
            [f64::from_bits(x), quantile(&v, 0.5), quantile(&v, 0.25), quantile(&v, 0.75)]
        })
        .collect()
}

/// Groups a results CSV into per-(method, strike, dim) series of rel_error
/// (and shots for method III) against the size-or-ε axis.
pub fn plot_series(csv_text: &str) -> Result<Vec<PlotSeries>, CliError> {
    let rows = read_rows(csv_text)?;
    let mut groups: BTreeMap<(String, u64, String), Vec<&CsvRow>> = BTreeMap::new();
    for r in &rows {
        groups
            .entry((r.method.clone(), r.strike.to_bits(), r.dim.clone()))
            .or_default()
            .push(r);
    }
    let mut out = Vec::new();
    for ((method, strike, dim), members) in groups {
        let stem = format!("{method}_K{}_{dim}", f64::from_bits(strike));
        // positive floats order like their bit patterns
        let mut err: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
        let mut shots: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
        for r in &members {
            err.entry(r.x.to_bits()).or_default().push(r.rel_error);
            shots.entry(r.x.to_bits()).or_default().push(r.shots);
        }
        out.push(PlotSeries {
            file_name: format!("{stem}_error.dat"),
            points: quartile_points(err),
        });
        if method == "III" {
            out.push(PlotSeries {
                file_name: format!("{stem}_shots.dat"),
                points: quartile_points(shots),
            });
        }
    }
    Ok(out)
}

/// Writes one whitespace-delimited file per series into `out_dir`.
pub fn cmd_plotdata(csv_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let text = fs::read_to_string(csv_path).map_err(|e| CliError::io(csv_path, e))?;
    let series = plot_series(&text)?;
    if series.is_empty() {
        log::warn!("{} holds no data rows; nothing to plot", csv_path.display());
        return Ok(Vec::new());
    }
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut written = Vec::new();
    for s in series {
        let path = out_dir.join(&s.file_name);
        let mut text = String::from("# x median q25 q75\n");
        for p in &s.points {
            text.push_str(&format!("{} {} {} {}\n", fmt_f(p[0]), fmt_f(p[1]), fmt_f(p[2]), fmt_f(p[3])));
        }
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
method = "exact"
strikes = [100.0]
dims = ["2x2"]
"#;

    #[test]
    fn parses_minimal_plan() {
        let p = ExperimentPlan::from_toml(SMALL).unwrap();
        assert_eq!(p.repetitions, 1);
        assert_eq!(p.dims[0], Dim { n_qubits: 2, n_layers: 2 });
        assert_eq!(p.cells().len(), 1);
    }

    #[test]
    fn config_errors_carry_line_numbers() {
        let err = ExperimentPlan::from_toml("method = \"I\"\nstrikes = [90.0,\ndims = 3\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line"), "{err}");
        let err = ExperimentPlan::from_toml("method = \"I\"\nstrikes = [90.0]\ndims = [\"7x7\"]\n").unwrap_err();
        assert!(err.to_string().contains("data_sizes"));
    }

    #[test]
    fn training_overrides_merge() {
        let p = ExperimentPlan::from_toml(
            "method = \"II\"\nstrikes = [90.0]\ndims = [\"2x2\"]\ndata_sizes = [10]\n[training]\nepochs = 3\n",
        )
        .unwrap();
        let c = p.training_config(Method::CdfFit).unwrap();
        assert_eq!(c.epochs, 3);
        assert_eq!(c.learning_rate, 0.1);
    }

    #[test]
    fn seeds_depend_on_every_coordinate() {
        let p = ExperimentPlan::from_toml(
            "method = \"III\"\nstrikes = [90.0, 100.0]\ndims = [\"2x2\"]\nepsilons = [0.1, 0.05]\nrepetitions = 2\n",
        )
        .unwrap();
        let mut seeds: Vec<u64> = p.cells().iter().map(|c| c.seed).collect();
        assert_eq!(seeds.len(), 8);
        seeds.sort();
        seeds.dedup();
        assert_eq!(seeds.len(), 8);
    }

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert!(quantile(&[], 0.5).is_nan());
    }

    #[test]
    fn empty_csv_gives_no_series() {
        assert!(plot_series("").unwrap().is_empty());
        assert!(plot_series(CSV_HEADER_COMMENT).unwrap().is_empty());
        let err = plot_series("method,strike\nI,90\n").unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn exact_plan_runs() {
        let p = ExperimentPlan::from_toml(SMALL).unwrap();
        let rows = execute(&p).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].status, "ok");
        assert!(rows[1].seed.is_none());
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(CSV_HEADER_COMMENT));
        assert_eq!(plot_series(&text).unwrap().len(), 1);
    }
}
