//! Datasets, empirical risks and full-batch Adam training for the two
//! learned pricing routes:
//!
//! - **Method I** fits the log-price density from labelled points, using the
//!   label slopes as a second (differential) target.
//! - **Method II** fits the distribution function from raw samples. The
//!   empirical CDF supplies the labels; the density enters through a
//!   self-supervised L² risk (a Monte Carlo cross term plus a quadrature of
//!   f²), and two boundary terms pin F at the outermost samples.
//!
//! Data live on [−π, π] after an affine rescale of the log-price interval.
//! Because the circuit output is a trigonometric polynomial of known degree,
//! training evaluates the circuit (and its adjoint gradient) only on 2K+1
//! nodes per period and reaches every data point by exact trigonometric
//! interpolation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::ansatz::{self, AnsatzError, AnsatzSpec, ParamVector};
use crate::fourier::{
    self, default_grid, FourierError, FourierSeries, Interval, PayoffCoeffs,
};
use crate::market::{self, MarketError, MarketParams};
use crate::statevec::Axis;

#[derive(Debug, Error)]
pub enum TrainingError {
    #[error("loss became non-finite at epoch {epoch}")]
    NonFinite { epoch: usize },
    #[error("method II needs at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("model was trained for method {got}, not {expected}")]
    MethodMismatch { expected: Method, got: Method },
    #[error(transparent)]
    Ansatz(#[from] AnsatzError),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error("malformed model record: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Deserialize, serde::Serialize)]
pub enum Method {
    #[serde(rename = "I")]
    DensityFit,
    #[serde(rename = "II")]
    CdfFit,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::DensityFit => "I",
            Method::CdfFit => "II",
        })
    }
}

impl FromStr for Method {
    type Err = TrainingError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" | "1" => Ok(Method::DensityFit),
            "II" | "2" => Ok(Method::CdfFit),
            other => Err(TrainingError::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// Affine map from the log-price interval [a, b] onto [−π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaleMap {
    pub source: Interval,
}

impl RescaleMap {
    pub fn new(source: Interval) -> Self {
        Self { source }
    }

    pub fn to_model(&self, y: f64) -> f64 {
        -PI + 2.0 * PI * (y - self.source.a) / self.source.width()
    }

    pub fn to_market(&self, x: f64) -> f64 {
        self.source.a + (x + PI) * self.source.width() / (2.0 * PI)
    }

    /// dy/dx. A density in y becomes a density in x after multiplying by this.
    pub fn jacobian(&self) -> f64 {
        self.source.width() / (2.0 * PI)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointLayout {
    Grid,
    Uniform,
}

/// Labelled density data in model coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetI {
    pub inputs: Vec<f64>,
    pub labels: Vec<f64>,
    pub label_derivatives: Vec<f64>,
    pub rescale: RescaleMap,
}

/// Density and slope in model coordinates at a rescaled point.
fn rescaled_labels(market: &MarketParams, rescale: &RescaleMap, x: f64) -> (f64, f64) {
    let y = rescale.to_market(x);
    let j = rescale.jacobian();
    (
        market::pdf(market, y) * j,
        market::pdf_derivative(market, y) * j * j,
    )
}

pub fn build_dataset_i(
    market: &MarketParams,
    interval: Interval,
    n_train: usize,
    layout: PointLayout,
    seed: u64,
) -> DatasetI {
    let inputs: Vec<f64> = match layout {
        PointLayout::Grid if n_train == 1 => vec![0.0],
        PointLayout::Grid => (0..n_train)
            .map(|i| -PI + 2.0 * PI * i as f64 / (n_train - 1) as f64)
            .collect(),
        PointLayout::Uniform => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut v: Vec<f64> = (0..n_train).map(|_| rng.random_range(-PI..=PI)).collect();
            v.sort_by(f64::total_cmp);
            v
        }
    };
    let rescale = RescaleMap::new(interval);
    let (labels, label_derivatives) = inputs
        .iter()
        .map(|&x| rescaled_labels(market, &rescale, x))
        .unzip();
    DatasetI {
        inputs,
        labels,
        label_derivatives,
        rescale,
    }
}

/// Which log-price window is stretched onto [−π, π] for sample data.
#[derive(Debug, Clone, Copy, PartialEq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "width")]
pub enum DataWindow {
    /// [min sample, max sample]
    SampleRange,
    /// mean ± L standard deviations; samples outside are clamped
    Truncation(f64),
}

/// Sorted samples in model coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetII {
    pub samples: Vec<f64>,
    pub rescale: RescaleMap,
}

impl DatasetII {
    pub fn from_log_prices(mut log_prices: Vec<f64>, window: Interval) -> Self {
        log_prices.sort_by(f64::total_cmp);
        let rescale = RescaleMap::new(window);
        let samples = log_prices
            .iter()
            .map(|&y| rescale.to_model(y.clamp(window.a, window.b)).clamp(-PI, PI))
            .collect();
        Self { samples, rescale }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

pub fn build_dataset_ii(
    market: &MarketParams,
    n_samples: usize,
    window: DataWindow,
    seed: u64,
) -> Result<DatasetII, TrainingError> {
    if n_samples < 3 {
        return Err(TrainingError::TooFewSamples(n_samples));
    }
    let log_prices = market::sample(market, n_samples, seed);
    let interval = match window {
        DataWindow::SampleRange => {
            let lo = log_prices.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = log_prices.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Interval::new(lo, hi)?
        }
        DataWindow::Truncation(width) => market::truncation_interval(market, width)?,
    };
    Ok(DatasetII::from_log_prices(log_prices, interval))
}

/// (1/I)·#{x_i ≤ x} over sorted samples.
pub fn empirical_cdf(samples: &[f64], x: f64) -> f64 {
    samples.partition_point(|&s| s <= x) as f64 / samples.len() as f64
}

/// Composite trapezoid rule for ∫ f² over `interval`.
pub fn quadrature_q<F: Fn(f64) -> f64>(f_squared: F, interval: Interval, grid_points: usize) -> f64 {
    let nodes = trapezoid_nodes(interval, grid_points);
    let h = interval.width() / (grid_points - 1) as f64;
    nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let w = if i == 0 || i + 1 == grid_points { 0.5 } else { 1.0 };
            w * f_squared(x)
        })
        .sum::<f64>()
        * h
}

fn trapezoid_nodes(interval: Interval, grid_points: usize) -> Vec<f64> {
    assert!(grid_points >= 2, "trapezoid rule needs at least two points");
    (0..grid_points)
        .map(|i| interval.a + interval.width() * i as f64 / (grid_points - 1) as f64)
        .collect()
}

fn model_domain() -> Interval {
    Interval { a: -PI, b: PI }
}

/// Anything that can report a value and an input slope.
pub trait Model1D {
    fn value(&self, x: f64) -> f64;
    fn slope(&self, x: f64) -> f64;
}

/// Circuit model evaluated directly (one adjoint sweep per point).
#[derive(Debug, Clone, Copy)]
pub struct CircuitModel<'a> {
    pub spec: &'a AnsatzSpec,
    pub params: &'a ParamVector,
}

impl Model1D for CircuitModel<'_> {
    fn value(&self, x: f64) -> f64 {
        ansatz::evaluate(self.spec, self.params, x).value
    }
    fn slope(&self, x: f64) -> f64 {
        ansatz::evaluate_with_gradients(self.spec, self.params, x).grad_x
    }
}

/// Closure pair, mostly for tests and reference models.
pub struct FnModel<V, S>(pub V, pub S);

impl<V: Fn(f64) -> f64, S: Fn(f64) -> f64> Model1D for FnModel<V, S> {
    fn value(&self, x: f64) -> f64 {
        (self.0)(x)
    }
    fn slope(&self, x: f64) -> f64 {
        (self.1)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Deserialize, serde::Serialize)]
pub struct LossWeights {
    pub supervised: f64,
    pub differential: f64,
}

/// Where the two boundary constraints of the method II risk are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryGroup {
    /// with the CDF fit (supervised weight)
    Fit,
    /// with the density risk (differential weight)
    Derivative,
}

/// Value of the method I risk and its derivatives with respect to the model
/// value and slope at each data point.
fn method1_terms(
    data: &DatasetI,
    values: &[f64],
    slopes: &[f64],
    w: LossWeights,
) -> (f64, Vec<f64>, Vec<f64>) {
    let n = data.inputs.len() as f64;
    let mut loss = 0.0;
    let mut dv = Vec::with_capacity(values.len());
    let mut ds = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        let rv = values[i] - data.labels[i];
        let rs = slopes[i] - data.label_derivatives[i];
        loss += (w.supervised * rv * rv + w.differential * rs * rs) / n;
        dv.push(2.0 * w.supervised * rv / n);
        ds.push(2.0 * w.differential * rs / n);
    }
    (loss, dv, ds)
}

pub fn loss_method1<M: Model1D>(model: &M, data: &DatasetI, weights: LossWeights) -> f64 {
    let values: Vec<f64> = data.inputs.iter().map(|&x| model.value(x)).collect();
    let slopes: Vec<f64> = data.inputs.iter().map(|&x| model.slope(x)).collect();
    method1_terms(data, &values, &slopes, weights).0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Method2Loss {
    pub weights: LossWeights,
    pub boundary: BoundaryGroup,
    pub quadrature_points: usize,
}

struct Method2Grads {
    loss: f64,
    d_values: Vec<f64>,
    d_slopes: Vec<f64>,
    d_quad_slopes: Vec<f64>,
}

fn method2_terms(
    samples: &[f64],
    values: &[f64],
    slopes: &[f64],
    quad_slopes: &[f64],
    cfg: &Method2Loss,
) -> Method2Grads {
    let n = samples.len();
    let inv = 1.0 / n as f64;
    let (w_fit, w_der) = (cfg.weights.supervised, cfg.weights.differential);
    let w_bnd = match cfg.boundary {
        BoundaryGroup::Fit => w_fit,
        BoundaryGroup::Derivative => w_der,
    };
    let mut loss = 0.0;
    let mut d_values = vec![0.0; n];
    let mut d_slopes = vec![0.0; n];

    for i in 1..n - 1 {
        let r = empirical_cdf(samples, samples[i]) - values[i];
        loss += w_fit * inv * r * r;
        d_values[i] = -2.0 * w_fit * inv * r;
    }
    let (first, last) = (values[0], values[n - 1] - 1.0);
    loss += w_bnd * (first * first + last * last);
    d_values[0] = 2.0 * w_bnd * first;
    d_values[n - 1] = 2.0 * w_bnd * last;

    for (i, &f) in slopes.iter().enumerate() {
        loss -= 2.0 * w_der * inv * f;
        d_slopes[i] = -2.0 * w_der * inv;
    }

    let m = quad_slopes.len();
    let h = 2.0 * PI / (m - 1) as f64;
    let mut d_quad_slopes = vec![0.0; m];
    for (j, &f) in quad_slopes.iter().enumerate() {
        let tw = if j == 0 || j + 1 == m { 0.5 } else { 1.0 };
        loss += w_der * h * tw * f * f;
        d_quad_slopes[j] = 2.0 * w_der * h * tw * f;
    }
    Method2Grads {
        loss,
        d_values,
        d_slopes,
        d_quad_slopes,
    }
}

/// Self-supervised CDF risk. The model value is read as F and its slope as f.
pub fn loss_method2<M: Model1D>(
    model: &M,
    data: &DatasetII,
    cfg: &Method2Loss,
) -> Result<f64, TrainingError> {
    if data.len() < 3 {
        return Err(TrainingError::TooFewSamples(data.len()));
    }
    let values: Vec<f64> = data.samples.iter().map(|&x| model.value(x)).collect();
    let slopes: Vec<f64> = data.samples.iter().map(|&x| model.slope(x)).collect();
    let quad: Vec<f64> = trapezoid_nodes(model_domain(), cfg.quadrature_points)
        .iter()
        .map(|&x| model.slope(x))
        .collect();
    Ok(method2_terms(&data.samples, &values, &slopes, &quad, cfg).loss)
}

/// Adam moments and step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u32,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }
}

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// One bias-corrected Adam update.
pub fn adam_step(
    params: &[f64],
    gradient: &[f64],
    state: &AdamState,
    learning_rate: f64,
) -> (Vec<f64>, AdamState) {
    assert_eq!(params.len(), gradient.len(), "gradient shape");
    assert_eq!(params.len(), state.m.len(), "optimizer state shape");
    let t = state.t + 1;
    let c1 = 1.0 - ADAM_BETA1.powi(t as i32);
    let c2 = 1.0 - ADAM_BETA2.powi(t as i32);
    let mut next = AdamState {
        m: Vec::with_capacity(params.len()),
        v: Vec::with_capacity(params.len()),
        t,
    };
    let mut out = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        let g = gradient[i];
        let m = ADAM_BETA1 * state.m[i] + (1.0 - ADAM_BETA1) * g;
        let v = ADAM_BETA2 * state.v[i] + (1.0 - ADAM_BETA2) * g * g;
        out.push(params[i] - learning_rate * (m / c1) / ((v / c2).sqrt() + ADAM_EPS));
        next.m.push(m);
        next.v.push(v);
    }
    (out, next)
}

/// Exact evaluation of a degree-K trigonometric polynomial from its values
/// on 2K+1 equispaced nodes.
#[derive(Debug, Clone)]
struct NodeInterpolator {
    nodes: Vec<f64>,
    omega: f64,
    degree: usize,
}

/// Row-major interpolation weights for values and slopes.
#[derive(Debug, Clone)]
struct ProbeMatrix {
    n_nodes: usize,
    value_rows: Vec<f64>,
    slope_rows: Vec<f64>,
}

impl NodeInterpolator {
    fn new(spec: &AnsatzSpec) -> Self {
        let degree = spec.spectrum_size();
        let n = 2 * degree + 1;
        let period = spec.period();
        Self {
            nodes: (0..n)
                .map(|j| -0.5 * period + period * j as f64 / n as f64)
                .collect(),
            omega: spec.frequency_scale,
            degree,
        }
    }

    fn probe(&self, points: &[f64]) -> ProbeMatrix {
        let n = self.nodes.len();
        let inv_n = 1.0 / n as f64;
        let mut value_rows = vec![0.0; points.len() * n];
        let mut slope_rows = vec![0.0; points.len() * n];
        value_rows
            .par_chunks_mut(n)
            .zip(slope_rows.par_chunks_mut(n))
            .zip(points.par_iter())
            .for_each(|((vrow, srow), &x)| {
                for (j, &t) in self.nodes.iter().enumerate() {
                    let step = Complex64::from_polar(1.0, self.omega * (x - t));
                    let mut z = step;
                    let (mut v, mut s) = (1.0, 0.0);
                    for k in 1..=self.degree {
                        v += 2.0 * z.re;
                        s -= 2.0 * k as f64 * self.omega * z.im;
                        z *= step;
                    }
                    vrow[j] = v * inv_n;
                    srow[j] = s * inv_n;
                }
            });
        ProbeMatrix {
            n_nodes: n,
            value_rows,
            slope_rows,
        }
    }
}

impl ProbeMatrix {
    fn apply(&self, node_values: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let dot = |row: &[f64]| row.iter().zip(node_values).map(|(a, b)| a * b).sum::<f64>();
        (
            self.value_rows.chunks(self.n_nodes).map(dot).collect(),
            self.slope_rows.chunks(self.n_nodes).map(dot).collect(),
        )
    }

    /// Accumulates Vᵀ·dv + Sᵀ·ds into `out`.
    fn pull_back(&self, dv: Option<&[f64]>, ds: Option<&[f64]>, out: &mut [f64]) {
        let n = self.n_nodes;
        if let Some(dv) = dv {
            for (row, &w) in self.value_rows.chunks(n).zip(dv) {
                out.iter_mut().zip(row).for_each(|(o, r)| *o += w * r);
            }
        }
        if let Some(ds) = ds {
            for (row, &w) in self.slope_rows.chunks(n).zip(ds) {
                out.iter_mut().zip(row).for_each(|(o, r)| *o += w * r);
            }
        }
    }
}

/// Loss and gradient with respect to (θ…, out_scale, out_bias).
#[derive(Debug, Clone)]
pub struct LossAndGradient {
    pub loss: f64,
    pub gradient: Vec<f64>,
}

enum Objective {
    Density {
        data: DatasetI,
        probes: ProbeMatrix,
        weights: LossWeights,
    },
    Cdf {
        data: DatasetII,
        probes: ProbeMatrix,
        quad: ProbeMatrix,
        cfg: Method2Loss,
    },
}

/// Loss evaluator for a fixed architecture and dataset.
pub struct TrainingObjective {
    spec: AnsatzSpec,
    interp: NodeInterpolator,
    objective: Objective,
}

impl TrainingObjective {
    pub fn density(spec: AnsatzSpec, data: DatasetI, weights: LossWeights) -> Self {
        let interp = NodeInterpolator::new(&spec);
        let probes = interp.probe(&data.inputs);
        Self {
            spec,
            interp,
            objective: Objective::Density {
                data,
                probes,
                weights,
            },
        }
    }

    pub fn cdf(spec: AnsatzSpec, data: DatasetII, cfg: Method2Loss) -> Result<Self, TrainingError> {
        if data.len() < 3 {
            return Err(TrainingError::TooFewSamples(data.len()));
        }
        if cfg.quadrature_points < 2 {
            return Err(TrainingError::Config("quadrature needs at least 2 points".into()));
        }
        let interp = NodeInterpolator::new(&spec);
        let probes = interp.probe(&data.samples);
        let quad = interp.probe(&trapezoid_nodes(model_domain(), cfg.quadrature_points));
        Ok(Self {
            spec,
            interp,
            objective: Objective::Cdf {
                data,
                probes,
                quad,
                cfg,
            },
        })
    }

    pub fn spec(&self) -> &AnsatzSpec {
        &self.spec
    }

    pub fn evaluate(&self, params: &ParamVector) -> LossAndGradient {
        let jets: Vec<ansatz::Jet> = self
            .interp
            .nodes
            .par_iter()
            .map(|&t| ansatz::evaluate_with_gradients(&self.spec, params, t))
            .collect();
        let node_values: Vec<f64> = jets.iter().map(|j| j.output.value).collect();
        let mut d_nodes = vec![0.0; node_values.len()];

        let loss = match &self.objective {
            Objective::Density {
                data,
                probes,
                weights,
            } => {
                let (v, s) = probes.apply(&node_values);
                let (loss, dv, ds) = method1_terms(data, &v, &s, *weights);
                probes.pull_back(Some(&dv), Some(&ds), &mut d_nodes);
                loss
            }
            Objective::Cdf {
                data,
                probes,
                quad,
                cfg,
            } => {
                let (v, s) = probes.apply(&node_values);
                let (_, qs) = quad.apply(&node_values);
                let g = method2_terms(&data.samples, &v, &s, &qs, cfg);
                probes.pull_back(Some(&g.d_values), Some(&g.d_slopes), &mut d_nodes);
                quad.pull_back(None, Some(&g.d_quad_slopes), &mut d_nodes);
                g.loss
            }
        };

        let n_theta = params.theta.len();
        let mut gradient = vec![0.0; n_theta + 2];
        for (jet, &dg) in jets.iter().zip(&d_nodes) {
            for (g, r) in gradient[..n_theta].iter_mut().zip(&jet.raw_grad_theta) {
                *g += params.out_scale * dg * r;
            }
            gradient[n_theta] += dg * jet.output.raw_expectation;
            gradient[n_theta + 1] += dg;
        }
        LossAndGradient { loss, gradient }
    }
}

/// Which period the method II model gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainingWindow {
    /// model periodic on [−2π, 2π]; data occupy the middle half
    Extended,
    /// model periodic on [−π, π], the span of the data
    Base,
}

#[derive(Debug, Clone, PartialEq, serde::Deserialize, serde::Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub supervised_weight: f64,
    pub differential_weight: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub repetitions: usize,
    pub seed: u64,
    /// Method I point placement.
    pub layout: PointLayout,
    /// Method I truncation width in standard deviations.
    pub truncation_width: f64,
    /// Method II sample window.
    pub data_window: DataWindow,
    pub window: TrainingWindow,
    pub boundary_group: BoundaryGroup,
    pub quadrature_points: usize,
    /// Rotation angles start uniform in [0, init_range).
    pub init_range: f64,
    pub init_out_scale: f64,
    pub init_out_bias: f64,
    pub train_affine: bool,
}

impl TrainingConfig {
    /// Adam, lr 0.005, 300 epochs, weights 0.9 / 0.1, 2500 points, 100 test points.
    pub fn method1() -> Self {
        Self {
            learning_rate: 0.005,
            epochs: 300,
            supervised_weight: 0.9,
            differential_weight: 0.1,
            n_train: 2500,
            n_test: 100,
            repetitions: 10,
            seed: 0,
            layout: PointLayout::Grid,
            truncation_width: market::DEFAULT_TRUNCATION_WIDTH,
            data_window: DataWindow::SampleRange,
            window: TrainingWindow::Extended,
            boundary_group: BoundaryGroup::Fit,
            quadrature_points: 1000,
            init_range: 2.0 * PI,
            init_out_scale: 1.0,
            init_out_bias: 0.0,
            train_affine: true,
        }
    }

    /// Adam, lr 0.1, 300 epochs, weights 0.2 / 0.8, 10⁴ samples, 10³ test points.
    pub fn method2() -> Self {
        Self {
            learning_rate: 0.1,
            supervised_weight: 0.2,
            differential_weight: 0.8,
            n_train: 10_000,
            n_test: 1000,
            init_out_scale: 0.5,
            init_out_bias: 0.5,
            ..Self::method1()
        }
    }

    pub fn for_method(method: Method) -> Self {
        match method {
            Method::DensityFit => Self::method1(),
            Method::CdfFit => Self::method2(),
        }
    }

    pub fn weights(&self) -> LossWeights {
        LossWeights {
            supervised: self.supervised_weight,
            differential: self.differential_weight,
        }
    }

    pub fn validate(&self) -> Result<(), TrainingError> {
        let bad = |m: &str| Err(TrainingError::Config(m.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.supervised_weight < 0.0 || self.differential_weight < 0.0 {
            return bad("loss weights must be nonnegative");
        }
        if self.n_train == 0 {
            return bad("n_train must be positive");
        }
        if self.repetitions == 0 {
            return bad("repetitions must be positive");
        }
        if self.quadrature_points < 2 {
            return bad("quadrature_points must be at least 2");
        }
        if self.init_out_scale == 0.0 {
            return bad("init_out_scale must be nonzero");
        }
        Ok(())
    }
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self::method1()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub method: Method,
    pub spec: AnsatzSpec,
    pub params: ParamVector,
    pub loss_history: Vec<f64>,
    pub rescale: RescaleMap,
}

impl TrainedModel {
    pub fn value(&self, x: f64) -> f64 {
        ansatz::evaluate(&self.spec, &self.params, x).value
    }

    pub fn as_model(&self) -> CircuitModel<'_> {
        CircuitModel {
            spec: &self.spec,
            params: &self.params,
        }
    }
}

/// Frequency scale implied by a method and window.
pub fn frequency_scale(method: Method, window: TrainingWindow) -> f64 {
    match (method, window) {
        (Method::CdfFit, TrainingWindow::Extended) => 0.5,
        _ => 1.0,
    }
}

pub fn initial_params(spec: &AnsatzSpec, config: &TrainingConfig) -> ParamVector {
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    ParamVector {
        theta: (0..spec.parameter_count())
            .map(|_| rng.random::<f64>() * config.init_range)
            .collect(),
        out_scale: config.init_out_scale,
        out_bias: config.init_out_bias,
    }
}

/// Runs `epochs` full-batch Adam iterations on an already-built objective.
pub fn optimize(
    objective: &TrainingObjective,
    init: ParamVector,
    config: &TrainingConfig,
) -> Result<(ParamVector, Vec<f64>), TrainingError> {
    let n_theta = init.theta.len();
    let mut flat: Vec<f64> = init.theta.clone();
    flat.push(init.out_scale);
    flat.push(init.out_bias);
    let mut state = AdamState::new(flat.len());
    let mut history = Vec::with_capacity(config.epochs);
    let unpack = |flat: &[f64]| ParamVector {
        theta: flat[..n_theta].to_vec(),
        out_scale: flat[n_theta],
        out_bias: flat[n_theta + 1],
    };
    for epoch in 0..config.epochs {
        let LossAndGradient { loss, mut gradient } = objective.evaluate(&unpack(&flat));
        if !loss.is_finite() || gradient.iter().any(|g| !g.is_finite()) {
            return Err(TrainingError::NonFinite { epoch });
        }
        if !config.train_affine {
            gradient[n_theta] = 0.0;
            gradient[n_theta + 1] = 0.0;
        }
        history.push(loss);
        let (next, next_state) = adam_step(&flat, &gradient, &state, config.learning_rate);
        flat = next;
        state = next_state;
        if flat[n_theta] == 0.0 {
            flat[n_theta] = f64::EPSILON;
        }
    }
    Ok((unpack(&flat), history))
}

/// Builds the dataset for `method`, then trains.
pub fn train(
    method: Method,
    market: &MarketParams,
    spec: &AnsatzSpec,
    config: &TrainingConfig,
) -> Result<TrainedModel, TrainingError> {
    config.validate()?;
    spec.validate()?;
    let spec = spec.with_frequency_scale(frequency_scale(method, config.window))?;
    let (objective, rescale) = match method {
        Method::DensityFit => {
            let interval = market::truncation_interval(market, config.truncation_width)?;
            let data = build_dataset_i(market, interval, config.n_train, config.layout, config.seed);
            let rescale = data.rescale;
            (TrainingObjective::density(spec, data, config.weights()), rescale)
        }
        Method::CdfFit => {
            // offset the sampling stream from the initialisation stream
            let data = build_dataset_ii(
                market,
                config.n_train,
                config.data_window,
                config.seed ^ 0x5DEE_CE66_D1CE_5EED,
            )?;
            let rescale = data.rescale;
            let cfg = Method2Loss {
                weights: config.weights(),
                boundary: config.boundary_group,
                quadrature_points: config.quadrature_points,
            };
            (TrainingObjective::cdf(spec, data, cfg)?, rescale)
        }
    };
    let (params, loss_history) = optimize(&objective, initial_params(&spec, config), config)?;
    Ok(TrainedModel {
        method,
        spec,
        params,
        loss_history,
        rescale,
    })
}

/// Mean squared error of a method I model against the rescaled density at
/// `n_test` uniform points.
pub fn test_mse_density(trained: &TrainedModel, market: &MarketParams, n_test: usize, seed: u64) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..n_test).map(|_| rng.random_range(-PI..=PI)).collect();
    xs.iter()
        .map(|&x| {
            let (label, _) = rescaled_labels(market, &trained.rescale, x);
            (trained.value(x) - label).powi(2)
        })
        .sum::<f64>()
        / n_test.max(1) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceResult {
    pub price: f64,
    /// Series paired with the payoff, in log-price coordinates.
    pub series: FourierSeries,
}

/// Prices from a density given in model coordinates on [−π, π]
/// (2π-periodic, bandlimited to `n_terms`).
pub fn price_density_evaluator<F: Fn(f64) -> f64>(
    density_x: F,
    rescale: &RescaleMap,
    n_terms: usize,
    market: &MarketParams,
) -> Result<PriceResult, TrainingError> {
    let interval = rescale.source;
    let inv_j = 1.0 / rescale.jacobian();
    let series = fourier::extract_series(
        |y| density_x(rescale.to_model(y)) * inv_j,
        interval,
        interval.width(),
        n_terms,
        default_grid(n_terms),
    )?;
    let payoff = fourier::payoff_coeffs_pdf(market, interval, n_terms);
    let price = fourier::price_pdf(&series, &payoff, market)?;
    Ok(PriceResult { price, series })
}

/// Prices from a distribution function given in model coordinates, read as a
/// series of period 2(b−a) anchored at â (that is, over [−2π, 2π]).
pub fn price_cdf_evaluator<F: Fn(f64) -> f64>(
    cdf_x: F,
    rescale: &RescaleMap,
    n_terms: usize,
    market: &MarketParams,
) -> Result<PriceResult, TrainingError> {
    let interval = rescale.source;
    let series = fourier::extract_series(
        |y| cdf_x(rescale.to_model(y)),
        interval,
        2.0 * interval.width(),
        n_terms,
        default_grid(n_terms),
    )?;
    let payoff: PayoffCoeffs = fourier::payoff_coeffs_cdf(market, interval, n_terms)?;
    let f_a = fourier::eval_series(&series, interval.a);
    let f_b = fourier::eval_series(&series, interval.b);
    let price = fourier::price_cdf(&series, &payoff, market, f_a, f_b)?;
    Ok(PriceResult { price, series })
}

/// Extracts the model's series in log-price coordinates and prices the put.
pub fn price_with_model(
    method: Method,
    trained: &TrainedModel,
    market: &MarketParams,
) -> Result<PriceResult, TrainingError> {
    if trained.method != method {
        return Err(TrainingError::MethodMismatch {
            expected: method,
            got: trained.method,
        });
    }
    let k = trained.spec.spectrum_size();
    match method {
        Method::DensityFit => {
            price_density_evaluator(|x| trained.value(x), &trained.rescale, k, market)
        }
        Method::CdfFit => {
            // number of period-2(b−a) harmonics the model can carry
            let n_terms = (2.0 * trained.spec.frequency_scale * k as f64).round() as usize;
            price_cdf_evaluator(|x| trained.value(x), &trained.rescale, n_terms, market)
        }
    }
}

fn axis_label(axis: Axis) -> &'static str {
    match axis {
        Axis::X => "X",
        Axis::Y => "Y",
        Axis::Z => "Z",
    }
}

impl fmt::Display for TrainedModel {
    /// Line-oriented `key value…` record.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.16e}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "method {}", self.method)?;
        writeln!(f, "n_qubits {}", self.spec.n_qubits)?;
        writeln!(f, "n_layers {}", self.spec.n_layers)?;
        writeln!(f, "entangle {}", self.spec.entangle)?;
        writeln!(f, "encoding_axis {}", axis_label(self.spec.encoding_axis))?;
        writeln!(f, "frequency_scale {:.16e}", self.spec.frequency_scale)?;
        writeln!(
            f,
            "interval {:.16e} {:.16e}",
            self.rescale.source.a, self.rescale.source.b
        )?;
        writeln!(f, "theta {}", list(&self.params.theta))?;
        writeln!(f, "out_scale {:.16e}", self.params.out_scale)?;
        writeln!(f, "out_bias {:.16e}", self.params.out_bias)?;
        writeln!(f, "loss_history {}", list(&self.loss_history))
    }
}

impl FromStr for TrainedModel {
    type Err = TrainingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut fields = std::collections::HashMap::new();
        for line in s.lines().filter(|l| !l.trim().is_empty()) {
            let mut parts = line.split_whitespace();
            let key = parts.next().expect("nonempty line");
            fields.insert(key, parts.collect::<Vec<_>>());
        }
        let get = |k: &str| {
            fields
                .get(k)
                .ok_or_else(|| TrainingError::Parse(format!("missing field {k}")))
        };
        let one = |k: &str| -> Result<&str, TrainingError> {
            match get(k)?.as_slice() {
                [v] => Ok(*v),
                _ => Err(TrainingError::Parse(format!("{k} takes one value"))),
            }
        };
        let num = |k: &str, v: &str| -> Result<f64, TrainingError> {
            v.parse()
                .map_err(|e| TrainingError::Parse(format!("{k}: {e}")))
        };
        let nums = |k: &str| -> Result<Vec<f64>, TrainingError> {
            get(k)?.iter().map(|v| num(k, v)).collect()
        };
        let int = |k: &str| -> Result<usize, TrainingError> {
            one(k)?
                .parse()
                .map_err(|e| TrainingError::Parse(format!("{k}: {e}")))
        };
        let encoding_axis = match one("encoding_axis")? {
            "X" => Axis::X,
            "Y" => Axis::Y,
            "Z" => Axis::Z,
            other => return Err(TrainingError::Parse(format!("axis {other:?}"))),
        };
        let entangle = one("entangle")?
            .parse()
            .map_err(|e| TrainingError::Parse(format!("entangle: {e}")))?;
        let spec = AnsatzSpec {
            n_qubits: int("n_qubits")?,
            n_layers: int("n_layers")?,
            entangle,
            encoding_axis,
            frequency_scale: num("frequency_scale", one("frequency_scale")?)?,
        };
        spec.validate()?;
        let iv = nums("interval")?;
        if iv.len() != 2 {
            return Err(TrainingError::Parse("interval takes two values".into()));
        }
        let params = ParamVector::new(
            &spec,
            nums("theta")?,
            num("out_scale", one("out_scale")?)?,
            num("out_bias", one("out_bias")?)?,
        )?;
        Ok(TrainedModel {
            method: one("method")?.parse()?,
            spec,
            params,
            loss_history: nums("loss_history")?,
            rescale: RescaleMap::new(Interval::new(iv[0], iv[1])?),
        })
    }
}
