//! Quantum Monte Carlo baseline: density coefficients estimated one by one
//! with a statistically simulated, sign-aware iterative amplitude estimator.
//!
//! The estimator never builds Grover operators. Each round draws Bernoulli
//! outcomes against the analytically amplified probability
//! sin²((2k+1)·asin δ) of a shifted amplitude δ, turns the hit rate into a
//! Hoeffding interval and intersects it with what was already known. The
//! first round reads the amplitude shifted by +1, which fixes the sign.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::fourier::{self, FourierError, FourierSeries, Interval};
use crate::market::{self, MarketError, MarketParams};

#[derive(Debug, Error)]
pub enum QamcError {
    #[error("invalid estimator configuration: {0}")]
    Config(&'static str),
    #[error("grid of {points} points cannot resolve {n_terms} harmonics (need at least {})", 2 * n_terms + 1)]
    GridTooCoarse { points: usize, n_terms: usize },
    #[error("target {value} exceeds its normalization {normalization}")]
    Unnormalized { value: f64, normalization: f64 },
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Deserialize, serde::Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct QaeConfig {
    /// Target half-width on the normalized amplitude.
    pub epsilon: f64,
    /// Failure probability, split evenly over `max_rounds`.
    pub gamma: f64,
    pub shots_per_round: u64,
    pub max_rounds: u32,
    /// Skip sampling: the schedule runs on exact probabilities and the
    /// estimate is the true value.
    pub noiseless: bool,
}

impl Default for QaeConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            gamma: 0.05,
            shots_per_round: 20,
            max_rounds: 40,
            noiseless: false,
        }
    }
}

impl QaeConfig {
    pub fn validate(&self) -> Result<(), QamcError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(QamcError::Config("epsilon must lie in (0, 1)"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(QamcError::Config("gamma must lie in (0, 1)"));
        }
        if self.shots_per_round == 0 {
            return Err(QamcError::Config("shots_per_round must be positive"));
        }
        if self.max_rounds == 0 {
            return Err(QamcError::Config("max_rounds must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QaeResult {
    /// Signed estimate in target units (amplitude × normalization).
    pub estimate: f64,
    /// Final half-width in target units.
    pub half_width: f64,
    /// Oracle-weighted cost: Σ shots·(2k+1) over rounds.
    pub total_shots: u64,
    /// Plain number of circuit executions: Σ shots over rounds.
    pub circuit_runs: u64,
    pub rounds: u32,
    /// Half-width reached ε before the round budget ran out.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffKind {
    Cosine,
    Sine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffTarget {
    pub k: usize,
    pub kind: CoeffKind,
    pub true_value: f64,
    pub normalization: f64,
}

impl CoeffTarget {
    pub fn amplitude(&self) -> f64 {
        self.true_value / self.normalization
    }
}

/// Riemann-sum density coefficients on S_i = a + iΔ, Δ = (b−a)/I.
///
/// For a density that is negligible at both ends the left sum is spectrally
/// accurate. The normalization (2/(b−a))·Σf(S_i)Δ bounds every |A_k|, |B_k|.
/// Cosine targets come first (k = 0..=K), then sines (k = 1..=K).
pub fn discretized_coeffs(
    market: &MarketParams,
    interval: Interval,
    n_terms: usize,
    n_points: usize,
) -> Result<Vec<CoeffTarget>, QamcError> {
    if n_points < 2 * n_terms + 1 {
        return Err(QamcError::GridTooCoarse {
            points: n_points,
            n_terms,
        });
    }
    let width = interval.width();
    let step = width / n_points as f64;
    let scale = 2.0 / width;
    let nodes: Vec<(f64, f64)> = (0..n_points)
        .map(|i| {
            let y = interval.a + i as f64 * step;
            (y, market::pdf(market, y) * step)
        })
        .collect();
    let normalization = scale * nodes.iter().map(|(_, w)| w).sum::<f64>();

    let mut cos = Vec::with_capacity(n_terms + 1);
    let mut sin = Vec::with_capacity(n_terms);
    for k in 0..=n_terms {
        let omega = 2.0 * std::f64::consts::PI * k as f64 / width;
        let (mut c, mut s) = (0.0, 0.0);
        for &(y, w) in &nodes {
            let (sn, cs) = (omega * (y - interval.a)).sin_cos();
            c += w * cs;
            s += w * sn;
        }
        cos.push(CoeffTarget {
            k,
            kind: CoeffKind::Cosine,
            true_value: scale * c,
            normalization,
        });
        if k > 0 {
            sin.push(CoeffTarget {
                k,
                kind: CoeffKind::Sine,
                true_value: scale * s,
                normalization,
            });
        }
    }
    cos.extend(sin);
    Ok(cos)
}

/// Hit rate → [lo, hi] on the probability, Hoeffding at level `gamma_round`.
fn hoeffding(hits: u64, shots: u64, gamma_round: f64) -> (f64, f64) {
    let p = hits as f64 / shots as f64;
    let h = ((2.0 / gamma_round).ln() / (2.0 * shots as f64)).sqrt();
    ((p - h).max(0.0), (p + h).min(1.0))
}

/// Largest k with (2k+1)·asin(w/2) ≤ π/2, so the amplified probability is
/// monotone in δ over the whole interval.
fn safe_power(width: f64) -> u64 {
    let phi = (0.5 * width).min(1.0).asin();
    if phi <= 0.0 {
        return u64::MAX / 4;
    }
    (((std::f64::consts::FRAC_PI_2 / phi) - 1.0) / 2.0).floor().max(0.0) as u64
}

pub fn mrqae_estimate(target: &CoeffTarget, config: &QaeConfig, seed: u64) -> Result<QaeResult, QamcError> {
    config.validate()?;
    let amp = target.amplitude();
    if !(amp.abs() <= 1.0 + 1e-12) {
        return Err(QamcError::Unnormalized {
            value: target.true_value,
            normalization: target.normalization,
        });
    }
    let amp = amp.clamp(-1.0, 1.0);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let shots = config.shots_per_round;
    let gamma_round = config.gamma / config.max_rounds as f64;

    // A stage fixes the shift s and the power k; the circuit then measures
    // sin²((2k+1)·asin δ) with δ = (a − s)/2. Shots pool within a stage.
    // The first stage (s = −1, k = 0) reads ((a + 1)/2)², which fixes the sign.
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let (mut shift, mut power) = (-1.0f64, 0u64);
    let mut cap = std::f64::consts::FRAC_PI_2;
    let (mut hits, mut pooled) = (0u64, 0u64);
    let mut total_shots = 0;
    let mut circuit_runs = 0;
    let mut rounds = 0;
    let mut point;

    loop {
        let m = (2 * power + 1) as f64;
        let p = (m * (0.5 * (amp - shift)).clamp(0.0, 1.0).asin()).sin().powi(2);
        pooled += shots;
        hits += if config.noiseless {
            0
        } else {
            (0..shots).filter(|_| rng.random_bool(p)).count() as u64
        };
        let (p_lo, p_hi) = if config.noiseless {
            let h = ((2.0 / gamma_round).ln() / (2.0 * pooled as f64)).sqrt();
            ((p - h).max(0.0), (p + h).min(1.0))
        } else {
            hoeffding(hits, pooled, gamma_round)
        };
        let phi_lo = p_lo.sqrt().asin().min(cap);
        let phi_hi = p_hi.sqrt().asin().min(cap);
        lo = lo.max(shift + 2.0 * (phi_lo / m).sin());
        hi = hi.min(shift + 2.0 * (phi_hi / m).sin()).max(lo);
        let phi_hat = (hits as f64 / pooled as f64).sqrt().asin().min(cap);
        point = shift + 2.0 * (phi_hat / m).sin();
        total_shots += shots * (2 * power + 1);
        circuit_runs += shots;
        rounds += 1;

        if 0.5 * (hi - lo) <= config.epsilon || rounds >= config.max_rounds {
            break;
        }
        let next = safe_power(hi - lo).min(2 * power + 1);
        if next > power {
            power = next;
            shift = lo;
            cap = (2 * power + 1) as f64 * (0.5 * (hi - lo)).min(1.0).asin();
            hits = 0;
            pooled = 0;
        }
    }

    let half = 0.5 * (hi - lo);
    // the hit rate of the last stage, read through the arcsine, is sharper
    // than the interval midpoint
    let estimate = if config.noiseless { amp } else { point.clamp(lo, hi) };
    Ok(QaeResult {
        estimate: estimate * target.normalization,
        half_width: half * target.normalization,
        total_shots,
        circuit_runs,
        rounds,
        converged: half <= config.epsilon,
    })
}

/// One line of the per-coefficient shot ledger.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ShotRecord {
    pub k: usize,
    pub kind: CoeffKind,
    pub true_value: f64,
    pub estimate: f64,
    pub shots: u64,
    pub rounds: u32,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QamcPrice {
    pub price: f64,
    pub series: FourierSeries,
    pub total_shots: u64,
    pub records: Vec<ShotRecord>,
}

impl QamcPrice {
    pub fn mean_shots_per_coefficient(&self) -> f64 {
        self.total_shots as f64 / self.records.len() as f64
    }
}

/// Grid used for the discretized targets when none is given.
pub const DEFAULT_GRID_POINTS: usize = 1 << 12;

/// Independent stream per coefficient.
pub fn coefficient_seed(seed: u64, k: usize, kind: CoeffKind) -> u64 {
    let tag = (k as u64) << 1 | matches!(kind, CoeffKind::Sine) as u64;
    crate::experiment::mix_seed(seed, &[0x51AE, tag])
}

/// Estimates all 2K+1 density coefficients on the default L = 10 interval
/// and prices the put.
pub fn pipeline_method3(
    market: &MarketParams,
    n_terms: usize,
    config: &QaeConfig,
    seed: u64,
) -> Result<QamcPrice, QamcError> {
    let interval = market::truncation_interval(market, market::DEFAULT_TRUNCATION_WIDTH)?;
    pipeline_method3_on(market, interval, n_terms, DEFAULT_GRID_POINTS, config, seed)
}

pub fn pipeline_method3_on(
    market: &MarketParams,
    interval: Interval,
    n_terms: usize,
    grid_points: usize,
    config: &QaeConfig,
    seed: u64,
) -> Result<QamcPrice, QamcError> {
    let targets = discretized_coeffs(market, interval, n_terms, grid_points)?;
    let mut a = vec![0.0; n_terms + 1];
    let mut b = vec![0.0; n_terms];
    let mut records = Vec::with_capacity(targets.len());
    let mut total_shots = 0;
    for t in &targets {
        let r = mrqae_estimate(t, config, coefficient_seed(seed, t.k, t.kind))?;
        match t.kind {
            CoeffKind::Cosine => a[t.k] = r.estimate,
            CoeffKind::Sine => b[t.k - 1] = r.estimate,
        }
        total_shots += r.total_shots;
        records.push(ShotRecord {
            k: t.k,
            kind: t.kind,
            true_value: t.true_value,
            estimate: r.estimate,
            shots: r.total_shots,
            rounds: r.rounds,
            converged: r.converged,
        });
    }
    let series = FourierSeries::new(a, b, interval, interval.width())?;
    let payoff = fourier::payoff_coeffs_pdf(market, interval, n_terms);
    let price = fourier::price_pdf(&series, &payoff, market)?;
    Ok(QamcPrice {
        price,
        series,
        total_shots,
        records,
    })
}
