//! Black–Scholes model in log-moneyness coordinates y = log(S_T / K).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use thiserror::Error;

use crate::fourier::{FourierSeries, Interval};
use crate::quadrature::{integrate, QuadratureError};

/// Smallest truncation width (in standard deviations) accepted.
pub const MIN_TRUNCATION_WIDTH: f64 = 1.0;
pub const DEFAULT_TRUNCATION_WIDTH: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarketError {
    #[error("invalid market parameter: {0}")]
    Invalid(&'static str),
    #[error("truncation width {0} below the minimum of {MIN_TRUNCATION_WIDTH}")]
    NarrowTruncation(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Deserialize, serde::Serialize)]
pub struct MarketParams {
    pub s0: f64,
    pub r: f64,
    pub sigma: f64,
    pub maturity: f64,
    pub strike: f64,
    #[serde(default)]
    pub t0: f64,
}

impl MarketParams {
    pub fn new(
        s0: f64,
        r: f64,
        sigma: f64,
        maturity: f64,
        strike: f64,
        t0: f64,
    ) -> Result<Self, MarketError> {
        let m = Self {
            s0,
            r,
            sigma,
            maturity,
            strike,
            t0,
        };
        m.validate()?;
        Ok(m)
    }

    /// S₀ = 100, r = 0.1, σ = 0.25, T = 1, t₀ = 0.
    pub fn paper(strike: f64) -> Self {
        Self {
            s0: 100.0,
            r: 0.1,
            sigma: 0.25,
            maturity: 1.0,
            strike,
            t0: 0.0,
        }
    }

    pub fn with_strike(self, strike: f64) -> Self {
        Self { strike, ..self }
    }

    pub fn validate(&self) -> Result<(), MarketError> {
        let all_finite = [self.s0, self.r, self.sigma, self.maturity, self.strike, self.t0]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(MarketError::Invalid("non-finite value"));
        }
        if self.s0 <= 0.0 {
            return Err(MarketError::Invalid("s0 must be positive"));
        }
        if self.sigma <= 0.0 {
            return Err(MarketError::Invalid("sigma must be positive"));
        }
        if self.strike <= 0.0 {
            return Err(MarketError::Invalid("strike must be positive"));
        }
        if !(self.maturity > self.t0 && self.t0 >= 0.0) {
            return Err(MarketError::Invalid("need maturity > t0 >= 0"));
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.maturity - self.t0
    }

    pub fn discount(&self) -> f64 {
        (-self.r * self.horizon()).exp()
    }

    pub fn law(&self) -> LogPriceLaw {
        let tau = self.horizon();
        LogPriceLaw {
            mean: (self.s0 / self.strike).ln() + (self.r - 0.5 * self.sigma * self.sigma) * tau,
            variance: self.sigma * self.sigma * tau,
        }
    }
}

/// Normal law of log(S_T/K).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPriceLaw {
    pub mean: f64,
    pub variance: f64,
}

impl LogPriceLaw {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    fn normal(&self) -> Normal {
        Normal::new(self.mean, self.std_dev()).expect("positive variance")
    }
}

/// [mean − L·σ√τ, mean + L·σ√τ].
pub fn truncation_interval(market: &MarketParams, width: f64) -> Result<Interval, MarketError> {
    if !(width >= MIN_TRUNCATION_WIDTH) {
        return Err(MarketError::NarrowTruncation(width));
    }
    let law = market.law();
    let half = width * law.std_dev();
    Ok(Interval::new(law.mean - half, law.mean + half).expect("positive width"))
}

pub fn pdf(market: &MarketParams, y: f64) -> f64 {
    market.law().normal().pdf(y)
}

/// Slope of the density.
pub fn pdf_derivative(market: &MarketParams, y: f64) -> f64 {
    let law = market.law();
    -(y - law.mean) / law.variance * pdf(market, y)
}

pub fn cdf(market: &MarketParams, y: f64) -> f64 {
    market.law().normal().cdf(y)
}

/// `count` i.i.d. log-prices by inverse-CDF transform of ChaCha20 uniforms.
pub fn sample(market: &MarketParams, count: usize, seed: u64) -> Vec<f64> {
    let normal = market.law().normal();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            // open interval (0, 1)
            let u: f64 = loop {
                let u: f64 = rng.random();
                if u > 0.0 {
                    break u;
                }
            };
            normal.inverse_cdf(u)
        })
        .collect()
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

fn d1_d2(market: &MarketParams) -> (f64, f64) {
    let tau = market.horizon();
    let vol = market.sigma * tau.sqrt();
    let d1 = ((market.s0 / market.strike).ln() + (market.r + 0.5 * market.sigma * market.sigma) * tau)
        / vol;
    (d1, d1 - vol)
}

/// Closed-form Black–Scholes put value at t₀.
pub fn analytic_put_price(market: &MarketParams) -> f64 {
    let (d1, d2) = d1_d2(market);
    market.strike * market.discount() * std_normal_cdf(-d2) - market.s0 * std_normal_cdf(-d1)
}

pub fn analytic_call_price(market: &MarketParams) -> f64 {
    let (d1, d2) = d1_d2(market);
    market.s0 * std_normal_cdf(d1) - market.strike * market.discount() * std_normal_cdf(d2)
}

const COEFF_TOL: f64 = 1e-12;

fn trig_coeffs<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    period: f64,
    anchor: f64,
    n_terms: usize,
) -> Result<(Vec<f64>, Vec<f64>), MarketError> {
    let norm = 2.0 / period;
    let mut a = Vec::with_capacity(n_terms + 1);
    let mut b = Vec::with_capacity(n_terms);
    for k in 0..=n_terms {
        let w = 2.0 * PI * k as f64 / period;
        a.push(norm * integrate(|y| f(y) * (w * (y - anchor)).cos(), lo, hi, COEFF_TOL)?);
        if k > 0 {
            b.push(norm * integrate(|y| f(y) * (w * (y - anchor)).sin(), lo, hi, COEFF_TOL)?);
        }
    }
    Ok((a, b))
}

/// Reference density series A_k^f, B_k^f on [a, b] by adaptive quadrature.
pub fn exact_density_coeffs(
    market: &MarketParams,
    interval: Interval,
    n_terms: usize,
) -> Result<FourierSeries, MarketError> {
    let law = market.law();
    let normal = law.normal();
    // split at the mean so each panel sees one side of the bump
    let mid = law.mean.clamp(interval.a, interval.b);
    let (a1, b1) = trig_coeffs(|y| normal.pdf(y), interval.a, mid, interval.width(), interval.a, n_terms)?;
    let (a2, b2) = trig_coeffs(|y| normal.pdf(y), mid, interval.b, interval.width(), interval.a, n_terms)?;
    let a: Vec<f64> = a1.iter().zip(&a2).map(|(x, y)| x + y).collect();
    let b: Vec<f64> = b1.iter().zip(&b2).map(|(x, y)| x + y).collect();
    Ok(FourierSeries::new(a, b, interval, interval.width()).expect("consistent lengths"))
}

/// Smooth 2(b−a)-periodic extension of the distribution function used as the
/// reference for the distribution-function series: it equals F on [a, b] and
/// falls back to 0 as a Gaussian step centred on b̂ ≡ â.
pub fn extended_cdf(market: &MarketParams, interval: Interval, y: f64) -> f64 {
    let normal = market.law().normal();
    let period = 2.0 * interval.width();
    let ext = interval.extended();
    // wrap into [â, b̂)
    let u = ext.a + (y - ext.a).rem_euclid(period);
    let fall = ext.b - market.law().mean;
    [-period, 0.0, period]
        .iter()
        .map(|shift| normal.cdf(u - shift) - normal.cdf(u - shift - fall))
        .sum()
}

/// Reference distribution-function series A_k^F, B_k^F with period 2(b−a)
/// anchored at â, by adaptive quadrature of [`extended_cdf`].
pub fn exact_cdf_coeffs(
    market: &MarketParams,
    interval: Interval,
    n_terms: usize,
) -> Result<FourierSeries, MarketError> {
    let ext = interval.extended();
    let period = ext.width();
    let f = |y: f64| extended_cdf(market, interval, y);
    // panels split at the rise; the fall sits on the period boundary
    let mut cuts = vec![ext.a, market.law().mean.clamp(ext.a, ext.b), ext.b];
    cuts.dedup();
    let mut a = vec![0.0; n_terms + 1];
    let mut b = vec![0.0; n_terms];
    for w in cuts.windows(2) {
        let (pa, pb) = trig_coeffs(f, w[0], w[1], period, ext.a, n_terms)?;
        a.iter_mut().zip(&pa).for_each(|(x, y)| *x += y);
        b.iter_mut().zip(&pb).for_each(|(x, y)| *x += y);
    }
    Ok(FourierSeries::new(a, b, interval, period).expect("consistent lengths"))
}
