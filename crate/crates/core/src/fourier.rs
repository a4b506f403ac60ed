//! Truncated trigonometric series, DFT coefficient extraction, payoff
//! coefficients of the European put and the two coefficient-pairing pricers.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::market::MarketParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FourierError {
    #[error("interval needs a < b, got [{0}, {1}]")]
    BadInterval(f64, f64),
    #[error("period {period} is neither b-a nor 2(b-a) for [{a}, {b}]")]
    BadPeriod { period: f64, a: f64, b: f64 },
    #[error("coefficient arrays have lengths {a_len}/{b_len}, expected {expected}/{}", expected - 1)]
    CoeffLength {
        a_len: usize,
        b_len: usize,
        expected: usize,
    },
    #[error("DFT grid of {grid} points cannot resolve {n_terms} terms (need at least {})", 2 * n_terms + 1)]
    GridTooSmall { grid: usize, n_terms: usize },
    #[error("evaluator produced complex residue {0:e} (non-real or non-finite samples)")]
    ComplexResidue(f64),
    #[error("series and payoff coefficients live on different intervals")]
    IntervalMismatch,
    #[error("series period {got} does not fit the {method} pricer (expected {expected})")]
    PeriodMismatch {
        method: &'static str,
        got: f64,
        expected: f64,
    },
    #[error("payoff coefficients are for the {0} method")]
    WrongVariant(&'static str),
    #[error("payoff kink at {c} lies outside [{a}, {b}]")]
    SplitOutside { c: f64, a: f64, b: f64 },
    #[error("malformed series record: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, FourierError> {
        if a < b && a.is_finite() && b.is_finite() {
            Ok(Self { a, b })
        } else {
            Err(FourierError::BadInterval(a, b))
        }
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// [â, b̂] = [(3a−b)/2, (3b−a)/2], twice as wide and centred on the same point.
    pub fn extended(&self) -> Interval {
        Interval {
            a: 0.5 * (3.0 * self.a - self.b),
            b: 0.5 * (3.0 * self.b - self.a),
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        self.a <= y && y <= self.b
    }

    fn approx_eq(&self, other: &Interval) -> bool {
        let tol = 1e-9 * self.width().max(1.0);
        (self.a - other.a).abs() <= tol && (self.b - other.b).abs() <= tol
    }
}

/// A_0/2 + Σ_k [A_k cos(2πk(y−α)/P) + B_k sin(2πk(y−α)/P)], where the anchor α
/// is `a` for period b−a and â for period 2(b−a).
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    a_coeffs: Vec<f64>,
    b_coeffs: Vec<f64>,
    interval: Interval,
    period: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodKind {
    /// period b−a anchored at a (density series)
    Single,
    /// period 2(b−a) anchored at â (distribution-function series)
    Double,
}

fn period_kind(interval: &Interval, period: f64) -> Result<PeriodKind, FourierError> {
    let w = interval.width();
    let tol = 1e-9 * w;
    if (period - w).abs() <= tol {
        Ok(PeriodKind::Single)
    } else if (period - 2.0 * w).abs() <= tol {
        Ok(PeriodKind::Double)
    } else {
        Err(FourierError::BadPeriod {
            period,
            a: interval.a,
            b: interval.b,
        })
    }
}

impl FourierSeries {
    pub fn new(
        a_coeffs: Vec<f64>,
        b_coeffs: Vec<f64>,
        interval: Interval,
        period: f64,
    ) -> Result<Self, FourierError> {
        if a_coeffs.is_empty() || b_coeffs.len() + 1 != a_coeffs.len() {
            return Err(FourierError::CoeffLength {
                a_len: a_coeffs.len(),
                b_len: b_coeffs.len(),
                expected: a_coeffs.len().max(1),
            });
        }
        period_kind(&interval, period)?;
        Ok(Self {
            a_coeffs,
            b_coeffs,
            interval,
            period,
        })
    }

    pub fn zeros(n_terms: usize, interval: Interval, kind: PeriodKind) -> Self {
        let period = match kind {
            PeriodKind::Single => interval.width(),
            PeriodKind::Double => 2.0 * interval.width(),
        };
        Self {
            a_coeffs: vec![0.0; n_terms + 1],
            b_coeffs: vec![0.0; n_terms],
            interval,
            period,
        }
    }

    pub fn n_terms(&self) -> usize {
        self.b_coeffs.len()
    }

    /// A_0 … A_𝒦.
    pub fn a_coeffs(&self) -> &[f64] {
        &self.a_coeffs
    }

    /// B_1 … B_𝒦.
    pub fn b_coeffs(&self) -> &[f64] {
        &self.b_coeffs
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn kind(&self) -> PeriodKind {
        period_kind(&self.interval, self.period).expect("validated at construction")
    }

    pub fn anchor(&self) -> f64 {
        match self.kind() {
            PeriodKind::Single => self.interval.a,
            PeriodKind::Double => self.interval.extended().a,
        }
    }

    /// Drops terms above `n_terms`.
    pub fn truncated(&self, n_terms: usize) -> Self {
        let k = n_terms.min(self.n_terms());
        Self {
            a_coeffs: self.a_coeffs[..=k].to_vec(),
            b_coeffs: self.b_coeffs[..k].to_vec(),
            ..*self
        }
    }
}

/// Evaluates the series at `y` (periodic, so `y` may lie anywhere).
pub fn eval_series(series: &FourierSeries, y: f64) -> f64 {
    let w = 2.0 * PI * (y - series.anchor()) / series.period;
    let mut acc = 0.5 * series.a_coeffs[0];
    for k in 1..=series.n_terms() {
        let (s, c) = (k as f64 * w).sin_cos();
        acc += series.a_coeffs[k] * c + series.b_coeffs[k - 1] * s;
    }
    acc
}

/// Term-wise derivative in y.
pub fn differentiate_series(series: &FourierSeries) -> FourierSeries {
    let mut a = vec![0.0; series.n_terms() + 1];
    let mut b = vec![0.0; series.n_terms()];
    for k in 1..=series.n_terms() {
        let w = 2.0 * PI * k as f64 / series.period;
        a[k] = w * series.b_coeffs[k - 1];
        b[k - 1] = -w * series.a_coeffs[k];
    }
    FourierSeries {
        a_coeffs: a,
        b_coeffs: b,
        ..*series
    }
}

/// Series together with the largest coefficient magnitude the grid saw above
/// the requested truncation; a nonzero value means the evaluator was not
/// bandlimited to `n_terms`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub series: FourierSeries,
    pub out_of_band: f64,
}

/// Default DFT grid for `n_terms` coefficients.
pub fn default_grid(n_terms: usize) -> usize {
    4 * n_terms + 1
}

/// Complex DFT coefficients c_k for k = 0..=k_max of samples over one period.
fn dft_coefficients(samples: &[f64], k_max: usize) -> Vec<(f64, f64)> {
    let n = samples.len();
    (0..=k_max)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, &f) in samples.iter().enumerate() {
                let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                let (s, c) = phase.sin_cos();
                re += f * c;
                im -= f * s;
            }
            (re / n as f64, im / n as f64)
        })
        .collect()
}

/// Samples `evaluator` on a uniform grid over one period starting at the
/// series anchor and converts the complex DFT coefficients into A_k, B_k.
pub fn extract_series_checked<F: Fn(f64) -> f64>(
    evaluator: F,
    interval: Interval,
    period: f64,
    n_terms: usize,
    grid_points: usize,
) -> Result<Extraction, FourierError> {
    if grid_points < 2 * n_terms + 1 {
        return Err(FourierError::GridTooSmall {
            grid: grid_points,
            n_terms,
        });
    }
    let mut series = FourierSeries::zeros(n_terms, interval, PeriodKind::Single);
    series.period = period;
    period_kind(&interval, period)?;
    let anchor = series.anchor();
    let h = period / grid_points as f64;
    let samples: Vec<f64> = (0..grid_points)
        .map(|j| evaluator(anchor + j as f64 * h))
        .collect();
    let scale = samples.iter().fold(1.0f64, |m, v| m.max(v.abs()));

    let k_max = (grid_points - 1) / 2;
    let c = dft_coefficients(&samples, k_max);
    // c_{-k} computed as its own sum so the real-output check means something
    let c_neg: Vec<(f64, f64)> = {
        let reversed: Vec<f64> = std::iter::once(samples[0])
            .chain(samples[1..].iter().rev().copied())
            .collect();
        dft_coefficients(&reversed, n_terms)
    };
    let mut residue = 0.0f64;
    for k in 0..=n_terms {
        // A_k = c_k + c_{-k},  B_k = i (c_k − c_{-k})
        let (ar, ai) = (c[k].0 + c_neg[k].0, c[k].1 + c_neg[k].1);
        let (br, bi) = (-(c[k].1 - c_neg[k].1), c[k].0 - c_neg[k].0);
        residue = residue.max(ai.abs()).max(bi.abs());
        if k == 0 {
            series.a_coeffs[0] = ar;
        } else {
            series.a_coeffs[k] = ar;
            series.b_coeffs[k - 1] = br;
        }
    }
    if !(residue <= 1e-10 * scale) {
        return Err(FourierError::ComplexResidue(residue));
    }
    let out_of_band = c[n_terms + 1..]
        .iter()
        .map(|(re, im)| re.hypot(*im))
        .fold(0.0, f64::max);
    Ok(Extraction {
        series,
        out_of_band,
    })
}

/// [`extract_series_checked`] that logs a warning when the evaluator leaks
/// energy above `n_terms`.
pub fn extract_series<F: Fn(f64) -> f64>(
    evaluator: F,
    interval: Interval,
    period: f64,
    n_terms: usize,
    grid_points: usize,
) -> Result<FourierSeries, FourierError> {
    let ex = extract_series_checked(evaluator, interval, period, n_terms, grid_points)?;
    let scale = ex.series.a_coeffs[0].abs().max(1.0);
    if ex.out_of_band > 1e-8 * scale {
        log::warn!(
            "evaluator is not bandlimited to {} terms: out-of-band magnitude {:e}",
            n_terms,
            ex.out_of_band
        );
    }
    Ok(ex.series)
}

impl fmt::Display for FourierSeries {
    /// Flat record: n_terms, a, b, period, A_0…A_𝒦, B_1…B_𝒦, one per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n_terms())?;
        for v in [self.interval.a, self.interval.b, self.period]
            .iter()
            .chain(&self.a_coeffs)
            .chain(&self.b_coeffs)
        {
            writeln!(f, "{v:.16e}")?;
        }
        Ok(())
    }
}

impl FromStr for FourierSeries {
    type Err = FourierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut tokens = s.split_whitespace();
        let n_terms: usize = tokens
            .next()
            .ok_or_else(|| FourierError::Parse("empty record".into()))?
            .parse()
            .map_err(|e| FourierError::Parse(format!("n_terms: {e}")))?;
        let values = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| FourierError::Parse(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let expected = 3 + 2 * n_terms + 1;
        if values.len() != expected {
            return Err(FourierError::Parse(format!(
                "expected {expected} numbers after n_terms, found {}",
                values.len()
            )));
        }
        let interval = Interval::new(values[0], values[1])?;
        let a = values[3..4 + n_terms].to_vec();
        let b = values[4 + n_terms..].to_vec();
        FourierSeries::new(a, b, interval, values[2])
    }
}

/// Payoff-side coefficients paired with a density or distribution series.
#[derive(Debug, Clone, PartialEq)]
pub enum PayoffCoeffs {
    /// C_k, D_k of h on [a, b] (period b−a); `d[0]` is always 0.
    Pdf {
        interval: Interval,
        c: Vec<f64>,
        d: Vec<f64>,
    },
    /// Integrals of h′ against the period-2(b−a) basis on [a, c] and [c, b],
    /// plus the boundary payoff values h(a), h(b).
    Cdf {
        interval: Interval,
        split: f64,
        c_a: Vec<f64>,
        d_a: Vec<f64>,
        c_b: Vec<f64>,
        d_b: Vec<f64>,
        h_a: f64,
        h_b: f64,
    },
}

impl PayoffCoeffs {
    pub fn interval(&self) -> Interval {
        match self {
            PayoffCoeffs::Pdf { interval, .. } | PayoffCoeffs::Cdf { interval, .. } => *interval,
        }
    }

    pub fn n_terms(&self) -> usize {
        match self {
            PayoffCoeffs::Pdf { c, .. } => c.len() - 1,
            PayoffCoeffs::Cdf { c_a, .. } => c_a.len() - 1,
        }
    }
}

/// ∫ e^y cos(ω(y−α)) and ∫ e^y sin(ω(y−α)) over [lo, hi].
fn exp_trig(omega: f64, alpha: f64, lo: f64, hi: f64) -> (f64, f64) {
    let prim = |y: f64| {
        let (s, c) = (omega * (y - alpha)).sin_cos();
        let e = y.exp() / (1.0 + omega * omega);
        (e * (c + omega * s), e * (s - omega * c))
    };
    let (c1, s1) = prim(hi);
    let (c0, s0) = prim(lo);
    (c1 - c0, s1 - s0)
}

/// ∫ cos(ω(y−α)) and ∫ sin(ω(y−α)) over [lo, hi].
fn plain_trig(omega: f64, alpha: f64, lo: f64, hi: f64) -> (f64, f64) {
    if omega == 0.0 {
        return (hi - lo, 0.0);
    }
    let (s1, c1) = (omega * (hi - alpha)).sin_cos();
    let (s0, c0) = (omega * (lo - alpha)).sin_cos();
    ((s1 - s0) / omega, -(c1 - c0) / omega)
}

/// Put payoff in log-moneyness: h(y) = K·max(1 − e^y, 0).
pub fn put_payoff(strike: f64, y: f64) -> f64 {
    strike * (1.0 - y.exp()).max(0.0)
}

/// Closed-form C_k, D_k of the put on [a, b], k = 0..=n_terms.
pub fn payoff_coeffs_pdf(market: &MarketParams, interval: Interval, n_terms: usize) -> PayoffCoeffs {
    let (a, b) = (interval.a, interval.b);
    let top = b.min(0.0);
    let mut c = vec![0.0; n_terms + 1];
    let mut d = vec![0.0; n_terms + 1];
    if top > a {
        let norm = 2.0 * market.strike / (b - a);
        for k in 0..=n_terms {
            let omega = 2.0 * PI * k as f64 / (b - a);
            let (pc, ps) = plain_trig(omega, a, a, top);
            let (ec, es) = exp_trig(omega, a, a, top);
            c[k] = norm * (pc - ec);
            d[k] = if k == 0 { 0.0 } else { norm * (ps - es) };
        }
    }
    PayoffCoeffs::Pdf { interval, c, d }
}

/// Closed-form C_k^a, D_k^a, C_k^b, D_k^b of the put against the period-2(b−a)
/// basis anchored at â. The kink sits at y = 0.
pub fn payoff_coeffs_cdf(
    market: &MarketParams,
    interval: Interval,
    n_terms: usize,
) -> Result<PayoffCoeffs, FourierError> {
    let (a, b) = (interval.a, interval.b);
    let split = 0.0;
    if !interval.contains(split) {
        return Err(FourierError::SplitOutside { c: split, a, b });
    }
    let ext = interval.extended();
    let k_strike = market.strike;
    let mut c_a = vec![0.0; n_terms + 1];
    let mut d_a = vec![0.0; n_terms + 1];
    for k in 0..=n_terms {
        let omega = 2.0 * PI * k as f64 / ext.width();
        // h'(y) = −K e^y on [a, 0)
        let (ec, es) = exp_trig(omega, ext.a, a, split);
        c_a[k] = -k_strike * ec;
        d_a[k] = if k == 0 { 0.0 } else { -k_strike * es };
    }
    Ok(PayoffCoeffs::Cdf {
        interval,
        split,
        c_a,
        d_a,
        // h' vanishes on (0, b]
        c_b: vec![0.0; n_terms + 1],
        d_b: vec![0.0; n_terms + 1],
        h_a: put_payoff(k_strike, a),
        h_b: put_payoff(k_strike, b),
    })
}

fn paired_terms(series: &FourierSeries, c: &[f64], d: &[f64], n_terms: usize) -> f64 {
    let a = series.a_coeffs();
    let b = series.b_coeffs();
    let mut acc = 0.5 * a[0] * c[0];
    for k in 1..=n_terms {
        acc += a[k] * c[k] + b[k - 1] * d[k];
    }
    acc
}

fn common_terms(series: &FourierSeries, payoff: &PayoffCoeffs) -> usize {
    let (ks, kp) = (series.n_terms(), payoff.n_terms());
    if ks != kp {
        log::warn!("series has {ks} terms, payoff {kp}; pairing the first {}", ks.min(kp));
    }
    ks.min(kp)
}

/// V = ½(b−a)e^{−rΔt}[A_0C_0/2 + Σ(A_kC_k + B_kD_k)].
pub fn price_pdf(
    density: &FourierSeries,
    payoff: &PayoffCoeffs,
    market: &MarketParams,
) -> Result<f64, FourierError> {
    let PayoffCoeffs::Pdf { interval, c, d } = payoff else {
        return Err(FourierError::WrongVariant("cdf"));
    };
    if !density.interval.approx_eq(interval) {
        return Err(FourierError::IntervalMismatch);
    }
    if density.kind() != PeriodKind::Single {
        return Err(FourierError::PeriodMismatch {
            method: "pdf",
            got: density.period,
            expected: interval.width(),
        });
    }
    let k = common_terms(density, payoff);
    Ok(0.5 * interval.width() * market.discount() * paired_terms(density, c, d, k))
}

/// V = e^{−rΔt}[h(b)F(b) − h(a)F(a) − S_a − S_b] where S_a, S_b pair the
/// distribution series with the h′ integrals on [a, c] and [c, b].
pub fn price_cdf(
    cdf: &FourierSeries,
    payoff: &PayoffCoeffs,
    market: &MarketParams,
    f_a: f64,
    f_b: f64,
) -> Result<f64, FourierError> {
    let PayoffCoeffs::Cdf {
        interval,
        c_a,
        d_a,
        c_b,
        d_b,
        h_a,
        h_b,
        ..
    } = payoff
    else {
        return Err(FourierError::WrongVariant("pdf"));
    };
    if !cdf.interval.approx_eq(interval) {
        return Err(FourierError::IntervalMismatch);
    }
    if cdf.kind() != PeriodKind::Double {
        return Err(FourierError::PeriodMismatch {
            method: "cdf",
            got: cdf.period,
            expected: 2.0 * interval.width(),
        });
    }
    let k = common_terms(cdf, payoff);
    let left = paired_terms(cdf, c_a, d_a, k);
    let right = paired_terms(cdf, c_b, d_b, k);
    Ok(market.discount() * (h_b * f_b - h_a * f_a - left - right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    fn unit() -> Interval {
        Interval::new(-1.5, 2.0).unwrap()
    }

    #[test]
    fn constant_evaluator() {
        let s = extract_series(|_| 1.0, unit(), 3.5, 8, default_grid(8)).unwrap();
        assert!((s.a_coeffs()[0] - 2.0).abs() < 1e-14);
        assert!(s.a_coeffs()[1..].iter().all(|v| v.abs() < 1e-14));
        assert!(s.b_coeffs().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn basis_functions() {
        let iv = unit();
        let w = iv.width();
        let s = extract_series(
            |y| (2.0 * PI * (y - iv.a) / w).cos(),
            iv,
            w,
            5,
            default_grid(5),
        )
        .unwrap();
        assert!((s.a_coeffs()[1] - 1.0).abs() < 1e-12);
        let others = s.a_coeffs().iter().enumerate().filter(|(k, _)| *k != 1);
        assert!(others.map(|(_, v)| v.abs()).fold(0.0, f64::max) < 1e-12);
        assert!(s.b_coeffs().iter().all(|v| v.abs() < 1e-12));

        let s = extract_series(
            |y| (2.0 * PI * 3.0 * (y - iv.a) / w).sin(),
            iv,
            w,
            5,
            default_grid(5),
        )
        .unwrap();
        assert!((s.b_coeffs()[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_period_anchor() {
        let iv = unit();
        let ext = iv.extended();
        let s = extract_series(
            |y| (2.0 * PI * (y - ext.a) / ext.width()).sin(),
            iv,
            2.0 * iv.width(),
            3,
            13,
        )
        .unwrap();
        assert_eq!(s.kind(), PeriodKind::Double);
        assert!((s.b_coeffs()[0] - 1.0).abs() < 1e-12);
        assert!((eval_series(&s, 0.3) - (2.0 * PI * (0.3 - ext.a) / ext.width()).sin()).abs() < 1e-12);
    }

    #[test]
    fn grid_too_small() {
        assert_eq!(
            extract_series(|_| 0.0, unit(), 3.5, 4, 8),
            Err(FourierError::GridTooSmall { grid: 8, n_terms: 4 })
        );
    }

    #[test]
    fn out_of_band_energy_is_reported() {
        let iv = unit();
        let ex = extract_series_checked(
            |y| (2.0 * PI * 6.0 * (y - iv.a) / iv.width()).cos(),
            iv,
            iv.width(),
            3,
            default_grid(3),
        )
        .unwrap();
        assert!((ex.out_of_band - 0.5).abs() < 1e-12);
    }

    #[test]
    fn eval_and_periodicity() {
        let iv = unit();
        let s = FourierSeries::new(vec![2.0, 0.3, -0.2], vec![0.1, 0.7], iv, iv.width()).unwrap();
        let only_a0 = FourierSeries::new(vec![2.0, 0.0], vec![0.0], iv, iv.width()).unwrap();
        assert!((eval_series(&only_a0, 0.77) - 1.0).abs() < 1e-15);
        assert!((eval_series(&s, iv.a) - eval_series(&s, iv.a + s.period())).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_terms() {
        let iv = unit();
        let s = FourierSeries::new(vec![3.0, 0.0, 0.0], vec![0.0, 1.0], iv, iv.width()).unwrap();
        let d = differentiate_series(&s);
        let w = 2.0 * PI * 2.0 / iv.width();
        assert!((d.a_coeffs()[2] - w).abs() < 1e-14);
        assert_eq!(d.a_coeffs()[0], 0.0);
        assert!(d.b_coeffs().iter().all(|v| *v == 0.0));
        let c = FourierSeries::new(vec![5.0], vec![], iv, iv.width()).unwrap();
        assert!(differentiate_series(&c).a_coeffs().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn record_round_trip() {
        let iv = unit();
        let s = FourierSeries::new(vec![0.1, 1e-17, -3.5], vec![PI, -0.0], iv, 2.0 * iv.width())
            .unwrap();
        let back: FourierSeries = s.to_string().parse().unwrap();
        assert_eq!(s, back);
        assert!("3\n0\n1".parse::<FourierSeries>().is_err());
        assert!("x".parse::<FourierSeries>().is_err());
    }

    #[test]
    fn series_validation() {
        let iv = unit();
        assert!(FourierSeries::new(vec![1.0], vec![1.0], iv, iv.width()).is_err());
        assert!(FourierSeries::new(vec![1.0], vec![], iv, 1.3 * iv.width()).is_err());
        assert!(Interval::new(1.0, 1.0).is_err());
    }

    #[test]
    fn put_coeffs_vanish_when_strike_below_interval() {
        let m = MarketParams::paper(100.0);
        let iv = Interval::new(0.1, 2.0).unwrap();
        let PayoffCoeffs::Pdf { c, d, .. } = payoff_coeffs_pdf(&m, iv, 10) else {
            unreachable!()
        };
        assert!(c.iter().chain(&d).all(|v| *v == 0.0));
        assert!(payoff_coeffs_cdf(&m, iv, 10).is_err());
    }

    #[test]
    fn put_cdf_coeffs_k0_and_right_side() {
        let m = MarketParams::paper(100.0);
        let iv = Interval::new(-2.0, 1.5).unwrap();
        let PayoffCoeffs::Cdf { c_a, c_b, d_b, h_a, h_b, .. } = payoff_coeffs_cdf(&m, iv, 16).unwrap()
        else {
            unreachable!()
        };
        assert!((c_a[0] + 100.0 * (1.0 - (-2.0f64).exp())).abs() < 1e-12);
        assert!(c_b.iter().chain(&d_b).all(|v| *v == 0.0));
        assert!((h_a - 100.0 * (1.0 - (-2.0f64).exp())).abs() < 1e-12);
        assert_eq!(h_b, 0.0);
    }

    #[test]
    fn put_pdf_c0_against_quadrature() {
        let m = MarketParams::paper(100.0);
        let iv = Interval::new(-2.43125, 2.56875).unwrap();
        let PayoffCoeffs::Pdf { c, .. } = payoff_coeffs_pdf(&m, iv, 0) else {
            unreachable!()
        };
        let q = 2.0 / iv.width() * integrate(|y| 100.0 * (1.0 - y.exp()), iv.a, 0.0, 1e-14).unwrap();
        assert!((c[0] - q).abs() < 1e-12);
    }

    #[test]
    fn pricer_contract_checks() {
        let m = MarketParams::paper(100.0);
        let iv = Interval::new(-2.0, 1.5).unwrap();
        let zero = FourierSeries::zeros(4, iv, PeriodKind::Single);
        let pdf = payoff_coeffs_pdf(&m, iv, 4);
        assert_eq!(price_pdf(&zero, &pdf, &m).unwrap(), 0.0);
        let cdf = payoff_coeffs_cdf(&m, iv, 4).unwrap();
        assert_eq!(price_pdf(&zero, &cdf, &m), Err(FourierError::WrongVariant("cdf")));
        assert!(matches!(
            price_cdf(&zero, &cdf, &m, 0.0, 1.0),
            Err(FourierError::PeriodMismatch { .. })
        ));
        let other = payoff_coeffs_pdf(&m, Interval::new(-2.0, 1.6).unwrap(), 4);
        assert_eq!(price_pdf(&zero, &other, &m), Err(FourierError::IntervalMismatch));
        // differing term counts pair the common prefix
        let short = payoff_coeffs_pdf(&m, iv, 2);
        assert_eq!(price_pdf(&zero, &short, &m).unwrap(), 0.0);
    }

    #[test]
    fn constant_payoff_through_cdf_pricer() {
        let m = MarketParams::paper(100.0);
        let iv = Interval::new(-2.0, 1.5).unwrap();
        let h0 = 7.0;
        let payoff = PayoffCoeffs::Cdf {
            interval: iv,
            split: 0.0,
            c_a: vec![0.0; 5],
            d_a: vec![0.0; 5],
            c_b: vec![0.0; 5],
            d_b: vec![0.0; 5],
            h_a: h0,
            h_b: h0,
        };
        let s = FourierSeries::zeros(4, iv, PeriodKind::Double);
        let v = price_cdf(&s, &payoff, &m, 1e-12, 1.0 - 1e-12).unwrap();
        assert!((v - h0 * m.discount()).abs() < 1e-10);
    }
}
