//! Option pricing from Fourier series learned by parametrized quantum circuits.
//!
//! The crate trains data re-uploading circuit models of a log-price density
//! (supervised, with derivative labels) or of its distribution function
//! (from raw samples), reads their trigonometric coefficients off with a DFT,
//! and prices European puts by pairing them with closed-form payoff
//! coefficients. A statistically simulated sign-aware amplitude estimator
//! provides the shot-counted quantum Monte Carlo baseline.
//!
//! Module map:
//!
//! - [`statevec`]: pure-state simulator (RX, RY, RZ, CNOT) with adjoint gradients
//! - [`ansatz`]: the circuit model, parameter-shift derivatives
//! - [`fourier`]: series, DFT extraction, payoff coefficients, pricers
//! - [`market`]: Black–Scholes law, sampling, reference coefficients
//! - [`training`]: datasets, losses, Adam, training pipelines
//! - [`qamc`]: amplitude-estimation benchmark with shot accounting
//! - [`experiment`]: sweep plans, CSV results, plot series

pub mod ansatz;
pub mod experiment;
pub mod fourier;
pub mod market;
pub mod qamc;
pub mod quadrature;
pub mod statevec;
pub mod training;

pub use ansatz::{AnsatzSpec, ParamVector};
pub use fourier::{FourierSeries, Interval, PayoffCoeffs};
pub use market::MarketParams;
