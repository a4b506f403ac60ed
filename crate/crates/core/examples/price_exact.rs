//! Prices the put three ways: closed form, and the two Fourier pricers fed
//! exact density and distribution-function coefficients.
//!
//! cargo run --release --example price_exact -- [n_terms]

use qfourier::experiment::{self, MarketOverrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n_terms = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(64);
    let report = experiment::cmd_price_exact(&MarketOverrides::default(), &[90.0, 100.0, 110.0], n_terms)?;
    println!("{report}");
    Ok(())
}
