//! Trains the distribution-function model from raw samples and prices puts.
//!
//! cargo run --release --example train_method2 -- [n_samples] [seed]

use qfourier::training::{self, Method, TrainingConfig};
use qfourier::{market, AnsatzSpec, MarketParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n_train = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10_000);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let spec = AnsatzSpec::new(7, 7)?;
    let config = TrainingConfig {
        n_train,
        seed,
        ..TrainingConfig::method2()
    };
    for strike in [90.0, 100.0, 110.0] {
        let m = MarketParams::paper(strike);
        let trained = training::train(Method::CdfFit, &m, &spec, &config)?;
        let priced = training::price_with_model(Method::CdfFit, &trained, &m)?;
        let exact = market::analytic_put_price(&m);
        let r = trained.rescale;
        let worst = (0..=200)
            .map(|i| -0.9 * std::f64::consts::PI * (1.0 - i as f64 / 100.0))
            .map(|x| (trained.value(x) - market::cdf(&m, r.to_market(x))).abs())
            .fold(0.0, f64::max);
        println!(
            "K={strike:>5}  loss {:.3e} -> {:.3e}  max cdf err {worst:.3e}  price {:.4} (exact {exact:.4}, rel err {:.2}%)",
            trained.loss_history[0],
            trained.loss_history.last().copied().unwrap_or(f64::NAN),
            priced.price,
            100.0 * (priced.price - exact).abs() / exact
        );
    }
    Ok(())
}
