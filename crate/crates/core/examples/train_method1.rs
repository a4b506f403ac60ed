//! Trains the density model on labelled points and prices puts at three strikes.
//!
//! cargo run --release --example train_method1 -- [n_train] [seed]

use qfourier::training::{self, Method, TrainingConfig};
use qfourier::{market, AnsatzSpec, MarketParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n_train = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2500);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let spec = AnsatzSpec::new(7, 7)?;
    let config = TrainingConfig {
        n_train,
        seed,
        ..TrainingConfig::method1()
    };
    for strike in [90.0, 100.0, 110.0] {
        let m = MarketParams::paper(strike);
        let trained = training::train(Method::DensityFit, &m, &spec, &config)?;
        let priced = training::price_with_model(Method::DensityFit, &trained, &m)?;
        let exact = market::analytic_put_price(&m);
        let mse = training::test_mse_density(&trained, &m, config.n_test, seed + 1);
        println!(
            "K={strike:>5}  loss {:.3e} -> {:.3e}  test mse {mse:.3e}  price {:.4} (exact {exact:.4}, rel err {:.2}%)",
            trained.loss_history[0],
            trained.loss_history.last().copied().unwrap_or(f64::NAN),
            priced.price,
            100.0 * (priced.price - exact).abs() / exact
        );
    }
    Ok(())
}
