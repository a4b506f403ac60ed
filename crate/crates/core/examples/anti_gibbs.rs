//! Distribution-function fit with the model period doubled ([−2π, 2π]) versus
//! the period equal to the data window ([−π, π]).
//!
//! A CDF does not wrap around continuously on its own support, so the
//! short-period model has to bridge a unit jump and rings near the edges.
//!
//! cargo run --release --example anti_gibbs -- [seeds] [n_samples]

use std::f64::consts::PI;

use qfourier::market;
use qfourier::training::{self, Method, TrainedModel, TrainingConfig, TrainingWindow};
use qfourier::{AnsatzSpec, MarketParams};

fn max_cdf_error(trained: &TrainedModel, m: &MarketParams) -> f64 {
    (0..=1000)
        .map(|i| -0.9 * PI + 1.8 * PI * i as f64 / 1000.0)
        .map(|x| (trained.value(x) - market::cdf(m, trained.rescale.to_market(x))).abs())
        .fold(0.0, f64::max)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);
    let n_train = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10_000);
    let m = MarketParams::paper(100.0);
    let spec = AnsatzSpec::new(5, 5)?;
    println!("{:>5} {:>14} {:>14}", "seed", "extended", "base");
    for seed in 0..seeds {
        let mut errs = Vec::new();
        for window in [TrainingWindow::Extended, TrainingWindow::Base] {
            let config = TrainingConfig {
                n_train,
                seed,
                window,
                ..TrainingConfig::method2()
            };
            let trained = training::train(Method::CdfFit, &m, &spec, &config)?;
            errs.push(max_cdf_error(&trained, &m));
        }
        println!("{seed:>5} {:>14.4e} {:>14.4e}", errs[0], errs[1]);
    }
    Ok(())
}
