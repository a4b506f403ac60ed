//! Shot cost of the simulated amplitude estimator and the end-to-end
//! Method III price at a few tolerances.
//!
//! cargo run --release --example qamc_benchmark -- [shots_per_round] [n_terms]

use qfourier::market;
use qfourier::qamc::{self, CoeffKind, CoeffTarget, QaeConfig};
use qfourier::MarketParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let shots_per_round = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let n_terms = args.next().map(|s| s.parse()).transpose()?.unwrap_or(25);
    let base = QaeConfig {
        shots_per_round,
        ..QaeConfig::default()
    };

    println!("single amplitude a = 0.37, 200 seeds");
    println!("{:>8} {:>12} {:>10} {:>9}", "epsilon", "mean shots", "coverage", "rounds");
    let target = CoeffTarget {
        k: 0,
        kind: CoeffKind::Cosine,
        true_value: 0.37,
        normalization: 1.0,
    };
    let mut fit = Vec::new();
    for eps in [0.08, 0.04, 0.02, 0.01, 0.001] {
        let cfg = QaeConfig { epsilon: eps, ..base };
        let runs: Vec<_> = (0..200)
            .map(|s| qamc::mrqae_estimate(&target, &cfg, s))
            .collect::<Result<_, _>>()?;
        let shots = runs.iter().map(|r| r.total_shots as f64).sum::<f64>() / 200.0;
        let covered = runs.iter().filter(|r| (r.estimate - 0.37).abs() <= eps).count();
        let rounds = runs.iter().map(|r| r.rounds as f64).sum::<f64>() / 200.0;
        println!("{eps:>8} {shots:>12.0} {:>10.3} {rounds:>9.1}", covered as f64 / 200.0);
        if eps >= 0.01 {
            fit.push((eps.ln(), shots.ln()));
        }
    }
    let n = fit.len() as f64;
    let (mx, my) = (fit.iter().map(|p| p.0).sum::<f64>() / n, fit.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / fit.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    println!("fitted shots ~ eps^{slope:.3}");

    println!("\nMethod III, K = {n_terms}, 20 seeds");
    for strike in [90.0, 100.0, 110.0] {
        let m = MarketParams::paper(strike);
        let exact = market::analytic_put_price(&m);
        for eps in [0.01, 0.001] {
            let cfg = QaeConfig { epsilon: eps, ..base };
            let mut errs = Vec::new();
            let mut shots = 0.0;
            for seed in 0..20 {
                let p = qamc::pipeline_method3(&m, n_terms, &cfg, seed)?;
                errs.push((p.price - exact).abs() / exact);
                shots += p.mean_shots_per_coefficient() / 20.0;
            }
            let within = errs.iter().filter(|e| **e <= 0.005).count();
            errs.sort_by(f64::total_cmp);
            println!(
                "K={strike:>5} eps={eps:<6} median rel err {:.3e}  within 0.5%: {within}/20  shots/coeff {shots:.0}",
                errs[10]
            );
        }
    }
    Ok(())
}
