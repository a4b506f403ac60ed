//! Runs a sweep plan, writes the results CSV and the plot series next to it.
//!
//! cargo run --release --example sweep -- crates/core/plans/smoke.toml [out_dir]

use std::path::PathBuf;

use qfourier::experiment::{self, ExperimentPlan};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let plan_path = PathBuf::from(args.next().ok_or("usage: sweep <plan.toml> [out_dir]")?);
    let out_dir = PathBuf::from(args.next().unwrap_or_else(|| "sweep-out".into()));
    std::fs::create_dir_all(&out_dir)?;

    let plan = ExperimentPlan::load(&plan_path)?;
    println!("{} cells", plan.cells().len());
    let csv = out_dir.join("results.csv");
    let rows = experiment::cmd_run(&plan, &csv)?;
    for r in rows.iter().filter(|r| r.seed.is_none()) {
        println!(
            "{} K={} {} x={}: median rel error {:.3e} (IQR {:.3e}), median shots {:.0}",
            r.method,
            r.strike,
            r.dim,
            r.data_size_or_eps,
            r.rel_error,
            r.iqr_rel_error.unwrap_or(f64::NAN),
            r.shots
        );
    }
    for path in experiment::cmd_plotdata(&csv, &out_dir.join("plotdata"))? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
