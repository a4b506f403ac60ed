use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qfourier::experiment::{self, CliError, Dim, ExperimentPlan, MarketOverrides};
use qfourier::qamc::{self, CoeffKind, QaeConfig};
use qfourier::training::{self, Method, TrainingConfig, TrainingWindow};
use qfourier::{market, AnsatzSpec};

#[derive(Parser)]
#[command(name = "qfourier", version, about = "Fourier-series option pricing with quantum circuit models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form put next to both Fourier pricers with exact coefficients.
    PriceExact {
        /// Plan-style TOML; only `strikes` and `[market]` are read.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [90.0, 100.0, 110.0])]
        strikes: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        terms: usize,
    },
    /// Run a sweep plan and write the results CSV.
    Run {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides `threads` in the plan.
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides `seed_base` in the plan.
        #[arg(long)]
        seed_base: Option<u64>,
    },
    /// Turn a results CSV into per-(method, strike, dim) plot series.
    Plotdata {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value = "plotdata")]
        out_dir: PathBuf,
    },
    /// Train a single model and price with it.
    Train {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, default_value_t = 100.0)]
        strike: f64,
        #[arg(long, default_value = "7x7")]
        dim: Dim,
        /// Training points (I) or samples (II); defaults to the method's.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        epochs: Option<usize>,
        /// Method II: fit with the model period equal to the data window.
        #[arg(long)]
        base_window: bool,
        /// Write the trained model record here.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Estimate one density coefficient with the simulated amplitude estimator.
    Qamc {
        #[arg(long, default_value_t = 100.0)]
        strike: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Cos)]
        kind: KindArg,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        gamma: f64,
        #[arg(long, default_value_t = QaeConfig::default().shots_per_round)]
        shots_per_round: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum KindArg {
    Cos,
    Sin,
}

#[derive(serde::Deserialize)]
struct PriceExactConfig {
    strikes: Option<Vec<f64>>,
    #[serde(default)]
    market: MarketOverrides,
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::PriceExact { config, strikes, terms } => {
            let (strikes, market) = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
                    let cfg: PriceExactConfig =
                        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                    (cfg.strikes.unwrap_or(strikes), cfg.market)
                }
                None => (strikes, MarketOverrides::default()),
            };
            println!("{}", experiment::cmd_price_exact(&market, &strikes, terms)?);
        }
        Command::Run {
            plan,
            out,
            threads,
            seed_base,
        } => {
            let mut plan = ExperimentPlan::load(&plan)?;
            if let Some(t) = threads {
                plan.threads = t;
            }
            if let Some(s) = seed_base {
                plan.seed_base = s;
            }
            let rows = experiment::cmd_run(&plan, &out)?;
            let failed = rows.iter().filter(|r| r.seed.is_some() && r.status != "ok").count();
            eprintln!("wrote {} rows to {} ({failed} failed cells)", rows.len(), out.display());
        }
        Command::Plotdata { csv, out_dir } => {
            for path in experiment::cmd_plotdata(&csv, &out_dir)? {
                println!("{}", path.display());
            }
        }
        Command::Train {
            method,
            strike,
            dim,
            size,
            seed,
            epochs,
            base_window,
            save,
        } => {
            let method = match method {
                MethodArg::I => Method::DensityFit,
                MethodArg::II => Method::CdfFit,
            };
            let defaults = TrainingConfig::for_method(method);
            let config = TrainingConfig {
                n_train: size.unwrap_or(defaults.n_train),
                epochs: epochs.unwrap_or(defaults.epochs),
                seed,
                window: if base_window {
                    TrainingWindow::Base
                } else {
                    TrainingWindow::Extended
                },
                ..defaults
            };
            let m = MarketOverrides::default().market(strike);
            let spec = AnsatzSpec::new(dim.n_qubits, dim.n_layers).map_err(config_err)?;
            let trained = training::train(method, &m, &spec, &config).map_err(config_err)?;
            let priced = training::price_with_model(method, &trained, &m).map_err(config_err)?;
            let exact = market::analytic_put_price(&m);
            println!(
                "final loss {:.6e}\nprice {:.8} (Black-Scholes {exact:.8}, rel error {:.3e})",
                trained.loss_history.last().copied().unwrap_or(f64::NAN),
                priced.price,
                (priced.price - exact).abs() / exact
            );
            if let Some(path) = save {
                std::fs::write(&path, trained.to_string()).map_err(|e| CliError::Io { path, source: e })?;
            }
        }
        Command::Qamc {
            strike,
            k,
            kind,
            epsilon,
            gamma,
            shots_per_round,
            seed,
        } => {
            let m = MarketOverrides::default().market(strike);
            let iv = market::truncation_interval(&m, market::DEFAULT_TRUNCATION_WIDTH).map_err(config_err)?;
            let targets = qamc::discretized_coeffs(&m, iv, k.max(1), qamc::DEFAULT_GRID_POINTS).map_err(config_err)?;
            let kind = if kind == KindArg::Cos { CoeffKind::Cosine } else { CoeffKind::Sine };
            let target = targets
                .iter()
                .find(|t| t.k == k && t.kind == kind)
                .ok_or_else(|| CliError::Config("sine coefficients start at k = 1".into()))?;
            let config = QaeConfig {
                epsilon,
                gamma,
                shots_per_round,
                ..QaeConfig::default()
            };
            let r = qamc::mrqae_estimate(target, &config, seed).map_err(config_err)?;
            println!(
                "true {:.8e}\nestimate {:.8e} ± {:.3e}\nshots {} (circuit runs {}, rounds {}, converged {})",
                target.true_value, r.estimate, r.half_width, r.total_shots, r.circuit_runs, r.rounds, r.converged
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::new().filter_level(log::LevelFilter::Warn).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
