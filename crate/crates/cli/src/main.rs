//! `cbsel` — experiment pipeline for UE-assisted adaptive codebook
//! selection: dataset generation, predictor training/evaluation, feature
//! importance analysis, policy evaluation and SVG plots.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 data-format error,
//! 3 numerical failure.

use cbsel_core::config::ExperimentConfig;
use cbsel_core::dataset_io::FeatureGroups;
use cbsel_core::pipeline::{
    cmd_dataset, cmd_eval, cmd_importance, cmd_plot, cmd_select, cmd_train, loss_curve_path,
    TrainOptions,
};
use cbsel_core::Error;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cbsel", version, about = "Adaptive codebook selection laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the JSON-lines dataset (assistance features + per-codebook
    /// true AGCS labels) from a config.
    Dataset {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output dataset path (.jsonl).
        #[arg(long)]
        out: PathBuf,
        /// Override the config's global seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train the AGCS predictor on a dataset; writes the checkpoint and
    /// `<out>.loss.csv`.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Output checkpoint path.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Train on rows of this delay only (one model per regime).
        #[arg(long)]
        delta: Option<usize>,
        /// Append the delay as an extra input feature instead of filtering.
        #[arg(long)]
        delta_feature: bool,
        /// Comma-separated assistance groups to use (default all):
        /// e.g. "sdcp,fdcp".
        #[arg(long)]
        features: Option<String>,
    },
    /// Per-codebook test MSE (×10⁻³) against the label-variance baseline.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Permutation importance plus the prune-and-retrain sweep; writes
    /// `<out>.importance.csv` and `<out>.prune.csv`.
    Importance {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Output path prefix.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate both selection policies and all fixed-codebook baselines;
    /// writes `<out>.csv` and `<out>.json`.
    Select {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Output path prefix.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Use the true labels as predictions (upper bound).
        #[arg(long)]
        oracle: bool,
    },
    /// Render an SVG from a dataset (.jsonl → AGCS CDFs), a loss curve
    /// (.csv) or a policy report (.json).
    Plot {
        /// Input artifact.
        #[arg(long)]
        input: PathBuf,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
        /// For datasets: plot rows of this delay only.
        #[arg(long)]
        delta: Option<usize>,
    },
}

fn load_config(path: &PathBuf, seed: Option<u64>) -> Result<ExperimentConfig, Error> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Dataset { config, out, seed } => {
            let config = load_config(&config, seed)?;
            let rows = cmd_dataset(&config, &out)?;
            println!(
                "wrote {rows} rows ({} realizations x {} deltas) to {}",
                config.dataset_size,
                config.deltas.len(),
                out.display()
            );
        }
        Command::Train {
            config,
            dataset,
            out,
            seed,
            delta,
            delta_feature,
            features,
        } => {
            let config = load_config(&config, seed)?;
            let options = TrainOptions {
                features: match features {
                    Some(spec) => FeatureGroups::parse(&spec)?,
                    None => FeatureGroups::all(),
                },
                delta,
                delta_feature,
            };
            let (train_mse, val_mse) = cmd_train(&config, &dataset, &out, &options)?;
            match val_mse {
                Some(v) => println!(
                    "trained: final train MSE {:.3}e-3, best val MSE {:.3}e-3; checkpoint {}, curve {}",
                    train_mse * 1e3,
                    v * 1e3,
                    out.display(),
                    loss_curve_path(&out).display()
                ),
                None => println!(
                    "trained: final train MSE {:.3}e-3; checkpoint {}",
                    train_mse * 1e3,
                    out.display()
                ),
            }
        }
        Command::Eval {
            model,
            dataset,
            out,
        } => {
            let (mse, var) = cmd_eval(&model, &dataset, &out)?;
            println!("per-codebook test MSE x1e-3 (label variance in parentheses):");
            for (i, (m, v)) in mse.iter().zip(&var).enumerate() {
                println!("  output {i}: {:.3} ({:.3})", m * 1e3, v * 1e3);
            }
            println!("wrote {}", out.display());
        }
        Command::Importance {
            config,
            model,
            dataset,
            out,
            seed,
        } => {
            let config = load_config(&config, seed)?;
            let importance = cmd_importance(&config, &model, &dataset, &out)?;
            let max = importance.iter().cloned().fold(f64::MIN, f64::max);
            println!(
                "computed importance for {} features (max {:.3}e-3); wrote {}.importance.csv and {}.prune.csv",
                importance.len(),
                max * 1e3,
                out.display(),
                out.display()
            );
        }
        Command::Select {
            config,
            model,
            dataset,
            out,
            seed,
            oracle,
        } => {
            let config = load_config(&config, seed)?;
            let report = cmd_select(&config, &model, &dataset, &out, oracle)?;
            println!("policy results over {} rows:", report.rows_evaluated);
            for e in &report.entries {
                println!(
                    "  {:<16} mean AGCS {:.4}  p5 {:.4}  mean overhead {:>8.1} bits  ({:.1}% saved vs largest)",
                    e.name, e.mean_agcs, e.p5_agcs, e.mean_overhead_bits, e.overhead_reduction_pct
                );
            }
            println!("wrote {}.csv and {}.json", out.display(), out.display());
        }
        Command::Plot { input, out, delta } => {
            cmd_plot(&input, &out, delta)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; usage problems exit with 1.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
