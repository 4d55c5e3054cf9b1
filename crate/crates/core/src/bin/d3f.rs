use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use d3f_ldp::ingest::MnistPaths;
use d3f_ldp::montecarlo::Sampling;
use d3f_ldp::pipeline::{self, Data, RunConfig, DATA_DIR_ENV};

#[derive(Parser)]
#[command(
    name = "d3f",
    version,
    about = "Large-deviation analysis of a learned MNIST detector"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Train one scorer per seed and save checkpoints.
    Train,
    /// Running-mean trajectories of the aggregate statistic.
    Trajectories,
    /// Score pools and their moments.
    Characterize,
    /// Empirical, CLT and LDP error curves.
    Curves,
    /// Rate tradeoff bands across seeds and checkpoints.
    Rates,
    /// Monte Carlo error estimates and statistic histograms.
    Simulate,
    /// Check the numerical engine against closed forms.
    OracleCheck,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory holding the four MNIST IDX files.
    #[arg(long, global = true, env = DATA_DIR_ENV)]
    data_dir: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Absolute thresholds; default is five interior points between the means.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    gammas: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    ns: Option<Vec<usize>>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    checkpoints: Option<Vec<usize>>,
    #[arg(long, global = true)]
    simulation_seed: Option<u64>,
    #[arg(long, global = true, value_parser = parse_sampling)]
    sampling: Option<Sampling>,
    /// Characterize and simulate on the test split only.
    #[arg(long, global = true)]
    exclude_training: bool,
    /// Train with plain (unweighted) cross-entropy.
    #[arg(long, global = true)]
    no_class_balance: bool,
}

fn parse_sampling(s: &str) -> Result<Sampling, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| {
        format!("unknown sampling `{s}` (with-replacement, without-replacement-per-trial, disjoint-blocks)")
    })
}

fn resolve(c: Common) -> d3f_ldp::Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::from_toml_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = c.data_dir {
        cfg.data = MnistPaths::in_dir(d);
    }
    if let Some(o) = c.out {
        cfg.output_dir = o;
    }
    if let Some(s) = c.seeds {
        cfg.seeds = s;
    }
    if let Some(g) = c.gammas {
        cfg.gammas = g;
    }
    if let Some(n) = c.ns {
        cfg.ns = n;
    }
    if let Some(t) = c.trials {
        cfg.trials = t;
    }
    if let Some(e) = c.epochs {
        cfg.training.epochs = e;
    }
    if let Some(cp) = c.checkpoints {
        cfg.checkpoints = cp;
    }
    if let Some(s) = c.simulation_seed {
        cfg.simulation_seed = s;
    }
    if let Some(s) = c.sampling {
        cfg.sampling = s;
    }
    cfg.exclude_training |= c.exclude_training;
    if c.no_class_balance {
        cfg.training.class_balance = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Returns whether every check passed.
fn run(cli: Cli) -> d3f_ldp::Result<bool> {
    let cfg = resolve(cli.common)?;
    if let Command::OracleCheck = cli.command {
        let checks = pipeline::cmd_oracle_check(&cfg)?;
        for c in &checks {
            println!(
                "{} {:<28} worst {:.3e} (tol {:.0e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.worst_error,
                c.tolerance
            );
        }
        return Ok(checks.iter().all(|c| c.passed));
    }
    let data = Data::load(&cfg.data)?;
    match cli.command {
        Command::Train => {
            for p in pipeline::cmd_train(&cfg, &data)? {
                println!("{}", p.display());
            }
        }
        Command::Characterize => {
            for c in pipeline::cmd_characterize(&cfg, &data)? {
                for ch in &c.chars {
                    println!(
                        "seed {} epoch {} {}: mu {:.4} sigma {:.4} support [{:.3}, {:.3}] (n={})",
                        c.seed,
                        c.epoch,
                        ch.hypothesis(),
                        ch.mu,
                        ch.sigma,
                        ch.support_min,
                        ch.support_max,
                        ch.pool().len()
                    );
                }
            }
        }
        Command::Trajectories => {
            for (p, _) in pipeline::cmd_trajectories(&cfg, &data)? {
                println!("{}", p.display());
            }
        }
        Command::Curves => {
            let out = pipeline::cmd_curves(&cfg, &data)?;
            println!("gammas: {:?}", out.gammas);
            println!("records written to {}", cfg.output_dir.display());
        }
        Command::Rates => {
            let out = pipeline::cmd_rates(&cfg, &data)?;
            println!(
                "{} band points written to {}",
                out.bands.len(),
                cfg.output_dir.display()
            );
        }
        Command::Simulate => {
            let est = pipeline::cmd_simulate(&cfg, &data)?;
            let low = est.iter().filter(|e| e.low_confidence()).count();
            println!("{} estimates ({low} low-confidence)", est.len());
        }
        Command::OracleCheck => unreachable!(),
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
