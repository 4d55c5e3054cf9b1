//! End-to-end runs: train, score, characterize, approximate, simulate.
//!
//! Every `cmd_*` function writes its outputs below `RunConfig::output_dir`
//! and returns what it wrote. Output layout:
//!
//! ```text
//! <out>/config.toml                       resolved configuration
//! <out>/models/seed{S}_epoch{E}.json      parameter files
//! <out>/train_log_seed{S}.csv             epoch,loss
//! <out>/pools/seed{S}_epoch{E}_{H0|H1}.csv
//! <out>/characterization.csv
//! <out>/trajectories_seed{S}_epoch{E}.csv
//! <out>/curves_{H0|H1}.csv / .json        empirical + clt + ldp
//! <out>/curves_diagnostics.csv
//! <out>/simulate.csv, histograms.csv
//! <out>/rates.csv, rates_per_seed.csv
//! <out>/oracle_check.csv
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::characterize::{moments, Characterization, ScorePool};
use crate::error::{Error, Result};
use crate::ingest::{DatasetSplit, MnistPaths};
use crate::ldp::{self, error_curves, gamma_at, interior_positions, rate_tradeoff_at, CurveRecord};
use crate::model::{self, MlpParameters, TrainingConfig};
use crate::montecarlo::{self, Sampling, ScoreSource, SimulationPlan};
use crate::oracles::AnalyticDistribution;
use crate::statistic::{Hypothesis, ObservationSequence};

/// Environment variable naming the default MNIST directory.
pub const DATA_DIR_ENV: &str = "D3F_DATA_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub data: MnistPaths,
    pub training: TrainingConfig,
    /// One trained realization per seed.
    pub seeds: Vec<u64>,
    /// Epochs at which parameters are saved; empty means only the last epoch.
    pub checkpoints: Vec<usize>,
    /// Absolute thresholds. When empty, `gamma_positions` are used instead.
    pub gammas: Vec<f64>,
    /// Relative positions in (mu0, mu1).
    pub gamma_positions: Vec<f64>,
    pub ns: Vec<usize>,
    pub trials: u64,
    pub sampling: Sampling,
    /// Seed for all Monte Carlo draws.
    pub simulation_seed: u64,
    /// Drop training images from characterization and simulation pools.
    pub exclude_training: bool,
    pub trajectory_length: usize,
    pub trajectory_count: usize,
    pub histogram_ns: Vec<usize>,
    pub histogram_trials: u64,
    pub histogram_bins: usize,
    /// Points on the relative gamma grid for rate tradeoffs, endpoints included.
    pub rate_grid: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let data_dir = std::env::var_os(DATA_DIR_ENV).map_or_else(|| PathBuf::from("data/mnist"), PathBuf::from);
        Self {
            data: MnistPaths::in_dir(data_dir),
            training: TrainingConfig::default(),
            seeds: vec![1],
            checkpoints: Vec::new(),
            gammas: Vec::new(),
            gamma_positions: interior_positions(5),
            ns: (1..=12).collect(),
            trials: 100_000,
            sampling: Sampling::WithReplacement,
            simulation_seed: 2023,
            exclude_training: false,
            trajectory_length: 1000,
            trajectory_count: 3,
            histogram_ns: vec![1, 5, 50],
            histogram_trials: 10_000,
            histogram_bins: 50,
            rate_grid: 101,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("seed list is empty".into()));
        }
        if let Some(&c) = self.checkpoints.iter().find(|&&c| c > self.training.epochs) {
            return Err(Error::Config(format!(
                "checkpoint {c} exceeds the {} training epochs",
                self.training.epochs
            )));
        }
        if self.ns.is_empty() || self.ns.contains(&0) {
            return Err(Error::Config("n list must be non-empty and positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if self.gammas.is_empty() && self.gamma_positions.is_empty() {
            return Err(Error::Config("no thresholds: give gammas or gamma_positions".into()));
        }
        if self.rate_grid < 2 {
            return Err(Error::Config("rate_grid needs at least 2 points".into()));
        }
        self.training.validate()
    }

    /// Checkpoints to save, sorted; defaults to the final epoch.
    pub fn checkpoint_epochs(&self) -> Vec<usize> {
        let mut c = if self.checkpoints.is_empty() {
            vec![self.training.epochs]
        } else {
            self.checkpoints.clone()
        };
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn final_epoch(&self) -> usize {
        *self.checkpoint_epochs().last().expect("non-empty")
    }

    pub fn model_path(&self, seed: u64, epoch: usize) -> PathBuf {
        self.output_dir
            .join("models")
            .join(format!("seed{seed}_epoch{epoch}.json"))
    }

    fn ensure_dir(&self, sub: &str) -> Result<PathBuf> {
        let dir = if sub.is_empty() {
            self.output_dir.clone()
        } else {
            self.output_dir.join(sub)
        };
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(dir)
    }

    /// Records the resolved configuration next to the outputs.
    pub fn record(&self) -> Result<PathBuf> {
        let dir = self.ensure_dir("")?;
        let path = dir.join("config.toml");
        let text = toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Train and test splits held in memory.
#[derive(Debug, Clone)]
pub struct Data {
    pub train: DatasetSplit,
    pub test: DatasetSplit,
}

impl Data {
    pub fn load(paths: &MnistPaths) -> Result<Self> {
        let (train, test) = paths.load()?;
        Ok(Self { train, test })
    }

    /// Images used for characterization and simulation.
    pub fn pool_images(&self, exclude_training: bool) -> DatasetSplit {
        if exclude_training {
            self.test.clone()
        } else {
            self.train.clone().pooled(self.test.clone())
        }
    }

    fn pool_source(exclude_training: bool) -> &'static str {
        if exclude_training {
            "test"
        } else {
            "train+test"
        }
    }
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>> {
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(std::io::BufWriter::new(f))
}

fn write_lines(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{header}").map_err(io)?;
    for r in rows {
        writeln!(w, "{r}").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Trains every seed and saves each checkpoint. Returns the files written.
pub fn cmd_train(cfg: &RunConfig, data: &Data) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    cfg.record()?;
    let mut written = Vec::new();
    for &seed in &cfg.seeds {
        written.extend(train_seed(cfg, data, seed)?);
    }
    Ok(written)
}

fn train_seed(cfg: &RunConfig, data: &Data, seed: u64) -> Result<Vec<PathBuf>> {
    cfg.ensure_dir("models")?;
    let training = TrainingConfig {
        seed,
        ..cfg.training.clone()
    };
    let run = model::train_with_checkpoints(&data.train, &training, &cfg.checkpoint_epochs())?;
    let mut written = Vec::new();
    for (epoch, params) in &run.checkpoints {
        let path = cfg.model_path(seed, *epoch);
        params.save(&path, &training)?;
        written.push(path);
    }
    let log_path = cfg.output_dir.join(format!("train_log_seed{seed}.csv"));
    write_lines(
        &log_path,
        "epoch,loss",
        run.log.iter().map(|l| format!("{},{:?}", l.epoch, l.loss)),
    )?;
    written.push(log_path);
    Ok(written)
}

/// Loads the saved model for `(seed, epoch)`, training the seed first if needed.
pub fn ensure_model(cfg: &RunConfig, data: &Data, seed: u64, epoch: usize) -> Result<MlpParameters> {
    let path = cfg.model_path(seed, epoch);
    if !path.exists() {
        log::info!("{} not found, training seed {seed}", path.display());
        train_seed(cfg, data, seed)?;
    }
    Ok(MlpParameters::load(&path)?.0)
}

/// Score pools of both hypotheses for one parameter realization.
pub fn score_pools(params: &MlpParameters, images: &DatasetSplit, source: &str) -> Result<[ScorePool; 2]> {
    let make = |k| ScorePool::new(k, params.score_hypothesis(images, k), Some(params.seed), source);
    Ok([make(Hypothesis::H0)?, make(Hypothesis::H1)?])
}

/// Pools plus their characterizations.
pub struct Characterized {
    pub seed: u64,
    pub epoch: usize,
    pub pools: [ScorePool; 2],
    pub chars: [Characterization; 2],
}

pub fn characterize_model(cfg: &RunConfig, data: &Data, params: &MlpParameters) -> Result<Characterized> {
    let images = data.pool_images(cfg.exclude_training);
    let pools = score_pools(params, &images, Data::pool_source(cfg.exclude_training))?;
    let chars = [moments(pools[0].clone())?, moments(pools[1].clone())?];
    Ok(Characterized {
        seed: params.seed,
        epoch: params.epochs_trained,
        pools,
        chars,
    })
}

fn characterization_row(c: &Characterized, k: Hypothesis) -> String {
    let ch = &c.chars[k.index()];
    format!(
        "{},{},{},{},{:?},{:?},{:?},{:?}",
        c.seed,
        c.epoch,
        k,
        ch.pool().len(),
        ch.mu,
        ch.sigma,
        ch.support_min,
        ch.support_max
    )
}

pub const CHARACTERIZATION_HEADER: &str = "seed,epoch,hypothesis,count,mu,sigma,support_min,support_max";

/// Writes score pools and moment summaries for every seed at the final checkpoint.
pub fn cmd_characterize(cfg: &RunConfig, data: &Data) -> Result<Vec<Characterized>> {
    cfg.validate()?;
    cfg.record()?;
    let pools_dir = cfg.ensure_dir("pools")?;
    let epoch = cfg.final_epoch();
    let mut out = Vec::new();
    for &seed in &cfg.seeds {
        let params = ensure_model(cfg, data, seed, epoch)?;
        let c = characterize_model(cfg, data, &params)?;
        for pool in &c.pools {
            pool.save(&pools_dir.join(format!("seed{seed}_epoch{epoch}_{}.csv", pool.hypothesis)))?;
        }
        out.push(c);
    }
    write_lines(
        &cfg.output_dir.join("characterization.csv"),
        CHARACTERIZATION_HEADER,
        out.iter().flat_map(|c| {
            [
                characterization_row(c, Hypothesis::H0),
                characterization_row(c, Hypothesis::H1),
            ]
        }),
    )?;
    Ok(out)
}

/// Running means of one drawn sequence per hypothesis and realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub realization: usize,
    pub hypothesis: Hypothesis,
    pub scores: Vec<f64>,
    pub running_mean: Vec<f64>,
}

pub fn trajectories(pools: &[ScorePool; 2], length: usize, count: usize, seed: u64) -> Result<Vec<Trajectory>> {
    let mut out = Vec::new();
    for realization in 0..count {
        for pool in pools {
            let mut rng = montecarlo::chunk_rng(
                seed ^ (realization as u64).wrapping_mul(0x2545_F491_4F6C_DD1D),
                length,
                pool.hypothesis.index() as u64,
            );
            let scores: Vec<f64> = (0..length).map(|_| pool.draw(&mut rng)).collect();
            let seq = ObservationSequence::new(scores, Some(pool.hypothesis))?;
            out.push(Trajectory {
                realization,
                hypothesis: pool.hypothesis,
                running_mean: seq.running_aggregate(),
                scores: seq.scores().to_vec(),
            });
        }
    }
    Ok(out)
}

pub const TRAJECTORY_HEADER: &str = "realization,hypothesis,m,score,running_mean";

pub fn cmd_trajectories(cfg: &RunConfig, data: &Data) -> Result<Vec<(PathBuf, Vec<Trajectory>)>> {
    cfg.validate()?;
    cfg.record()?;
    if cfg.trajectory_length == 0 {
        return Err(Error::Config("trajectory_length must be positive".into()));
    }
    let epoch = cfg.final_epoch();
    let mut out = Vec::new();
    for &seed in &cfg.seeds {
        let params = ensure_model(cfg, data, seed, epoch)?;
        let c = characterize_model(cfg, data, &params)?;
        let traces = trajectories(
            &c.pools,
            cfg.trajectory_length,
            cfg.trajectory_count,
            cfg.simulation_seed,
        )?;
        let path = cfg.output_dir.join(format!("trajectories_seed{seed}_epoch{epoch}.csv"));
        write_lines(
            &path,
            TRAJECTORY_HEADER,
            traces.iter().flat_map(|t| {
                t.scores
                    .iter()
                    .zip(&t.running_mean)
                    .enumerate()
                    .map(move |(i, (s, m))| format!("{},{},{},{s:?},{m:?}", t.realization, t.hypothesis, i + 1))
            }),
        )?;
        out.push((path, traces));
    }
    Ok(out)
}

/// Thresholds for one realization, plus a message for each rejected one.
pub fn resolve_gammas(cfg: &RunConfig, mu0: f64, mu1: f64) -> (Vec<f64>, Vec<String>) {
    if cfg.gammas.is_empty() {
        return (
            cfg.gamma_positions.iter().map(|&p| gamma_at(mu0, mu1, p)).collect(),
            Vec::new(),
        );
    }
    let notes = cfg
        .gammas
        .iter()
        .filter(|&&g| !(g > mu0 && g < mu1))
        .map(|g| format!("gamma {g} is outside (mu0, mu1) = ({mu0}, {mu1})"))
        .collect();
    (cfg.gammas.clone(), notes)
}

/// Combined empirical, CLT and LDP records for one realization.
#[derive(Debug, Clone)]
pub struct CurveOutput {
    pub gammas: Vec<f64>,
    pub records: [Vec<CurveRecord>; 2],
    pub diagnostics: Vec<String>,
}

pub fn curves_for(cfg: &RunConfig, c: &Characterized) -> Result<CurveOutput> {
    let (gammas, mut diagnostics) = resolve_gammas(cfg, c.chars[0].mu, c.chars[1].mu);
    let grid = error_curves(&c.chars[0], &c.chars[1], &gammas, &cfg.ns);
    diagnostics.extend(
        grid.diagnostics
            .iter()
            .map(|d| format!("{} gamma {}: {}", d.hypothesis, d.gamma, d.message)),
    );
    let plan = SimulationPlan {
        ns: cfg.ns.clone(),
        gammas: gammas.clone(),
        trials: cfg.trials,
        seed: cfg.simulation_seed,
        sampling: cfg.sampling,
    };
    let mut records = [Vec::new(), Vec::new()];
    for k in [Hypothesis::H0, Hypothesis::H1] {
        let empirical = montecarlo::simulate(&c.pools[k.index()], &plan)?;
        let mut recs: Vec<CurveRecord> = empirical.iter().map(|e| e.to_record()).collect();
        recs.extend(grid.records(k));
        recs.sort_by(|a, b| {
            a.gamma
                .total_cmp(&b.gamma)
                .then(a.n.cmp(&b.n))
                .then((a.kind as u8).cmp(&(b.kind as u8)))
        });
        records[k.index()] = recs;
    }
    Ok(CurveOutput {
        gammas,
        records,
        diagnostics,
    })
}

/// Error-probability curves of the first seed at the final checkpoint.
pub fn cmd_curves(cfg: &RunConfig, data: &Data) -> Result<CurveOutput> {
    cfg.validate()?;
    cfg.record()?;
    let seed = cfg.seeds[0];
    let params = ensure_model(cfg, data, seed, cfg.final_epoch())?;
    let c = characterize_model(cfg, data, &params)?;
    let out = curves_for(cfg, &c)?;
    for k in [Hypothesis::H0, Hypothesis::H1] {
        let recs = &out.records[k.index()];
        ldp::write_curve_csv(create(&cfg.output_dir.join(format!("curves_{k}.csv")))?, recs)?;
        ldp::write_curve_json(create(&cfg.output_dir.join(format!("curves_{k}.json")))?, recs)?;
    }
    for d in &out.diagnostics {
        log::warn!("{d}");
    }
    write_lines(
        &cfg.output_dir.join("curves_diagnostics.csv"),
        "message",
        out.diagnostics.iter().map(|d| format!("\"{}\"", d.replace('"', "'"))),
    )?;
    Ok(out)
}

/// Monte Carlo estimates and aggregate histograms of the first seed.
pub fn cmd_simulate(cfg: &RunConfig, data: &Data) -> Result<Vec<montecarlo::EmpiricalEstimate>> {
    cfg.validate()?;
    cfg.record()?;
    let seed = cfg.seeds[0];
    let params = ensure_model(cfg, data, seed, cfg.final_epoch())?;
    let c = characterize_model(cfg, data, &params)?;
    let (gammas, notes) = resolve_gammas(cfg, c.chars[0].mu, c.chars[1].mu);
    for n in notes {
        log::warn!("{n}");
    }
    let plan = SimulationPlan {
        ns: cfg.ns.clone(),
        gammas,
        trials: cfg.trials,
        seed: cfg.simulation_seed,
        sampling: cfg.sampling,
    };
    let mut estimates = montecarlo::simulate(&c.pools[0], &plan)?;
    estimates.extend(montecarlo::simulate(&c.pools[1], &plan)?);
    let records: Vec<CurveRecord> = estimates.iter().map(|e| e.to_record()).collect();
    ldp::write_curve_csv(create(&cfg.output_dir.join("simulate.csv"))?, &records)?;

    let mut rows = Vec::new();
    for pool in &c.pools {
        for &n in &cfg.histogram_ns {
            let h = montecarlo::statistic_histogram(
                pool,
                n,
                cfg.histogram_trials,
                cfg.simulation_seed,
                cfg.histogram_bins,
            )?;
            for i in 0..h.counts.len() {
                let mid = 0.5 * (h.edges[i] + h.edges[i + 1]);
                rows.push(format!(
                    "{},{},{:?},{:?},{},{:?},{:?}",
                    h.hypothesis,
                    n,
                    h.edges[i],
                    h.edges[i + 1],
                    h.counts[i],
                    h.density(i),
                    h.clt_density(mid)
                ));
            }
        }
    }
    write_lines(
        &cfg.output_dir.join("histograms.csv"),
        "hypothesis,n,bin_low,bin_high,count,density,clt_density",
        rows,
    )?;
    Ok(estimates)
}

/// Mean and spread of `(I0, I1)` across seeds at one checkpoint and grid position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBand {
    pub epoch: usize,
    pub position: f64,
    pub i0_mean: f64,
    pub i0_std: f64,
    pub i1_mean: f64,
    pub i1_std: f64,
    pub seeds: usize,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    if !mean.is_finite() {
        // unattainable rates are +inf; equal infinities have no spread
        let spread = if xs.iter().all(|&x| x == xs[0]) {
            0.0
        } else {
            f64::INFINITY
        };
        return (mean, spread);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per-seed tradeoff curves at a shared relative-position grid.
#[derive(Debug, Clone)]
pub struct RatesOutput {
    pub bands: Vec<RateBand>,
    /// `(epoch, seed, points)`.
    pub per_seed: Vec<(usize, u64, Vec<ldp::TradeoffPoint>)>,
}

/// Combines per-seed tradeoff curves into bands.
pub fn rate_bands(epoch: usize, curves: &[Vec<ldp::TradeoffPoint>]) -> Vec<RateBand> {
    let Some(first) = curves.first() else {
        return Vec::new();
    };
    (0..first.len())
        .map(|i| {
            let i0: Vec<f64> = curves.iter().map(|c| c[i].i0).collect();
            let i1: Vec<f64> = curves.iter().map(|c| c[i].i1).collect();
            let (i0_mean, i0_std) = mean_std(&i0);
            let (i1_mean, i1_std) = mean_std(&i1);
            RateBand {
                epoch,
                position: first[i].position,
                i0_mean,
                i0_std,
                i1_mean,
                i1_std,
                seeds: curves.len(),
            }
        })
        .collect()
}

pub fn cmd_rates(cfg: &RunConfig, data: &Data) -> Result<RatesOutput> {
    cfg.validate()?;
    cfg.record()?;
    if cfg.seeds.len() < 2 {
        log::warn!("only one seed: rate bands have zero width");
    }
    let positions: Vec<f64> = (0..cfg.rate_grid)
        .map(|i| i as f64 / (cfg.rate_grid - 1) as f64)
        .collect();
    let mut out = RatesOutput {
        bands: Vec::new(),
        per_seed: Vec::new(),
    };
    for epoch in cfg.checkpoint_epochs() {
        let mut curves = Vec::new();
        for &seed in &cfg.seeds {
            let params = ensure_model(cfg, data, seed, epoch)?;
            let c = characterize_model(cfg, data, &params)?;
            let curve = rate_tradeoff_at(&c.chars[0], &c.chars[1], &positions)?;
            out.per_seed.push((epoch, seed, curve.clone()));
            curves.push(curve);
        }
        out.bands.extend(rate_bands(epoch, &curves));
    }
    write_lines(
        &cfg.output_dir.join("rates.csv"),
        "epoch,position,i0_mean,i0_std,i1_mean,i1_std,seeds",
        out.bands.iter().map(|b| {
            format!(
                "{},{:?},{:?},{:?},{:?},{:?},{}",
                b.epoch, b.position, b.i0_mean, b.i0_std, b.i1_mean, b.i1_std, b.seeds
            )
        }),
    )?;
    write_lines(
        &cfg.output_dir.join("rates_per_seed.csv"),
        "epoch,seed,position,gamma,I0,I1",
        out.per_seed.iter().flat_map(|(epoch, seed, pts)| {
            pts.iter()
                .map(move |p| format!("{epoch},{seed},{:?},{:?},{:?},{:?}", p.position, p.gamma, p.i0, p.i1))
        }),
    )?;
    Ok(out)
}

/// One line of the oracle self-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub worst_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleCheck {
    fn new(name: &str, worst_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            worst_error,
            tolerance,
            passed: worst_error <= tolerance,
        }
    }
}

/// Runs the numerical engine against closed forms; needs no data.
pub fn oracle_checks(seed: u64) -> Result<Vec<OracleCheck>> {
    let mut checks = Vec::new();

    let gauss = AnalyticDistribution::gaussian(0.3, 1.7)?;
    let bern = AnalyticDistribution::bernoulli(0.3, -1.0, 2.0)?;
    for (name, d) in [("rate/gaussian", gauss), ("rate/bernoulli", bern)] {
        let (lo, hi) = match d {
            AnalyticDistribution::Gaussian { mu, sigma } => (mu - 4.0 * sigma, mu + 4.0 * sigma),
            AnalyticDistribution::Bernoulli { low, high, .. } => (low, high),
        };
        let mut worst: f64 = 0.0;
        for i in 1..=50 {
            let x = lo + (hi - lo) * i as f64 / 51.0;
            let k = if x >= ldp::Lmgf::mean(&d) {
                Hypothesis::H0
            } else {
                Hypothesis::H1
            };
            let r = ldp::rate_function(&d, x, k)?;
            worst = worst.max((r.rate - d.exact_rate(x)).abs());
        }
        checks.push(OracleCheck::new(name, worst, 1e-8));
    }

    let std_normal = AnalyticDistribution::standard_gaussian();
    let r = ldp::rate_function(&std_normal, 1.0, Hypothesis::H0)?;
    for (n, tol) in [(20, 0.10), (100, 0.02)] {
        let approx = ldp::exact_asymptotics(&r, n)?;
        let truth = std_normal.exact_tail(1.0, n)?;
        checks.push(OracleCheck::new(
            &format!("exact-asymptotics/n={n}"),
            (approx / truth - 1.0).abs(),
            tol,
        ));
    }

    let pool = std_normal.sample(100_000, seed, Hypothesis::H0)?;
    let c = moments(pool)?;
    let worst = (0..=40)
        .map(|i| -1.0 + 0.05 * i as f64)
        .map(|t| (c.lmgf(t) - 0.5 * t * t).abs())
        .fold(0.0, f64::max);
    checks.push(OracleCheck::new("empirical-lmgf/gaussian", worst, 0.02));
    Ok(checks)
}

pub fn cmd_oracle_check(cfg: &RunConfig) -> Result<Vec<OracleCheck>> {
    let checks = oracle_checks(cfg.simulation_seed)?;
    cfg.ensure_dir("")?;
    write_lines(
        &cfg.output_dir.join("oracle_check.csv"),
        "check,worst_error,tolerance,passed",
        checks
            .iter()
            .map(|c| format!("{},{:e},{:e},{}", c.name, c.worst_error, c.tolerance, c.passed)),
    )?;
    Ok(checks)
}
