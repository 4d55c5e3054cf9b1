//! Monte Carlo estimates of the error probabilities.
//!
//! Each trial draws `n` scores, averages them, and applies the threshold
//! test. Trials are split into fixed-size chunks; chunk `c` of sequence
//! length `n` uses its own ChaCha stream derived from `(seed, n, c)`, so
//! results do not depend on how chunks are scheduled.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::characterize::ScorePool;
use crate::error::{Error, Result};
use crate::ldp::{CurveKind, CurveRecord};
use crate::statistic::{decide, Hypothesis};

/// Trials per deterministic chunk.
pub const CHUNK_TRIALS: u64 = 1 << 15;
/// 97.5% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;
/// Cells with fewer error events than this are flagged.
pub const MIN_CONFIDENT_EVENTS: u64 = 10;

/// Anything that can produce i.i.d. elementwise scores.
pub trait ScoreSource: Sync {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
    /// Pool size when sampling from a finite pool.
    fn finite_len(&self) -> Option<usize>;
    /// Fills `out` with `n` distinct pool entries. Only finite pools support this.
    fn draw_distinct<R: Rng + ?Sized>(&self, _rng: &mut R, _n: usize, _out: &mut Vec<f64>) -> Result<()> {
        Err(Error::Plan("sampling without replacement needs a finite pool".into()))
    }
}

impl ScoreSource for ScorePool {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.values()[rng.random_range(0..self.len())]
    }

    fn finite_len(&self) -> Option<usize> {
        Some(self.len())
    }

    fn draw_distinct<R: Rng + ?Sized>(&self, rng: &mut R, n: usize, out: &mut Vec<f64>) -> Result<()> {
        if n > self.len() {
            return Err(Error::Plan(format!("n = {n} exceeds pool size {}", self.len())));
        }
        out.clear();
        out.extend(index::sample(rng, self.len(), n).into_iter().map(|i| self.values()[i]));
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    #[default]
    WithReplacement,
    WithoutReplacementPerTrial,
    /// One seeded permutation of the pool cut into disjoint length-`n`
    /// blocks, one per trial; needs `trials * n <= pool size`.
    DisjointBlocks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub ns: Vec<usize>,
    pub gammas: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub sampling: Sampling,
}

impl SimulationPlan {
    pub fn validate(&self, pool_len: Option<usize>) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Plan("trials must be at least 1".into()));
        }
        if let Some(&bad) = self.ns.iter().find(|&&n| n == 0) {
            return Err(Error::Plan(format!("sequence length {bad} is not positive")));
        }
        if let Some(bad) = self.gammas.iter().find(|g| !g.is_finite()) {
            return Err(Error::Plan(format!("threshold {bad} is not finite")));
        }
        if self.sampling != Sampling::WithReplacement {
            let Some(len) = pool_len else {
                return Err(Error::Plan("sampling without replacement needs a finite pool".into()));
            };
            if let Some(&n) = self.ns.iter().find(|&&n| n > len) {
                return Err(Error::Plan(format!("n = {n} exceeds pool size {len}")));
            }
            if self.sampling == Sampling::DisjointBlocks {
                if let Some(&n) = self.ns.iter().find(|&&n| n as u64 * self.trials > len as u64) {
                    return Err(Error::Plan(format!(
                        "{} disjoint blocks of n = {n} need more than {len} pool entries",
                        self.trials
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEstimate {
    pub hypothesis: Hypothesis,
    pub n: usize,
    pub gamma: f64,
    pub p_hat: f64,
    pub events: u64,
    pub trials: u64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl EmpiricalEstimate {
    pub fn low_confidence(&self) -> bool {
        self.events < MIN_CONFIDENT_EVENTS
    }

    pub fn contains(&self, p: f64) -> bool {
        self.wilson_low <= p && p <= self.wilson_high
    }

    pub fn to_record(&self) -> CurveRecord {
        CurveRecord {
            hypothesis: self.hypothesis,
            gamma: self.gamma,
            n: self.n,
            kind: CurveKind::Empirical,
            value: Some(self.p_hat),
            zeta: None,
            rate: None,
            t_star: None,
            wilson_low: Some(self.wilson_low),
            wilson_high: Some(self.wilson_high),
            events: Some(self.events),
            trials: Some(self.trials),
            note: if self.low_confidence() {
                "low-confidence".into()
            } else {
                String::new()
            },
        }
    }
}

/// Wilson score interval for `events` successes in `trials`, at quantile `z`.
pub fn wilson_interval(events: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = events as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).min(p).max(0.0), (center + half).max(p).min(1.0))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent stream for chunk `chunk` of sequence length `n`.
pub fn chunk_rng(seed: u64, n: usize, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(n as u64)));
    rng.set_stream(chunk);
    rng
}

fn chunks(trials: u64) -> Vec<(u64, u64)> {
    (0..trials.div_ceil(CHUNK_TRIALS))
        .map(|c| (c, CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS)))
        .collect()
}

fn draw_aggregate<S: ScoreSource, R: Rng>(
    source: &S,
    sampling: Sampling,
    n: usize,
    rng: &mut R,
    buf: &mut Vec<f64>,
) -> Result<f64> {
    let sum = match sampling {
        Sampling::WithReplacement => (0..n).map(|_| source.draw(rng)).sum::<f64>(),
        Sampling::WithoutReplacementPerTrial | Sampling::DisjointBlocks => {
            source.draw_distinct(rng, n, buf)?;
            buf.iter().sum()
        }
    };
    Ok(sum / n as f64)
}

/// Error counts per threshold over `aggregates`.
fn count_errors(aggregates: impl Iterator<Item = f64>, gammas: &[f64], hypothesis: Hypothesis) -> Vec<u64> {
    let mut events = vec![0u64; gammas.len()];
    for t in aggregates {
        for (e, &g) in events.iter_mut().zip(gammas) {
            if hypothesis.is_error(decide(t, g)) {
                *e += 1;
            }
        }
    }
    events
}

fn disjoint_block_aggregates<S: ScoreSource>(source: &S, n: usize, trials: u64, seed: u64) -> Result<Vec<f64>> {
    let len = source
        .finite_len()
        .ok_or_else(|| Error::Plan("disjoint blocks need a finite pool".into()))?;
    let mut rng = chunk_rng(seed, n, 0);
    let mut perm = Vec::with_capacity(len);
    source.draw_distinct(&mut rng, len, &mut perm)?;
    Ok(perm
        .chunks_exact(n)
        .take(trials as usize)
        .map(|block| block.iter().sum::<f64>() / n as f64)
        .collect())
}

/// Runs `plan` against any score source whose draws follow `hypothesis`.
pub fn simulate_source<S: ScoreSource>(
    source: &S,
    hypothesis: Hypothesis,
    plan: &SimulationPlan,
) -> Result<Vec<EmpiricalEstimate>> {
    plan.validate(source.finite_len())?;
    let mut out = Vec::with_capacity(plan.ns.len() * plan.gammas.len());
    for &n in &plan.ns {
        let events = if plan.sampling == Sampling::DisjointBlocks {
            let aggregates = disjoint_block_aggregates(source, n, plan.trials, plan.seed)?;
            count_errors(aggregates.into_iter(), &plan.gammas, hypothesis)
        } else {
            let per_chunk = chunks(plan.trials)
                .into_par_iter()
                .map(|(chunk, count)| {
                    let mut rng = chunk_rng(plan.seed, n, chunk);
                    let mut buf = Vec::with_capacity(n);
                    let aggregates = (0..count)
                        .map(|_| draw_aggregate(source, plan.sampling, n, &mut rng, &mut buf))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(count_errors(aggregates.into_iter(), &plan.gammas, hypothesis))
                })
                .collect::<Result<Vec<_>>>()?;
            (0..plan.gammas.len())
                .map(|gi| per_chunk.iter().map(|c| c[gi]).sum())
                .collect()
        };
        for (&gamma, &events) in plan.gammas.iter().zip(&events) {
            let (wilson_low, wilson_high) = wilson_interval(events, plan.trials, Z_95);
            out.push(EmpiricalEstimate {
                hypothesis,
                n,
                gamma,
                p_hat: events as f64 / plan.trials as f64,
                events,
                trials: plan.trials,
                wilson_low,
                wilson_high,
            });
        }
    }
    Ok(out)
}

/// Error-frequency estimates for every `(n, gamma)` of the plan, in plan order.
pub fn simulate(pool: &ScorePool, plan: &SimulationPlan) -> Result<Vec<EmpiricalEstimate>> {
    simulate_source(pool, pool.hypothesis, plan)
}

/// Aggregates of `trials` independent length-`n` sequences.
pub fn sample_aggregates<S: ScoreSource>(
    source: &S,
    n: usize,
    trials: u64,
    seed: u64,
    sampling: Sampling,
) -> Result<Vec<f64>> {
    if n == 0 || trials == 0 {
        return Err(Error::Plan("n and trials must be positive".into()));
    }
    if sampling == Sampling::DisjointBlocks {
        return disjoint_block_aggregates(source, n, trials, seed);
    }
    let parts = chunks(trials)
        .into_par_iter()
        .map(|(chunk, count)| {
            let mut rng = chunk_rng(seed, n, chunk);
            let mut buf = Vec::with_capacity(n);
            (0..count)
                .map(|_| draw_aggregate(source, sampling, n, &mut rng, &mut buf))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.concat())
}

/// Binned aggregates with the matching CLT overlay `N(mu, sigma^2 / n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateHistogram {
    pub hypothesis: Hypothesis,
    pub n: usize,
    pub trials: u64,
    /// `bins + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub clt_mean: f64,
    pub clt_variance: f64,
    pub sample_mean: f64,
    pub sample_variance: f64,
}

impl AggregateHistogram {
    pub fn from_values(
        values: &[f64],
        hypothesis: Hypothesis,
        n: usize,
        bins: usize,
        clt_mean: f64,
        clt_variance: f64,
    ) -> Self {
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let bins = bins.max(1);
        let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
        let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let i = (((v - lo) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
        let m = values.len() as f64;
        let sample_mean = values.iter().sum::<f64>() / m;
        let sample_variance = values.iter().map(|v| (v - sample_mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
        Self {
            hypothesis,
            n,
            trials: values.len() as u64,
            edges,
            counts,
            clt_mean,
            clt_variance,
            sample_mean,
            sample_variance,
        }
    }

    /// Histogram density at bin `i` (integrates to one).
    pub fn density(&self, i: usize) -> f64 {
        let width = self.edges[i + 1] - self.edges[i];
        self.counts[i] as f64 / (self.trials as f64 * width)
    }

    /// CLT overlay density at `x`.
    pub fn clt_density(&self, x: f64) -> f64 {
        let v = self.clt_variance;
        (-(x - self.clt_mean).powi(2) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
    }
}

/// Empirical distribution of the aggregate at length `n`. For `n = 1` the
/// aggregate is a single score, so the pool itself is binned.
pub fn statistic_histogram(
    pool: &ScorePool,
    n: usize,
    trials: u64,
    seed: u64,
    bins: usize,
) -> Result<AggregateHistogram> {
    let m = pool.len() as f64;
    let mu = pool.values().iter().sum::<f64>() / m;
    let var = pool.values().iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (m - 1.0);
    let clt_variance = var / n.max(1) as f64;
    if n == 1 {
        return Ok(AggregateHistogram::from_values(
            pool.values(),
            pool.hypothesis,
            1,
            bins,
            mu,
            clt_variance,
        ));
    }
    let aggregates = sample_aggregates(pool, n, trials, seed, Sampling::WithReplacement)?;
    Ok(AggregateHistogram::from_values(
        &aggregates,
        pool.hypothesis,
        n,
        bins,
        mu,
        clt_variance,
    ))
}

/// Kolmogorov-Smirnov distance between a sample and `N(mu, sigma^2)`.
pub fn ks_distance_normal(sample: &[f64], mu: f64, sigma: f64) -> f64 {
    let normal = Normal::new(mu, sigma).expect("sigma > 0");
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool(values: &[f64], k: Hypothesis) -> ScorePool {
        ScorePool::new(k, values.to_vec(), None, "t").unwrap()
    }

    fn plan(ns: Vec<usize>, gammas: Vec<f64>, trials: u64, sampling: Sampling) -> SimulationPlan {
        SimulationPlan {
            ns,
            gammas,
            trials,
            seed: 11,
            sampling,
        }
    }

    #[test]
    fn wilson_contains_estimate() {
        for (k, n) in [(0, 10), (10, 10), (3, 1000), (1, 1_000_000), (500, 1000)] {
            let (lo, hi) = wilson_interval(k, n, Z_95);
            let p = k as f64 / n as f64;
            assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0, "{k}/{n}: [{lo}, {hi}]");
        }
        // 50/100: textbook interval [0.4038, 0.5962]
        let (lo, hi) = wilson_interval(50, 100, Z_95);
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
    }

    #[test]
    fn threshold_below_h1_pool_never_errs() {
        let p = pool(&[1.0, 2.0, 3.5, 4.0], Hypothesis::H1);
        let est = simulate(&p, &plan(vec![1, 3, 20], vec![0.5], 5000, Sampling::WithReplacement)).unwrap();
        assert!(est.iter().all(|e| e.p_hat == 0.0 && e.events == 0));
    }

    #[test]
    fn exhaustive_single_draws_count_exactly() {
        let values: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let p = pool(&values, Hypothesis::H0);
        let gammas = vec![-0.5, 0.0, 0.3, values[7], 2.0];
        let est = simulate(&p, &plan(vec![1], gammas.clone(), 50, Sampling::DisjointBlocks)).unwrap();
        for (e, &g) in est.iter().zip(&gammas) {
            let exact = values.iter().filter(|&&v| v >= g).count() as f64 / 50.0;
            assert_eq!(e.p_hat, exact, "gamma {g}");
        }
    }

    #[test]
    fn disjoint_blocks_capacity() {
        let p = pool(&[0.0, 1.0, 2.0, 3.0, 4.0], Hypothesis::H0);
        assert!(simulate(&p, &plan(vec![2], vec![1.0], 2, Sampling::DisjointBlocks)).is_ok());
        assert!(matches!(
            simulate(&p, &plan(vec![2], vec![1.0], 3, Sampling::DisjointBlocks)),
            Err(Error::Plan(_))
        ));
    }

    #[test]
    fn alpha_nonincreasing_in_gamma() {
        let values: Vec<f64> = (0..200).map(|i| ((i * 37) % 101) as f64 / 10.0).collect();
        let p = pool(&values, Hypothesis::H0);
        let gammas: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
        let est = simulate(&p, &plan(vec![1, 4], gammas, 20_000, Sampling::WithReplacement)).unwrap();
        for w in est.windows(2) {
            if w[0].n == w[1].n {
                assert!(w[0].p_hat >= w[1].p_hat);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let p = pool(&[-1.0, 0.0, 2.0, 5.0, 0.5], Hypothesis::H1);
        let pl = plan(vec![2, 7], vec![0.0, 1.0], 100_000, Sampling::WithReplacement);
        assert_eq!(simulate(&p, &pl).unwrap(), simulate(&p, &pl).unwrap());
        let pl2 = plan(vec![2, 3], vec![0.0, 1.0], 1000, Sampling::WithoutReplacementPerTrial);
        assert_eq!(simulate(&p, &pl2).unwrap(), simulate(&p, &pl2).unwrap());
    }

    #[test]
    fn plan_errors() {
        let p = pool(&[0.0, 1.0, 2.0], Hypothesis::H0);
        assert!(matches!(
            simulate(&p, &plan(vec![4], vec![0.0], 10, Sampling::WithoutReplacementPerTrial)),
            Err(Error::Plan(_))
        ));
        assert!(simulate(&p, &plan(vec![1], vec![0.0], 0, Sampling::WithReplacement)).is_err());
        assert!(simulate(&p, &plan(vec![0], vec![0.0], 5, Sampling::WithReplacement)).is_err());
    }

    #[test]
    fn without_replacement_full_pool_is_exact_mean() {
        let values = [1.0, 2.0, 3.0, 10.0];
        let p = pool(&values, Hypothesis::H0);
        // n = pool size: every trial sees the whole pool, aggregate 4.0
        let est = simulate(
            &p,
            &plan(
                vec![4],
                vec![4.0, 4.0 + 1e-9],
                100,
                Sampling::WithoutReplacementPerTrial,
            ),
        )
        .unwrap();
        assert_eq!(est[0].p_hat, 1.0);
        assert_eq!(est[1].p_hat, 0.0);
    }

    #[test]
    fn histogram_of_raw_pool_at_n1() {
        let values = [0.0, 0.1, 0.2, 0.9, 1.0];
        let h = statistic_histogram(&pool(&values, Hypothesis::H0), 1, 999, 3, 2).unwrap();
        assert_eq!(h.trials, 5);
        assert_eq!(h.counts, vec![3, 2]);
        assert_eq!(h.edges, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn ks_of_own_quantiles_is_small() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let xs: Vec<f64> = (1..1000).map(|i| normal.inverse_cdf(i as f64 / 1000.0)).collect();
        assert!(ks_distance_normal(&xs, 0.0, 1.0) < 0.002);
        assert!(ks_distance_normal(&xs, 1.0, 1.0) > 0.3);
    }
}
