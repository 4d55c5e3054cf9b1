//! Empirical characterization of elementwise scores under one hypothesis.
//!
//! Every expectation is replaced by a sample mean over the pool: the mean
//! and standard deviation feed the CLT approximation, and the empirical
//! log-moment generating function
//!
//! ```text
//! phi(t) = log( (1/M) * sum_j exp(t * tau_j) )
//! ```
//!
//! feeds the rate function. Derivatives are the mean and variance of the
//! exponentially tilted empirical measure, so they are exact for the pool.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::ldp::Lmgf;
use crate::statistic::Hypothesis;

/// Elementwise scores of one hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorePool {
    pub hypothesis: Hypothesis,
    values: Vec<f64>,
    /// Seed of the parameter realization that produced the scores, if any.
    pub seed: Option<u64>,
    /// Free-form provenance, e.g. `train+test`.
    pub source: String,
}

impl ScorePool {
    pub fn new(hypothesis: Hypothesis, values: Vec<f64>, seed: Option<u64>, source: impl Into<String>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain(format!(
                "score pool needs at least 2 values, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("score {bad} in pool")));
        }
        Ok(Self {
            hypothesis,
            values,
            seed,
            source: source.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn header(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!("score:{}:seed={}:source={}", self.hypothesis, seed, self.source)
    }

    /// Single-column CSV; the header carries hypothesis, seed and source.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e| Error::io("<score pool>", e);
        writeln!(w, "{}", self.header()).map_err(io)?;
        for v in &self.values {
            writeln!(w, "{v:?}").map_err(io)?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let io = |e| Error::io("<score pool>", e);
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Consistency("score pool CSV is empty".into()))?
            .map_err(io)?;
        let mut parts = header.trim().splitn(4, ':');
        let (tag, hyp, seed, source) = (parts.next(), parts.next(), parts.next(), parts.next());
        let (Some("score"), Some(hyp), Some(seed), Some(source)) = (tag, hyp, seed, source) else {
            return Err(Error::Consistency(format!("bad score pool header {header:?}")));
        };
        let hypothesis: Hypothesis = hyp.parse()?;
        let seed = match seed.strip_prefix("seed=") {
            Some("none") => None,
            Some(s) => Some(
                s.parse()
                    .map_err(|_| Error::Consistency(format!("bad seed in header {header:?}")))?,
            ),
            None => return Err(Error::Consistency(format!("bad score pool header {header:?}"))),
        };
        let source = source.strip_prefix("source=").unwrap_or(source).to_string();
        let mut values = Vec::new();
        for line in lines {
            let line = line.map_err(io)?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            values.push(
                line.parse::<f64>()
                    .map_err(|_| Error::Consistency(format!("bad score {line:?}")))?,
            );
        }
        Self::new(hypothesis, values, seed, source)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(f)
    }
}

/// Sample moments plus the retained pool for LMGF evaluation.
#[derive(Debug, Clone)]
pub struct Characterization {
    pub mu: f64,
    /// Unbiased (divisor M-1) standard deviation.
    pub sigma: f64,
    pub support_min: f64,
    pub support_max: f64,
    pool: ScorePool,
}

impl Characterization {
    pub fn pool(&self) -> &ScorePool {
        &self.pool
    }

    pub fn hypothesis(&self) -> Hypothesis {
        self.pool.hypothesis
    }

    /// Empirical LMGF, evaluated with max-subtraction so it never overflows.
    pub fn lmgf(&self, t: f64) -> f64 {
        lmgf_with_extremes(self.pool.values(), self.support_min, self.support_max, t)
    }

    /// Tilted mean and tilted (population) variance at `t`.
    pub fn lmgf_derivatives(&self, t: f64) -> (f64, f64) {
        derivatives_with_extremes(self.pool.values(), self.support_min, self.support_max, t)
    }
}

fn extremes(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

/// Returns `(max_j t*tau_j, sum_j exp(t*tau_j - max))`.
fn shifted_sum(values: &[f64], min: f64, max: f64, t: f64) -> (f64, f64) {
    let m = if t >= 0.0 { t * max } else { t * min };
    let sum = values.iter().map(|&v| (t * v - m).exp()).sum();
    (m, sum)
}

fn lmgf_with_extremes(values: &[f64], min: f64, max: f64, t: f64) -> f64 {
    let (m, sum) = shifted_sum(values, min, max, t);
    m + (sum.ln() - (values.len() as f64).ln())
}

fn derivatives_with_extremes(values: &[f64], min: f64, max: f64, t: f64) -> (f64, f64) {
    let (m, sum) = shifted_sum(values, min, max, t);
    let phi1 = (values.iter().map(|&v| (t * v - m).exp() * v).sum::<f64>() / sum).clamp(min, max);
    let phi2 = values
        .iter()
        .map(|&v| {
            let d = v - phi1;
            (t * v - m).exp() * d * d
        })
        .sum::<f64>()
        / sum;
    (phi1, phi2.max(0.0))
}

/// Empirical LMGF of an arbitrary non-empty sample.
pub fn empirical_lmgf(values: &[f64], t: f64) -> f64 {
    let (min, max) = extremes(values);
    lmgf_with_extremes(values, min, max, t)
}

/// Tilted mean and variance of an arbitrary non-empty sample.
pub fn empirical_lmgf_derivatives(values: &[f64], t: f64) -> (f64, f64) {
    let (min, max) = extremes(values);
    derivatives_with_extremes(values, min, max, t)
}

/// Sample mean, unbiased standard deviation, and extremes of the pool.
pub fn moments(pool: ScorePool) -> Result<Characterization> {
    let values = pool.values();
    let m = values.len() as f64;
    let mu = values.iter().sum::<f64>() / m;
    let ss = values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>();
    let sigma = (ss / (m - 1.0)).sqrt();
    let (support_min, support_max) = extremes(values);
    if support_min == support_max || sigma == 0.0 {
        return Err(Error::Degenerate(values.len()));
    }
    Ok(Characterization {
        mu: mu.clamp(support_min, support_max),
        sigma,
        support_min,
        support_max,
        pool,
    })
}

impl Lmgf for Characterization {
    fn value(&self, t: f64) -> f64 {
        self.lmgf(t)
    }

    fn derivatives(&self, t: f64) -> (f64, f64) {
        self.lmgf_derivatives(t)
    }

    fn mean(&self) -> f64 {
        self.mu
    }

    fn support(&self) -> (f64, f64) {
        (self.support_min, self.support_max)
    }

    fn tilt_limit(&self) -> f64 {
        let scale = self.support_min.abs().max(self.support_max.abs());
        if scale > 0.0 {
            700.0 / scale
        } else {
            f64::INFINITY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool(values: &[f64]) -> ScorePool {
        ScorePool::new(Hypothesis::H0, values.to_vec(), None, "test").unwrap()
    }

    #[test]
    fn two_point_moments() {
        let c = moments(pool(&[0.0, 2.0])).unwrap();
        assert_eq!(c.mu, 1.0);
        assert!((c.sigma - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!((c.support_min, c.support_max), (0.0, 2.0));
    }

    #[test]
    fn constant_pool_is_degenerate() {
        assert!(matches!(moments(pool(&[3.0; 5])), Err(Error::Degenerate(5))));
    }

    #[test]
    fn pool_too_small() {
        assert!(ScorePool::new(Hypothesis::H1, vec![1.0], None, "x").is_err());
    }

    #[test]
    fn constant_sample_is_linear() {
        for t in [-3.0, -0.5, 0.0, 1.0, 4.0] {
            assert_eq!(empirical_lmgf(&[2.5; 6], t), 2.5 * t);
            assert_eq!(empirical_lmgf_derivatives(&[2.5; 6], t), (2.5, 0.0));
        }
    }

    #[test]
    fn lmgf_at_zero_is_zero() {
        let c = moments(pool(&[-3.2, 0.1, 7.7, 2.0, -0.4])).unwrap();
        assert_eq!(c.lmgf(0.0), 0.0);
    }

    #[test]
    fn bipolar_pool_log_cosh() {
        let c = moments(pool(&[-1.0, 1.0])).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let expected = f64::cosh(t).ln();
            assert!((c.lmgf(t) - expected).abs() < 1e-12, "t={t}");
            let (d1, d2) = c.lmgf_derivatives(t);
            let th = t.tanh();
            assert!((d1 - th).abs() < 1e-12);
            assert!((d2 - (1.0 - th * th)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_tilt_derivatives() {
        let vals = [-3.0, 0.5, 1.5, 9.0];
        let c = moments(pool(&vals)).unwrap();
        let (d1, d2) = c.lmgf_derivatives(0.0);
        let mean = vals.iter().sum::<f64>() / 4.0;
        let pop_var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((d1 - mean).abs() < 1e-12);
        assert!((d2 - pop_var).abs() < 1e-12);
    }

    #[test]
    fn large_tilt_reaches_support_max() {
        let c = moments(pool(&[-2.0, 0.0, 1.0, 4.0])).unwrap();
        let (d1, _) = c.lmgf_derivatives(200.0);
        assert!((d1 - 4.0).abs() < 1e-12);
        let (d1, _) = c.lmgf_derivatives(-200.0);
        assert!((d1 + 2.0).abs() < 1e-12);
        // no overflow far out
        assert!(c.lmgf(1e4).is_finite());
    }

    #[test]
    fn csv_round_trip() {
        let p = ScorePool::new(Hypothesis::H1, vec![0.1, -2.5, 1e-300, 3.0], Some(42), "train+test").unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("score:H1:seed=42:source=train+test\n"));
        assert_eq!(ScorePool::read_csv(buf.as_slice()).unwrap(), p);
    }
}
