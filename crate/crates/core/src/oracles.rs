//! Closed-form score distributions used as ground truth.
//!
//! Both kinds expose an exact LMGF (so the numerical rate solver can run on
//! them directly), the exact rate function, and seeded sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::characterize::ScorePool;
use crate::error::{Error, Result};
use crate::ldp::{q_function, Lmgf};
use crate::montecarlo::ScoreSource;
use crate::statistic::Hypothesis;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AnalyticDistribution {
    Gaussian {
        mu: f64,
        sigma: f64,
    },
    /// Takes value `high` with probability `p`, `low` otherwise.
    Bernoulli {
        p: f64,
        low: f64,
        high: f64,
    },
}

impl AnalyticDistribution {
    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
            return Err(Error::Domain(format!(
                "gaussian needs finite mu and sigma > 0, got ({mu}, {sigma})"
            )));
        }
        Ok(Self::Gaussian { mu, sigma })
    }

    pub fn standard_gaussian() -> Self {
        Self::Gaussian { mu: 0.0, sigma: 1.0 }
    }

    pub fn bernoulli(p: f64, low: f64, high: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("bernoulli p must lie in (0,1), got {p}")));
        }
        if !(low < high && low.is_finite() && high.is_finite()) {
            return Err(Error::Domain(format!(
                "bernoulli support needs low < high, got ({low}, {high})"
            )));
        }
        Ok(Self::Bernoulli { p, low, high })
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Gaussian { sigma, .. } => sigma * sigma,
            Self::Bernoulli { p, low, high } => (high - low).powi(2) * p * (1.0 - p),
        }
    }

    /// Probabilities of `(high, low)` under the exponentially tilted law,
    /// each computed directly so neither underflows to an exact 0 or 1.
    fn tilted_p(p: f64, span: f64, t: f64) -> (f64, f64) {
        let z = t * span + (p / (1.0 - p)).ln();
        let sig = |x: f64| 1.0 / (1.0 + (-x).exp());
        (sig(z), sig(-z))
    }

    /// Closed-form rate function. Bernoulli returns `+inf` outside `[low, high]`.
    pub fn exact_rate(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian { mu, sigma } => (x - mu).powi(2) / (2.0 * sigma * sigma),
            Self::Bernoulli { p, low, high } => {
                if x < low || x > high {
                    return f64::INFINITY;
                }
                let q = (x - low) / (high - low);
                binary_kl(q, p)
            }
        }
    }

    /// P[mean of n draws >= gamma]; only the Gaussian has it in closed form.
    pub fn exact_tail(&self, gamma: f64, n: usize) -> Result<f64> {
        match *self {
            Self::Gaussian { mu, sigma } => Ok(q_function((n as f64).sqrt() * (gamma - mu) / sigma)),
            Self::Bernoulli { .. } => Err(Error::Unsupported(
                "exact n-sample tail is only closed-form for the gaussian".into(),
            )),
        }
    }

    /// Seeded pool of `count` draws.
    pub fn sample(&self, count: usize, seed: u64, hypothesis: Hypothesis) -> Result<ScorePool> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..count).map(|_| self.draw(&mut rng)).collect();
        ScorePool::new(hypothesis, values, Some(seed), format!("oracle:{}", self.label()))
    }

    pub fn label(&self) -> String {
        match *self {
            Self::Gaussian { mu, sigma } => format!("gaussian({mu},{sigma})"),
            Self::Bernoulli { p, low, high } => format!("bernoulli({p},{low},{high})"),
        }
    }
}

/// KL( Bernoulli(q) || Bernoulli(p) ) in nats, with 0 ln 0 = 0.
pub fn binary_kl(q: f64, p: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    term(q, p) + term(1.0 - q, 1.0 - p)
}

impl Lmgf for AnalyticDistribution {
    fn value(&self, t: f64) -> f64 {
        match *self {
            Self::Gaussian { mu, sigma } => mu * t + 0.5 * sigma * sigma * t * t,
            Self::Bernoulli { p, low, high } => {
                // log((1-p) e^{t low} + p e^{t high}), factoring out the larger exponent
                let span = high - low;
                if t * span >= 0.0 {
                    t * high + (p + (1.0 - p) * (-t * span).exp()).ln()
                } else {
                    t * low + ((1.0 - p) + p * (t * span).exp()).ln()
                }
            }
        }
    }

    fn derivatives(&self, t: f64) -> (f64, f64) {
        match *self {
            Self::Gaussian { mu, sigma } => (mu + sigma * sigma * t, sigma * sigma),
            Self::Bernoulli { p, low, high } => {
                let span = high - low;
                let (q, q_low) = Self::tilted_p(p, span, t);
                (low + span * q, span * span * q * q_low)
            }
        }
    }

    fn mean(&self) -> f64 {
        match *self {
            Self::Gaussian { mu, .. } => mu,
            Self::Bernoulli { p, low, high } => low + (high - low) * p,
        }
    }

    fn support(&self) -> (f64, f64) {
        match *self {
            Self::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Bernoulli { low, high, .. } => (low, high),
        }
    }

    fn tilt_limit(&self) -> f64 {
        f64::INFINITY
    }
}

impl ScoreSource for AnalyticDistribution {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Gaussian { mu, sigma } => Normal::new(mu, sigma).expect("validated sigma").sample(rng),
            Self::Bernoulli { p, low, high } => {
                if rng.random::<f64>() < p {
                    high
                } else {
                    low
                }
            }
        }
    }

    fn finite_len(&self) -> Option<usize> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_rate_formula() {
        assert_eq!(AnalyticDistribution::standard_gaussian().exact_rate(2.0), 2.0);
    }

    #[test]
    fn bernoulli_rates() {
        let b = AnalyticDistribution::bernoulli(0.5, -1.0, 1.0).unwrap();
        assert_eq!(b.exact_rate(0.0), 0.0);
        let expected = 0.9 * 1.8f64.ln() + 0.1 * 0.2f64.ln();
        assert!((b.exact_rate(0.8) - expected).abs() < 1e-15);
        assert!((b.exact_rate(0.8) - 0.3681).abs() < 1e-4);
        assert!(b.exact_rate(1.5).is_infinite());
        // endpoint: q = 1 gives -ln p
        assert!((b.exact_rate(1.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn exact_tail_values() {
        let g = AnalyticDistribution::standard_gaussian();
        assert_eq!(g.exact_tail(0.0, 7).unwrap(), 0.5);
        assert!((g.exact_tail(1.0, 1).unwrap() - 0.158_655_253_931_457).abs() < 1e-12);
        let q10 = g.exact_tail(1.0, 100).unwrap();
        assert!((q10 / 7.619_853_024_160_527e-24 - 1.0).abs() < 1e-9, "{q10}");
        let shifted = AnalyticDistribution::gaussian(3.0, 2.0).unwrap();
        assert!((shifted.exact_tail(5.0, 1).unwrap() - 0.158_655_253_931_457).abs() < 1e-12);
        let b = AnalyticDistribution::bernoulli(0.3, 0.0, 1.0).unwrap();
        assert!(matches!(b.exact_tail(0.5, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn lmgf_basics() {
        for d in [
            AnalyticDistribution::gaussian(0.7, 1.3).unwrap(),
            AnalyticDistribution::bernoulli(0.2, -3.0, 2.0).unwrap(),
        ] {
            assert_eq!(d.value(0.0), 0.0);
            assert!((d.derivatives(0.0).0 - d.mean()).abs() < 1e-14);
            assert!((d.derivatives(0.0).1 - d.variance()).abs() < 1e-14);
            assert_eq!(d.exact_rate(d.mean()), 0.0);
            for t in [-40.0, -1.0, 0.5, 3.0, 40.0] {
                assert!(d.value(t).is_finite());
                assert!(d.derivatives(t).1 > 0.0);
            }
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let g = AnalyticDistribution::standard_gaussian();
        let a = g.sample(1000, 9, Hypothesis::H0).unwrap();
        let b = g.sample(1000, 9, Hypothesis::H0).unwrap();
        assert_eq!(a, b);
        let c = g.sample(1000, 10, Hypothesis::H0).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn gaussian_sample_mean() {
        let pool = AnalyticDistribution::standard_gaussian()
            .sample(100_000, 2024, Hypothesis::H0)
            .unwrap();
        let mean = pool.values().iter().sum::<f64>() / pool.len() as f64;
        assert!(mean.abs() < 0.02, "{mean}");
    }

    #[test]
    fn bipolar_sample_mean() {
        let pool = AnalyticDistribution::bernoulli(0.5, -1.0, 1.0)
            .unwrap()
            .sample(200_000, 5, Hypothesis::H1)
            .unwrap();
        let mean = pool.values().iter().sum::<f64>() / pool.len() as f64;
        assert!(mean.abs() < 0.01, "{mean}");
    }

    #[test]
    fn invalid_parameters() {
        assert!(AnalyticDistribution::gaussian(0.0, 0.0).is_err());
        assert!(AnalyticDistribution::bernoulli(1.0, 0.0, 1.0).is_err());
        assert!(AnalyticDistribution::bernoulli(0.5, 1.0, 1.0).is_err());
    }
}
