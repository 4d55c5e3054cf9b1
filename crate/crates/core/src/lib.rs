//! Error-probability analysis of a learned binary decision statistic.
//!
//! A small network maps each observation to a score (the log-posterior
//! ratio of its two outputs); the decision statistic is the mean of `n`
//! scores, compared against a threshold. This crate
//!
//! - parses MNIST and builds the digit-0-vs-rest task ([`ingest`]),
//! - trains the scorer and extracts scores ([`model`]),
//! - forms and thresholds the aggregate statistic ([`statistic`]),
//! - estimates moments and the empirical log-MGF of a score pool ([`characterize`]),
//! - computes rate functions, saddle points, CLT and exact-asymptotics
//!   error probabilities ([`ldp`]),
//! - estimates the same probabilities by simulation ([`montecarlo`]),
//! - provides Gaussian and Bernoulli ground truth ([`oracles`]),
//! - and wires everything into figure-ready CSV outputs ([`pipeline`]).
//!
//! ```
//! use d3f_ldp::characterize::{moments, ScorePool};
//! use d3f_ldp::ldp::{exact_asymptotics, rate_function};
//! use d3f_ldp::Hypothesis;
//!
//! // fair +-1 scores: the rate at 0.6 is KL(0.8 || 0.5)
//! let pool = ScorePool::new(Hypothesis::H0, vec![-1.0, 1.0], None, "demo")?;
//! let c0 = moments(pool)?;
//! let r = rate_function(&c0, 0.6, Hypothesis::H0)?;
//! let kl = 0.8 * 1.6f64.ln() + 0.2 * 0.4f64.ln();
//! assert!((r.rate - kl).abs() < 1e-10);
//! let alpha_50 = exact_asymptotics(&r, 50)?;
//! assert!(alpha_50 < (-50.0 * kl).exp());
//! # Ok::<(), d3f_ldp::Error>(())
//! ```

pub mod characterize;
pub mod error;
pub mod ingest;
pub mod ldp;
pub mod model;
pub mod montecarlo;
pub mod oracles;
pub mod pipeline;
pub mod statistic;

pub use error::{Error, Result};
pub use statistic::Hypothesis;
