//! The aggregate decision statistic and the threshold test.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary hypothesis: `H0` is digit 0, `H1` is any other digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    H0,
    H1,
}

impl Hypothesis {
    pub fn from_digit(digit: u8) -> Self {
        if digit == 0 {
            Hypothesis::H0
        } else {
            Hypothesis::H1
        }
    }

    /// 0 or 1.
    pub fn index(self) -> usize {
        match self {
            Hypothesis::H0 => 0,
            Hypothesis::H1 => 1,
        }
    }

    pub fn from_index(k: usize) -> Result<Self> {
        match k {
            0 => Ok(Hypothesis::H0),
            1 => Ok(Hypothesis::H1),
            _ => Err(Error::Domain(format!("hypothesis index {k} is not 0 or 1"))),
        }
    }

    /// BCE target label.
    pub fn label(self) -> f64 {
        self.index() as f64
    }

    /// Whether deciding `decision` when this hypothesis is true is an error.
    pub fn is_error(self, decision: Hypothesis) -> bool {
        self != decision
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::H0 => f.write_str("H0"),
            Hypothesis::H1 => f.write_str("H1"),
        }
    }
}

impl std::str::FromStr for Hypothesis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "H0" | "h0" | "0" => Ok(Hypothesis::H0),
            "H1" | "h1" | "1" => Ok(Hypothesis::H1),
            other => Err(Error::Domain(format!("unknown hypothesis {other:?}"))),
        }
    }
}

/// n elementwise scores, optionally tagged with the hypothesis that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSequence {
    scores: Vec<f64>,
    hypothesis: Option<Hypothesis>,
}

impl ObservationSequence {
    pub fn new(scores: Vec<f64>, hypothesis: Option<Hypothesis>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::Domain("observation sequence is empty".into()));
        }
        if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
            return Err(Error::Numeric(format!("score {bad} in observation sequence")));
        }
        Ok(Self { scores, hypothesis })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn hypothesis(&self) -> Option<Hypothesis> {
        self.hypothesis
    }

    pub fn aggregate(&self) -> f64 {
        mean_of(&self.scores)
    }

    /// Running means T^(1), ..., T^(n).
    pub fn running_aggregate(&self) -> Vec<f64> {
        let mut sum = 0.0;
        self.scores
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                sum += s;
                sum / (i + 1) as f64
            })
            .collect()
    }
}

fn mean_of(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Arithmetic mean of the elementwise scores.
pub fn aggregate(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::Domain("cannot aggregate an empty sequence".into()));
    }
    Ok(mean_of(scores))
}

/// `H1` iff `t >= gamma`; ties go to `H1`.
#[inline]
pub fn decide(t: f64, gamma: f64) -> Hypothesis {
    if t >= gamma {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    }
}
