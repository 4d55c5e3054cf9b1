//! Rate functions, saddle points, and the two error-probability approximations.
//!
//! For a threshold `gamma` between the two means, the false-alarm probability
//! `alpha_n = P[T >= gamma | H0]` and the miss probability
//! `beta_n = P[T < gamma | H1]` are approximated either by the CLT,
//!
//! ```text
//! alpha_n ~ Q( sqrt(n) (gamma - mu0) / sigma0 )
//! beta_n  ~ Q( sqrt(n) (mu1 - gamma) / sigma1 )
//! ```
//!
//! or by exact asymptotics, `zeta_{n,k} * exp(-n I_k(gamma))` with
//!
//! ```text
//! I_k(gamma)  = sup_t [ gamma t - phi_k(t) ]
//! zeta_{n,k}  = 1 / ( t* sqrt(2 pi n phi_k''(s)) ),   phi_k'(s) = gamma,  t* = |s|
//! ```
//!
//! where `s > 0` for the right tail under `H0` and `s < 0` for the left tail
//! under `H1`. The supremum is located by solving the saddle condition
//! `phi'(s) = gamma` with an expanding bracket and bisection; `phi'` is
//! monotone so this always converges when the root exists.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characterize::Characterization;
use crate::error::{Error, Result};
use crate::statistic::Hypothesis;

/// Relative tolerance on the saddle condition.
pub const ROOT_TOLERANCE: f64 = 1e-10;
/// Fraction of `(mu1 - mu0)` by which interior grid points avoid the means.
pub const GRID_INSET: f64 = 1e-6;
const MAX_BRACKET_DOUBLINGS: usize = 2048;
const MAX_BISECTIONS: usize = 400;

/// A log-moment generating function with its first two derivatives.
pub trait Lmgf {
    fn value(&self, t: f64) -> f64;
    /// `(phi'(t), phi''(t))`.
    fn derivatives(&self, t: f64) -> (f64, f64);
    fn mean(&self) -> f64;
    /// Closure of the support of the underlying law (may be infinite).
    fn support(&self) -> (f64, f64);
    /// Largest |t| the bracket may expand to.
    fn tilt_limit(&self) -> f64;
}

/// Standard normal upper tail.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub hypothesis: Hypothesis,
    pub gamma: f64,
    /// Rate in nats per observation.
    pub rate: f64,
    /// Signed saddle point `s` with `phi'(s) = gamma`.
    pub tilt: f64,
    /// `|tilt|`.
    pub t_star: f64,
    /// `phi''(tilt)`.
    pub phi2_at_tilt: f64,
}

fn tail_sign(k: Hypothesis) -> f64 {
    match k {
        Hypothesis::H0 => 1.0,
        Hypothesis::H1 => -1.0,
    }
}

/// Legendre transform of `lmgf` at `gamma`, on the tail that is an error
/// under hypothesis `k`.
pub fn rate_function<L: Lmgf + ?Sized>(lmgf: &L, gamma: f64, k: Hypothesis) -> Result<RateResult> {
    if !gamma.is_finite() {
        return Err(Error::Numeric(format!("threshold {gamma}")));
    }
    let mu = lmgf.mean();
    let (lo, hi) = lmgf.support();
    let tol = ROOT_TOLERANCE * gamma.abs().max(1.0);
    let sign = tail_sign(k);

    if (gamma - mu).abs() <= tol {
        return Ok(RateResult {
            hypothesis: k,
            gamma,
            rate: 0.0,
            tilt: 0.0,
            t_star: 0.0,
            phi2_at_tilt: lmgf.derivatives(0.0).1,
        });
    }
    match k {
        Hypothesis::H0 if gamma < mu => {
            return Err(Error::Domain(format!(
                "H0 rate needs gamma in [{mu}, {hi}), got {gamma}"
            )))
        }
        Hypothesis::H1 if gamma > mu => {
            return Err(Error::Domain(format!(
                "H1 rate needs gamma in ({lo}, {mu}], got {gamma}"
            )))
        }
        _ => {}
    }
    if gamma >= hi || gamma <= lo {
        return Err(Error::Unattainable {
            gamma,
            min: lo,
            max: hi,
        });
    }

    // u = sign * s >= 0; g(u) = sign * (phi'(sign * u) - gamma) is increasing with g(0) < 0.
    let g = |u: f64| sign * (lmgf.derivatives(sign * u).0 - gamma);
    let limit = lmgf.tilt_limit();
    let mut a = 0.0;
    let mut b = 1.0f64.min(limit);
    let mut gb = g(b);
    let mut doublings = 0;
    while gb < 0.0 {
        if b >= limit || doublings >= MAX_BRACKET_DOUBLINGS {
            return Err(Error::Unattainable {
                gamma,
                min: lo,
                max: hi,
            });
        }
        a = b;
        b = (2.0 * b).min(limit);
        gb = g(b);
        doublings += 1;
    }

    let mut u = b;
    let mut gu = gb;
    for _ in 0..MAX_BISECTIONS {
        if gu.abs() <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid);
        if gm < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        u = mid;
        gu = gm;
    }

    let s = sign * u;
    let rate = (gamma * s - lmgf.value(s)).max(0.0);
    Ok(RateResult {
        hypothesis: k,
        gamma,
        rate,
        tilt: s,
        t_star: u,
        phi2_at_tilt: lmgf.derivatives(s).1,
    })
}

/// `zeta_{n,k}`, the sub-exponential prefactor.
pub fn prefactor(rate: &RateResult, n: usize) -> Result<f64> {
    log_prefactor(rate, n).map(f64::exp)
}

fn log_prefactor(rate: &RateResult, n: usize) -> Result<f64> {
    if rate.t_star <= 0.0 || rate.phi2_at_tilt <= 0.0 {
        return Err(Error::PrefactorUndefined);
    }
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let two_pi_n = 2.0 * std::f64::consts::PI * n as f64;
    Ok(-(rate.t_star.ln() + 0.5 * (two_pi_n * rate.phi2_at_tilt).ln()))
}

/// `zeta_{n,k} exp(-n I)` evaluated in log space and clamped to `[0, 1]`.
pub fn exact_asymptotics(rate: &RateResult, n: usize) -> Result<f64> {
    let log_p = log_prefactor(rate, n)? - n as f64 * rate.rate;
    if log_p > 0.0 {
        log::debug!(
            "exact asymptotics clamped to 1 at gamma={}, n={n} (raw {})",
            rate.gamma,
            log_p.exp()
        );
        return Ok(1.0);
    }
    Ok(log_p.exp())
}

/// CLT tail for the error event under `k`.
pub fn clt_error(mu: f64, sigma: f64, gamma: f64, n: usize, k: Hypothesis) -> f64 {
    let root_n = (n as f64).sqrt();
    match k {
        Hypothesis::H0 => q_function(root_n * (gamma - mu) / sigma),
        Hypothesis::H1 => q_function(root_n * (mu - gamma) / sigma),
    }
}

pub fn clt_alpha(char0: &Characterization, gamma: f64, n: usize) -> f64 {
    clt_error(char0.mu, char0.sigma, gamma, n, Hypothesis::H0)
}

pub fn clt_beta(char1: &Characterization, gamma: f64, n: usize) -> f64 {
    clt_error(char1.mu, char1.sigma, gamma, n, Hypothesis::H1)
}

/// Both approximations of both error kinds at one `(gamma, n)` cell.
/// Missing LDP values come with a note in the owning [`CurveGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxPoint {
    pub n: usize,
    pub gamma: f64,
    pub alpha_clt: f64,
    pub beta_clt: f64,
    pub alpha_ldp: Option<f64>,
    pub beta_ldp: Option<f64>,
    pub zeta0: Option<f64>,
    pub zeta1: Option<f64>,
    pub rate0: Option<RateResult>,
    pub rate1: Option<RateResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaDiagnostic {
    pub gamma: f64,
    pub hypothesis: Hypothesis,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveGrid {
    /// Ordered gamma-major, then by n in the order given.
    pub points: Vec<ApproxPoint>,
    pub diagnostics: Vec<GammaDiagnostic>,
}

fn rate_or_note(
    c: &Characterization,
    gamma: f64,
    k: Hypothesis,
    range: (f64, f64),
    notes: &mut Vec<GammaDiagnostic>,
) -> Option<RateResult> {
    let outcome = if gamma <= range.0 || gamma >= range.1 {
        Err(Error::Domain(format!(
            "gamma {gamma} is outside (mu0, mu1) = ({}, {})",
            range.0, range.1
        )))
    } else {
        rate_function(c, gamma, k)
    };
    match outcome {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(GammaDiagnostic {
                gamma,
                hypothesis: k,
                message: e.to_string(),
            });
            None
        }
    }
}

/// CLT and exact-asymptotics values over the full `(gamma, n)` grid.
pub fn error_curves(char0: &Characterization, char1: &Characterization, gammas: &[f64], ns: &[usize]) -> CurveGrid {
    let range = (char0.mu, char1.mu);
    let per_gamma: Vec<(Vec<ApproxPoint>, Vec<GammaDiagnostic>)> = gammas
        .par_iter()
        .map(|&gamma| {
            let mut notes = Vec::new();
            let r0 = rate_or_note(char0, gamma, Hypothesis::H0, range, &mut notes);
            let r1 = rate_or_note(char1, gamma, Hypothesis::H1, range, &mut notes);
            let mut ldp = |r: &Option<RateResult>, n: usize| -> (Option<f64>, Option<f64>) {
                let Some(r) = r else { return (None, None) };
                match (exact_asymptotics(r, n), prefactor(r, n)) {
                    (Ok(p), Ok(z)) => (Some(p), Some(z)),
                    (Err(e), _) | (_, Err(e)) => {
                        notes.push(GammaDiagnostic {
                            gamma,
                            hypothesis: r.hypothesis,
                            message: format!("n={n}: {e}"),
                        });
                        (None, None)
                    }
                }
            };
            let points = ns
                .iter()
                .map(|&n| {
                    let (alpha_ldp, zeta0) = ldp(&r0, n);
                    let (beta_ldp, zeta1) = ldp(&r1, n);
                    ApproxPoint {
                        n,
                        gamma,
                        alpha_clt: clt_alpha(char0, gamma, n),
                        beta_clt: clt_beta(char1, gamma, n),
                        alpha_ldp,
                        beta_ldp,
                        zeta0,
                        zeta1,
                        rate0: r0,
                        rate1: r1,
                    }
                })
                .collect();
            (points, notes)
        })
        .collect();

    let mut grid = CurveGrid::default();
    for (points, notes) in per_gamma {
        grid.points.extend(points);
        grid.diagnostics.extend(notes);
    }
    grid
}

/// Threshold at relative position `p` of `(mu0, mu1)`. Interior positions
/// are kept `GRID_INSET` away from either mean.
pub fn gamma_at(mu0: f64, mu1: f64, position: f64) -> f64 {
    let p = if position <= 0.0 {
        0.0
    } else if position >= 1.0 {
        1.0
    } else {
        position.clamp(GRID_INSET, 1.0 - GRID_INSET)
    };
    mu0 + p * (mu1 - mu0)
}

/// `count` evenly spaced relative positions strictly inside (0, 1).
pub fn interior_positions(count: usize) -> Vec<f64> {
    (1..=count).map(|i| i as f64 / (count + 1) as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    /// Relative position in `[0, 1]` between `mu0` and `mu1`.
    pub position: f64,
    pub gamma: f64,
    pub i0: f64,
    pub i1: f64,
}

fn rate_or_infinite(c: &Characterization, gamma: f64, k: Hypothesis) -> Result<f64> {
    match rate_function(c, gamma, k) {
        Ok(r) => Ok(r.rate),
        Err(Error::Unattainable { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// `(I0, I1)` at the given relative positions. Endpoints carry the trivial
/// zero rate on their own side; unattainable rates are `+inf`.
pub fn rate_tradeoff_at(
    char0: &Characterization,
    char1: &Characterization,
    positions: &[f64],
) -> Result<Vec<TradeoffPoint>> {
    let (mu0, mu1) = (char0.mu, char1.mu);
    if mu0 >= mu1 {
        return Err(Error::Separation { mu0, mu1 });
    }
    positions
        .par_iter()
        .map(|&position| {
            let gamma = gamma_at(mu0, mu1, position);
            let i0 = if position <= 0.0 {
                0.0
            } else {
                rate_or_infinite(char0, gamma, Hypothesis::H0)?
            };
            let i1 = if position >= 1.0 {
                0.0
            } else {
                rate_or_infinite(char1, gamma, Hypothesis::H1)?
            };
            Ok(TradeoffPoint {
                position: position.clamp(0.0, 1.0),
                gamma,
                i0,
                i1,
            })
        })
        .collect()
}

/// `grid_size` evenly spaced thresholds from `mu0` to `mu1` inclusive.
pub fn rate_tradeoff(
    char0: &Characterization,
    char1: &Characterization,
    grid_size: usize,
) -> Result<Vec<TradeoffPoint>> {
    if grid_size < 2 {
        return Err(Error::Domain(format!(
            "tradeoff grid needs at least 2 points, got {grid_size}"
        )));
    }
    let positions: Vec<f64> = (0..grid_size).map(|i| i as f64 / (grid_size - 1) as f64).collect();
    rate_tradeoff_at(char0, char1, &positions)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Empirical,
    Clt,
    Ldp,
}

/// One row of the shared curve CSV/JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub hypothesis: Hypothesis,
    pub gamma: f64,
    pub n: usize,
    pub kind: CurveKind,
    pub value: Option<f64>,
    pub zeta: Option<f64>,
    #[serde(rename = "I")]
    pub rate: Option<f64>,
    pub t_star: Option<f64>,
    pub wilson_low: Option<f64>,
    pub wilson_high: Option<f64>,
    pub events: Option<u64>,
    pub trials: Option<u64>,
    /// Empty, `low-confidence`, or a reason the value is missing.
    pub note: String,
}

pub const CURVE_HEADER: [&str; 13] = [
    "hypothesis",
    "gamma",
    "n",
    "kind",
    "value",
    "zeta",
    "I",
    "t_star",
    "wilson_low",
    "wilson_high",
    "events",
    "trials",
    "note",
];

impl CurveRecord {
    fn bare(hypothesis: Hypothesis, gamma: f64, n: usize, kind: CurveKind) -> Self {
        Self {
            hypothesis,
            gamma,
            n,
            kind,
            value: None,
            zeta: None,
            rate: None,
            t_star: None,
            wilson_low: None,
            wilson_high: None,
            events: None,
            trials: None,
            note: String::new(),
        }
    }
}

impl CurveGrid {
    /// Flattens to CLT and LDP records of the given hypothesis.
    pub fn records(&self, k: Hypothesis) -> Vec<CurveRecord> {
        let mut out = Vec::with_capacity(2 * self.points.len());
        for p in &self.points {
            let (clt, ldp, zeta, rate) = match k {
                Hypothesis::H0 => (p.alpha_clt, p.alpha_ldp, p.zeta0, p.rate0),
                Hypothesis::H1 => (p.beta_clt, p.beta_ldp, p.zeta1, p.rate1),
            };
            let mut c = CurveRecord::bare(k, p.gamma, p.n, CurveKind::Clt);
            c.value = Some(clt);
            out.push(c);
            let mut l = CurveRecord::bare(k, p.gamma, p.n, CurveKind::Ldp);
            l.value = ldp;
            l.zeta = zeta;
            l.rate = rate.map(|r| r.rate);
            l.t_star = rate.map(|r| r.t_star);
            if ldp.is_none() {
                l.note = self
                    .diagnostics
                    .iter()
                    .find(|d| d.gamma == p.gamma && d.hypothesis == k)
                    .map_or_else(|| "missing".to_string(), |d| d.message.clone());
            }
            out.push(l);
        }
        out
    }
}

pub fn write_curve_csv<W: Write>(w: W, records: &[CurveRecord]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(CURVE_HEADER)?;
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(|e| Error::io("<curve csv>", e))?;
    Ok(())
}

pub fn read_curve_csv<R: std::io::Read>(r: R) -> Result<Vec<CurveRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CURVE_HEADER {
        return Err(Error::Consistency(format!("unexpected curve header {header:?}")));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn write_curve_json<W: Write>(w: W, records: &[CurveRecord]) -> Result<()> {
    serde_json::to_writer_pretty(w, records)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characterize::{moments, ScorePool};
    use crate::oracles::AnalyticDistribution;

    fn char_of(values: &[f64], k: Hypothesis) -> Characterization {
        moments(ScorePool::new(k, values.to_vec(), None, "t").unwrap()).unwrap()
    }

    #[test]
    fn q_function_points() {
        assert_eq!(q_function(0.0), 0.5);
        assert!((q_function(1.0) - 0.158_655_253_931_457).abs() < 1e-14);
        assert!((q_function(10.0) / 7.619_853_024_160_526e-24 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rate_at_mean_is_zero() {
        let c = char_of(&[-2.0, -1.0, 0.5, 3.0], Hypothesis::H0);
        let r = rate_function(&c, c.mu, Hypothesis::H0).unwrap();
        assert_eq!((r.rate, r.t_star), (0.0, 0.0));
        let r = rate_function(&c, c.mu, Hypothesis::H1).unwrap();
        assert_eq!((r.rate, r.t_star), (0.0, 0.0));
    }

    #[test]
    fn gaussian_closed_form() {
        let d = AnalyticDistribution::gaussian(0.5, 2.0).unwrap();
        let r = rate_function(&d, 3.0, Hypothesis::H0).unwrap();
        assert!((r.rate - 2.5f64.powi(2) / 8.0).abs() < 1e-10);
        assert!((r.t_star - 2.5 / 4.0).abs() < 1e-9);
        assert!(r.tilt > 0.0);
        let r = rate_function(&d, -1.0, Hypothesis::H1).unwrap();
        assert!((r.rate - 1.5f64.powi(2) / 8.0).abs() < 1e-10);
        assert!(r.tilt < 0.0);
    }

    #[test]
    fn bernoulli_kl_point() {
        let d = AnalyticDistribution::bernoulli(0.5, 0.0, 1.0).unwrap();
        let r = rate_function(&d, 0.9, Hypothesis::H0).unwrap();
        assert!((r.rate - 0.368_064_207_168_497).abs() < 1e-9);
    }

    #[test]
    fn wrong_side_and_beyond_support() {
        let c = char_of(&[-2.0, -1.0, 0.5, 3.0], Hypothesis::H0);
        assert!(matches!(rate_function(&c, -1.5, Hypothesis::H0), Err(Error::Domain(_))));
        assert!(matches!(rate_function(&c, 1.0, Hypothesis::H1), Err(Error::Domain(_))));
        assert!(matches!(
            rate_function(&c, 3.0, Hypothesis::H0),
            Err(Error::Unattainable { .. })
        ));
        assert!(matches!(
            rate_function(&c, 5.0, Hypothesis::H0),
            Err(Error::Unattainable { .. })
        ));
        assert!(matches!(
            rate_function(&c, -2.0, Hypothesis::H1),
            Err(Error::Unattainable { .. })
        ));
    }

    #[test]
    fn tilt_guard_reports_unattainable() {
        // |tau| <= 1000 caps the tilt at 0.7, while 0.99 needs s of about 11.5
        let mut v = vec![0.0; 1000];
        v.push(1.0);
        v.push(-1000.0);
        let c = char_of(&v, Hypothesis::H0);
        assert!(matches!(
            rate_function(&c, 0.99, Hypothesis::H0),
            Err(Error::Unattainable { .. })
        ));
        assert!(rate_function(&c, -0.5, Hypothesis::H0).is_ok());
    }

    #[test]
    fn standard_gaussian_prefactor() {
        let d = AnalyticDistribution::standard_gaussian();
        let r = rate_function(&d, 1.0, Hypothesis::H0).unwrap();
        let z = prefactor(&r, 100).unwrap();
        assert!((z - 1.0 / (200.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
        assert!((z - 0.03989).abs() < 1e-5);
        let p = exact_asymptotics(&r, 100).unwrap();
        assert!((p / (z * (-50f64).exp()) - 1.0).abs() < 1e-8);
        let truth = q_function(10.0);
        assert!((p / truth - 1.0).abs() < 0.02);
        let ratio = prefactor(&r, 200).unwrap() / z;
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn prefactor_undefined_at_mean() {
        let d = AnalyticDistribution::standard_gaussian();
        let r = rate_function(&d, 0.0, Hypothesis::H0).unwrap();
        assert!(matches!(exact_asymptotics(&r, 10), Err(Error::PrefactorUndefined)));
    }

    #[test]
    fn clamps_to_one() {
        let d = AnalyticDistribution::standard_gaussian();
        let r = rate_function(&d, 0.01, Hypothesis::H0).unwrap();
        assert_eq!(exact_asymptotics(&r, 1).unwrap(), 1.0);
    }

    #[test]
    fn clt_columns() {
        let c0 = char_of(&[-3.0, -1.0, 0.0, 0.5], Hypothesis::H0);
        for n in [1, 10, 1000] {
            assert_eq!(clt_alpha(&c0, c0.mu, n), 0.5);
        }
        let q1 = clt_alpha(&c0, c0.mu + c0.sigma, 1);
        assert!((q1 - 0.158_655_253_931_457).abs() < 1e-12);
        let mut last = 1.0;
        for n in 1..50 {
            let a = clt_alpha(&c0, c0.mu + 0.3, n);
            assert!(a < last);
            last = a;
        }
    }

    #[test]
    fn curves_interior_point() {
        let c0 = char_of(&[-4.0, -3.0, -2.5, -1.0, 1.0], Hypothesis::H0);
        let c1 = char_of(&[-1.0, 1.5, 2.0, 3.0, 4.0], Hypothesis::H1);
        let mid = 0.5 * (c0.mu + c1.mu);
        let grid = error_curves(&c0, &c1, &[mid], &[1]);
        assert!(grid.diagnostics.is_empty(), "{:?}", grid.diagnostics);
        let p = &grid.points[0];
        for v in [p.alpha_clt, p.beta_clt, p.alpha_ldp.unwrap(), p.beta_ldp.unwrap()] {
            assert!(v > 0.0 && v < 1.0, "{p:?}");
        }
    }

    #[test]
    fn curves_flag_bad_gamma() {
        let c0 = char_of(&[-4.0, -3.0, -2.5, -1.0, 1.0], Hypothesis::H0);
        let c1 = char_of(&[-1.0, 1.5, 2.0, 3.0, 4.0], Hypothesis::H1);
        let grid = error_curves(&c0, &c1, &[-10.0, 0.0], &[1, 2]);
        assert_eq!(grid.points.len(), 4);
        assert!(grid.points[0].alpha_ldp.is_none());
        assert!(grid.points[2].alpha_ldp.is_some());
        assert!(grid.diagnostics.iter().any(|d| d.gamma == -10.0));
    }

    #[test]
    fn tradeoff_separation_error() {
        let c0 = char_of(&[1.0, 2.0, 3.0], Hypothesis::H0);
        let c1 = char_of(&[-1.0, 0.0, 1.0], Hypothesis::H1);
        assert!(matches!(rate_tradeoff(&c0, &c1, 5), Err(Error::Separation { .. })));
    }

    #[test]
    fn curve_csv_round_trip() {
        let c0 = char_of(&[-4.0, -3.0, -2.5, -1.0, 1.0], Hypothesis::H0);
        let c1 = char_of(&[-1.0, 1.5, 2.0, 3.0, 4.0], Hypothesis::H1);
        let grid = error_curves(&c0, &c1, &[-0.5, 0.0, 10.0], &[1, 3]);
        let recs = grid.records(Hypothesis::H0);
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &recs).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("hypothesis,gamma,n,kind,value,zeta,I,t_star,"));
        let back = read_curve_csv(buf.as_slice()).unwrap();
        assert_eq!(back, recs);
    }
}
