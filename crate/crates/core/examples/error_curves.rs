//! Empirical, CLT and LDP error curves for two skewed synthetic pools,
//! written as CSV to stdout.

use d3f_ldp::characterize::moments;
use d3f_ldp::ldp::{error_curves, gamma_at, interior_positions, write_curve_csv};
use d3f_ldp::montecarlo::{simulate, Sampling, SimulationPlan};
use d3f_ldp::oracles::AnalyticDistribution;
use d3f_ldp::Hypothesis;

fn main() -> d3f_ldp::Result<()> {
    // skewed two-point pools so the LDP and CLT curves separate visibly
    let c0 = moments(AnalyticDistribution::bernoulli(0.1, -2.0, 3.0)?.sample(50_000, 1, Hypothesis::H0)?)?;
    let c1 = moments(AnalyticDistribution::bernoulli(0.8, -1.0, 4.0)?.sample(50_000, 2, Hypothesis::H1)?)?;
    let gammas: Vec<f64> = interior_positions(3)
        .iter()
        .map(|&p| gamma_at(c0.mu, c1.mu, p))
        .collect();
    let ns: Vec<usize> = (1..=10).collect();

    let grid = error_curves(&c0, &c1, &gammas, &ns);
    let plan = SimulationPlan {
        ns: ns.clone(),
        gammas: gammas.clone(),
        trials: 100_000,
        seed: 11,
        sampling: Sampling::WithReplacement,
    };
    let mut records: Vec<_> = simulate(c0.pool(), &plan)?.iter().map(|e| e.to_record()).collect();
    records.extend(grid.records(Hypothesis::H0));
    write_curve_csv(std::io::stdout().lock(), &records)
}
