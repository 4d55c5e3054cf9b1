//! Monte Carlo error probabilities with Wilson intervals, for a Gaussian
//! law where the answer is known.

use d3f_ldp::montecarlo::{simulate_source, Sampling, SimulationPlan};
use d3f_ldp::oracles::AnalyticDistribution;
use d3f_ldp::Hypothesis;

fn main() -> d3f_ldp::Result<()> {
    let g = AnalyticDistribution::standard_gaussian();
    let plan = SimulationPlan {
        ns: vec![1, 4, 10, 20],
        gammas: vec![0.5, 1.0],
        trials: 1_000_000,
        seed: 3,
        sampling: Sampling::WithReplacement,
    };
    for e in simulate_source(&g, Hypothesis::H0, &plan)? {
        let truth = g.exact_tail(e.gamma, e.n)?;
        println!(
            "gamma {:.1} n {:>2}: {:.3e} [{:.3e}, {:.3e}]  exact {:.3e}{}",
            e.gamma,
            e.n,
            e.p_hat,
            e.wilson_low,
            e.wilson_high,
            truth,
            if e.low_confidence() { "  (low confidence)" } else { "" }
        );
    }
    Ok(())
}
