//! Empirical log-moment generating function of a sampled pool against the
//! exact one.

use d3f_ldp::characterize::moments;
use d3f_ldp::ldp::Lmgf;
use d3f_ldp::oracles::AnalyticDistribution;
use d3f_ldp::Hypothesis;

fn main() -> d3f_ldp::Result<()> {
    let law = AnalyticDistribution::gaussian(-1.0, 2.0)?;
    let c = moments(law.sample(100_000, 1, Hypothesis::H0)?)?;
    println!("{:>6} {:>12} {:>12} {:>10}", "t", "phi_hat", "phi", "phi_hat''");
    for i in -4..=4 {
        let t = i as f64 * 0.25;
        let (_, d2) = c.lmgf_derivatives(t);
        println!("{t:>6.2} {:>12.6} {:>12.6} {d2:>10.4}", c.lmgf(t), law.value(t));
    }
    Ok(())
}
