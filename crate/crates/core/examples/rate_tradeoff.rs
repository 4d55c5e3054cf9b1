//! The (I0, I1) tradeoff as the threshold sweeps from mu0 to mu1.

use d3f_ldp::characterize::moments;
use d3f_ldp::ldp::rate_tradeoff;
use d3f_ldp::oracles::AnalyticDistribution;
use d3f_ldp::Hypothesis;

fn main() -> d3f_ldp::Result<()> {
    let c0 = moments(AnalyticDistribution::gaussian(-3.0, 2.0)?.sample(50_000, 5, Hypothesis::H0)?)?;
    let c1 = moments(AnalyticDistribution::gaussian(4.0, 3.0)?.sample(50_000, 6, Hypothesis::H1)?)?;
    println!("position,gamma,I0,I1");
    for p in rate_tradeoff(&c0, &c1, 21)? {
        println!("{:.2},{:.4},{:.6},{:.6}", p.position, p.gamma, p.i0, p.i1);
    }
    Ok(())
}
