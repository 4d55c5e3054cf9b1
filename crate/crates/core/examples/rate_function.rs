//! Rate functions from a two-point pool and from a Bernoulli law, with the
//! solved tilt and the closed form alongside.

use d3f_ldp::characterize::{moments, ScorePool};
use d3f_ldp::ldp::rate_function;
use d3f_ldp::oracles::AnalyticDistribution;
use d3f_ldp::{Error, Hypothesis};

fn main() -> d3f_ldp::Result<()> {
    let pool = ScorePool::new(Hypothesis::H0, vec![-1.0, 1.0], None, "two-point")?;
    let c = moments(pool)?;
    let law = AnalyticDistribution::bernoulli(0.5, -1.0, 1.0)?;

    println!("{:>6} {:>10} {:>10} {:>10}", "gamma", "I_pool", "I_exact", "tilt");
    for gamma in [0.0, 0.2, 0.4, 0.6, 0.8, 0.95, 1.0] {
        match rate_function(&c, gamma, Hypothesis::H0) {
            Ok(r) => println!(
                "{gamma:>6.2} {:>10.6} {:>10.6} {:>10.4}",
                r.rate,
                law.exact_rate(gamma),
                r.tilt
            ),
            Err(Error::Unattainable { .. }) => {
                println!("{gamma:>6.2} {:>10} {:>10.6}", "unattained", law.exact_rate(gamma))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
