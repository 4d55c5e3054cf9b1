//! Exact-asymptotics tail estimate against the Gaussian tail and the
//! plain CLT/Chernoff terms.

use d3f_ldp::ldp::{exact_asymptotics, prefactor, rate_function};
use d3f_ldp::oracles::AnalyticDistribution;
use d3f_ldp::Hypothesis;

fn main() -> d3f_ldp::Result<()> {
    let g = AnalyticDistribution::standard_gaussian();
    let r = rate_function(&g, 1.0, Hypothesis::H0)?;
    println!("I(1) = {}, t* = {}", r.rate, r.t_star);
    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>9}",
        "n", "exact", "zeta e^-nI", "e^-nI", "ratio"
    );
    for n in [1, 5, 10, 20, 50, 100, 400] {
        let exact = g.exact_tail(1.0, n)?;
        let approx = exact_asymptotics(&r, n)?;
        let chernoff = (-(n as f64) * r.rate).exp();
        println!(
            "{n:>5} {exact:>12.4e} {approx:>12.4e} {chernoff:>12.4e} {:>9.4}   zeta {:.4}",
            approx / exact,
            prefactor(&r, n)?
        );
    }
    Ok(())
}
