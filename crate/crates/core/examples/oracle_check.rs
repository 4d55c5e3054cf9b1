//! The closed-form self-check that `d3f oracle-check` runs.

fn main() -> d3f_ldp::Result<()> {
    for c in d3f_ldp::pipeline::oracle_checks(1)? {
        println!(
            "{} {:<28} {:.3e} <= {:.0e}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.worst_error,
            c.tolerance
        );
    }
    Ok(())
}
