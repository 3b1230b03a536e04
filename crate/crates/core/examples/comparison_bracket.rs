//! Brackets s(n) between f(n) -/+ the accumulated defect using the one-step
//! comparison checks, and reports where each side's hypothesis holds.

use seqselect::asymptotics::comparison::{verify_lower_comparison, verify_upper_comparison, ComparisonReport};
use seqselect::asymptotics::{estimate_b, f_approx};
use seqselect::dp::{build_table, Mode};

fn main() -> seqselect::Result<()> {
    let n_max = 100_000;
    let b = estimate_b(n_max)?;
    let table = build_table(n_max, Mode::Float64)?;
    let f = |n: usize| f_approx(n as u64).unwrap();
    let delta = |n: usize| b * (n as f64).powf(-1.5);

    let upper = verify_upper_comparison(f, delta, &table)?;
    let lower = verify_lower_comparison(f, delta, &table)?;
    let both = ComparisonReport::combine(&upper, &lower, &table)?;
    println!("upper: {} hypothesis failures, holds from {:?}", upper.hypothesis_failures.len(), upper.holds_from);
    println!("lower: {} hypothesis failures (first {:?})", lower.hypothesis_failures.len(), lower.hypothesis_failures.first());
    for n in [10, 1000, n_max] {
        println!("{:.6} <= s({n}) = {:.6} <= {:.6}", both.bracket_low[n], table.value(n), both.bracket_high[n]);
    }
    println!("bracket holds everywhere: {}", both.conclusion_holds());
    Ok(())
}
