//! Feeds a permutation through a uniform embedding to the i.i.d. policy.
//! The resulting permutation policy does at least as well as the i.i.d.
//! value, and no better than the optimal permutation policy.

use seqselect::dp::{build_table, Mode};
use seqselect::iid::IidValueGrid;
use seqselect::sim::{monte_carlo, Policy};

fn main() -> seqselect::Result<()> {
    let horizon = 200;
    let grid = IidValueGrid::build(horizon, 2000)?;
    let table = build_table(horizon, Mode::Float64)?;
    for n in [10, 50, 200] {
        let r = monte_carlo(n, 20_000, 7, &Policy::Reduction(&grid))?;
        println!(
            "n = {n:>3}: reduction {:.4} +/- {:.4}, shat {:.4}, s {:.4}",
            r.mean,
            r.stderr,
            grid.shat(n)?,
            table.value(n)
        );
    }
    // acceptance window for the first observation when nothing is taken yet
    println!("first-step threshold x*({horizon}, 1) = {:.5}", grid.acceptance_threshold(horizon, 1.0)?);
    Ok(())
}
