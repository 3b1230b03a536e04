//! Grid value iteration for the i.i.d. uniform problem: ŝ(n) against
//! sqrt(2n), the M vs 2M refinement gap, and concavity of n -> ŝ(n).
//!
//!     cargo run --release --example iid_grid -- [horizon] [grid_size]

use seqselect::iid::{grid_concavity, shat_curve, DEFAULT_GRID};

fn main() -> seqselect::Result<()> {
    let mut args = std::env::args().skip(1);
    let horizon: usize = args.next().map_or(500, |a| a.parse().expect("horizon"));
    let m: usize = args.next().map_or(DEFAULT_GRID, |a| a.parse().expect("grid size"));

    let coarse = shat_curve(horizon, m)?;
    let fine = shat_curve(horizon, 2 * m)?;
    let finer = shat_curve(horizon, 4 * m)?;

    println!("{:>6} {:>12} {:>12} {:>12} {:>10}", "n", "shat", "sqrt(2n)", "gap M/2M", "gap ratio");
    for n in [1, 2, 5, 10, 20, 50, 100, 200, 500].into_iter().filter(|&n| n <= horizon) {
        let gap = fine[n] - coarse[n];
        let next_gap = finer[n] - fine[n];
        println!(
            "{n:>6} {:>12.8} {:>12.8} {:>12.3e} {:>10.3}",
            coarse[n],
            (2.0 * n as f64).sqrt(),
            gap,
            gap / next_gap
        );
    }

    let concavity = grid_concavity(horizon.min(200), m)?;
    println!(
        "concavity up to n = {}: passed = {}, worst excess = {:.3e}",
        horizon.min(200),
        concavity.passed,
        concavity.worst_excess
    );
    Ok(())
}
