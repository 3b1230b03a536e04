//! The maximizing k for f against sqrt(2n), alongside the root x_n of the
//! first-order condition and the maximizer from the exact table.

use seqselect::asymptotics::{kstar_from_f, log_spaced, solve_xn, DEFAULT_TOL};
use seqselect::dp::{build_table, Mode};

fn main() -> seqselect::Result<()> {
    let n_max = 1_000_000;
    let table = build_table(n_max + 1, Mode::Float64)?;
    println!("{:>8} {:>7} {:>7} {:>14} {:>10} {:>6}", "n", "k*(f)", "k*(s)", "x_n", "k-sqrt2n", "iters");
    for n in log_spaced(10, n_max, 2) {
        let root = solve_xn(n as u64, DEFAULT_TOL)?;
        let k = kstar_from_f(n as u64)?;
        println!(
            "{n:>8} {k:>7} {:>7} {:>14.6} {:>+10.4} {:>6}",
            table.maximizer(n).unwrap(),
            root.x_n,
            k as f64 - (2.0 * n as f64).sqrt(),
            root.iterations
        );
    }
    Ok(())
}
