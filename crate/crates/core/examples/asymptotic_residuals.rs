//! Residuals s(n) - f(n) over log-spaced n. They stay negative and flatten
//! out quickly.
//!
//!     cargo run --release --example asymptotic_residuals -- [n_max]

use seqselect::asymptotics::{log_spaced, residual_scan};
use seqselect::dp::{build_table, Mode};

fn main() -> seqselect::Result<()> {
    let n_max: usize = std::env::args().nth(1).map_or(1_000_000, |a| a.parse().expect("n_max"));
    let table = build_table(n_max, Mode::Float64)?;
    let scan = residual_scan(&table, &log_spaced(10, n_max, 4))?;
    for p in &scan.points {
        println!("{:>9}  {:+.9}", p.n, p.residual);
    }
    println!("spread {:.6}, max |residual| {:.6}", scan.spread(), scan.max_abs_residual());
    Ok(())
}
