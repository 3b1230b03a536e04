//! Where does s(n) overtake sqrt(2n)? And where does f(n)?

use seqselect::asymptotics::f_approx;
use seqselect::cli::first_crossing;
use seqselect::dp::{build_table, Mode};

fn main() -> seqselect::Result<()> {
    let table = build_table(1000, Mode::Float64)?;
    let n = first_crossing(|n| table.value(n), 1000).expect("crosses below 1000");
    for m in n - 2..=n + 1 {
        println!("s({m}) = {:.9}  sqrt(2*{m}) = {:.9}", table.value(m), (2.0 * m as f64).sqrt());
    }
    println!("first crossing of s: {n}");
    let nf = first_crossing(|n| f_approx(n as u64).unwrap(), 1000).unwrap();
    println!("first crossing of f: {nf}");
    Ok(())
}
