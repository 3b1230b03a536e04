//! Builds the value table s(n) and prints a few rows next to sqrt(2n) and
//! the approximation f(n), then optionally caches it to disk.
//!
//!     cargo run --release --example value_table -- [n_max] [cache.csv[.gz]]

use std::path::PathBuf;

use seqselect::asymptotics::f_approx;
use seqselect::dp::{build_table, load_table, save_table, Mode};

fn main() -> seqselect::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_max: usize = args.next().map_or(100_000, |a| a.parse().expect("n_max"));
    let cache = args.next().map(PathBuf::from);

    let start = std::time::Instant::now();
    let table = build_table(n_max, Mode::Float64)?;
    println!("built s(0..={n_max}) in {:.2?}", start.elapsed());

    println!("{:>9} {:>14} {:>8} {:>12} {:>14}", "n", "s(n)", "k*", "sqrt(2n)", "f(n)");
    let mut n = 1;
    while n <= n_max {
        println!(
            "{n:>9} {:>14.9} {:>8} {:>12.6} {:>14.9}",
            table.value(n),
            table.kstar(n).unwrap_or(0),
            (2.0 * n as f64).sqrt(),
            f_approx(n as u64)?
        );
        n *= 10;
    }

    if let Some(path) = cache {
        let compress = path.extension().is_some_and(|e| e == "gz");
        save_table(&path, &table, compress)?;
        let back = load_table(&path)?;
        assert_eq!(back.values(), table.values());
        println!("cached to {} (round trip bit-identical)", path.display());
    }
    Ok(())
}
