//! Offline benchmark: the longest increasing subsequence, approaching
//! 2 sqrt(n), versus the online optimum near sqrt(2n).

use seqselect::sim::{monte_carlo, Policy};

fn main() -> seqselect::Result<()> {
    for n in [100, 1000, 10_000, 100_000] {
        let reps = (2_000_000 / n).clamp(50, 2000);
        let r = monte_carlo(n, reps, 1, &Policy::OfflineLis)?;
        let root = (n as f64).sqrt();
        println!(
            "n = {n:>6}: E[LIS] ~ {:.2} +/- {:.2}, / 2sqrt(n) = {:.4}, online ~ sqrt(2n) = {:.2}",
            r.mean,
            r.stderr,
            r.mean / (2.0 * root),
            (2.0 * n as f64).sqrt()
        );
    }
    Ok(())
}
