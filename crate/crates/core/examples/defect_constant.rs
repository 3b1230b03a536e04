//! How far f(n) is from satisfying the recursion: the defect at each step
//! scaled by n^{3/2}, and the running maximum B.

use seqselect::asymptotics::{defect_at, defect_at_full_scan, defect_scan, ZETA_BOUND};

fn main() -> seqselect::Result<()> {
    let n_max: usize = std::env::args().nth(1).map_or(100_000, |a| a.parse().expect("n_max"));
    let scan = defect_scan(n_max)?;
    for n in [10, 100, 1000, 10_000, 100_000].into_iter().filter(|&n| n <= n_max) {
        println!("n = {n:>7}: defect {:+.3e}, scaled {:+.6}, B so far {:.6}", defect_at(n)?, scan.scaled(n), scan.b_up_to(n));
    }
    // the windowed evaluation agrees with scanning every k
    assert!((defect_at(500)? - defect_at_full_scan(500)?).abs() < 1e-13);
    println!("B = {:.6} at n = {}; |s - f| <= {:.4}", scan.b_estimate, scan.argmax_n, ZETA_BOUND * scan.b_estimate);
    Ok(())
}
