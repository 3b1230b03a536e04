//! Runs the optimal online policy on random permutations and compares the
//! sample mean to s(n). Prints one realized selection.

use seqselect::dp::{build_table, Mode};
use seqselect::sim::{monte_carlo, random_permutation, replicate_rng, run_policy, Policy, DEFAULT_SEED};

fn main() -> seqselect::Result<()> {
    let table = build_table(1000, Mode::Float64)?;
    for n in [10, 100, 1000] {
        let r = monte_carlo(n, 20_000, DEFAULT_SEED, &Policy::Optimal(&table))?;
        let z = (r.mean - table.value(n)) / r.stderr;
        println!("n = {n:>4}: mean {:.4} +/- {:.4}, s(n) = {:.4}, z = {z:+.2}", r.mean, r.stderr, table.value(n));
    }

    let perm = random_permutation(20, &mut replicate_rng(DEFAULT_SEED, 0));
    let trace = run_policy(&perm, &table)?;
    println!("permutation {:?}", perm.image());
    println!("selected    {:?} at positions {:?}", trace.accepted_values, trace.accepted_positions);
    Ok(())
}
