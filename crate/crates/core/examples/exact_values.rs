//! Exact rational values of s(n) for small n, checked against a brute-force
//! expectimax over all permutations where that is feasible.

use seqselect::dp::{brute_force_oracle, build_table, Mode, ORACLE_CAP};

fn main() -> seqselect::Result<()> {
    let table = build_table(12, Mode::ExactRational)?;
    for n in 1..=12 {
        let exact = table.exact_value(n).expect("exact mode");
        let check = if n <= ORACLE_CAP {
            if brute_force_oracle(n)? == *exact { "matches brute force" } else { "MISMATCH" }
        } else {
            ""
        };
        println!("s({n:>2}) = {exact:<28} ~ {:.12}  {check}", table.value(n));
    }
    Ok(())
}
