//! Expectimax over the full observation tree, independent of the reduced
//! recursion. Used to check exact tables for small `n`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Rational;
use crate::error::{domain, Error, Result};

pub const ORACLE_CAP: usize = 8;

/// `s(n)` by brute force. The state is the set of unseen values plus the
/// last accepted value; every unseen value is equally likely to come next.
pub fn brute_force_oracle(n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(domain("oracle needs n >= 1"));
    }
    if n > ORACLE_CAP {
        return Err(Error::Capacity {
            what: "brute-force oracle",
            cap: ORACLE_CAP,
            requested: n,
        });
    }
    let mut memo = HashMap::new();
    let all = (1u16 << n) - 1;
    Ok(expectimax(all, 0, n, &mut memo))
}

// values are 1..=n; bit v-1 of `unseen` marks value v as not yet observed
fn expectimax(unseen: u16, last: usize, n: usize, memo: &mut HashMap<(u16, usize), Rational>) -> Rational {
    if unseen == 0 {
        return Rational::zero();
    }
    if let Some(v) = memo.get(&(unseen, last)) {
        return v.clone();
    }
    let mut total = Rational::zero();
    for value in 1..=n {
        let bit = 1u16 << (value - 1);
        if unseen & bit == 0 {
            continue;
        }
        let rest = unseen & !bit;
        let skip = expectimax(rest, last, n, memo);
        let best = if value > last {
            let take = Rational::one() + expectimax(rest, value, n, memo);
            if take > skip {
                take
            } else {
                skip
            }
        } else {
            skip
        };
        total += best;
    }
    let result = total / Rational::from_integer(BigInt::from(unseen.count_ones()));
    memo.insert((unseen, last), result.clone());
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let q = |a: i64, b: i64| Rational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(brute_force_oracle(1).unwrap(), q(1, 1));
        assert_eq!(brute_force_oracle(2).unwrap(), q(3, 2));
        assert_eq!(brute_force_oracle(3).unwrap(), q(2, 1));
        assert_eq!(brute_force_oracle(4).unwrap(), q(19, 8));
    }

    #[test]
    fn cap() {
        assert!(matches!(brute_force_oracle(9), Err(Error::Capacity { cap: 8, .. })));
        assert!(matches!(brute_force_oracle(0), Err(Error::Domain(_))));
    }
}
