//! Optimal sequential selection of an increasing subsequence from a random
//! permutation.
//!
//! The crate computes the optimal expected length `s(n)` exactly (floating
//! point or exact rationals), runs the optimal online policy, brackets `s(n)`
//! around `sqrt(2n) + ln(n)/6` with comparison arguments, solves the i.i.d.
//! uniform analogue `ŝ(n)` on a grid, and simulates the randomized reduction
//! showing `ŝ(n) <= s(n)`.
//!
//! Module map:
//!
//! * [`dp`]: value table, recursion steps, decision rule, brute-force oracle,
//!   table cache.
//! * [`asymptotics`]: the approximation `f(n)`, maximizer localization,
//!   defect scans, comparison brackets.
//! * [`sim`]: permutations, policy execution, Monte Carlo, exponential
//!   embedding, patience sorting.
//! * [`iid`]: grid value iteration for the i.i.d. problem.
//! * [`cli`]: the `seqselect` command-line front end.

pub mod asymptotics;
pub mod cli;
pub mod dp;
mod error;
pub mod fmt;
pub mod iid;
pub mod sim;

pub use error::{Error, Result};
