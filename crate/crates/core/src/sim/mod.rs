//! Random permutations, online execution of selection policies, and seeded
//! Monte Carlo.
//!
//! Replicate `r` of a run with seed `seed` draws from stream `r` of a ChaCha8
//! generator keyed by `seed`, so results do not depend on how replicates are
//! scheduled across threads.

mod embedding;
mod lis;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::{accept_decision, ValueTable};
use crate::error::{domain, Result};
use crate::iid::IidValueGrid;

pub use embedding::{exponential_embedding, Embedding};
pub use lis::lis_patience;

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x5EED_2015;

/// Generator for replicate `r` of a run seeded with `seed`.
pub fn replicate_rng(seed: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    rng
}

/// A bijection of `1..=n`, stored as the sequence `pi[1], ..., pi[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    image: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (1..=n as u32).collect(),
        }
    }

    pub fn from_image(image: Vec<u32>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n + 1];
        for &v in &image {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return Err(domain(format!("{image:?} is not a permutation of 1..={n}")));
            }
            seen[v] = true;
        }
        Ok(Permutation { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[u32] {
        &self.image
    }
}

/// Uniform permutation by Fisher-Yates shuffle.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut image: Vec<u32> = (1..=n as u32).collect();
    image.shuffle(rng);
    Permutation { image }
}

/// Realized stopping times (1-based positions) and the accepted values.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub accepted_positions: Vec<usize>,
    pub accepted_values: Vec<u32>,
}

impl SelectionTrace {
    pub fn len(&self) -> usize {
        self.accepted_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accepted_values.is_empty()
    }

    fn accept(&mut self, position: usize, value: u32) {
        debug_assert!(self.accepted_positions.last().is_none_or(|&p| p < position));
        debug_assert!(self.accepted_values.last().is_none_or(|&v| v < value));
        self.accepted_positions.push(position);
        self.accepted_values.push(value);
    }

    /// Both sequences strictly increasing and of equal length.
    pub fn is_valid(&self) -> bool {
        self.accepted_positions.len() == self.accepted_values.len()
            && self.accepted_positions.windows(2).all(|w| w[0] < w[1])
            && self.accepted_values.windows(2).all(|w| w[0] < w[1])
    }

    /// CSV `position,value`, one row per accepted element.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("position,value\n");
        for (p, v) in self.accepted_positions.iter().zip(&self.accepted_values) {
            out.push_str(&format!("{p},{v}\n"));
        }
        out
    }
}

// Counts of observed values, for "how many unseen values exceed x".
struct Fenwick(Vec<u32>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick(vec![0; n + 1])
    }

    fn add(&mut self, mut i: usize) {
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of marked values in `1..=i`.
    fn prefix(&self, mut i: usize) -> u32 {
        let mut total = 0;
        while i > 0 {
            total += self.0[i];
            i &= i - 1;
        }
        total
    }
}

/// Runs the optimal online policy on `perm`.
///
/// The state is `u`, the number of unseen values above the last accepted
/// one. A candidate above the last accepted value with `u'` unseen values
/// above it is taken iff `1 + s(u') >= s(u - 1)`.
pub fn run_policy(perm: &Permutation, table: &ValueTable) -> Result<SelectionTrace> {
    let n = perm.len();
    if table.n_max() + 1 < n {
        return Err(domain(format!("table of size {} is too short for n = {n}", table.n_max())));
    }
    let mut seen = Fenwick::new(n);
    let mut trace = SelectionTrace::default();
    let mut last = 0usize;
    let mut u = n;
    for (i, &value) in perm.image().iter().enumerate() {
        let x = value as usize;
        if x > last {
            let seen_above = (i as u32 - seen.prefix(x)) as usize;
            let u_above = n - x - seen_above;
            if accept_decision(table, u, u_above)? {
                trace.accept(i + 1, value);
                last = x;
                u = u_above;
            } else {
                u -= 1;
            }
        }
        seen.add(x);
    }
    Ok(trace)
}

/// Feeds `X_i = Y_{pi[i]}` from a fresh exponential embedding to the i.i.d.
/// grid policy and accepts `pi[i]` exactly when the policy accepts `X_i`.
pub fn reduction_aprime<R: Rng + ?Sized>(perm: &Permutation, grid: &IidValueGrid, rng: &mut R) -> Result<SelectionTrace> {
    let n = perm.len();
    if grid.horizon() < n {
        return Err(domain(format!("grid horizon {} is shorter than n = {n}", grid.horizon())));
    }
    let embedding = exponential_embedding(n, rng);
    let mut trace = SelectionTrace::default();
    let mut last = 0.0f64;
    for (i, &value) in perm.image().iter().enumerate() {
        let x = embedding.y[value as usize - 1];
        if x <= last {
            continue;
        }
        let remaining = n - i;
        if grid.iid_accept(remaining, 1.0 - last, x - last)? {
            trace.accept(i + 1, value);
            last = x;
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyId {
    /// Optimal online policy from the value table.
    Optimal,
    /// Randomized reduction driven by the i.i.d. grid policy.
    Reduction,
    /// Offline longest increasing subsequence.
    OfflineLis,
}

impl PolicyId {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyId::Optimal => "optimal",
            PolicyId::Reduction => "reduction",
            PolicyId::OfflineLis => "offline-lis",
        }
    }
}

/// A policy together with the data it needs.
#[derive(Debug, Clone, Copy)]
pub enum Policy<'a> {
    Optimal(&'a ValueTable),
    Reduction(&'a IidValueGrid),
    OfflineLis,
}

impl Policy<'_> {
    pub fn id(&self) -> PolicyId {
        match self {
            Policy::Optimal(_) => PolicyId::Optimal,
            Policy::Reduction(_) => PolicyId::Reduction,
            Policy::OfflineLis => PolicyId::OfflineLis,
        }
    }

    /// Length obtained on one replicate.
    pub fn run_once(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<usize> {
        let perm = random_permutation(n, rng);
        match self {
            Policy::Optimal(table) => Ok(run_policy(&perm, table)?.len()),
            Policy::Reduction(grid) => Ok(reduction_aprime(&perm, grid, rng)?.len()),
            Policy::OfflineLis => lis_patience(perm.image()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub n: usize,
    pub replicates: usize,
    pub policy: PolicyId,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(replicates)`.
    pub stderr: f64,
    pub seed: u64,
}

impl SimReport {
    pub fn from_lengths(n: usize, seed: u64, policy: PolicyId, lengths: &[usize]) -> Result<Self> {
        let reps = lengths.len();
        if reps == 0 {
            return Err(domain("need at least one replicate"));
        }
        let mean = lengths.iter().map(|&l| l as f64).sum::<f64>() / reps as f64;
        let stderr = if reps > 1 {
            let ss: f64 = lengths.iter().map(|&l| (l as f64 - mean).powi(2)).sum();
            (ss / (reps - 1) as f64).sqrt() / (reps as f64).sqrt()
        } else {
            0.0
        };
        Ok(SimReport {
            n,
            replicates: reps,
            policy,
            mean,
            stderr,
            seed,
        })
    }
}

/// Per-replicate lengths, in replicate order.
pub fn simulate_lengths(n: usize, replicates: usize, seed: u64, policy: &Policy<'_>) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    (0..replicates as u64)
        .into_par_iter()
        .map(|r| policy.run_once(n, &mut replicate_rng(seed, r)))
        .collect()
}

pub fn monte_carlo(n: usize, replicates: usize, seed: u64, policy: &Policy<'_>) -> Result<SimReport> {
    let lengths = simulate_lengths(n, replicates, seed, policy)?;
    SimReport::from_lengths(n, seed, policy.id(), &lengths)
}
