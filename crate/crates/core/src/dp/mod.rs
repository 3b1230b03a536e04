//! Optimal values `s(n)` for online selection of an increasing subsequence
//! from a uniformly random permutation of length `n`.
//!
//! With `s(0) = 0` and `s(1) = 1`, the values satisfy
//!
//! ```text
//! s(n+1) = max_{1<=k<=n} H(n, k, s) / (n+1)
//! H(n, k, g) = k + (n-k+1) g(n) + g(n-k+1) + ... + g(n)
//! ```
//!
//! The increment `H(n,k+1,s) - H(n,k,s) = 1 - s(n) + s(n-k)` is nonincreasing
//! in `k`, so the smallest maximizer is one plus the number of strictly
//! positive increments. [`build_table`] locates it with a pointer carried over
//! from the previous step, which makes a full table build linear in `n_max`.

mod cache;
mod oracle;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use cache::{load_table, read_table, save_table, write_table, CACHE_VERSION};
pub use oracle::{brute_force_oracle, ORACLE_CAP};

/// Exact rational number in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Largest `n_max` accepted in exact-rational mode.
pub const EXACT_CAP: usize = 2000;

/// Float builds above this size switch to compensated prefix sums.
pub const COMPENSATED_THRESHOLD: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Float64,
    ExactRational,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Float64 => "float64",
            Mode::ExactRational => "exact-rational",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float64" => Ok(Mode::Float64),
            "exact-rational" => Ok(Mode::ExactRational),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// How prefix sums of `s` are accumulated in float mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summation {
    Naive,
    /// Neumaier summation; the running error term is stored per index.
    Compensated,
}

impl Summation {
    pub fn for_size(n_max: usize) -> Self {
        if n_max > COMPENSATED_THRESHOLD {
            Summation::Compensated
        } else {
            Summation::Naive
        }
    }
}

#[derive(Debug, Clone)]
struct PrefixSums {
    hi: Vec<f64>,
    lo: Option<Vec<f64>>,
}

impl PrefixSums {
    fn with_capacity(cap: usize, summation: Summation) -> Self {
        let lo = match summation {
            Summation::Naive => None,
            Summation::Compensated => Some(Vec::with_capacity(cap)),
        };
        PrefixSums {
            hi: Vec::with_capacity(cap),
            lo,
        }
    }

    fn push(&mut self, x: f64) {
        let sum = self.hi.last().copied().unwrap_or(0.0);
        let t = sum + x;
        self.hi.push(t);
        if let Some(lo) = self.lo.as_mut() {
            let c = lo.last().copied().unwrap_or(0.0);
            let err = if sum.abs() >= x.abs() {
                (sum - t) + x
            } else {
                (x - t) + sum
            };
            lo.push(c + err);
        }
    }

    fn get(&self, i: usize) -> f64 {
        match &self.lo {
            Some(lo) => self.hi[i] + lo[i],
            None => self.hi[i],
        }
    }

    /// `x[n-k+1] + ... + x[n]`.
    fn window(&self, n: usize, k: usize) -> f64 {
        let j = n - k;
        match &self.lo {
            Some(lo) => (self.hi[n] - self.hi[j]) + (lo[n] - lo[j]),
            None => self.hi[n] - self.hi[j],
        }
    }
}

/// The sequence `s(0..=n_max)` together with prefix sums and the maximizers
/// used at every step. Immutable once built.
#[derive(Debug, Clone)]
pub struct ValueTable {
    mode: Mode,
    values: Vec<f64>,
    prefix: PrefixSums,
    kstar: Vec<u32>,
    exact: Option<Vec<Rational>>,
    pointer_fallbacks: usize,
}

impl ValueTable {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `s(0), s(1), ..., s(n_max)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied()
    }

    /// `s(0) + ... + s(i)`.
    pub fn prefix_sum(&self, i: usize) -> f64 {
        self.prefix.get(i)
    }

    /// The maximizing `k` that produced `s(n)`, for `2 <= n <= n_max`.
    pub fn kstar(&self, n: usize) -> Option<usize> {
        if n < 2 || n > self.n_max() {
            None
        } else {
            Some(self.kstar[n] as usize)
        }
    }

    /// Smallest maximizer of `H(n, ., s)`, available for `1 <= n < n_max`.
    pub fn maximizer(&self, n: usize) -> Option<usize> {
        self.kstar(n + 1)
    }

    pub fn exact_values(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn exact_value(&self, n: usize) -> Option<&Rational> {
        self.exact.as_ref().and_then(|v| v.get(n))
    }

    /// Steps at which the maximizer moved left of the previous one and the
    /// pointer had to walk back. Zero whenever `kstar` is nondecreasing.
    pub fn pointer_fallbacks(&self) -> usize {
        self.pointer_fallbacks
    }

    /// `H(n, k, s)` evaluated through the prefix sums.
    pub fn h_score(&self, n: usize, k: usize) -> Result<f64> {
        if n > self.n_max() {
            return Err(domain(format!("n = {n} exceeds table size {}", self.n_max())));
        }
        check_k(n, k)?;
        Ok(k as f64 + (n - k + 1) as f64 * self.values[n] + self.prefix.window(n, k))
    }

    /// Builds a float table from precomputed values `s(0..=n_max)` and the
    /// per-step maximizers, validating every table invariant.
    pub fn from_parts(values: Vec<f64>, kstar: Vec<u32>) -> Result<Self> {
        if values.len() < 2 {
            return Err(domain("table must contain s(0) and s(1)"));
        }
        if kstar.len() != values.len() {
            return Err(domain("kstar and values differ in length"));
        }
        let mut prefix = PrefixSums::with_capacity(values.len(), Summation::for_size(values.len() - 1));
        for &v in &values {
            prefix.push(v);
        }
        let table = ValueTable {
            mode: Mode::Float64,
            values,
            prefix,
            kstar,
            exact: None,
            pointer_fallbacks: 0,
        };
        table.check_invariants()?;
        Ok(table)
    }

    /// Checks `s(0) = 0`, `s(1) = 1`, strict growth with increments in
    /// `(0, 1]`, `s(n) <= n`, and `1 <= kstar(n) < n`.
    pub fn check_invariants(&self) -> Result<()> {
        let v = &self.values;
        if v[0] != 0.0 {
            return Err(domain(format!("s(0) = {} but must be 0", v[0])));
        }
        if v[1] != 1.0 {
            return Err(domain(format!("s(1) = {} but must be 1", v[1])));
        }
        for n in 1..v.len() {
            if !v[n].is_finite() || v[n] > n as f64 {
                return Err(domain(format!("s({n}) = {} exceeds {n}", v[n])));
            }
            if n >= 2 {
                let inc = v[n] - v[n - 1];
                if !(inc > 0.0 && inc <= 1.0) {
                    return Err(domain(format!("s({n}) - s({}) = {inc} is outside (0, 1]", n - 1)));
                }
                let k = self.kstar[n] as usize;
                if k < 1 || k > n - 1 {
                    return Err(domain(format!("kstar({n}) = {k} is outside [1, {}]", n - 1)));
                }
            }
        }
        Ok(())
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        Err(domain(format!("k = {k} is outside [1, {n}]")))
    } else {
        Ok(())
    }
}

/// `H(n, k, g) = k + (n-k+1) g(n) + sum_{i=n-k+1}^{n} g(i)` by direct
/// summation. `g` must cover indices `0..=n`.
pub fn h_score(n: usize, k: usize, g: &[f64]) -> Result<f64> {
    check_k(n, k)?;
    if g.len() <= n {
        return Err(domain(format!("g has {} entries, need {}", g.len(), n + 1)));
    }
    let tail: f64 = g[n - k + 1..=n].iter().sum();
    Ok(k as f64 + (n - k + 1) as f64 * g[n] + tail)
}

/// Walks from `hint` to the smallest maximizer of `H(n, ., g)`, where
/// `gain(k)` reports whether `H(n,k+1,g) > H(n,k,g)`. The positive gains must
/// form a prefix of `1..n`.
fn locate_kstar(n: usize, hint: usize, gain: impl Fn(usize) -> bool, fallbacks: &mut usize) -> usize {
    let mut k = hint.clamp(1, n);
    while k < n && gain(k) {
        k += 1;
    }
    if k > 1 && !gain(k - 1) {
        *fallbacks += 1;
        while k > 1 && !gain(k - 1) {
            k -= 1;
        }
    }
    if cfg!(debug_assertions) {
        // local unimodality witness around the answer
        let lo = k.saturating_sub(3).max(1);
        let hi = (k + 3).min(n - 1);
        for j in lo..=hi.max(lo) {
            if j < n {
                debug_assert_eq!(gain(j), j < k, "gain pattern not a prefix at n={n}, k={j}");
            }
        }
    }
    k
}

/// One step of the averaged first-step recursion:
/// `s(n+1) = (1/(n+1)) sum_{j=1}^{n+1} max{ s(n), 1 + s(n+1-j) }`.
pub fn step_inside(table: &ValueTable, n: usize) -> Result<f64> {
    if n == 0 || n > table.n_max() {
        return Err(domain(format!("n = {n} outside [1, {}]", table.n_max())));
    }
    let s = table.values();
    let total: f64 = (1..=n + 1).map(|j| s[n].max(1.0 + s[n + 1 - j])).sum();
    Ok(total / (n + 1) as f64)
}

/// One step of the max-over-`k` recursion, returning `s(n+1)` and the
/// smallest maximizing `k`, searched from `k_hint`.
pub fn step_outside(table: &ValueTable, n: usize, k_hint: usize) -> Result<(f64, usize)> {
    if n == 0 || n > table.n_max() {
        return Err(domain(format!("n = {n} outside [1, {}]", table.n_max())));
    }
    check_k(n, k_hint)?;
    let s = table.values();
    let mut fallbacks = 0;
    let k = locate_kstar(n, k_hint, |k| 1.0 + s[n - k] > s[n], &mut fallbacks);
    Ok((table.h_score(n, k)? / (n + 1) as f64, k))
}

/// Maximizes `H(n, ., s)` by scanning every `k`; smallest `k` wins ties.
pub fn argmax_by_scan(table: &ValueTable, n: usize) -> Result<(f64, usize)> {
    let mut best = (f64::NEG_INFINITY, 0);
    for k in 1..=n {
        let h = table.h_score(n, k)?;
        if h > best.0 {
            best = (h, k);
        }
    }
    Ok((best.0 / (n + 1) as f64, best.1))
}

pub fn build_table(n_max: usize, mode: Mode) -> Result<ValueTable> {
    match mode {
        Mode::Float64 => build_table_with(n_max, Summation::for_size(n_max)),
        Mode::ExactRational => build_exact(n_max),
    }
}

/// Float build with an explicit summation strategy.
pub fn build_table_with(n_max: usize, summation: Summation) -> Result<ValueTable> {
    if n_max == 0 {
        return Err(domain("n_max must be at least 1"));
    }
    let mut values = Vec::with_capacity(n_max + 1);
    let mut prefix = PrefixSums::with_capacity(n_max + 1, summation);
    let mut kstar = vec![0u32; n_max + 1];
    values.extend([0.0, 1.0]);
    prefix.push(0.0);
    prefix.push(1.0);

    let mut fallbacks = 0;
    let mut hint = 1;
    for n in 1..n_max {
        let k = locate_kstar(n, hint, |k| 1.0 + values[n - k] > values[n], &mut fallbacks);
        let h = k as f64 + (n - k + 1) as f64 * values[n] + prefix.window(n, k);
        let next = h / (n + 1) as f64;
        values.push(next);
        prefix.push(next);
        kstar[n + 1] = k as u32;
        hint = k;
    }

    Ok(ValueTable {
        mode: Mode::Float64,
        values,
        prefix,
        kstar,
        exact: None,
        pointer_fallbacks: fallbacks,
    })
}

fn build_exact(n_max: usize) -> Result<ValueTable> {
    if n_max == 0 {
        return Err(domain("n_max must be at least 1"));
    }
    if n_max > EXACT_CAP {
        return Err(Error::Capacity {
            what: "exact-rational table",
            cap: EXACT_CAP,
            requested: n_max,
        });
    }
    let int = |x: usize| Rational::from_integer(BigInt::from(x));
    let one = Rational::one();
    let mut exact = vec![Rational::zero(), one.clone()];
    let mut prefix = vec![Rational::zero(), one.clone()];
    let mut kstar = vec![0u32; n_max + 1];

    let mut fallbacks = 0;
    let mut hint = 1;
    for n in 1..n_max {
        let k = locate_kstar(n, hint, |k| &one + &exact[n - k] > exact[n], &mut fallbacks);
        let h = int(k) + &exact[n] * int(n - k + 1) + (&prefix[n] - &prefix[n - k]);
        let next = h / int(n + 1);
        prefix.push(&prefix[n] + &next);
        exact.push(next);
        kstar[n + 1] = k as u32;
        hint = k;
    }

    let values: Vec<f64> = exact
        .iter()
        .map(|r| r.to_f64().ok_or_else(|| Error::Numeric("rational out of f64 range".into())))
        .collect::<Result<_>>()?;
    let mut fprefix = PrefixSums::with_capacity(n_max + 1, Summation::Naive);
    for &v in &values {
        fprefix.push(v);
    }
    Ok(ValueTable {
        mode: Mode::ExactRational,
        values,
        prefix: fprefix,
        kstar,
        exact: Some(exact),
        pointer_fallbacks: fallbacks,
    })
}

/// Optimal decision on a candidate. `u` counts unseen values above the last
/// accepted value; `u_above` counts those that also exceed the candidate.
/// Accepts iff `1 + s(u_above) >= s(u - 1)`.
pub fn accept_decision(table: &ValueTable, u: usize, u_above: usize) -> Result<bool> {
    if u == 0 {
        return Err(domain("u must be positive"));
    }
    if u_above >= u {
        return Err(domain(format!("u_above = {u_above} must be below u = {u}")));
    }
    if u - 1 > table.n_max() {
        return Err(domain(format!("table of size {} cannot decide u = {u}", table.n_max())));
    }
    if let (Some(a), Some(b)) = (table.exact_value(u_above), table.exact_value(u - 1)) {
        return Ok(Rational::one() + a >= *b);
    }
    Ok(1.0 + table.value(u_above) >= table.value(u - 1))
}
