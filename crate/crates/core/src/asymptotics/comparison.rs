//! Upper and lower comparison checks.
//!
//! If `g` nearly solves the recursion, with one-step error controlled by a
//! nonnegative `delta`, then `s(n)` stays within `g(n) +/- Delta(n)` where
//! `Delta(n) = delta(1) + ... + delta(n)`. The functions here check the
//! hypotheses step by step and the conclusion against a computed table, so a
//! failure can be attributed either to the inputs or to the implementation.

use serde::{Deserialize, Serialize};

use crate::dp::ValueTable;
use crate::error::{domain, Result};

/// Relative slack for floating-point comparisons of equal quantities.
pub const COMPARISON_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
    Both,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub side: Side,
    pub n_max: usize,
    /// `defect[n] = max_k H(n,k,g)/(n+1) - g(n+1)` for `1 <= n < n_max`.
    pub defect: Vec<f64>,
    /// The supplied `delta(n)`, index 0 unused.
    pub delta: Vec<f64>,
    /// `Delta(n) = delta(1) + ... + delta(n)`.
    pub cumulative: Vec<f64>,
    /// `max_n |defect(n)| n^{3/2}`.
    pub b_estimate: f64,
    pub bracket_low: Vec<f64>,
    pub bracket_high: Vec<f64>,
    pub initial_condition_holds: bool,
    /// Steps `n` where the one-step hypothesis fails.
    pub hypothesis_failures: Vec<usize>,
    /// `n` with `s(n)` outside the bracket.
    pub conclusion_violations: Vec<usize>,
    /// Smallest `n0` such that the bracket holds on `[n0, n_max]`.
    pub holds_from: Option<usize>,
}

impl ComparisonReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.initial_condition_holds && self.hypothesis_failures.is_empty()
    }

    pub fn conclusion_holds(&self) -> bool {
        self.conclusion_violations.is_empty()
    }

    /// A violated conclusion under intact hypotheses contradicts the lemma,
    /// which points at the table or this check rather than at `g`.
    pub fn flags_bug(&self) -> bool {
        self.hypotheses_hold() && !self.conclusion_holds()
    }

    /// Intersection of an upper and a lower report over the same `g`.
    pub fn combine(upper: &ComparisonReport, lower: &ComparisonReport, table: &ValueTable) -> Result<ComparisonReport> {
        if upper.n_max != lower.n_max {
            return Err(domain("reports cover different ranges"));
        }
        let n_max = upper.n_max;
        let bracket_low = lower.bracket_low.clone();
        let bracket_high = upper.bracket_high.clone();
        let mut hypothesis_failures: Vec<usize> = upper
            .hypothesis_failures
            .iter()
            .chain(&lower.hypothesis_failures)
            .copied()
            .collect();
        hypothesis_failures.sort_unstable();
        hypothesis_failures.dedup();
        let (conclusion_violations, holds_from) = check_bracket(table, &bracket_low, &bracket_high, n_max);
        Ok(ComparisonReport {
            side: Side::Both,
            n_max,
            defect: upper.defect.clone(),
            delta: upper.delta.clone(),
            cumulative: upper.cumulative.clone(),
            b_estimate: upper.b_estimate,
            bracket_low,
            bracket_high,
            initial_condition_holds: upper.initial_condition_holds && lower.initial_condition_holds,
            hypothesis_failures,
            conclusion_violations,
            holds_from,
        })
    }
}

fn slack(x: f64) -> f64 {
    COMPARISON_SLACK * x.abs().max(1.0)
}

/// Neumaier prefix sums of `g(0..=n_max)`, returned as `(hi, lo)` pairs.
fn prefix_sums(xs: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(xs.len());
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
        out.push((sum, comp));
    }
    out
}

/// `max_k H(n, k, g) / (n+1)` for every `1 <= n < len - 1`, using a binary
/// search on the gain sign when `g` is nondecreasing and a full scan
/// otherwise.
fn recursion_image(gv: &[f64]) -> Vec<f64> {
    let n_max = gv.len() - 1;
    let pre = prefix_sums(gv);
    let window = |n: usize, k: usize| {
        let (a, b) = (pre[n], pre[n - k]);
        (a.0 - b.0) + (a.1 - b.1)
    };
    let h = |n: usize, k: usize| k as f64 + (n - k + 1) as f64 * gv[n] + window(n, k);
    let monotone = gv[1..].windows(2).all(|w| w[0] <= w[1]);
    let mut out = vec![f64::NAN; n_max];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        let best = if monotone {
            // gains 1 - g(n) + g(n-k), k = 1..n-1, are nonincreasing in k
            // first k in [1, n) without a positive gain, or n
            let (mut lo, mut hi) = (1usize, n);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if 1.0 - gv[n] + gv[n - mid] > 0.0 {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            h(n, lo)
        } else {
            (1..=n).map(|k| h(n, k)).fold(f64::NEG_INFINITY, f64::max)
        };
        *slot = best / (n + 1) as f64;
    }
    out
}

fn check_bracket(table: &ValueTable, low: &[f64], high: &[f64], n_max: usize) -> (Vec<usize>, Option<usize>) {
    let mut violations = Vec::new();
    for n in 1..=n_max {
        let s = table.value(n);
        if s < low[n] - slack(low[n]) || s > high[n] + slack(high[n]) {
            violations.push(n);
        }
    }
    let holds_from = match violations.last() {
        None => Some(1),
        Some(&last) if last < n_max => Some(last + 1),
        Some(_) => None,
    };
    (violations, holds_from)
}

fn verify(side: Side, g: impl Fn(usize) -> f64, delta: impl Fn(usize) -> f64, table: &ValueTable) -> Result<ComparisonReport> {
    let n_max = table.n_max();
    if n_max < 2 {
        return Err(domain("comparison needs a table with n_max >= 2"));
    }
    let mut gv = vec![0.0; n_max + 1];
    let mut dv = vec![0.0; n_max + 1];
    for n in 1..=n_max {
        gv[n] = g(n);
        dv[n] = delta(n);
        if !gv[n].is_finite() {
            return Err(domain(format!("g({n}) is not finite")));
        }
        if !(dv[n] >= 0.0) {
            return Err(domain(format!("delta({n}) = {} must be nonnegative", dv[n])));
        }
    }
    let mut cumulative = vec![0.0; n_max + 1];
    for n in 1..=n_max {
        cumulative[n] = cumulative[n - 1] + dv[n];
    }

    let image = recursion_image(&gv);
    let mut defect = vec![0.0; n_max];
    let mut b_estimate: f64 = 0.0;
    let mut hypothesis_failures = Vec::new();
    for n in 1..n_max {
        defect[n] = image[n] - gv[n + 1];
        b_estimate = b_estimate.max(defect[n].abs() * (n as f64).powf(1.5));
        let ok = match side {
            Side::Upper => image[n] <= gv[n + 1] + dv[n + 1] + slack(gv[n + 1]),
            _ => gv[n + 1] - dv[n + 1] <= image[n] + slack(gv[n + 1]),
        };
        if !ok {
            hypothesis_failures.push(n);
        }
    }

    let (initial_condition_holds, bracket_low, bracket_high) = match side {
        Side::Upper => (
            1.0 <= gv[1] + dv[1] + slack(1.0),
            vec![f64::NEG_INFINITY; n_max + 1],
            (0..=n_max).map(|n| gv[n] + cumulative[n]).collect(),
        ),
        _ => (
            gv[1] - dv[1] <= 1.0 + slack(1.0),
            (0..=n_max).map(|n| gv[n] - cumulative[n]).collect(),
            vec![f64::INFINITY; n_max + 1],
        ),
    };
    let (conclusion_violations, holds_from) = check_bracket(table, &bracket_low, &bracket_high, n_max);
    Ok(ComparisonReport {
        side,
        n_max,
        defect,
        delta: dv,
        cumulative,
        b_estimate,
        bracket_low,
        bracket_high,
        initial_condition_holds,
        hypothesis_failures,
        conclusion_violations,
        holds_from,
    })
}

/// Checks `max_k H(n,k,g)/(n+1) <= g(n+1) + delta(n+1)` for every step and
/// `s(n) <= g(n) + Delta(n)` against `table`.
pub fn verify_upper_comparison(
    g: impl Fn(usize) -> f64,
    delta: impl Fn(usize) -> f64,
    table: &ValueTable,
) -> Result<ComparisonReport> {
    verify(Side::Upper, g, delta, table)
}

/// Checks `g(n+1) - delta(n+1) <= max_k H(n,k,g)/(n+1)` for every step and
/// `g(n) - Delta(n) <= s(n)` against `table`.
pub fn verify_lower_comparison(
    g: impl Fn(usize) -> f64,
    delta: impl Fn(usize) -> f64,
    table: &ValueTable,
) -> Result<ComparisonReport> {
    verify(Side::Lower, g, delta, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::f_approx;
    use crate::dp::{build_table, Mode};

    #[test]
    fn table_itself_is_exact_fixed_point() {
        let t = build_table(2000, Mode::Float64).unwrap();
        let s = |n: usize| t.value(n);
        let up = verify_upper_comparison(s, |_| 0.0, &t).unwrap();
        let lo = verify_lower_comparison(s, |_| 0.0, &t).unwrap();
        for r in [&up, &lo] {
            assert!(r.hypotheses_hold(), "{:?}", &r.hypothesis_failures[..r.hypothesis_failures.len().min(5)]);
            assert!(r.conclusion_holds());
            assert!(r.defect[1..].iter().all(|d| d.abs() < 1e-11));
        }
    }

    #[test]
    fn zero_function_gives_s_at_most_n() {
        let t = build_table(500, Mode::Float64).unwrap();
        let r = verify_upper_comparison(|_| 0.0, |_| 1.0, &t).unwrap();
        assert!(r.hypotheses_hold());
        assert!(r.conclusion_holds());
        assert_eq!(r.bracket_high[500], 500.0);
    }

    #[test]
    fn sqrt_lower_bound_recorded() {
        let t = build_table(5000, Mode::Float64).unwrap();
        let r = verify_lower_comparison(|n| (2.0 * n as f64).sqrt(), |n| 1.0 / n as f64, &t).unwrap();
        assert!(r.holds_from.is_some());
        let n0 = r.holds_from.unwrap();
        for n in n0..=5000 {
            assert!(r.bracket_low[n] <= t.value(n));
        }
    }

    #[test]
    fn too_small_delta_is_a_hypothesis_failure() {
        let t = build_table(300, Mode::Float64).unwrap();
        let f = |n: usize| f_approx(n as u64).unwrap();
        let r = verify_lower_comparison(f, |_| 0.0, &t).unwrap();
        assert!(!r.initial_condition_holds);
        assert!(!r.hypothesis_failures.is_empty());
        assert!(!r.flags_bug());
    }

    #[test]
    fn nonmonotone_g_uses_full_scan() {
        let gv = [0.0, 1.0, 3.0, 2.0, 5.0, 4.0];
        let img = recursion_image(&gv);
        for n in 1..5 {
            let want = (1..=n)
                .map(|k| crate::dp::h_score(n, k, &gv).unwrap())
                .fold(f64::NEG_INFINITY, f64::max)
                / (n + 1) as f64;
            assert!((img[n] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_negative_delta() {
        let t = build_table(10, Mode::Float64).unwrap();
        assert!(verify_upper_comparison(|_| 1.0, |_| -1.0, &t).is_err());
    }
}
