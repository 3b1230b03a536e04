//! The approximation `f(n) = sqrt(2n) + ln(n)/6` and the machinery that turns
//! its one-step defect into a bracket on `s(n)`.
//!
//! Plugging `f` into the max-over-`k` recursion leaves a defect
//!
//! ```text
//! defect(n) = max_k H(n, k, f) / (n+1) - f(n+1)
//! ```
//!
//! of order `n^{-3/2}`. [`estimate_b`] measures the constant, and the
//! comparison checks in [`comparison`] sum it into the bound
//! `|s(n) - f(n)| <= zeta(3/2) * B`.

pub mod comparison;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::ValueTable;
use crate::error::{domain, Error, Result};

pub use comparison::{verify_lower_comparison, verify_upper_comparison, ComparisonReport, Side};

/// `zeta(3/2)`.
pub const ZETA_3_2: f64 = 2.612_375_348_685_488;

/// Rounded-up `zeta(3/2)` used in the residual bound `|s - f| <= 2.62 B`.
pub const ZETA_BOUND: f64 = 2.62;

pub const DEFAULT_TOL: f64 = 1e-12;

pub const MAX_BISECTION_STEPS: usize = 200;

/// Half-width of the `k` window scanned around `kstar_from_f(n)`.
pub const DEFECT_WINDOW: usize = 8;

fn f_unchecked(n: f64) -> f64 {
    (2.0 * n).sqrt() + n.ln() / 6.0
}

/// `f(n) - f(n - x)` without cancellation; infinite at `x = n`.
fn f_drop(n: f64, x: f64) -> f64 {
    if x >= n {
        return f64::INFINITY;
    }
    2.0 * x / ((2.0 * n).sqrt() + (2.0 * (n - x)).sqrt()) - (-x / n).ln_1p() / 6.0
}

/// `f(n+1) - f(n)`.
fn f_step(n: f64) -> f64 {
    2.0 / ((2.0 * (n + 1.0)).sqrt() + (2.0 * n).sqrt()) + (1.0 / n).ln_1p() / 6.0
}

/// `sqrt(2n) + ln(n) / 6`.
pub fn f_approx(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(domain("f(n) is undefined at n = 0"));
    }
    Ok(f_unchecked(n as f64))
}

/// `D_n(x) = 1 - f(n) + f(n - x)`, strictly decreasing on `[0, n)`.
pub fn d_n(n: u64, x: f64) -> Result<f64> {
    let nf = n as f64;
    if n == 0 || !(0.0..nf).contains(&x) {
        return Err(domain(format!("D_n needs 0 <= x < n, got n = {n}, x = {x}")));
    }
    Ok(1.0 - f_drop(nf, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootSolveResult {
    pub n: u64,
    pub x_n: f64,
    pub iterations: usize,
    pub residual_d: f64,
}

impl RootSolveResult {
    /// `x_n - sqrt(2n)`.
    pub fn offset(&self) -> f64 {
        self.x_n - (2.0 * self.n as f64).sqrt()
    }
}

/// Root of `D_n` by bisection on `[0, sqrt(2n)]`, where `D_n(0) = 1` and
/// `D_n(sqrt(2n)) <= 0`. Stops once `|D_n| <= tol` and the bracket is no
/// wider than `tol` (or cannot shrink further in `f64`).
pub fn solve_xn(n: u64, tol: f64) -> Result<RootSolveResult> {
    if n < 2 {
        return Err(domain("solve_xn needs n >= 2"));
    }
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    let nf = n as f64;
    let d = |x: f64| 1.0 - f_drop(nf, x);
    let mut lo = 0.0;
    let mut hi = (2.0 * nf).sqrt().min(nf);
    debug_assert!(d(hi) <= 0.0);
    for it in 1..=MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let dm = d(mid);
        if dm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        let stuck = lo.next_up() >= hi;
        if dm.abs() <= tol && (hi - lo <= tol || stuck) {
            return Ok(RootSolveResult {
                n,
                x_n: mid,
                iterations: it,
                residual_d: dm,
            });
        }
        if stuck {
            break;
        }
    }
    Err(Error::Numeric(format!(
        "bisection for x_n did not reach tolerance {tol} at n = {n}"
    )))
}

/// Maximizer of `H(n, ., f)`: `1 + max{k >= 0 : 1 - f(n) + f(n-k) >= 0}`,
/// searched from `floor(x_n)`.
pub fn kstar_from_f(n: u64) -> Result<usize> {
    let root = solve_xn(n, DEFAULT_TOL)?;
    let nf = n as f64;
    let ok = |k: usize| k == 0 || 1.0 - f_drop(nf, k as f64) >= 0.0;
    let mut k = root.x_n.floor() as usize;
    while k > 0 && !ok(k) {
        k -= 1;
    }
    while (k + 1) < n as usize && ok(k + 1) {
        k += 1;
    }
    Ok(k + 1)
}

/// `max_{k in ks} H(n,k,f)/(n+1) - f(n+1)`, written as
/// `(k - sum_{i<k} (f(n) - f(n-i))) / (n+1) - (f(n+1) - f(n))` to avoid
/// cancellation.
fn defect_over(n: usize, lo: usize, hi: usize) -> f64 {
    let nf = n as f64;
    let mut drops: f64 = (1..lo).map(|i| f_drop(nf, i as f64)).sum();
    let mut best = f64::NEG_INFINITY;
    for k in lo..=hi {
        best = best.max(k as f64 - drops);
        drops += f_drop(nf, k as f64);
    }
    best / (nf + 1.0) - f_step(nf)
}

/// One-step defect of `f`, maximizing over a window of `k` around
/// `kstar_from_f(n)`.
pub fn defect_at(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("defect_at needs n >= 1"));
    }
    if n == 1 {
        return Ok(defect_over(1, 1, 1));
    }
    let center = kstar_from_f(n as u64)?;
    let lo = center.saturating_sub(DEFECT_WINDOW).max(1);
    let hi = (center + DEFECT_WINDOW).min(n);
    Ok(defect_over(n, lo, hi))
}

/// Same quantity as [`defect_at`] from the definition of `H`, over every `k`.
pub fn defect_at_full_scan(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("defect_at needs n >= 1"));
    }
    let fv = |i: usize| f_unchecked(i as f64);
    let fn_ = fv(n);
    let mut tail = 0.0;
    let mut best = f64::NEG_INFINITY;
    for k in 1..=n {
        tail += fv(n - k + 1);
        let h = k as f64 + (n - k + 1) as f64 * fn_ + tail;
        best = best.max(h);
    }
    Ok(best / (n + 1) as f64 - fv(n + 1))
}

/// Defects for `n = 1..=n_max` and the running constant
/// `B = max |defect(n)| n^{3/2}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DefectScan {
    /// `defects[n]`; index 0 is unused.
    pub defects: Vec<f64>,
    pub b_estimate: f64,
    /// Where the maximum is attained.
    pub argmax_n: usize,
}

impl DefectScan {
    pub fn n_max(&self) -> usize {
        self.defects.len() - 1
    }

    pub fn scaled(&self, n: usize) -> f64 {
        self.defects[n].abs() * (n as f64).powf(1.5)
    }

    /// Running maximum of the scaled defect up to `n`.
    pub fn b_up_to(&self, n: usize) -> f64 {
        (1..=n).map(|i| self.scaled(i)).fold(0.0, f64::max)
    }
}

pub fn defect_scan(n_max: usize) -> Result<DefectScan> {
    if n_max == 0 {
        return Err(domain("defect scan needs n_max >= 1"));
    }
    let tail: Vec<f64> = (1..=n_max).into_par_iter().map(defect_at).collect::<Result<_>>()?;
    let mut defects = Vec::with_capacity(n_max + 1);
    defects.push(0.0);
    defects.extend(tail);
    let mut scan = DefectScan {
        defects,
        b_estimate: 0.0,
        argmax_n: 1,
    };
    for n in 1..=n_max {
        let v = scan.scaled(n);
        if v > scan.b_estimate {
            scan.b_estimate = v;
            scan.argmax_n = n;
        }
    }
    Ok(scan)
}

/// `max_{1<=n<=n_max} |defect(n)| n^{3/2}`.
pub fn estimate_b(n_max: usize) -> Result<f64> {
    if n_max < 10 {
        return Err(domain("estimate_b needs n_max >= 10"));
    }
    Ok(defect_scan(n_max)?.b_estimate)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub n: usize,
    pub s_n: f64,
    pub f_n: f64,
    pub residual: f64,
}

/// Residuals `s(n) - f(n)` at selected `n`, sorted by `n`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AsymptoticScan {
    pub points: Vec<ScanPoint>,
}

impl AsymptoticScan {
    pub fn min_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(f64::INFINITY, f64::min)
    }

    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn spread(&self) -> f64 {
        self.max_residual() - self.min_residual()
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual.abs()).fold(0.0, f64::max)
    }
}

pub fn residual_scan(table: &ValueTable, ns: &[usize]) -> Result<AsymptoticScan> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let points = ns
        .into_iter()
        .map(|n| {
            let s_n = table
                .get(n)
                .filter(|_| n >= 1)
                .ok_or_else(|| domain(format!("n = {n} outside table [1, {}]", table.n_max())))?;
            let f_n = f_approx(n as u64)?;
            Ok(ScanPoint {
                n,
                s_n,
                f_n,
                residual: s_n - f_n,
            })
        })
        .collect::<Result<_>>()?;
    Ok(AsymptoticScan { points })
}

/// Roughly `per_decade` integers per factor of ten in `[lo, hi]`, always
/// including both ends.
pub fn log_spaced(lo: usize, hi: usize, per_decade: usize) -> Vec<usize> {
    assert!(lo >= 1 && lo <= hi && per_decade >= 1);
    let (a, b) = ((lo as f64).log10(), (hi as f64).log10());
    let steps = (((b - a) * per_decade as f64).ceil() as usize).max(1);
    let mut out: Vec<usize> = (0..=steps)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / steps as f64).round() as usize)
        .map(|n| n.clamp(lo, hi))
        .collect();
    out.push(lo);
    out.push(hi);
    out.sort_unstable();
    out.dedup();
    out
}

/// Every integer in `[lo, dense_until]`, then log-spaced up to `hi`.
pub fn dense_then_log(lo: usize, dense_until: usize, hi: usize, per_decade: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (lo..=dense_until.min(hi)).collect();
    if dense_until < hi {
        out.extend(log_spaced(dense_until + 1, hi, per_decade));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_examples() {
        assert!((f_approx(1).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let want = 350f64.sqrt() + 175f64.ln() / 6.0;
        assert!((f_approx(175).unwrap() - want).abs() < 1e-12);
        assert!(matches!(f_approx(0), Err(Error::Domain(_))));
    }

    #[test]
    fn f_drop_matches_direct() {
        for n in [2u64, 10, 1000, 123_456] {
            for x in [0.5, 1.0, 7.25] {
                if x < n as f64 {
                    let direct = f_approx(n).unwrap() - f_unchecked(n as f64 - x);
                    assert!((f_drop(n as f64, x) - direct).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn d_n_examples() {
        assert_eq!(d_n(100, 0.0).unwrap(), 1.0);
        assert!(d_n(100, 200f64.sqrt()).unwrap() <= 0.0);
        assert!(d_n(5, 5.0).is_err());
        assert!(d_n(5, -0.1).is_err());
    }

    #[test]
    fn d_n_strictly_decreasing_on_grid() {
        for n in [2u64, 3, 10, 175, 10_000, 1_000_000] {
            let nf = n as f64;
            let mut prev = d_n(n, 0.0).unwrap();
            for i in 1..1000 {
                let x = nf * i as f64 / 1000.0;
                let cur = d_n(n, x).unwrap();
                assert!(cur < prev, "n = {n}, x = {x}");
                prev = cur;
            }
        }
    }

    #[test]
    fn root_bounds() {
        for n in [2u64, 3, 4, 10, 100, 175, 10_000, 1_000_000, 10_000_000] {
            let r = solve_xn(n, DEFAULT_TOL).unwrap();
            let root2n = (2.0 * n as f64).sqrt();
            assert!(r.x_n <= root2n && r.x_n >= root2n - 2.0, "{r:?}");
            assert!(r.residual_d.abs() <= DEFAULT_TOL);
            assert!((d_n(n, r.x_n).unwrap()).abs() <= DEFAULT_TOL);
            assert!(r.x_n > 0.0 && r.x_n < n as f64);
        }
        assert!(solve_xn(1, DEFAULT_TOL).is_err());
        assert!(solve_xn(10, 0.0).is_err());
    }

    #[test]
    fn kstar_at_two_by_exhaustion() {
        // k = 0 always qualifies; k = 1 needs 1 - f(2) + f(1) >= 0
        let k1 = 1.0 - f_approx(2).unwrap() + f_approx(1).unwrap() >= 0.0;
        let want = 1 + if k1 { 1 } else { 0 };
        assert_eq!(kstar_from_f(2).unwrap(), want);
    }

    #[test]
    fn kstar_tracks_root() {
        for n in 2..3000u64 {
            let k = kstar_from_f(n).unwrap() as f64;
            let x = solve_xn(n, DEFAULT_TOL).unwrap().x_n;
            // k - 1 = floor(x_n) up to rounding
            assert!((k - 1.0 - x).abs() <= 1.0, "n = {n}");
            let r = (2.0 * n as f64).sqrt();
            assert!(k >= r - 2.0 && k <= r + 2.0);
        }
    }

    #[test]
    fn defect_window_matches_full_scan() {
        for n in (1..=5000).step_by(7).chain([1, 2, 3, 4, 5000]) {
            let a = defect_at(n).unwrap();
            let b = defect_at_full_scan(n).unwrap();
            assert!((a - b).abs() <= 1e-12, "n = {n}: {a} vs {b}");
        }
    }

    #[test]
    fn defect_at_one() {
        let want = (1.0 + 2.0 * f_approx(1).unwrap()) / 2.0 - f_approx(2).unwrap();
        assert!((defect_at(1).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn b_is_running_max() {
        let a = estimate_b(10).unwrap();
        let b = estimate_b(100).unwrap();
        let c = estimate_b(10_000).unwrap();
        assert!(a <= b && b <= c && c.is_finite());
        assert!(estimate_b(9).is_err());
    }

    #[test]
    fn spacing_helpers() {
        let v = log_spaced(1000, 10_000_000, 10);
        assert_eq!(v.first(), Some(&1000));
        assert_eq!(v.last(), Some(&10_000_000));
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        let d = dense_then_log(2, 100, 1000, 5);
        assert_eq!(&d[..3], &[2, 3, 4]);
        assert!(d.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(d.last(), Some(&1000));
    }
}
