//! Value iteration for sequential selection from i.i.d. Uniform(0,1)
//! observations.
//!
//! State: `m` observations left and the length `y` of the window of values
//! above the last accepted one. With `w = v(m-1, .)`,
//!
//! ```text
//! v(m, y) = (1 - y) w(y) + integral_0^y max{ w(y), 1 + w(y - x) } dx
//! ```
//!
//! `w` is stored on the uniform grid `y_j = j/M` and interpolated linearly;
//! the integral of the piecewise-linear integrand is computed exactly, with
//! the switch point located by a monotone pointer.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fmt::sig17;

/// Smallest grid size accepted.
pub const MIN_GRID: usize = 100;

pub const DEFAULT_GRID: usize = 2000;

#[derive(Debug, Clone)]
pub struct IidValueGrid {
    horizon: usize,
    grid_size: usize,
    /// Row-major `(horizon + 1) x (grid_size + 1)`.
    v: Vec<f64>,
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < MIN_GRID {
        return Err(Error::Config(format!("grid size {grid_size} is below the floor {MIN_GRID}")));
    }
    Ok(())
}

/// Computes row `m` from row `m - 1` (`prev`) into `next`.
fn bellman_row(prev: &[f64], next: &mut [f64]) {
    let big_m = prev.len() - 1;
    let h = 1.0 / big_m as f64;
    // trap[i] = integral of 1 + w over [0, y_i]
    let mut trap = vec![0.0; big_m + 1];
    for i in 1..=big_m {
        trap[i] = trap[i - 1] + h * (2.0 + prev[i - 1] + prev[i]) / 2.0;
    }
    let mut switch = 0usize;
    for j in 0..=big_m {
        let c = prev[j];
        // smallest node where taking beats waiting
        while 1.0 + prev[switch] < c {
            switch += 1;
        }
        let mut integral = trap[j] - trap[switch];
        if switch > 0 {
            let below = (switch - 1) as f64 * h * c;
            let (a, b) = (1.0 + prev[switch - 1], 1.0 + prev[switch]);
            let theta = (c - a) / (b - a);
            let cell = h * (theta * c + (1.0 - theta) * (c + b) / 2.0);
            integral += below + cell;
        }
        let y = j as f64 * h;
        next[j] = (1.0 - y) * c + integral;
    }
}

impl IidValueGrid {
    /// Full grid `v[m][j]` for `m = 0..=horizon`.
    pub fn build(horizon: usize, grid_size: usize) -> Result<Self> {
        check_grid(grid_size)?;
        if horizon == 0 {
            return Err(domain("horizon must be positive"));
        }
        let width = grid_size + 1;
        let mut v = vec![0.0; (horizon + 1) * width];
        for m in 1..=horizon {
            let (done, rest) = v.split_at_mut(m * width);
            bellman_row(&done[(m - 1) * width..], &mut rest[..width]);
        }
        Ok(IidValueGrid { horizon, grid_size, v })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn row(&self, m: usize) -> &[f64] {
        let width = self.grid_size + 1;
        &self.v[m * width..(m + 1) * width]
    }

    pub fn node(&self, m: usize, j: usize) -> f64 {
        self.row(m)[j]
    }

    /// `v(m, y)` by linear interpolation in `y`.
    pub fn value_at(&self, m: usize, y: f64) -> f64 {
        let row = self.row(m);
        let pos = (y.clamp(0.0, 1.0)) * self.grid_size as f64;
        let j = (pos.floor() as usize).min(self.grid_size - 1);
        let t = pos - j as f64;
        row[j] + t * (row[j + 1] - row[j])
    }

    /// `ŝ(n) = v(n, 1)`.
    pub fn shat(&self, n: usize) -> Result<f64> {
        if n > self.horizon {
            return Err(domain(format!("n = {n} exceeds grid horizon {}", self.horizon)));
        }
        Ok(self.node(n, self.grid_size))
    }

    /// `ŝ(0..=horizon)`.
    pub fn shat_values(&self) -> Vec<f64> {
        (0..=self.horizon).map(|m| self.node(m, self.grid_size)).collect()
    }

    /// Whether to take a candidate `x` above the last accepted value with
    /// window `y` and `m` observations left (including this one). Ties
    /// accept.
    pub fn iid_accept(&self, m: usize, y: f64, x: f64) -> Result<bool> {
        if m == 0 || m > self.horizon {
            return Err(domain(format!("m = {m} outside [1, {}]", self.horizon)));
        }
        if !(0.0..=1.0).contains(&y) || x < 0.0 || x > y {
            return Err(domain(format!("need 0 <= x <= y <= 1, got x = {x}, y = {y}")));
        }
        Ok(1.0 + self.value_at(m - 1, y - x) >= self.value_at(m - 1, y))
    }

    /// Largest accepted candidate `x*(m, y)`, found by bisection on the
    /// monotone acceptance rule.
    pub fn acceptance_threshold(&self, m: usize, y: f64) -> Result<f64> {
        if self.iid_accept(m, y, y)? {
            return Ok(y);
        }
        let (mut lo, mut hi) = (0.0, y);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.iid_accept(m, y, mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// CSV `m,j,y,v` over every node.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,j,y,v\n");
        for m in 0..=self.horizon {
            for j in 0..=self.grid_size {
                let y = j as f64 / self.grid_size as f64;
                out.push_str(&format!("{m},{j},{},{}\n", sig17(y), sig17(self.node(m, j))));
            }
        }
        out
    }
}

pub fn build_grid(horizon: usize, grid_size: usize) -> Result<IidValueGrid> {
    IidValueGrid::build(horizon, grid_size)
}

/// `ŝ(0..=horizon)` keeping only two rows in memory.
pub fn shat_curve(horizon: usize, grid_size: usize) -> Result<Vec<f64>> {
    check_grid(grid_size)?;
    let mut prev = vec![0.0; grid_size + 1];
    let mut next = vec![0.0; grid_size + 1];
    let mut out = vec![0.0];
    for _ in 1..=horizon {
        bellman_row(&prev, &mut next);
        out.push(next[grid_size]);
        std::mem::swap(&mut prev, &mut next);
    }
    Ok(out)
}

pub fn shat(n: usize, grid_size: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    Ok(shat_curve(n, grid_size)?[n])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShatPoint {
    pub n: usize,
    pub shat: f64,
    /// `|ŝ_{2M}(n) - ŝ_M(n)|`.
    pub err_bar: f64,
}

/// `ŝ(n)` at grid size `M` with the `M` vs `2M` gap as error bar.
pub fn shat_summary(horizon: usize, grid_size: usize) -> Result<Vec<ShatPoint>> {
    let coarse = shat_curve(horizon, grid_size)?;
    let fine = shat_curve(horizon, 2 * grid_size)?;
    Ok((1..=horizon)
        .map(|n| ShatPoint {
            n,
            shat: coarse[n],
            err_bar: (fine[n] - coarse[n]).abs(),
        })
        .collect())
}

pub fn summary_csv(points: &[ShatPoint]) -> String {
    let mut out = String::from("n,shat,err_bar\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.n, sig17(p.shat), sig17(p.err_bar)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub passed: bool,
    /// First `n` with `ŝ(n+2) - ŝ(n+1) > ŝ(n+1) - ŝ(n) + tol(n)`.
    pub first_violation: Option<usize>,
    /// Largest excess of a later increment over the preceding one.
    pub worst_excess: f64,
}

/// Checks that increments of `values[0..]` are nonincreasing, allowing
/// `tolerance(n)` at the pair starting at `n`.
pub fn concavity_check(values: &[f64], tolerance: impl Fn(usize) -> f64) -> ConcavityReport {
    let mut first_violation = None;
    let mut worst_excess = f64::NEG_INFINITY;
    for n in 0..values.len().saturating_sub(2) {
        let excess = (values[n + 2] - values[n + 1]) - (values[n + 1] - values[n]);
        worst_excess = worst_excess.max(excess);
        if excess > tolerance(n) && first_violation.is_none() {
            first_violation = Some(n);
        }
    }
    ConcavityReport {
        passed: first_violation.is_none(),
        first_violation,
        worst_excess,
    }
}

/// Concavity of `n -> ŝ(n)` on `1..=n_max`, to a tolerance of twice the
/// `M` vs `2M` refinement gap.
pub fn grid_concavity(n_max: usize, grid_size: usize) -> Result<ConcavityReport> {
    let coarse = shat_curve(n_max, grid_size)?;
    let fine = shat_curve(n_max, 2 * grid_size)?;
    let gap: Vec<f64> = coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).collect();
    let report = concavity_check(&coarse[1..], |i| {
        2.0 * gap[i + 1..=i + 3].iter().copied().fold(0.0, f64::max)
    });
    Ok(ConcavityReport {
        first_violation: report.first_violation.map(|i| i + 1),
        ..report
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_row_is_linear() {
        let g = build_grid(3, 200).unwrap();
        for j in 0..=200 {
            assert!((g.node(1, j) - j as f64 / 200.0).abs() < 1e-14);
            assert_eq!(g.node(0, j), 0.0);
        }
        assert!((g.shat(1).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn second_row_matches_closed_form() {
        // with two steps left every candidate is taken: v(2, y) = 2y - y^2/2
        let g = build_grid(2, 400).unwrap();
        for j in 0..=400 {
            let y = j as f64 / 400.0;
            assert!((g.node(2, j) - (2.0 * y - y * y / 2.0)).abs() < 1e-12, "j = {j}");
        }
    }

    #[test]
    fn rows_monotone() {
        let g = build_grid(60, 300).unwrap();
        for m in 0..=60 {
            assert_eq!(g.node(m, 0), 0.0);
            for j in 1..=300 {
                assert!(g.node(m, j) >= g.node(m, j - 1));
                if m > 0 {
                    assert!(g.node(m, j) >= g.node(m - 1, j));
                }
                assert!(g.node(m, j) <= m as f64);
            }
        }
    }

    #[test]
    fn curve_matches_full_grid() {
        let g = build_grid(40, 250).unwrap();
        let c = shat_curve(40, 250).unwrap();
        assert_eq!(g.shat_values(), c);
        assert_eq!(shat(40, 250).unwrap(), c[40]);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(build_grid(5, 99), Err(Error::Config(_))));
        assert!(build_grid(0, 100).is_err());
        let g = build_grid(5, 100).unwrap();
        assert!(g.shat(6).is_err());
        assert!(g.iid_accept(1, 0.5, 0.6).is_err());
        assert!(g.iid_accept(0, 0.5, 0.1).is_err());
    }

    #[test]
    fn accept_rules() {
        let g = build_grid(50, 500).unwrap();
        for y in [0.1, 0.5, 1.0] {
            assert!(g.iid_accept(1, y, y).unwrap());
            for m in 1..=50 {
                assert!(g.iid_accept(m, y, 1e-9).unwrap());
            }
        }
        for m in [5, 20, 50] {
            let mut prev = 0.0;
            for i in 1..=50 {
                let t = g.acceptance_threshold(m, i as f64 / 50.0).unwrap();
                assert!(t >= prev - 1e-12, "m = {m}, y = {}", i as f64 / 50.0);
                prev = t;
            }
        }
    }

    #[test]
    fn concavity_negative_control() {
        let values = [0.0, 1.0, 1.5, 1.8, 2.5, 2.7];
        let r = concavity_check(&values, |_| 0.0);
        assert!(!r.passed);
        assert_eq!(r.first_violation, Some(2));
        let ok = concavity_check(&[0.0, 1.0, 1.5], |_| 0.0);
        assert!(ok.passed);
    }
}
