//! The three subsequence distance kernels.
//!
//! * [`sliding_min_distance`] — minimum Euclidean distance over every
//!   contiguous window, the classic shapelet distance. O(k(m−k)).
//! * [`fixed_distance`] — Euclidean distance against the window at the
//!   shapelet's own start position. O(k).
//! * [`relaxed_fixed_distance`] — fixed distance with a small positional
//!   tolerance of `l` steps left / `r` steps right.
//!
//! All kernels are pure and safe to evaluate in parallel; results do not
//! depend on evaluation order.

use crate::error::{Result, SistError};
use crate::TimeSeries;

/// How the relaxation window of the relaxed fixed distance is searched.
///
/// `ShiftedWindow` keeps the matched subsequence contiguous and only shifts
/// its start; this is the default, matching the motivation of absorbing
/// small delays. `SubsequenceDp` additionally allows the matched indices to
/// be discontinuous (any ordered selection inside the relaxation span) and
/// searches them by dynamic programming in O(k·(k+l+r)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxMode {
    ShiftedWindow,
    SubsequenceDp,
}

impl std::fmt::Display for RelaxMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RelaxMode::ShiftedWindow => write!(f, "shifted"),
            RelaxMode::SubsequenceDp => write!(f, "subseq-dp"),
        }
    }
}

/// Relaxation constants `l` (left) and `r` (right) plus the search mode.
/// `l = r = 0` reduces the relaxed distance to the fixed distance exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelaxConfig {
    pub left: usize,
    pub right: usize,
    pub mode: RelaxMode,
}

impl RelaxConfig {
    pub fn new(left: usize, right: usize, mode: RelaxMode) -> Self {
        Self { left, right, mode }
    }

    pub fn shifted(left: usize, right: usize) -> Self {
        Self::new(left, right, RelaxMode::ShiftedWindow)
    }

    pub fn subsequence_dp(left: usize, right: usize) -> Self {
        Self::new(left, right, RelaxMode::SubsequenceDp)
    }

    /// No relaxation: equivalent to the fixed distance.
    pub fn none() -> Self {
        Self::shifted(0, 0)
    }
}

impl Default for RelaxConfig {
    fn default() -> Self {
        Self::none()
    }
}

/// Where a shapelet came from: source series index (0-based row in its
/// dataset), 1-based start position `j`, and length `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub source_index: usize,
    pub start: usize,
    pub len: usize,
}

impl Placement {
    pub fn new(source_index: usize, start: usize, len: usize) -> Self {
        Self { source_index, start, len }
    }

    /// End position (1-based, inclusive).
    pub fn end(&self) -> usize {
        self.start + self.len - 1
    }

    fn check_against(&self, series_len: usize) -> Result<()> {
        if self.start < 1 || self.len == 0 || self.end() > series_len {
            return Err(SistError::PlacementOutOfRange {
                start: self.start,
                end: self.end(),
                series: series_len,
            });
        }
        Ok(())
    }
}

/// Plain Euclidean distance between two equal-length vectors.
pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(SistError::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(squared_euclidean(a, b).sqrt())
}

#[inline]
fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        sum += d * d;
    }
    sum
}

/// Squared distance with early abandon: accumulation stops as soon as the
/// partial sum strictly exceeds `cutoff`. Partial sums of squares only grow,
/// so an abandoned window can never hold the minimum; exact results are
/// preserved.
#[inline]
fn squared_euclidean_abandon(a: &[f64], b: &[f64], cutoff: f64) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        sum += d * d;
        if sum > cutoff {
            return sum;
        }
    }
    sum
}

/// Minimum Euclidean distance between `s` and every contiguous window of
/// `x` (the classic shapelet distance). O(k(m−k)) with early abandon.
pub fn sliding_min_distance(s: &[f64], x: &TimeSeries) -> Result<f64> {
    let (k, m) = (s.len(), x.len());
    if k > m || k == 0 {
        return Err(SistError::ShapeletLongerThanSeries { shapelet: k, series: m });
    }
    let vals = x.values();
    let mut best = f64::INFINITY;
    for i in 0..=(m - k) {
        let sq = squared_euclidean_abandon(s, &vals[i..i + k], best);
        if sq < best {
            best = sq;
        }
    }
    Ok(best.sqrt())
}

/// Euclidean distance between `s` and the window of `x` at the shapelet's
/// own start position. O(k); the rest of the series is never touched.
pub fn fixed_distance(s: &[f64], placement: &Placement, x: &TimeSeries) -> Result<f64> {
    placement.check_against(x.len())?;
    debug_assert_eq!(placement.len, s.len(), "placement length must match shapelet length");
    let start = placement.start - 1;
    Ok(squared_euclidean(s, &x.values()[start..start + s.len()]).sqrt())
}

/// Fixed distance with positional tolerance. The shift range is clamped to
/// valid window positions so shapelets near series edges stay usable.
pub fn relaxed_fixed_distance(
    s: &[f64],
    placement: &Placement,
    x: &TimeSeries,
    cfg: &RelaxConfig,
) -> Result<f64> {
    placement.check_against(x.len())?;
    debug_assert_eq!(placement.len, s.len(), "placement length must match shapelet length");
    match cfg.mode {
        RelaxMode::ShiftedWindow => Ok(relaxed_shifted(s, placement, x, cfg.left, cfg.right)),
        RelaxMode::SubsequenceDp => Ok(relaxed_dp(s, placement, x, cfg.left, cfg.right)),
    }
}

fn relaxed_shifted(s: &[f64], placement: &Placement, x: &TimeSeries, l: usize, r: usize) -> f64 {
    let (k, m, j) = (s.len(), x.len(), placement.start);
    let lo = j.saturating_sub(l).max(1);
    let hi = (j + r).min(m - k + 1);
    let vals = x.values();
    let mut best = f64::INFINITY;
    for i in lo..=hi {
        let sq = squared_euclidean_abandon(s, &vals[i - 1..i - 1 + k], best);
        if sq < best {
            best = sq;
        }
    }
    best.sqrt()
}

/// Minimum over ordered, possibly discontinuous index selections
/// i1 < … < ik with j−l ≤ i1 ≤ j+r and ik < j+k+r, clamped to the series.
/// Dynamic program over (shapelet element, window position): O(k·(k+l+r)).
fn relaxed_dp(s: &[f64], placement: &Placement, x: &TimeSeries, l: usize, r: usize) -> f64 {
    let (k, m, j) = (s.len(), x.len(), placement.start);
    let lo = j.saturating_sub(l).max(1);
    let first_hi = (j + r).min(m - k + 1);
    let hi = (j + k + r - 1).min(m);
    let width = hi - lo + 1;
    let vals = x.values();

    // cost[p] holds the best cost of matching elements 1..=t with the last
    // matched position lo+p; prefix minima give the best predecessor.
    let mut cost = vec![f64::INFINITY; width];
    for p in 0..=(first_hi - lo) {
        let d = s[0] - vals[lo - 1 + p];
        cost[p] = d * d;
    }
    for t in 1..k {
        let mut best_prev = f64::INFINITY;
        let mut next = vec![f64::INFINITY; width];
        // position p must leave room for the remaining k−1−t elements
        for p in t..=(width - (k - t)) {
            let prev = cost[p - 1];
            if prev < best_prev {
                best_prev = prev;
            }
            if best_prev.is_finite() {
                let d = s[t] - vals[lo - 1 + p];
                next[p] = best_prev + d * d;
            }
        }
        cost = next;
    }
    cost.iter().copied().fold(f64::INFINITY, f64::min).sqrt()
}
