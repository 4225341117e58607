//! Shared numeric helpers: harmonic sums, tie-broken value keys and
//! order-statistic thresholds.

use std::cmp::Ordering;

/// Absolute tolerance for floating-point comparisons.
pub const TOL: f64 = 1e-9;

/// `H_k = 1 + 1/2 + ... + 1/k`, with `H_0 = 0`.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// A value tagged with its item index.
///
/// Ordering compares values first; equal values rank the lower index as the
/// larger one, so every comparison between distinct items is strict.
#[derive(Debug, Clone, Copy)]
pub struct Ranked {
    pub value: f64,
    pub index: usize,
}

impl Ranked {
    pub fn new(value: f64, index: usize) -> Self {
        Self { value, index }
    }
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Acceptance bar for threshold algorithms: either everything passes
/// (`Free`, the "minus infinity" threshold) or only keys strictly above a
/// reference item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    Free,
    Above(Ranked),
}

impl Threshold {
    pub fn admits(&self, key: Ranked) -> bool {
        match self {
            Threshold::Free => true,
            Threshold::Above(t) => key > *t,
        }
    }

    /// The `rank`-th largest key (1-based) of `keys`, or `Free` when the rank
    /// exceeds the number of keys.
    pub fn rank_of(keys: &[Ranked], rank: usize) -> Self {
        match kth_largest(keys, rank) {
            Some(k) => Threshold::Above(k),
            None => Threshold::Free,
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Threshold::Free => f64::NEG_INFINITY,
            Threshold::Above(t) => t.value,
        }
    }
}

/// The `rank`-th largest element (1-based), or `None` if `rank` is zero or
/// exceeds the slice length.
pub fn kth_largest(keys: &[Ranked], rank: usize) -> Option<Ranked> {
    if rank == 0 || rank > keys.len() {
        return None;
    }
    let mut buf = keys.to_vec();
    let (_, kth, _) = buf.select_nth_unstable_by(rank - 1, |a, b| b.cmp(a));
    Some(*kth)
}

/// `ceil(x)` that ignores representation noise just above an integer.
pub(crate) fn ceil_tol(x: f64) -> usize {
    let c = (x - 1e-9).ceil();
    if c <= 0.0 {
        0
    } else {
        c as usize
    }
}

/// Mean and standard error (sample standard deviation over sqrt(n)).
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(0), 0.0);
        assert_eq!(harmonic(1), 1.0);
        assert_eq!(harmonic(2), 1.5);
        assert!((harmonic(4) - 25.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn ties_break_toward_lower_index() {
        let a = Ranked::new(3.0, 1);
        let b = Ranked::new(3.0, 4);
        assert!(a > b);
        assert!(Ranked::new(3.5, 9) > a);
    }

    #[test]
    fn order_statistics() {
        let keys: Vec<Ranked> = [9.0, 7.0, 5.0, 3.0, 1.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| Ranked::new(v, i))
            .collect();
        assert_eq!(kth_largest(&keys, 1).unwrap().value, 9.0);
        assert_eq!(kth_largest(&keys, 2).unwrap().value, 7.0);
        assert_eq!(kth_largest(&keys, 5).unwrap().value, 1.0);
        assert!(kth_largest(&keys, 6).is_none());
        assert_eq!(Threshold::rank_of(&keys, 6), Threshold::Free);
    }

    #[test]
    fn free_threshold_admits_everything() {
        assert!(Threshold::Free.admits(Ranked::new(f64::MIN, 0)));
        let t = Threshold::Above(Ranked::new(2.0, 0));
        assert!(!t.admits(Ranked::new(2.0, 1)));
        assert!(t.admits(Ranked::new(2.1, 1)));
    }

    #[test]
    fn ceil_ignores_noise() {
        assert_eq!(ceil_tol(8.000000000001), 8);
        assert_eq!(ceil_tol(8.1), 9);
        assert_eq!(ceil_tol(0.0), 0);
    }

    #[test]
    fn stderr_of_constant_is_zero() {
        let (m, s) = mean_and_stderr(&[2.0, 2.0, 2.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 0.0);
    }
}
