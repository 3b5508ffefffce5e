//! Shannon entropy in bits and related distribution measures.

use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::scalar::Scalar;

/// Bisection stops once the bracket is narrower than this.
const INVERSE_TOL: f64 = 1e-13;

/// `-sum p log2 p` over the positive-weight actions.
pub fn shannon_entropy<T: Scalar>(strategy: &MixedStrategy<T>) -> f64 {
    entropy_of(strategy.probs().iter().map(Scalar::to_f64_lossy))
}

/// Entropy in bits of an arbitrary weight sequence that sums to one.
pub fn entropy_of(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| if p >= 1.0 { 0.0 } else { -p * p.log2() })
        .sum()
}

/// Plug-in entropy estimate of empirical counts.
pub fn empirical_entropy(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    entropy_of(counts.iter().map(|&c| c as f64 / total as f64))
}

/// `h(q) = -q log2 q - (1-q) log2 (1-q)`.
pub fn binary_entropy(q: f64) -> f64 {
    entropy_of([q, 1.0 - q])
}

/// The unique `q` in `[0, 1/2]` with `h(q) = h`, by bisection.
pub fn binary_entropy_inverse(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) || h.is_nan() {
        return Err(Error::invalid(format!("binary entropy level {h} outside [0, 1]")));
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    if h == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    while hi - lo > INVERSE_TOL {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Half the L1 distance between two distributions on the same support.
pub fn statistical_distance<T: Scalar>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(Error::invalid(format!(
            "distributions have different support sizes ({} vs {})",
            p.len(),
            q.len()
        )));
    }
    let l1 = p
        .iter()
        .zip(q)
        .fold(T::zero(), |acc, (a, b)| acc + (a.clone() - b.clone()).abs());
    Ok(l1 / T::from_ratio(2, 1))
}
