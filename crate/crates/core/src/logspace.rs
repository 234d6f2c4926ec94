//! Log-domain arithmetic shared by every inference path.
//!
//! Zero probabilities are represented by `f64::NEG_INFINITY`. Adding a finite
//! value to it stays at negative infinity and the log-sum-exp of an all
//! negative-infinity slice is negative infinity, so degenerate models flow
//! through the recursions without special cases and without producing NaN.

/// `ln(exp(a) + exp(b))`.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// `ln(sum_i exp(xs[i]))`; negative infinity for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    log_sum_exp_iter(xs.iter().copied())
}

/// Iterator form of [`log_sum_exp`]. Consumes the iterator twice via a buffer.
pub fn log_sum_exp_iter<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let buf: Vec<f64> = xs.into_iter().collect();
    let max = buf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = buf.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// Index of the largest entry, smallest index on ties.
///
/// Returns 0 for a slice whose entries are all negative infinity.
pub fn argmax_first(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Subtract the log-sum-exp so the entries exponentiate to a unit sum.
///
/// Returns `None` when every entry is negative infinity.
pub fn log_normalize(xs: &[f64]) -> Option<Vec<f64>> {
    let total = log_sum_exp(xs);
    if total == f64::NEG_INFINITY {
        return None;
    }
    Some(xs.iter().map(|&x| x - total).collect())
}
