//! Binary-target limits on the selection divergence: the bin-grouping lower
//! bound and the LLF upper bound, both evaluated with per-weight binomial
//! terms in the log domain so that `n = 10^4` is cheap.

use num_bigint::BigUint;
use serde::Serialize;

use crate::bounds::binomial_prefix_sum;
use crate::combin::log2_binomial;
use crate::error::{IldError, Result};
use crate::scalar::Log2Sum;

/// log2 of `C(n,i) q^i (1-q)^(n-i)` for `i = 0..=n`.
fn weight_terms(n: u32, q: f64) -> Vec<f64> {
    let (lq, lp) = (q.log2(), (1.0 - q).log2());
    (0..=n as u64)
        .map(|i| log2_binomial(n as u64, i) + i as f64 * lq + (n as u64 - i) as f64 * lp)
        .collect()
}

/// `prefix[i] = log2 sum_{j < i} t_j`, `suffix[i] = log2 sum_{j >= i} t_j`.
fn cumulative(terms: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut prefix = Vec::with_capacity(terms.len() + 1);
    let mut acc = Log2Sum::<f64>::new();
    prefix.push(f64::NEG_INFINITY);
    for &t in terms {
        acc.add_log2(t);
        prefix.push(acc.log2());
    }
    let mut suffix = vec![f64::NEG_INFINITY; terms.len() + 1];
    let mut acc = Log2Sum::<f64>::new();
    for i in (0..terms.len()).rev() {
        acc.add_log2(terms[i]);
        suffix[i] = acc.log2();
    }
    (prefix, suffix)
}

fn check_binary(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 0.5) {
        return Err(IldError::Domain(format!("light-letter probability {q} must lie in (0, 1/2)")));
    }
    Ok(())
}

/// Largest weight whose strings still have probability at least `2^(-n r)`.
/// `None` when even the all-heavy string is below that level.
pub fn k_max(n: u32, q: f64, r_info: f64) -> Option<u32> {
    let (lq, lp) = (q.log2(), (1.0 - q).log2());
    let nf = n as f64;
    let x = nf * (lp + r_info) / (lp - lq);
    let mut k = (x + 1e-9 * x.abs().max(1.0)).floor();
    if k < 0.0 {
        return None;
    }
    k = k.min(nf);
    let mut k = k as u32;
    // guard the floor against rounding at exact thresholds
    let level = -nf * r_info;
    while k as f64 * lq + (n - k) as f64 * lp < level - 1e-9 * level.abs().max(1.0) {
        if k == 0 {
            return None;
        }
        k -= 1;
    }
    Some(k)
}

/// `D([a, 1-a] || [b, 1-b])` from `log2 a`, `log2 b` and `log2 (1-b)`.
fn binary_divergence_log(log2_a: f64, log2_b: f64, log2_1mb: f64) -> f64 {
    let a = log2_a.exp2();
    let one_minus_a = -(log2_a * std::f64::consts::LN_2).exp_m1();
    let mut d = a * (log2_a - log2_b);
    if one_minus_a > 0.0 {
        d += one_minus_a * (one_minus_a.log2() - log2_1mb);
    }
    d.max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    pub k_max: Option<u32>,
    /// `N_up = sum_{i <= k_max} C(n, i)`, exact when `n <= 4096`.
    pub n_up: Option<String>,
    pub log2_n_up: f64,
    pub q_s_up: f64,
    /// The grouping weight `k'` attaining the maximum.
    pub best_k: Option<u32>,
}

/// Maximum over `k' <= k_max` of `D([N'/K, 1-N'/K] || [q'_up, 1-q'_up])`
/// with `N' = sum_{i<=k'} C(n,i)`, for the full-support binary book.
pub fn lower_bound(n: u32, q: f64, r_info: f64) -> Result<LowerBound> {
    check_binary(q)?;
    if n == 0 {
        return Err(IldError::Range("n must be positive".into()));
    }
    let Some(km) = k_max(n, q, r_info) else {
        return Ok(LowerBound { value: 0.0, k_max: None, n_up: Some("0".into()), log2_n_up: f64::NEG_INFINITY, q_s_up: 0.0, best_k: None });
    };
    let terms = weight_terms(n, q);
    let (prefix, suffix) = cumulative(&terms);
    let log2_k = n as f64 * r_info;
    let mut log2_count = Log2Sum::<f64>::new();
    let mut best = (0.0, None);
    for kp in 0..=km as usize {
        log2_count.add_log2(log2_binomial(n as u64, kp as u64));
        let d = binary_divergence_log(log2_count.log2() - log2_k, prefix[kp + 1], suffix[kp + 1]);
        if d > best.0 || best.1.is_none() {
            best = (d, Some(kp as u32));
        }
    }
    let n_up = (n <= 4096).then(|| binomial_prefix_sum(n as u64, km as u64).to_string());
    Ok(LowerBound {
        value: best.0,
        k_max: Some(km),
        n_up,
        log2_n_up: log2_count.log2(),
        q_s_up: prefix[km as usize + 1].exp2(),
        best_k: best.1,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LlfUpper {
    /// `log2 1/(1 - [(1 - q_S) + K q^k (1-q)^(n-k)])`
    pub bound: f64,
    pub bracket: f64,
    /// Probability of the book of strings with at least `k` light letters.
    pub q_s: f64,
    /// `exp(-2n (q - (k-1)/n)^2)` bound on `1 - q_S`, when `(k-1)/n < q`.
    pub hoeffding_tail: Option<f64>,
    /// The same bound with `1 - q_S` replaced by its Hoeffding bound.
    pub hoeffding_bound: Option<f64>,
}

fn bracket_bound(bracket: f64) -> Result<f64> {
    if !(bracket < 1.0) {
        return Err(IldError::BracketOverflow(bracket));
    }
    Ok(-(-bracket).ln_1p() / std::f64::consts::LN_2)
}

/// Upper bound on the LLF (and MLF) selection divergence for the book of
/// binary strings with at least `k` light letters split into `K = 2^log2_k` sets.
pub fn llf_divergence_upper(n: u32, q: f64, k: u32, log2_k: f64) -> Result<LlfUpper> {
    check_binary(q)?;
    if k > n {
        return Err(IldError::Range(format!("k = {k} exceeds n = {n}")));
    }
    let terms = weight_terms(n, q);
    let (prefix, suffix) = cumulative(&terms);
    eval_upper(n, q, k, log2_k, &prefix, &suffix)
}

fn eval_upper(n: u32, q: f64, k: u32, log2_k: f64, prefix: &[f64], suffix: &[f64]) -> Result<LlfUpper> {
    let tail = prefix[k as usize].exp2();
    let top = log2_k + k as f64 * q.log2() + (n - k) as f64 * (1.0 - q).log2();
    let bracket = tail + top.exp2();
    let bound = bracket_bound(bracket)?;
    let nf = n as f64;
    let gap = q - (k as f64 - 1.0) / nf;
    let hoeffding_tail = (gap > 0.0).then(|| (-2.0 * nf * gap * gap).exp());
    let hoeffding_bound = hoeffding_tail.and_then(|h| bracket_bound(h + top.exp2()).ok());
    Ok(LlfUpper { bound, bracket, q_s: suffix[k as usize].exp2(), hoeffding_tail, hoeffding_bound })
}

/// The LLF upper bound at rate `r_info`, minimized over the book threshold
/// `k <= n q` (i.e. over the pairs `(eps, delta)` that reach this rate).
pub fn llf_upper_curve(n: u32, q: f64, r_info: f64) -> Result<(LlfUpper, u32)> {
    check_binary(q)?;
    let terms = weight_terms(n, q);
    let (prefix, suffix) = cumulative(&terms);
    let log2_k = n as f64 * r_info;
    let mut best: Option<(LlfUpper, u32)> = None;
    let top_k = ((n as f64 * q).floor() as u32).min(n);
    for k in 0..=top_k {
        if let Ok(u) = eval_upper(n, q, k, log2_k, &prefix, &suffix) {
            if best.as_ref().is_none_or(|(b, _)| u.bound < b.bound) {
                best = Some((u, k));
            }
        }
    }
    best.ok_or(IldError::BracketOverflow(1.0))
}

/// Exact `N_up` as an integer (for tests and small `n`).
pub fn n_up_exact(n: u32, k: u32) -> BigUint {
    binomial_prefix_sum(n as u64, k as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::binary_entropy;

    #[test]
    fn small_example() {
        let lb = lower_bound(10, 0.11, 0.5).unwrap();
        assert_eq!(lb.k_max, Some(1));
        assert_eq!(lb.n_up.as_deref(), Some("11"));
        let oracle = 0.89f64.powi(10) + 10.0 * 0.11 * 0.89f64.powi(9);
        assert!((lb.q_s_up - oracle).abs() < 1e-12);
        assert!(lb.value > 0.0);
    }

    #[test]
    fn empty_up_set_gives_zero() {
        let r = -(0.89f64.log2());
        let lb = lower_bound(10, 0.11, r * 0.99).unwrap();
        assert_eq!(lb.value, 0.0);
        assert!(lb.k_max.is_none());
    }

    #[test]
    fn one_bit_limit_at_large_n() {
        let lb = lower_bound(10_000, 0.11, binary_entropy(0.11)).unwrap();
        assert!(lb.value > 0.95 && lb.value <= 1.0, "{}", lb.value);
        assert_eq!(lb.k_max, Some(1100));
    }

    #[test]
    fn upper_bound_single_set() {
        let u = llf_divergence_upper(10, 0.11, 0, 10.0).unwrap_err();
        assert!(matches!(u, IldError::BracketOverflow(_)));
        let u = llf_divergence_upper(20, 0.11, 1, 0.0).unwrap();
        assert!(u.bound >= -(u.q_s.log2()));
        let (curve, _) = llf_upper_curve(10_000, 0.11, 0.3).unwrap();
        assert!(curve.bound > 0.0 && curve.bound.is_finite());
    }
}
