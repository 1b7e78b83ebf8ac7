//! Inequality evaluators: entropy continuity, Pinsker, Hoeffding, typical
//! sets, binomial and multinomial sandwiches, and the rate-region limits.
//!
//! Bounds whose hypothesis fails are returned with `applicable = false`
//! rather than as errors, so sweeps can cross hypothesis boundaries.

use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::combin::{binary_entropy, binomial, log2_binomial, log2_multinomial};
use crate::error::{IldError, Result};
use crate::info::{entropy, l1_distance, Pmf};
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundPair<T> {
    pub lower: T,
    pub upper: T,
    pub applicable: bool,
}

impl<T: Real> BoundPair<T> {
    pub fn new(lower: T, upper: T) -> Self {
        Self { lower, upper, applicable: true }
    }

    pub fn inapplicable(lower: T, upper: T) -> Self {
        Self { lower, upper, applicable: false }
    }

    /// True when `x` lies in `[lower, upper]` up to a relative slack `tol`.
    pub fn contains(&self, x: T, tol: T) -> bool {
        let slack = tol * x.abs().max(T::one());
        x >= self.lower - slack && x <= self.upper + slack
    }
}

/// Right-hand sides of the two entropy continuity bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyDiffBounds<T> {
    pub d1: T,
    /// Bound on `|H(P) - H(Q)|`, present iff `d1 <= 1/2`.
    pub continuity: Option<T>,
    /// Bound on `H(P) - H(Q)`, present iff `d1 <= 2 p_min`.
    pub refined: Option<T>,
}

pub fn entropy_diff_bounds<T: Real>(p: &Pmf<T>, q: &Pmf<T>) -> Result<EntropyDiffBounds<T>> {
    let d1 = l1_distance(p, q)?;
    let half = lit::<T>(0.5);
    let a = T::from_usize(p.alphabet_size()).unwrap();
    let continuity = (d1 <= half).then(|| if d1 == T::zero() { T::zero() } else { -d1 * (d1 / a).log2() });
    let p_min = p.min();
    let refined = (d1 <= lit::<T>(2.0) * p_min).then(|| {
        if d1 == T::zero() {
            T::zero()
        } else {
            d1 * half * ((p.max() + d1 * half) / (p_min - d1 * half)).log2()
        }
    });
    Ok(EntropyDiffBounds { d1, continuity, refined })
}

/// Pinsker sandwich `d1^2 / (2 ln 2) <= D(P||Q) <= d1^2 / (q_min ln 2)`,
/// with `q_min` taken over the support of `p`.
pub fn pinsker_bounds<T: Real>(p: &Pmf<T>, q: &Pmf<T>) -> Result<BoundPair<T>> {
    let d1 = l1_distance(p, q)?;
    let ln2 = T::LN_2();
    let lower = d1 * d1 / (lit::<T>(2.0) * ln2);
    let q_min = p.support().into_iter().map(|i| q.get(i)).fold(T::infinity(), T::min);
    let upper = if q_min <= T::zero() {
        T::infinity()
    } else if d1 == T::zero() {
        T::zero()
    } else {
        d1 * d1 / (q_min * ln2)
    };
    Ok(BoundPair::new(lower, upper))
}

/// `exp(-2 n t^2)`.
pub fn hoeffding_tail<T: Real>(n: u64, t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(IldError::Domain(format!("t = {t} must be non-negative")));
    }
    if n == 0 {
        return Err(IldError::Range("n must be positive".into()));
    }
    Ok((-lit::<T>(2.0) * T::from_u64(n).unwrap() * t * t).exp())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypicalSetBounds<T> {
    pub delta: T,
    /// On `P(T_eps)`.
    pub prob: BoundPair<T>,
    /// On `P^n(a^n)` for each typical string.
    pub string_prob: BoundPair<T>,
    /// On `|T_eps|`.
    pub size: BoundPair<T>,
}

pub fn typical_set_bounds<T: Real>(q: &Pmf<T>, n: u64, eps: T) -> Result<TypicalSetBounds<T>> {
    if !(eps >= T::zero()) {
        return Err(IldError::Domain(format!("eps = {eps} must be non-negative")));
    }
    let nn = T::from_u64(n).unwrap();
    let a = T::from_usize(q.alphabet_size()).unwrap();
    let p_min = q.min_positive();
    let two = lit::<T>(2.0);
    let delta = two * a * (-two * nn * p_min * p_min * eps * eps).exp();
    let h = entropy(q);
    let hi = nn * h * (T::one() + eps);
    let lo = nn * h * (T::one() - eps);
    Ok(TypicalSetBounds {
        delta,
        prob: BoundPair::new(T::one() - delta, T::one()),
        string_prob: BoundPair::new((-hi).exp2(), (-lo).exp2()),
        size: BoundPair::new((T::one() - delta) * lo.exp2(), hi.exp2()),
    })
}

/// Both sides of the binomial sum identity, multiplied by two so that they
/// are integers: `sum_{i<=k} C(n,i)(n - 2i) = (k+1) C(n,k+1) = (n-k) C(n,k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinomialIdentity {
    pub lhs_times2: BigInt,
    pub rhs_times2: BigInt,
    pub alt_times2: BigInt,
}

impl BinomialIdentity {
    pub fn holds(&self) -> bool {
        self.lhs_times2 == self.rhs_times2 && self.rhs_times2 == self.alt_times2
    }
}

pub fn binomial_identity(n: u64, k: u64) -> Result<BinomialIdentity> {
    if n == 0 || k > n {
        return Err(IldError::Range(format!("need 0 <= k <= n, n >= 1; got n = {n}, k = {k}")));
    }
    let nn = BigInt::from(n);
    let lhs = (0..=k).fold(BigInt::from(0), |acc, i| acc + BigInt::from(binomial(n, i)) * (&nn - 2 * i as i64));
    let rhs = BigInt::from(binomial(n, k + 1)) * (k + 1);
    let alt = BigInt::from(binomial(n, k)) * (n - k);
    Ok(BinomialIdentity { lhs_times2: lhs, rhs_times2: rhs, alt_times2: alt })
}

/// Sandwich on `C(n, k)` for `0 < k < n`.
pub fn binomial_bounds<T: Real>(n: u64, k: u64) -> Result<BoundPair<T>> {
    if k == 0 || k >= n {
        return Err(IldError::Range(format!("need 0 < k < n; got n = {n}, k = {k}")));
    }
    let p = k as f64 / n as f64;
    let nf = n as f64;
    let log2_top = nf * binary_entropy(p);
    let var = nf * p * (1.0 - p);
    let lower = log2_top - 0.5 * (8.0 * var).log2();
    let upper = log2_top - 0.5 * (2.0 * std::f64::consts::PI * var).log2();
    Ok(BoundPair::new(lit::<T>(lower).exp2(), lit::<T>(upper).exp2()))
}

/// Sandwich on `sum_{i<=k} C(n, i)` for `0 <= k/n < 1/2`.
pub fn binomial_sum_bounds<T: Real>(n: u64, k: u64) -> Result<BoundPair<T>> {
    if n == 0 || 2 * k >= n {
        return Err(IldError::Range(format!("need 0 <= k < n/2; got n = {n}, k = {k}")));
    }
    let p = k as f64 / n as f64;
    let inv = 1.0 / n as f64;
    let alpha = (1.0 - p + inv) / (1.0 - 2.0 * p + inv);
    let beta = (1.0 - 2.0 * p).powi(2) / ((1.0 - 2.0 * p).powi(2) + inv);
    let log2_c = log2_binomial(n, k);
    let upper = alpha.log2() + log2_c;
    let lower = beta.log2() + upper;
    Ok(BoundPair::new(lit::<T>(lower).exp2(), lit::<T>(upper).exp2()))
}

/// Exact `sum_{i<=k} C(n, i)`.
pub fn binomial_prefix_sum(n: u64, k: u64) -> BigUint {
    (0..=k.min(n)).map(|i| binomial(n, i)).sum()
}

/// Sandwich on the multinomial coefficient of a type with all counts positive.
pub fn multinomial_bounds_counts<T: Real>(counts: &[u32]) -> Result<BoundPair<T>> {
    if counts.len() < 2 || counts.contains(&0) {
        return Err(IldError::Range(format!("type {counts:?} needs at least two letters, all counts positive")));
    }
    let n: u64 = counts.iter().map(|&c| c as u64).sum();
    let nf = n as f64;
    let ps: Vec<f64> = counts.iter().map(|&c| c as f64 / nf).collect();
    let h: f64 = -ps.iter().map(|p| p * p.log2()).sum::<f64>();
    let log2_prod: f64 = ps.iter().map(|p| p.log2()).sum();
    let m = (counts.len() - 1) as f64;
    let lower = nf * h - 0.5 * (m * (8.0 * nf).log2() + log2_prod);
    let upper = nf * h - 0.5 * (m * (2.0 * std::f64::consts::PI * nf).log2() + log2_prod);
    Ok(BoundPair::new(lit::<T>(lower).exp2(), lit::<T>(upper).exp2()))
}

/// Multinomial sandwich for an n-type given as a pmf; every `n p_i` must be a
/// positive integer.
pub fn multinomial_bounds<T: Real>(p: &Pmf<T>, n: u32) -> Result<BoundPair<T>> {
    let counts = integral_counts(p, n)?;
    multinomial_bounds_counts(&counts)
}

fn integral_counts<T: Real>(p: &Pmf<T>, n: u32) -> Result<Vec<u32>> {
    p.probs()
        .iter()
        .map(|&pi| {
            let x = pi.to_f64().unwrap() * n as f64;
            let r = x.round();
            if (x - r).abs() > 1e-9 * (n as f64).max(1.0) || r < 1.0 {
                Err(IldError::Range(format!("n p_i = {x} is not a positive integer")))
            } else {
                Ok(r as u32)
            }
        })
        .collect()
}

/// log2 of the exact multinomial coefficient (for comparison with the sandwich).
pub fn log2_multinomial_exact(counts: &[u32]) -> f64 {
    log2_multinomial(counts)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateRegion<T> {
    /// `H(Q) - xi log2(xi/|A|)`.
    pub upper_limit: T,
    /// `H(Q) + xi log2(xi/|A|) - xi^2 / (2 ln 2)`.
    pub lower_limit: T,
    pub upper_ok: bool,
    pub lower_ok: bool,
    pub upper_slack: T,
    pub lower_slack: T,
}

/// Checks `r_info + h_rng` against the finite-xi rate limits.
pub fn rate_region_check<T: Real>(r_info: T, h_rng: T, q: &Pmf<T>, xi: T) -> Result<RateRegion<T>> {
    if !(xi >= T::zero() && xi <= lit(0.5)) {
        return Err(IldError::Domain(format!("xi = {xi} outside [0, 1/2]")));
    }
    let h = entropy(q);
    let a = T::from_usize(q.alphabet_size()).unwrap();
    let penalty = if xi == T::zero() { T::zero() } else { xi * (xi / a).log2() };
    let upper_limit = h - penalty;
    let lower_limit = h + penalty - xi * xi / (lit::<T>(2.0) * T::LN_2());
    let total = r_info + h_rng;
    let tol = T::tie_tolerance() * h.max(T::one());
    Ok(RateRegion {
        upper_limit,
        lower_limit,
        upper_ok: total <= upper_limit + tol,
        lower_ok: total >= lower_limit - tol,
        upper_slack: upper_limit - total,
        lower_slack: total - lower_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::divergence;

    fn pmf(v: &[f64]) -> Pmf<f64> {
        Pmf::new(v.to_vec()).unwrap()
    }

    #[test]
    fn entropy_diff_examples() {
        let p = pmf(&[0.3, 0.7]);
        let b = entropy_diff_bounds(&p, &p).unwrap();
        assert_eq!((b.continuity, b.refined), (Some(0.0), Some(0.0)));
        let b = entropy_diff_bounds(&pmf(&[0.5, 0.5]), &pmf(&[0.45, 0.55])).unwrap();
        assert!((b.continuity.unwrap() - 0.432193).abs() < 1e-6);
        let b = entropy_diff_bounds(&pmf(&[0.9, 0.1]), &pmf(&[0.5, 0.5])).unwrap();
        assert!(b.refined.is_none());
    }

    /// Writes H(P) - H(Q) as -D(P||Q) + sum_i delta_i log2 Q(i) with
    /// Q = P + delta, then bounds the positive and negative increments
    /// separately. Returns (decomposition, bound).
    fn decomposition_oracle(p: &[f64], q: &[f64]) -> (f64, f64) {
        let d1: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
        let p_min = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let p_max = p.iter().cloned().fold(0.0, f64::max);
        let kl = divergence(&pmf(p), &pmf(q)).unwrap();
        let mut exact = -kl;
        let (mut pos, mut neg) = (0.0, 0.0);
        for (a, b) in p.iter().zip(q) {
            let delta = b - a;
            exact += delta * b.log2();
            if delta > 0.0 {
                pos += delta * (p_max + d1 / 2.0).log2();
            } else if delta < 0.0 {
                neg += delta * (p_min - d1 / 2.0).log2();
            }
        }
        (exact, pos + neg)
    }

    #[test]
    fn refined_bound_agrees_with_decomposition() {
        let cases = [
            (vec![0.5, 0.3, 0.2], vec![0.45, 0.35, 0.2]),
            (vec![0.25, 0.25, 0.5], vec![0.3, 0.2, 0.5]),
            (vec![0.4, 0.6], vec![0.5, 0.5]),
        ];
        for (p, q) in cases {
            let b = entropy_diff_bounds(&pmf(&p), &pmf(&q)).unwrap();
            let (exact, oracle) = decomposition_oracle(&p, &q);
            let diff = entropy(&pmf(&p)) - entropy(&pmf(&q));
            assert!((exact - diff).abs() < 1e-12);
            assert!((b.refined.unwrap() - oracle).abs() < 1e-12);
            assert!(diff <= oracle + 1e-12);
        }
    }

    #[test]
    fn pinsker_examples() {
        let p = pmf(&[0.5, 0.5]);
        let b = pinsker_bounds(&p, &p).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        let q = pmf(&[0.8, 0.2]);
        let b = pinsker_bounds(&p, &q).unwrap();
        assert!((b.lower - 0.36 / (2.0 * std::f64::consts::LN_2)).abs() < 1e-12);
        assert!((b.upper - 0.36 / (0.2 * std::f64::consts::LN_2)).abs() < 1e-12);
        assert!(b.contains(divergence(&p, &q).unwrap(), 0.0));
        let b = pinsker_bounds(&pmf(&[1.0, 0.0]), &pmf(&[0.0, 1.0])).unwrap();
        assert_eq!(b.upper, f64::INFINITY);
    }

    #[test]
    fn hoeffding_examples() {
        assert_eq!(hoeffding_tail(5, 0.0).unwrap(), 1.0);
        assert!((hoeffding_tail(10, 0.11).unwrap() - (-0.242f64).exp()).abs() < 1e-12);
        assert!(hoeffding_tail(10, -0.1).is_err());
        let grid: Vec<f64> = (1..50).map(|n| hoeffding_tail(n, 0.2).unwrap()).collect();
        assert!(grid.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn typical_bounds_edges() {
        let b = typical_set_bounds(&pmf(&[0.5, 0.5]), 8, 0.0).unwrap();
        assert_eq!(b.string_prob.lower, 2f64.powi(-8));
        assert_eq!(b.string_prob.upper, 2f64.powi(-8));
        let b = typical_set_bounds(&pmf(&[0.11, 0.89]), 4, 0.1).unwrap();
        assert!(b.delta >= 1.0 && b.prob.lower <= 0.0);
    }

    #[test]
    fn binomial_toolbox_examples() {
        let id = binomial_identity(4, 2).unwrap();
        assert!(id.holds());
        assert_eq!(id.lhs_times2, BigInt::from(12));
        let b = binomial_bounds::<f64>(4, 2).unwrap();
        assert!((b.lower - 16.0 / 8f64.sqrt()).abs() < 1e-12);
        assert!((b.upper - 16.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert!(b.contains(6.0, 0.0));
        let b = binomial_sum_bounds::<f64>(10, 0).unwrap();
        assert!(b.contains(1.0, 0.0));
        assert!(binomial_bounds::<f64>(4, 0).is_err());
        assert!(binomial_sum_bounds::<f64>(4, 2).is_err());
    }

    #[test]
    fn multinomial_examples() {
        let b = multinomial_bounds(&pmf(&[0.6, 0.2, 0.2]), 5).unwrap();
        assert!(b.contains(20.0, 0.0));
        let third = 1.0 / 3.0;
        let b = multinomial_bounds(&pmf(&[third, third, third]), 3).unwrap();
        assert!(b.contains(6.0, 0.0));
        let two = multinomial_bounds_counts::<f64>(&[3, 5]).unwrap();
        let one = binomial_bounds::<f64>(8, 3).unwrap();
        assert!((two.lower - one.lower).abs() < 1e-9 && (two.upper - one.upper).abs() < 1e-9);
        assert!(multinomial_bounds(&pmf(&[0.11, 0.89]), 10).is_err());
    }

    #[test]
    fn rate_region_examples() {
        let q = pmf(&[0.11, 0.89]);
        let h = entropy(&q);
        let r = rate_region_check(h, 0.0, &q, 0.0).unwrap();
        assert!(r.upper_ok && r.lower_ok);
        assert!(r.upper_slack.abs() < 1e-15 && r.lower_slack.abs() < 1e-15);
        let r = rate_region_check(0.4, 0.2, &q, 0.01).unwrap();
        assert!(r.lower_ok);
        let r = rate_region_check(h + 0.1, 0.0, &q, 0.0).unwrap();
        assert!(!r.upper_ok);
    }
}
