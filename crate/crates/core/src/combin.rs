//! Binomial and multinomial coefficients, exact and in the log domain.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Largest argument for which factorials are summed exactly; above it the
/// Stirling series is used.
pub const EXACT_FACTORIAL_LIMIT: u64 = 128;

/// Exact binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Exact multinomial coefficient `n! / prod counts_i!` with `n = sum counts`.
pub fn multinomial(counts: &[u32]) -> BigUint {
    let mut acc = BigUint::one();
    let mut total = 0u64;
    for &c in counts {
        total += c as u64;
        acc *= binomial(total, c as u64);
    }
    acc
}

/// Binomial coefficient in `u128`, `None` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        let num = acc.checked_mul((n - i) as u128)?;
        acc = num / (i as u128 + 1);
    }
    Some(acc)
}

/// Multinomial coefficient in `u128`, `None` on overflow.
pub fn multinomial_u128(counts: &[u32]) -> Option<u128> {
    let mut acc: u128 = 1;
    let mut total = 0u64;
    for &c in counts {
        total += c as u64;
        acc = acc.checked_mul(binomial_u128(total, c as u64)?)?;
    }
    Some(acc)
}

/// Natural log of `n!`. Exact summation up to [`EXACT_FACTORIAL_LIMIT`],
/// Stirling series beyond (absolute error far below 1e-12).
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= EXACT_FACTORIAL_LIMIT {
        return (2..=n).map(|i| (i as f64).ln()).sum();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv / 12.0 - inv * inv2 / 360.0 + inv * inv2 * inv2 / 1260.0
        - inv * inv2 * inv2 * inv2 / 1680.0;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// log2 of `C(n, k)`; `-inf` when `k > n`.
pub fn log2_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if n <= EXACT_FACTORIAL_LIMIT {
        return crate::scalar::log2_biguint(&binomial(n, k));
    }
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)) / std::f64::consts::LN_2
}

/// log2 of the multinomial coefficient.
pub fn log2_multinomial(counts: &[u32]) -> f64 {
    let n: u64 = counts.iter().map(|&c| c as u64).sum();
    if n <= EXACT_FACTORIAL_LIMIT {
        return crate::scalar::log2_biguint(&multinomial(counts));
    }
    let mut acc = ln_factorial(n);
    for &c in counts {
        acc -= ln_factorial(c as u64);
    }
    acc / std::f64::consts::LN_2
}

/// Binary entropy function `h(p)` in bits, zero outside `(0, 1)`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Converts a small unbounded integer to `u64` if it fits.
pub fn to_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}

/// Iterates over all compositions of `n` into `parts` non-negative parts in
/// lexicographically descending order of the count vector.
pub fn compositions(n: u32, parts: usize) -> Compositions {
    Compositions::new(n, parts)
}

pub struct Compositions {
    current: Option<Vec<u32>>,
}

impl Compositions {
    fn new(n: u32, parts: usize) -> Self {
        if parts == 0 {
            return Self { current: if n == 0 { Some(vec![]) } else { None } };
        }
        let mut first = vec![0; parts];
        first[0] = n;
        Self { current: Some(first) }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let len = next.len();
        // rightmost position (excluding the last) holding a positive count
        if len >= 2 {
            if let Some(i) = (0..len - 1).rev().find(|&i| next[i] > 0) {
                let tail: u32 = next[i + 1..].iter().sum();
                next[i] -= 1;
                for v in next[i + 1..].iter_mut() {
                    *v = 0;
                }
                next[i + 1] = tail + 1;
                self.current = Some(next);
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(4, 2), BigUint::from(6u8));
        assert_eq!(binomial(10, 0), BigUint::from(1u8));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial_u128(64, 32), Some(1_832_624_140_942_590_534));
        assert_eq!(binomial_u128(200, 100), None);
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(&[3, 1, 1]), BigUint::from(20u8));
        assert_eq!(multinomial(&[3, 2]), BigUint::from(10u8));
        assert_eq!(multinomial(&[1, 1, 1]), BigUint::from(6u8));
        assert_eq!(multinomial_u128(&[2, 2]), Some(6));
    }

    #[test]
    fn stirling_matches_exact_sum() {
        for n in [129u64, 200, 1000, 5000] {
            let exact: f64 = (2..=n).map(|i| (i as f64).ln()).sum();
            let rel = (ln_factorial(n) - exact).abs() / exact;
            assert!(rel < 1e-13, "n={n} rel={rel}");
        }
    }

    #[test]
    fn log2_binomial_large() {
        // symmetric and consistent with the recurrence C(n,k) = C(n,k-1)(n-k+1)/k
        let n = 10_000;
        let a = log2_binomial(n, 1100);
        let b = log2_binomial(n, 1099) + ((n - 1099) as f64 / 1100.0).log2();
        assert!((a - b).abs() < 1e-9);
        assert!((log2_binomial(n, 3) - log2_binomial(n, n - 3)).abs() < 1e-9);
    }

    #[test]
    fn compositions_enumerate_all() {
        let all: Vec<_> = compositions(3, 3).collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![3, 0, 0]);
        assert_eq!(all[9], vec![0, 0, 3]);
        let mut sorted = all.clone();
        sorted.sort_by(|a, b| b.cmp(a));
        assert_eq!(all, sorted);
        assert_eq!(compositions(5, 2).count(), 6);
    }
}
