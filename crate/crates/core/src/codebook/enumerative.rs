//! Lexicographic rank and unrank of strings within one type class.
//!
//! The number of arrangements of the remaining counts `r` is tracked through
//! the update `M(r - e_s) = M(r) r_s / |r|`, so each position costs O(|A|)
//! multiply/divide steps. A `u128` path is used whenever `M(counts) * n`
//! fits; unbounded integers otherwise.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::combin::{multinomial, multinomial_u128};

trait Count: Clone + Ord {
    fn zero() -> Self;
    fn mul_div(&self, num: u32, den: u32) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
}

impl Count for u128 {
    fn zero() -> Self {
        0
    }
    fn mul_div(&self, num: u32, den: u32) -> Self {
        self * num as u128 / den as u128
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl Count for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn mul_div(&self, num: u32, den: u32) -> Self {
        self * num / den
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

fn small_total(counts: &[u32]) -> Option<u128> {
    let n: u32 = counts.iter().sum();
    let m = multinomial_u128(counts)?;
    m.checked_mul(n.max(1) as u128)?;
    Some(m)
}

fn rank_generic<C: Count>(symbols: &[u8], counts: &[u32], total: C) -> C {
    let mut r = counts.to_vec();
    let mut m: u32 = r.iter().sum();
    let mut arrangements = total;
    let mut acc = C::zero();
    for &x in symbols {
        let x = x as usize;
        for &rs in r.iter().take(x) {
            if rs > 0 {
                acc = acc.add(&arrangements.mul_div(rs, m));
            }
        }
        arrangements = arrangements.mul_div(r[x], m);
        r[x] -= 1;
        m -= 1;
    }
    acc
}

fn unrank_generic<C: Count>(mut idx: C, counts: &[u32], total: C) -> Vec<u8> {
    let mut r = counts.to_vec();
    let mut m: u32 = r.iter().sum();
    let mut arrangements = total;
    let mut out = Vec::with_capacity(m as usize);
    while m > 0 {
        for s in 0..r.len() {
            if r[s] == 0 {
                continue;
            }
            let block = arrangements.mul_div(r[s], m);
            if idx < block {
                out.push(s as u8);
                arrangements = block;
                r[s] -= 1;
                m -= 1;
                break;
            }
            idx = idx.sub(&block);
        }
    }
    out
}

/// Position of `symbols` among all strings of type `counts` in lexicographic
/// order. The caller guarantees that `symbols` has type `counts`.
pub fn lex_rank(symbols: &[u8], counts: &[u32]) -> BigUint {
    match small_total(counts) {
        Some(total) => BigUint::from(rank_generic(symbols, counts, total)),
        None => rank_generic(symbols, counts, multinomial(counts)),
    }
}

/// Like [`lex_rank`] but stays in `u128` when the class is small enough.
pub fn lex_rank_u128(symbols: &[u8], counts: &[u32]) -> Option<u128> {
    small_total(counts).map(|total| rank_generic(symbols, counts, total))
}

/// Inverse of [`lex_rank`]; `idx` must be below the multinomial coefficient.
pub fn lex_unrank(idx: &BigUint, counts: &[u32]) -> Vec<u8> {
    match (small_total(counts), idx.to_u128()) {
        (Some(total), Some(i)) => unrank_generic(i, counts, total),
        _ => unrank_generic(idx.clone(), counts, multinomial(counts)),
    }
}

/// Smallest string of the given type in lexicographic order.
pub fn first_arrangement(counts: &[u32]) -> Vec<u8> {
    let mut out = Vec::with_capacity(counts.iter().sum::<u32>() as usize);
    for (s, &c) in counts.iter().enumerate() {
        out.extend(std::iter::repeat_n(s as u8, c as usize));
    }
    out
}

/// Advances to the next multiset permutation; false when `v` was the last.
pub fn next_arrangement(v: &mut [u8]) -> bool {
    let len = v.len();
    if len < 2 {
        return false;
    }
    let mut i = len - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = len - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Next larger integer with the same number of set bits (Gosper's hack).
pub fn next_same_weight(v: u64) -> u64 {
    if v == 0 {
        return 0;
    }
    let t = v | (v - 1);
    let tz = v.trailing_zeros();
    t.wrapping_add(1) | ((!t & t.wrapping_add(1)).wrapping_sub(1) >> (tz + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_matches_enumeration() {
        for counts in [vec![2u32, 2], vec![1, 2, 2], vec![3, 0, 1], vec![0, 4]] {
            let mut v = first_arrangement(&counts);
            let mut idx = 0u32;
            loop {
                assert_eq!(lex_rank(&v, &counts), BigUint::from(idx));
                assert_eq!(lex_unrank(&BigUint::from(idx), &counts), v);
                idx += 1;
                if !next_arrangement(&mut v) {
                    break;
                }
            }
            assert_eq!(BigUint::from(idx), multinomial(&counts));
        }
    }

    #[test]
    fn large_classes_use_unbounded_path() {
        let counts = [100u32, 100];
        assert!(lex_rank_u128(&first_arrangement(&counts), &counts).is_none());
        let mut last = first_arrangement(&counts);
        last.reverse();
        let r = lex_rank(&last, &counts);
        assert_eq!(r + 1u8, multinomial(&counts));
        let mid = multinomial(&counts) / 3u8;
        let s = lex_unrank(&mid, &counts);
        assert_eq!(lex_rank(&s, &counts), mid);
    }

    #[test]
    fn gosper_walks_a_weight_class() {
        let mut v = 0b0011u64;
        let mut seen = vec![v];
        for _ in 0..5 {
            v = next_same_weight(v);
            seen.push(v);
        }
        assert_eq!(seen, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
    }
}
