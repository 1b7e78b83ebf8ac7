use crate::error::{IldError, Result};
use crate::scalar::{xlog2x, Real};

use super::{Pmf, SymbolString};

/// Entropy `H(P)` in bits.
pub fn entropy<T: Real>(p: &Pmf<T>) -> T {
    -p.probs().iter().map(|&x| xlog2x(x)).sum::<T>()
}

fn check_support<T: Real>(p: &Pmf<T>, q: &Pmf<T>) -> Result<()> {
    for (i, &pi) in p.probs().iter().enumerate() {
        if pi > T::zero() && q.get(i) <= T::zero() {
            return Err(IldError::SupportViolation { letter: i, p: pi.to_f64().unwrap() });
        }
    }
    Ok(())
}

/// Cross entropy `X(P||Q) = -sum_{supp P} p_i log2 q_i`.
///
/// The pmfs may have different lengths; missing letters carry zero mass.
pub fn cross_entropy<T: Real>(p: &Pmf<T>, q: &Pmf<T>) -> Result<T> {
    check_support(p, q)?;
    Ok(p.probs()
        .iter()
        .enumerate()
        .filter(|(_, &pi)| pi > T::zero())
        .map(|(i, &pi)| -pi * q.get(i).log2())
        .sum())
}

/// I-divergence `D(P||Q)` in bits.
pub fn divergence<T: Real>(p: &Pmf<T>, q: &Pmf<T>) -> Result<T> {
    check_support(p, q)?;
    let d: T = p
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, &pi)| pi > T::zero())
        .map(|(i, &pi)| pi * (pi / q.get(i)).log2())
        .sum();
    // rounding can leave a tiny negative value for p ~ q
    Ok(d.max(T::zero()))
}

/// Divergence between two unnormalized-safe weight slices of equal length.
///
/// Used where the first argument is a uniform pmf over K bins or an M-type;
/// returns `+inf` when `p_i > 0` meets `q_i = 0`.
pub fn divergence_slices<T: Real>(p: &[T], q: &[T]) -> T {
    let mut acc = crate::scalar::CompensatedSum::new();
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= T::zero() {
            continue;
        }
        if qi <= T::zero() {
            return T::infinity();
        }
        acc.add(pi * (pi / qi).log2());
    }
    acc.value()
}

/// `l1` distance; requires equal alphabet sizes.
pub fn l1_distance<T: Real>(p: &Pmf<T>, q: &Pmf<T>) -> Result<T> {
    if p.alphabet_size() != q.alphabet_size() {
        return Err(IldError::DimensionMismatch { left: p.alphabet_size(), right: q.alphabet_size() });
    }
    Ok(p.probs().iter().zip(q.probs()).map(|(&a, &b)| (a - b).abs()).sum())
}

/// `-log2 Q^n(a^n)`, evaluated as `sum_i n_i (-log2 q_i)` from the string's type.
pub fn string_self_information<T: Real>(a: &SymbolString, q: &Pmf<T>) -> Result<T> {
    let ty = a.type_of(q.alphabet_size())?;
    let mut acc = T::zero();
    for (i, &c) in ty.counts().iter().enumerate() {
        if c == 0 {
            continue;
        }
        let qi = q.get(i);
        if qi <= T::zero() {
            return Err(IldError::SupportViolation { letter: i, p: c as f64 / a.len() as f64 });
        }
        acc = acc - T::from_u32(c).unwrap() * qi.log2();
    }
    Ok(acc)
}

/// `log2 Q^n` of a string of the given type (`-inf` if outside the support).
pub fn type_log2_prob<T: Real>(counts: &[u32], q: &Pmf<T>) -> T {
    let mut acc = T::zero();
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let qi = q.get(i);
        if qi <= T::zero() {
            return T::neg_infinity();
        }
        acc = acc + T::from_u32(c).unwrap() * qi.log2();
    }
    acc
}
