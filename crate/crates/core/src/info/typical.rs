use crate::codebook::Codebook;
use crate::combin::compositions;
use crate::error::{IldError, Result};
use crate::scalar::Real;

use super::{Pmf, SymbolString};

/// Letter-wise relative typicality of a count vector: `|c_i - n p_i| <= eps n p_i`.
///
/// A relative slack of the tie tolerance absorbs rounding in `n p_i`, so that
/// exact types (e.g. `q = 0.11`, `n = 100`, `c = 11`) qualify at `eps = 0`.
pub fn is_typical_counts<T: Real>(counts: &[u32], q: &Pmf<T>, eps: T) -> bool {
    let n = T::from_u32(counts.iter().sum()).unwrap();
    (0..counts.len().max(q.alphabet_size())).all(|i| {
        let c = T::from_u32(counts.get(i).copied().unwrap_or(0)).unwrap();
        let target = n * q.get(i);
        let slack = T::tie_tolerance() * target.max(T::one());
        (c - target).abs() <= eps * target + slack
    })
}

pub fn is_typical<T: Real>(a: &SymbolString, q: &Pmf<T>, eps: T) -> Result<bool> {
    let ty = a.type_of(q.alphabet_size())?;
    Ok(is_typical_counts(ty.counts(), q, eps))
}

/// All n-types satisfying the typicality condition, in descending count order.
pub fn typical_types<T: Real>(q: &Pmf<T>, n: u32, eps: T) -> Result<Vec<Vec<u32>>> {
    if eps < T::zero() || !eps.is_finite() {
        return Err(IldError::Domain(format!("eps = {eps} must be a finite non-negative value")));
    }
    if n == 0 {
        return Err(IldError::Range("block length must be positive".into()));
    }
    Ok(compositions(n, q.alphabet_size()).filter(|c| is_typical_counts(c, q, eps)).collect())
}

/// The typical set as a parametric codebook.
pub fn enumerate_typical<T: Real>(q: &Pmf<T>, n: u32, eps: T) -> Result<Codebook<T>> {
    Codebook::typical_set(q, n, eps.to_f64().unwrap())
}
