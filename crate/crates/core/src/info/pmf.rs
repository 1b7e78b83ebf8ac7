use serde::{Deserialize, Serialize};

use crate::error::{IldError, Result};
use crate::scalar::Real;

/// A probability mass function over the alphabet `{0, .., len-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Pmf<T> {
    probs: Vec<T>,
}

impl<T: Real> Pmf<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(IldError::InvalidPmf(format!(
                "alphabet size {} is below 2",
                probs.len()
            )));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(**p >= T::zero()) || !p.is_finite()) {
            return Err(IldError::InvalidPmf(format!("entry {i} = {p} is not a probability")));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::sum_tolerance() {
            return Err(IldError::InvalidPmf(format!("entries sum to {total}")));
        }
        Ok(Self { probs })
    }

    /// Binary pmf `[p, 1 - p]`.
    pub fn binary(p: T) -> Result<Self> {
        Self::new(vec![p, T::one() - p])
    }

    /// Uniform pmf over `size` letters.
    pub fn uniform(size: usize) -> Result<Self> {
        let p = T::one() / T::from_usize(size).unwrap();
        Self::new(vec![p; size])
    }

    /// Empirical pmf of a count vector.
    pub fn from_counts(counts: &[u32]) -> Result<Self> {
        let n: u64 = counts.iter().map(|&c| c as u64).sum();
        if n == 0 {
            return Err(IldError::InvalidPmf("empty type".into()));
        }
        let nn = T::from_u64(n).unwrap();
        Self::new(counts.iter().map(|&c| T::from_u32(c).unwrap() / nn).collect())
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn get(&self, letter: usize) -> T {
        self.probs.get(letter).copied().unwrap_or_else(T::zero)
    }

    /// Letters with positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len()).filter(|&i| self.probs[i] > T::zero()).collect()
    }

    pub fn min_positive(&self) -> T {
        self.probs
            .iter()
            .copied()
            .filter(|&p| p > T::zero())
            .fold(T::infinity(), T::min)
    }

    /// Smallest entry over the whole alphabet (zero entries included).
    pub fn min(&self) -> T {
        self.probs.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.probs.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Index of the least likely letter in the support (first on ties).
    pub fn lightest_letter(&self) -> usize {
        let mut best = 0;
        let mut best_p = T::infinity();
        for (i, &p) in self.probs.iter().enumerate() {
            if p > T::zero() && p < best_p {
                best = i;
                best_p = p;
            }
        }
        best
    }

    pub fn cast<U: Real>(&self) -> Pmf<U> {
        Pmf { probs: self.probs.iter().map(|p| U::from_f64(p.to_f64().unwrap()).unwrap()).collect() }
    }
}

impl<T: Real> TryFrom<Vec<T>> for Pmf<T> {
    type Error = IldError;

    fn try_from(v: Vec<T>) -> Result<Self> {
        Self::new(v)
    }
}

impl<T: Real> From<Pmf<T>> for Vec<T> {
    fn from(p: Pmf<T>) -> Vec<T> {
        p.probs
    }
}
