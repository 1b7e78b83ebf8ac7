use num_traits::ToPrimitive;
use serde::Serialize;

use crate::codebook::Codebook;
use crate::error::{IldError, Result};
use crate::info::SymbolString;
use crate::partition::{Algo, Partition};
use crate::resolution::{rates, RcMode, ResolutionCode};
use crate::scalar::{CompensatedSum, Real};

/// Message selection followed by a per-message generator.
#[derive(Clone, Debug)]
pub struct IldEncoder<T> {
    part: Partition<T>,
    rcs: Vec<ResolutionCode<T>>,
    mode: RcMode,
    bits: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergenceReport<T> {
    /// `D(P_{A^n} || Q^n)` summed string by string.
    pub total: T,
    pub selection_term: T,
    /// `(1/K) sum_w D(P(.|w) || Q(.|S_w))`
    pub rng_term: T,
    pub r_info: T,
    pub h_rng: T,
    pub r_rng: Option<T>,
}

impl<T: Real> DivergenceReport<T> {
    pub fn decomposed(&self) -> T {
        self.selection_term + self.rng_term
    }

    pub fn consistent(&self, tol: T) -> bool {
        (self.total - self.decomposed()).abs() <= tol * self.total.abs().max(T::one())
    }
}

/// Smallest `B` with `2^B >= size`.
pub fn bits_for(size: u64) -> u32 {
    if size <= 1 {
        0
    } else {
        64 - (size - 1).leading_zeros()
    }
}

impl<T: Real> IldEncoder<T> {
    /// Builds the partition and one generator per message. Without `bits`
    /// the M-type budget is the smallest one that fits the largest set.
    pub fn assemble(book: &Codebook<T>, k: usize, algo: Algo, mode: RcMode, bits: Option<u32>) -> Result<Self> {
        Self::from_partition(Partition::with_algo(book, k, algo)?, mode, bits)
    }

    pub fn from_partition(part: Partition<T>, mode: RcMode, bits: Option<u32>) -> Result<Self> {
        if part.book().is_none() {
            return Err(IldError::BadSpec("encoders need a codebook".into()));
        }
        let largest = part.set_sizes().iter().max().and_then(|s| s.to_u64()).unwrap_or(0);
        let bits = bits.unwrap_or_else(|| bits_for(largest));
        let rcs = (0..part.k() as u32)
            .map(|w| ResolutionCode::build(&part, w, mode, bits))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { part, rcs, mode, bits })
    }

    pub fn partition(&self) -> &Partition<T> {
        &self.part
    }

    pub fn generators(&self) -> &[ResolutionCode<T>] {
        &self.rcs
    }

    pub fn mode(&self) -> RcMode {
        self.mode
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn k(&self) -> usize {
        self.part.k()
    }

    /// Number of distinct seeds for message `w`: `2^B` for M-type
    /// generators, `|S_w|` for the ideal one, whose seed simply picks a member.
    pub fn seed_count(&self, w: u32) -> u64 {
        match self.mode {
            RcMode::MType => 1u64 << self.bits,
            RcMode::Ideal => self.rcs[w as usize].ranks().len() as u64,
        }
    }

    pub fn encode_rank(&self, w: u32, seed: u64) -> Result<u64> {
        let rc = self
            .rcs
            .get(w as usize)
            .ok_or_else(|| IldError::Range(format!("message {w} outside 0..{}", self.k())))?;
        match self.mode {
            RcMode::MType => rc.sample_rank(seed),
            RcMode::Ideal => rc
                .ranks()
                .get(seed as usize)
                .copied()
                .ok_or_else(|| IldError::Range(format!("seed {seed} exceeds |S_w| = {}", rc.ranks().len()))),
        }
    }

    pub fn encode(&self, w: u32, seed: u64) -> Result<SymbolString> {
        let rank = self.encode_rank(w, seed)?;
        self.part.book().unwrap().unrank(&rank.into())
    }

    pub fn decode(&self, a: &SymbolString) -> Result<u32> {
        self.part.decode(a)
    }

    /// Exact divergence of the encoder output, string by string, next to
    /// the selection and generator terms.
    pub fn full_divergence(&self) -> Result<DivergenceReport<T>> {
        let k = T::from_usize(self.k()).unwrap();
        let mut direct = CompensatedSum::new();
        for rc in &self.rcs {
            for (&rank, p) in rc.ranks().iter().zip(rc.law()) {
                if p > T::zero() {
                    let joint = p / k;
                    direct.add(joint * (joint / self.part.string_prob(rank)?).log2());
                }
            }
        }
        let rng_term = self.rcs.iter().map(|rc| rc.divergence()).collect::<CompensatedSum<T>>().value() / k;
        let n = self.part.book().unwrap().n();
        let r = rates(&self.rcs, n)?;
        Ok(DivergenceReport {
            total: direct.value(),
            selection_term: self.part.selection_divergence(),
            rng_term,
            r_info: k.log2() / T::from_u32(n).unwrap(),
            h_rng: r.h_rng,
            r_rng: match self.mode {
                RcMode::MType => r.r_rng,
                RcMode::Ideal => None,
            },
        })
    }
}
