//! Per-message random number generators: the ideal conditional law and
//! fixed-to-fixed M-type resolution codes driven by `B` uniform bits.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{IldError, Result};
use crate::info::SymbolString;
use crate::partition::Partition;
use crate::scalar::{lit, CompensatedSum, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RcMode {
    Ideal,
    MType,
}

#[derive(Clone, Debug)]
pub struct ResolutionCode<T> {
    w: u32,
    bits: Option<u32>,
    ranks: Vec<u64>,
    target: Vec<T>,
    mult: Option<Vec<u64>>,
    /// Running totals of `mult`, for seed lookup.
    cum: Vec<u64>,
}

fn conditional<T: Real>(part: &Partition<T>, w: u32) -> Result<(Vec<u64>, Vec<T>)> {
    let ranks = part.members(w)?;
    if ranks.is_empty() {
        return Err(IldError::EmptySet(w as usize));
    }
    let probs: Vec<T> = ranks.iter().map(|&r| part.string_prob(r)).collect::<Result<_>>()?;
    let total = probs.iter().copied().collect::<CompensatedSum<T>>().value();
    Ok((ranks, probs.into_iter().map(|p| p / total).collect()))
}

/// Largest-remainder rounding of `M t` (ties to the lower index).
fn largest_remainder<T: Real>(t: &[T], m: u64) -> Vec<u64> {
    let mf = m as f64;
    let scaled: Vec<f64> = t.iter().map(|x| x.to_f64().unwrap() * mf).collect();
    let mut out: Vec<u64> = scaled.iter().map(|x| x.floor() as u64).collect();
    let used: u64 = out.iter().sum();
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (scaled[a] - scaled[a].floor(), scaled[b] - scaled[b].floor());
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(m.saturating_sub(used) as usize) {
        out[i] += 1;
    }
    out
}

/// `f(m) = m log2(m / (M t))`, with `f(0) = 0`.
fn cost<T: Real>(m: u64, mt: T) -> T {
    if m == 0 {
        return T::zero();
    }
    let mf = T::from_u64(m).unwrap();
    mf * (mf / mt).log2()
}

/// Heap entry ordered by `key`, then index; `ver` detects stale entries.
struct Marginal {
    key: f64,
    i: usize,
    ver: u64,
}

impl PartialEq for Marginal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Marginal {}
impl PartialOrd for Marginal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Marginal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key).then(other.i.cmp(&self.i))
    }
}

/// Minimizes `sum_i f_i(m_i)` subject to `sum m_i = M` by unit exchanges.
/// The objective is separable and convex, so a state without an improving
/// exchange is optimal. Marginal costs live in two lazily updated heaps.
fn mtype<T: Real>(t: &[T], m: u64) -> Vec<u64> {
    let mut mult = largest_remainder(t, m);
    let mt: Vec<T> = t.iter().map(|&x| x * T::from_u64(m).unwrap()).collect();
    let tol = (T::tie_tolerance() * T::from_u64(m).unwrap().max(T::one())).to_f64().unwrap();
    let saving = |i: usize, c: u64| (cost(c, mt[i]) - cost(c - 1, mt[i])).to_f64().unwrap();
    let extra = |i: usize, c: u64| (cost(c + 1, mt[i]) - cost(c, mt[i])).to_f64().unwrap();
    let mut ver = vec![0u64; t.len()];
    // max-heap on saving, max-heap on -extra
    let mut drops: BinaryHeap<Marginal> = BinaryHeap::new();
    let mut adds: BinaryHeap<Marginal> = BinaryHeap::new();
    for i in 0..t.len() {
        if mult[i] > 0 {
            drops.push(Marginal { key: saving(i, mult[i]), i, ver: 0 });
        }
        adds.push(Marginal { key: -extra(i, mult[i]), i, ver: 0 });
    }
    fn top(h: &mut BinaryHeap<Marginal>, ver: &[u64]) -> Option<(usize, f64)> {
        while let Some(e) = h.peek() {
            if e.ver == ver[e.i] {
                return Some((e.i, e.key));
            }
            h.pop();
        }
        None
    }
    loop {
        let (Some((i, s)), Some((j, neg_e))) = (top(&mut drops, &ver), top(&mut adds, &ver)) else {
            return mult;
        };
        if i == j || -neg_e - s >= -tol {
            return mult;
        }
        mult[i] -= 1;
        mult[j] += 1;
        for k in [i, j] {
            ver[k] += 1;
            if mult[k] > 0 {
                drops.push(Marginal { key: saving(k, mult[k]), i: k, ver: ver[k] });
            }
            adds.push(Marginal { key: -extra(k, mult[k]), i: k, ver: ver[k] });
        }
    }
}

impl<T: Real> ResolutionCode<T> {
    /// `P(a|w) = Q(a) / q_w` on `S_w`.
    pub fn build_ideal(part: &Partition<T>, w: u32) -> Result<Self> {
        let (ranks, target) = conditional(part, w)?;
        Ok(Self { w, bits: None, ranks, target, mult: None, cum: Vec::new() })
    }

    /// Divergence-optimal M-type approximation of the conditional law with `M = 2^B`.
    pub fn build_mtype(part: &Partition<T>, w: u32, bits: u32) -> Result<Self> {
        if bits > 62 {
            return Err(IldError::Range(format!("B = {bits} exceeds 62")));
        }
        let (ranks, target) = conditional(part, w)?;
        let m = 1u64 << bits;
        if ranks.len() as u64 > m {
            return Err(IldError::BudgetTooSmall { set_size: ranks.len() as u64, bits });
        }
        let mult = mtype(&target, m);
        let cum = mult
            .iter()
            .scan(0u64, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect();
        Ok(Self { w, bits: Some(bits), ranks, target, mult: Some(mult), cum })
    }

    pub fn build(part: &Partition<T>, w: u32, mode: RcMode, bits: u32) -> Result<Self> {
        match mode {
            RcMode::Ideal => Self::build_ideal(part, w),
            RcMode::MType => Self::build_mtype(part, w, bits),
        }
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn mode(&self) -> RcMode {
        if self.mult.is_some() {
            RcMode::MType
        } else {
            RcMode::Ideal
        }
    }

    pub fn bits(&self) -> Option<u32> {
        self.bits
    }

    /// Ranks of `S_w`, ascending.
    pub fn ranks(&self) -> &[u64] {
        &self.ranks
    }

    /// `Q(a | S_w)` aligned with [`ranks`](Self::ranks).
    pub fn target(&self) -> &[T] {
        &self.target
    }

    pub fn multiplicities(&self) -> Option<&[u64]> {
        self.mult.as_deref()
    }

    /// `P(a | w)` aligned with [`ranks`](Self::ranks).
    pub fn law(&self) -> Vec<T> {
        match (&self.mult, self.bits) {
            (Some(m), Some(b)) => {
                let total = T::from_u64(1u64 << b).unwrap();
                m.iter().map(|&x| T::from_u64(x).unwrap() / total).collect()
            }
            _ => self.target.clone(),
        }
    }

    /// `D(P(.|w) || Q(.|S_w))`.
    pub fn divergence(&self) -> T {
        if self.mult.is_none() {
            return T::zero();
        }
        let mut acc = CompensatedSum::new();
        for (p, t) in self.law().into_iter().zip(&self.target) {
            if p > T::zero() {
                acc.add(p * (p / *t).log2());
            }
        }
        acc.value().max(T::zero())
    }

    pub fn entropy(&self) -> T {
        let mut acc = CompensatedSum::new();
        for p in self.law() {
            if p > T::zero() {
                acc.add(-p * p.log2());
            }
        }
        acc.value()
    }

    /// Rank of the string selected by a `B`-bit seed: seeds are laid out in
    /// contiguous blocks following the canonical string order.
    pub fn sample_rank(&self, seed: u64) -> Result<u64> {
        let (Some(_), Some(b)) = (&self.mult, self.bits) else {
            return Err(IldError::Range("only M-type codes map seeds to strings".into()));
        };
        if seed >= 1u64 << b {
            return Err(IldError::Range(format!("seed {seed} is not a {b}-bit value")));
        }
        // first member whose running total exceeds the seed
        let i = self.cum.partition_point(|&c| c <= seed);
        Ok(self.ranks[i])
    }

    pub fn sample(&self, part: &Partition<T>, seed: u64) -> Result<SymbolString> {
        let rank = self.sample_rank(seed)?;
        let book = part.book().ok_or(IldError::NotInCodebook)?;
        book.unrank(&BigUint::from(rank))
    }
}

/// Both forms of `log2(1 + |S_w| / (2 q_min M^2))` and its linearization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RcBound<T> {
    pub log_form: T,
    pub linear_form: T,
    /// `q_min` over the support of `P(.|w)`.
    pub q_min: T,
    /// The same bound with `q_min` taken over all of `S_w`.
    pub log_form_set_min: T,
}

pub fn rc_bound<T: Real>(rc: &ResolutionCode<T>, bits: u32) -> Result<RcBound<T>> {
    let size = rc.ranks.len() as u64;
    if size > 1u64 << bits.min(63) {
        return Err(IldError::BudgetTooSmall { set_size: size, bits });
    }
    let law = rc.law();
    let q_min = rc
        .target
        .iter()
        .zip(&law)
        .filter(|(_, p)| **p > T::zero())
        .map(|(t, _)| *t)
        .fold(T::infinity(), T::min);
    let set_min = rc.target.iter().copied().fold(T::infinity(), T::min);
    let m2 = lit::<T>(2.0).powi(2 * bits as i32);
    let s = T::from_u64(size).unwrap();
    let x = |qm: T| s / (lit::<T>(2.0) * qm * m2);
    Ok(RcBound {
        log_form: (T::one() + x(q_min)).log2(),
        linear_form: x(q_min) / T::LN_2(),
        q_min,
        log_form_set_min: (T::one() + x(set_min)).log2(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RngRates<T> {
    pub h_rng: T,
    /// `B / n`; absent for ideal generators.
    pub r_rng: Option<T>,
}

/// `h_rng = (1/n) (1/K) sum_w H(P(.|w))` and `r_rng = B / n`.
pub fn rates<T: Real>(rcs: &[ResolutionCode<T>], n: u32) -> Result<RngRates<T>> {
    if rcs.is_empty() || n == 0 {
        return Err(IldError::Range("need at least one generator and n >= 1".into()));
    }
    let nf = T::from_u32(n).unwrap();
    let k = T::from_usize(rcs.len()).unwrap();
    let h = rcs.iter().map(|rc| rc.entropy()).collect::<CompensatedSum<T>>().value() / (k * nf);
    let r_rng = rcs.iter().map(|rc| rc.bits).max().flatten().map(|b| T::from_u32(b).unwrap() / nf);
    if let Some(r) = r_rng {
        debug_assert!(h <= r + T::tie_tolerance());
    }
    Ok(RngRates { h_rng: h, r_rng })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Algo;

    fn single_set(weights: &[f64]) -> Partition<f64> {
        Partition::from_weights(weights, 1, Algo::Mlf).unwrap()
    }

    #[test]
    fn ideal_is_exact_conditional() {
        let p = single_set(&[0.3, 0.1]);
        let rc = ResolutionCode::build_ideal(&p, 0).unwrap();
        assert!((rc.target()[0] - 0.75).abs() < 1e-15);
        assert_eq!(rc.divergence(), 0.0);
        assert!(rc.sample_rank(0).is_err());
    }

    #[test]
    fn mtype_examples() {
        let p = single_set(&[0.75, 0.25]);
        let rc = ResolutionCode::build_mtype(&p, 0, 1).unwrap();
        assert_eq!(rc.multiplicities().unwrap(), &[1, 1]);
        let expected = 0.5 * (0.5f64 / 0.75).log2() + 0.5 * (0.5f64 / 0.25).log2();
        assert!((rc.divergence() - expected).abs() < 1e-12);
        assert!((rc.divergence() - 0.207519).abs() < 1e-6);
        let rc = ResolutionCode::build_mtype(&p, 0, 2).unwrap();
        assert_eq!(rc.multiplicities().unwrap(), &[3, 1]);
        assert!(rc.divergence().abs() < 1e-15);
        let p = single_set(&[0.2; 4]);
        let rc = ResolutionCode::build_mtype(&p, 0, 3).unwrap();
        assert_eq!(rc.multiplicities().unwrap(), &[2, 2, 2, 2]);
        assert!(matches!(ResolutionCode::build_mtype(&p, 0, 1), Err(IldError::BudgetTooSmall { .. })));
    }

    #[test]
    fn seeds_fill_blocks_in_order() {
        let p = single_set(&[0.5, 0.5]);
        let rc = ResolutionCode::build_mtype(&p, 0, 2).unwrap();
        let picks: Vec<u64> = (0..4).map(|z| rc.sample_rank(z).unwrap()).collect();
        assert_eq!(picks, vec![0, 0, 1, 1]);
        assert!(rc.sample_rank(4).is_err());
    }

    #[test]
    fn entropy_rate_below_bit_rate() {
        let p = Partition::from_weights(&[0.4, 0.3, 0.2, 0.1], 2, Algo::Mlf).unwrap();
        let rcs: Vec<_> = (0..2).map(|w| ResolutionCode::build_mtype(&p, w, 3).unwrap()).collect();
        let r = rates(&rcs, 2).unwrap();
        assert!(r.h_rng <= r.r_rng.unwrap());
        let b = rc_bound(&rcs[0], 3).unwrap();
        assert!(rcs[0].divergence() <= b.log_form);
        assert!(b.log_form <= b.linear_form);
    }
}
