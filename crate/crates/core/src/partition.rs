//! Greedy one-to-many partitions of a codebook into `K` message sets.
//!
//! Messages are numbered `0..K`. Strings are addressed by their canonical
//! rank (0 = most likely). MLF, LLF and manual partitions keep an explicit
//! rank-to-message table; the round-robin form of LLF is decoded from the
//! rank alone and therefore also works on books too large to materialize.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::codebook::{BookDoc, Codebook, EXPLICIT_CAP};
use crate::error::{IldError, Result};
use crate::info::SymbolString;
use crate::scalar::{lit, log2_biguint, CompensatedSum, Log2Sum, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    Mlf,
    Llf,
    #[serde(alias = "rr")]
    RoundRobin,
    Manual,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Mlf => "mlf",
            Algo::Llf => "llf",
            Algo::RoundRobin => "rr",
            Algo::Manual => "manual",
        })
    }
}

impl FromStr for Algo {
    type Err = IldError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mlf" => Ok(Algo::Mlf),
            "llf" => Ok(Algo::Llf),
            "rr" | "round_robin" | "rr-llf" => Ok(Algo::RoundRobin),
            "manual" => Ok(Algo::Manual),
            other => Err(IldError::Range(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Min-heap entry: accumulated probability, then a tie key.
struct Slot<T> {
    acc: T,
    tie: u64,
    w: u32,
}

impl<T: PartialOrd> PartialEq for Slot<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: PartialOrd> Eq for Slot<T> {}
impl<T: PartialOrd> PartialOrd for Slot<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: PartialOrd> Ord for Slot<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .acc
            .partial_cmp(&self.acc)
            .unwrap_or(Ordering::Equal)
            .then(other.tie.cmp(&self.tie))
    }
}

/// An improving single-string move.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Move {
    pub rank: u64,
    pub from: u32,
    pub to: u32,
    pub gain: f64,
}

#[derive(Clone, Debug)]
pub struct Partition<T> {
    algo: Algo,
    k: usize,
    book: Option<Codebook<T>>,
    size: BigUint,
    /// String probabilities by rank, when the book is explicit.
    probs: Option<Vec<T>>,
    assignment: Option<Vec<u32>>,
    set_probs: Vec<T>,
    set_sizes: Vec<BigUint>,
    delta_history: Vec<T>,
}

fn explicit_probs<T: Real>(book: &Codebook<T>) -> Result<Vec<T>> {
    match book.size_u64() {
        Some(s) if s <= EXPLICIT_CAP => Ok(book.member_iter().map(|(_, p)| p).collect()),
        _ => Err(IldError::SizeLimit { size: book.size().to_string(), cap: EXPLICIT_CAP }),
    }
}

fn check_k(k: usize, size: &BigUint) -> Result<()> {
    if k == 0 || BigUint::from(k) > *size {
        return Err(IldError::Range(format!("K = {k} must lie in 1..=|S| = {size}")));
    }
    Ok(())
}

fn sorted_weights<T: Real>(weights: &[T]) -> Result<Vec<T>> {
    if weights.iter().any(|w| !(*w >= T::zero()) || !w.is_finite()) {
        return Err(IldError::InvalidPmf("weights must be finite and non-negative".into()));
    }
    let mut v = weights.to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(v)
}

/// Greedy insertion into the least probable set. MLF walks ranks upward and
/// breaks ties by set index; LLF walks downward and breaks ties in favour of
/// the set updated least recently.
fn greedy<T: Real>(probs: &[T], k: usize, most_first: bool) -> (Vec<u32>, Vec<T>) {
    let len = probs.len();
    let mut assignment = vec![0u32; len];
    let mut heap: BinaryHeap<Slot<T>> = (0..k).map(|w| Slot { acc: T::zero(), tie: w as u64, w: w as u32 }).collect();
    let mut history = Vec::with_capacity(len + 1);
    history.push(T::zero());
    let mut max = T::zero();
    let mut stamp = k as u64;
    for step in 0..len {
        let rank = if most_first { step } else { len - 1 - step };
        let slot = heap.pop().expect("k >= 1");
        let acc = slot.acc + probs[rank];
        assignment[rank] = slot.w;
        let tie = if most_first { slot.w as u64 } else { stamp };
        stamp += 1;
        heap.push(Slot { acc, tie, w: slot.w });
        max = max.max(acc);
        history.push(max - heap.peek().unwrap().acc);
    }
    (assignment, history)
}

/// Replays an assignment in the given processing order and records the
/// spread between the heaviest and lightest set after every step.
fn replay_history<T: Real>(probs: &[T], assignment: &[u32], k: usize, most_first: bool) -> Vec<T> {
    let len = probs.len();
    let mut acc = vec![T::zero(); k];
    let mut version = vec![0u64; k];
    let mut heap: BinaryHeap<Slot<T>> = (0..k).map(|w| Slot { acc: T::zero(), tie: 0, w: w as u32 }).collect();
    let mut history = Vec::with_capacity(len + 1);
    history.push(T::zero());
    let mut max = T::zero();
    for step in 0..len {
        let rank = if most_first { step } else { len - 1 - step };
        let w = assignment[rank] as usize;
        acc[w] = acc[w] + probs[rank];
        version[w] += 1;
        heap.push(Slot { acc: acc[w], tie: version[w], w: w as u32 });
        max = max.max(acc[w]);
        while let Some(top) = heap.peek() {
            if version[top.w as usize] == top.tie {
                break;
            }
            heap.pop();
        }
        history.push(max - heap.peek().unwrap().acc);
    }
    history
}

fn exact_set_probs<T: Real>(probs: &[T], assignment: &[u32], k: usize) -> (Vec<T>, Vec<BigUint>) {
    let mut sums = vec![CompensatedSum::new(); k];
    let mut sizes = vec![0u64; k];
    for (p, &w) in probs.iter().zip(assignment) {
        sums[w as usize].add(*p);
        sizes[w as usize] += 1;
    }
    (sums.iter().map(|s| s.value()).collect(), sizes.into_iter().map(BigUint::from).collect())
}

/// `D(U_K || [q_1 .. q_K]) = -log2 K - (1/K) sum_w log2 q_w`; infinite if a set is empty.
pub fn uniform_divergence<T: Real>(set_probs: &[T]) -> T {
    if set_probs.iter().any(|&q| q <= T::zero()) {
        return T::infinity();
    }
    let k = T::from_usize(set_probs.len()).unwrap();
    let mut acc = CompensatedSum::new();
    let mut mass = CompensatedSum::new();
    for &q in set_probs {
        acc.add(q.log2());
        mass.add(q);
    }
    let d = -k.log2() - acc.value() / k;
    // non-negative by Jensen when the sets carry at most unit mass; drop the rounding residue
    if mass.value() <= T::one() + T::tie_tolerance() {
        d.max(T::zero())
    } else {
        d
    }
}

impl<T: Real> Partition<T> {
    fn from_table(algo: Algo, book: Option<Codebook<T>>, probs: Vec<T>, assignment: Vec<u32>, k: usize, history: Vec<T>) -> Self {
        let (set_probs, set_sizes) = exact_set_probs(&probs, &assignment, k);
        Self {
            algo,
            k,
            book,
            size: BigUint::from(probs.len()),
            probs: Some(probs),
            assignment: Some(assignment),
            set_probs,
            set_sizes,
            delta_history: history,
        }
    }

    fn build(algo: Algo, book: Option<Codebook<T>>, probs: Vec<T>, k: usize) -> Result<Self> {
        check_k(k, &BigUint::from(probs.len()))?;
        let (assignment, history) = match algo {
            Algo::Mlf => greedy(&probs, k, true),
            Algo::Llf => greedy(&probs, k, false),
            Algo::RoundRobin => {
                let len = probs.len();
                let a: Vec<u32> = (0..len).map(|r| ((len - 1 - r) % k) as u32).collect();
                let h = replay_history(&probs, &a, k, false);
                (a, h)
            }
            Algo::Manual => return Err(IldError::Range("manual partitions need an assignment".into())),
        };
        Ok(Self::from_table(algo, book, probs, assignment, k, history))
    }

    pub fn mlf(book: &Codebook<T>, k: usize) -> Result<Self> {
        Self::build(Algo::Mlf, Some(book.clone()), explicit_probs(book)?, k)
    }

    pub fn llf(book: &Codebook<T>, k: usize) -> Result<Self> {
        Self::build(Algo::Llf, Some(book.clone()), explicit_probs(book)?, k)
    }

    /// Round-robin LLF: the `i`-th least likely string (from 1) goes to
    /// message `(i - 1) mod K`. Explicit books also get a Δ history;
    /// larger books are handled per type class.
    pub fn round_robin(book: &Codebook<T>, k: usize) -> Result<Self> {
        check_k(k, book.size())?;
        if let Ok(probs) = explicit_probs(book) {
            return Self::build(Algo::RoundRobin, Some(book.clone()), probs, k);
        }
        let size = book.size().clone();
        let kb = BigUint::from(k);
        let mut sums = vec![Log2Sum::<T>::new(); k];
        let mut set_sizes = vec![BigUint::zero(); k];
        for class in book.classes() {
            let m = class.members();
            if m.is_zero() {
                continue;
            }
            // ranks o..o+m map to t = |S|-1-rank in [a, a+m)
            let a = &size - class.offset() - m;
            let start = (&a % &kb).to_usize().unwrap();
            let full = m / &kb;
            let rem = (m % &kb).to_usize().unwrap();
            let lp = class.log2_prob();
            for w in 0..k {
                let extra = ((w + k - start) % k) < rem;
                let count = if extra { &full + 1u32 } else { full.clone() };
                if !count.is_zero() {
                    sums[w].add_log2(lit::<T>(log2_biguint(&count)) + lp);
                    set_sizes[w] += &count;
                }
            }
        }
        Ok(Self {
            algo: Algo::RoundRobin,
            k,
            book: Some(book.clone()),
            size,
            probs: None,
            assignment: None,
            set_probs: sums.iter().map(|s| s.value()).collect(),
            set_sizes,
            delta_history: Vec::new(),
        })
    }

    pub fn with_algo(book: &Codebook<T>, k: usize, algo: Algo) -> Result<Self> {
        match algo {
            Algo::Mlf => Self::mlf(book, k),
            Algo::Llf => Self::llf(book, k),
            Algo::RoundRobin => Self::round_robin(book, k),
            Algo::Manual => Err(IldError::Range("manual partitions need an assignment".into())),
        }
    }

    /// Partition of a bare list of string probabilities (sorted internally
    /// into descending order; rank `i` is the `i`-th largest weight).
    pub fn from_weights(weights: &[T], k: usize, algo: Algo) -> Result<Self> {
        Self::build(algo, None, sorted_weights(weights)?, k)
    }

    /// A caller-supplied assignment, indexed by rank. Δ is replayed in
    /// descending-probability order.
    pub fn manual(book: &Codebook<T>, assignment: Vec<u32>, k: usize) -> Result<Self> {
        Self::manual_inner(Some(book.clone()), explicit_probs(book)?, assignment, k)
    }

    pub fn manual_weights(weights: &[T], assignment: Vec<u32>, k: usize) -> Result<Self> {
        Self::manual_inner(None, sorted_weights(weights)?, assignment, k)
    }

    fn manual_inner(book: Option<Codebook<T>>, probs: Vec<T>, assignment: Vec<u32>, k: usize) -> Result<Self> {
        check_k(k, &BigUint::from(probs.len()))?;
        if assignment.len() != probs.len() {
            return Err(IldError::DimensionMismatch { left: assignment.len(), right: probs.len() });
        }
        if let Some(&w) = assignment.iter().find(|&&w| w as usize >= k) {
            return Err(IldError::Range(format!("message {w} outside 0..{k}")));
        }
        let history = replay_history(&probs, &assignment, k, true);
        Ok(Self::from_table(Algo::Manual, book, probs, assignment, k, history))
    }

    pub fn algo(&self) -> Algo {
        self.algo
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn book(&self) -> Option<&Codebook<T>> {
        self.book.as_ref()
    }

    pub fn size(&self) -> &BigUint {
        &self.size
    }

    pub fn set_probs(&self) -> &[T] {
        &self.set_probs
    }

    pub fn set_sizes(&self) -> &[BigUint] {
        &self.set_sizes
    }

    pub fn probs(&self) -> Option<&[T]> {
        self.probs.as_deref()
    }

    pub fn assignment(&self) -> Option<&[u32]> {
        self.assignment.as_deref()
    }

    /// Δ_0 .. Δ_|S| in processing order (empty for parametric round-robin).
    pub fn delta_history(&self) -> &[T] {
        &self.delta_history
    }

    pub fn total_prob(&self) -> T {
        self.set_probs.iter().copied().collect::<CompensatedSum<T>>().value()
    }

    pub fn selection_divergence(&self) -> T {
        uniform_divergence(&self.set_probs)
    }

    /// Message of the string with the given canonical rank.
    pub fn decode_rank(&self, rank: &BigUint) -> Result<u32> {
        if *rank >= self.size {
            return Err(IldError::NotInCodebook);
        }
        match (&self.assignment, self.algo) {
            (Some(table), Algo::Mlf | Algo::Llf | Algo::Manual) => Ok(table[rank.to_usize().unwrap()]),
            _ => {
                let t = &self.size - 1u32 - rank;
                Ok((t % BigUint::from(self.k)).to_u32().unwrap())
            }
        }
    }

    pub fn decode(&self, a: &SymbolString) -> Result<u32> {
        let book = self.book.as_ref().ok_or(IldError::NotInCodebook)?;
        self.decode_rank(&book.rank(a)?)
    }

    /// Ranks of `S_w` in ascending order.
    pub fn members(&self, w: u32) -> Result<Vec<u64>> {
        if w as usize >= self.k {
            return Err(IldError::Range(format!("message {w} outside 0..{}", self.k)));
        }
        match &self.assignment {
            Some(table) => Ok((0..table.len() as u64).filter(|&r| table[r as usize] == w).collect()),
            None => {
                let size = self.size.to_u64().filter(|&s| s <= EXPLICIT_CAP).ok_or_else(|| IldError::SizeLimit {
                    size: self.size.to_string(),
                    cap: EXPLICIT_CAP,
                })?;
                let k = self.k as u64;
                // t = size-1-rank runs over w, w+K, ..
                let mut out: Vec<u64> = (w as u64..size).step_by(k as usize).map(|t| size - 1 - t).collect();
                out.reverse();
                Ok(out)
            }
        }
    }

    /// Probability of the string with the given rank.
    pub fn string_prob(&self, rank: u64) -> Result<T> {
        if let Some(p) = &self.probs {
            return p.get(rank as usize).copied().ok_or(IldError::NotInCodebook);
        }
        let book = self.book.as_ref().ok_or(IldError::NotInCodebook)?;
        book.string_prob(&book.unrank(&BigUint::from(rank))?)
    }

    fn explicit(&self) -> Result<(&[T], &[u32])> {
        match (&self.probs, &self.assignment) {
            (Some(p), Some(a)) => Ok((p, a)),
            _ => Err(IldError::SizeLimit { size: self.size.to_string(), cap: EXPLICIT_CAP }),
        }
    }

    /// Looks for a single-string move that strictly lowers the selection
    /// divergence. Moving `a` from `S_v` to `S_w` helps iff
    /// `q_v - q_w > Q(a)`, so only the lightest set and the lightest member
    /// of each other set need checking.
    pub fn pareto_check(&self) -> Result<(bool, Option<Move>)> {
        let (probs, assignment) = self.explicit()?;
        let k = self.k;
        if k == 1 {
            return Ok((true, None));
        }
        let mut lightest: Vec<Option<usize>> = vec![None; k];
        for (rank, &w) in assignment.iter().enumerate() {
            // ranks are in descending probability, so the last one seen is the lightest
            lightest[w as usize] = Some(rank);
        }
        let (to, q_min) = self
            .set_probs
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let tol = T::tie_tolerance() * self.total_prob().max(T::min_positive_value());
        let mut best: Option<Move> = None;
        for (v, &q_v) in self.set_probs.iter().enumerate() {
            let Some(rank) = lightest[v] else { continue };
            if v == to {
                continue;
            }
            let margin = q_v - q_min - probs[rank];
            if margin > tol {
                let p = probs[rank];
                let gain = ((q_v - p) * (q_min + p) / (q_v * q_min)).log2() / T::from_usize(k).unwrap();
                let gain = gain.to_f64().unwrap();
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(Move { rank: rank as u64, from: v as u32, to: to as u32, gain });
                }
            }
        }
        Ok((best.is_none(), best))
    }

    /// Spread bounds along the recorded history. MLF and manual partitions
    /// use `Δ_i <= p_1`. LLF and round-robin use `Δ_i <= p_{K-i+1}` with
    /// `p_{K+1} = 0` and `p_j = p_1` once the index drops below 1.
    pub fn delta_bounds_check(&self) -> bool {
        let Some(probs) = &self.probs else { return true };
        if probs.is_empty() {
            return true;
        }
        let p1 = probs[0];
        let slack = T::epsilon() * lit::<T>(8.0) * T::from_usize(probs.len().max(1)).unwrap();
        let k = self.k;
        self.delta_history.iter().enumerate().all(|(i, &d)| {
            let bound = match self.algo {
                Algo::Mlf | Algo::Manual => p1,
                Algo::Llf | Algo::RoundRobin => {
                    if i == 0 {
                        T::zero()
                    } else if i <= k {
                        probs.get(k - i).copied().unwrap_or(T::zero())
                    } else {
                        p1
                    }
                }
            };
            d >= T::zero() && d <= bound + slack
        })
    }

    /// `q_S/K - p_1 <= q_w <= q_S/K + p_1` for every message.
    pub fn set_prob_sandwich_check(&self) -> bool {
        let p1 = match (&self.probs, &self.book) {
            (Some(p), _) => p.first().copied().unwrap_or(T::zero()),
            (None, Some(b)) => b.max_string_prob(),
            _ => return true,
        };
        let mean = self.total_prob() / T::from_usize(self.k).unwrap();
        let slack = T::tie_tolerance() * (mean + p1);
        self.set_probs.iter().all(|&q| q >= mean - p1 - slack && q <= mean + p1 + slack)
    }

    pub fn to_dump(&self) -> PartitionDump {
        let runs = self.assignment.as_ref().map(|table| {
            let mut runs: Vec<Run> = Vec::new();
            for (rank, &w) in table.iter().enumerate() {
                match runs.last_mut() {
                    Some(r) if r.w == w => r.len += 1,
                    _ => runs.push(Run { w, start: rank as u64, len: 1 }),
                }
            }
            runs
        });
        PartitionDump {
            algo: self.algo,
            k: self.k,
            size: self.size.to_string(),
            set_probs: self.set_probs.iter().map(|q| q.to_f64().unwrap()).collect(),
            assignment_runs: runs,
            book: self.book.as_ref().map(|b| b.to_doc()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub w: u32,
    pub start: u64,
    pub len: u64,
}

/// JSON form of a partition. Round-robin partitions of large books carry no
/// runs; their messages follow from the rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionDump {
    pub algo: Algo,
    #[serde(rename = "K")]
    pub k: usize,
    pub size: String,
    pub set_probs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub assignment_runs: Option<Vec<Run>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub book: Option<BookDoc>,
}

impl PartitionDump {
    pub fn decode_rank(&self, rank: &BigUint) -> Result<u32> {
        let size: BigUint = self.size.parse().map_err(|_| IldError::BadSpec(format!("bad size {:?}", self.size)))?;
        if *rank >= size {
            return Err(IldError::NotInCodebook);
        }
        match &self.assignment_runs {
            Some(runs) => {
                let r = rank.to_u64().ok_or(IldError::NotInCodebook)?;
                let i = runs.partition_point(|run| run.start + run.len <= r);
                runs.get(i).map(|run| run.w).ok_or(IldError::NotInCodebook)
            }
            None => Ok(((size - 1u32 - rank) % BigUint::from(self.k)).to_u32().unwrap()),
        }
    }
}

/// Worst case of LLF with two messages on the full support book.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OneBitBound<T> {
    /// `1/2 log2(1 / (1 - q_max^(2n)))`
    pub exact: T,
    /// `q_max^(2n) / (2 ln 2 (1 - q_max^(2n)))`
    pub relaxed: T,
    /// LLF selection divergence with `K = 2`, for `n <= 20`.
    pub achieved: Option<T>,
}

pub fn one_bit_worst_case<T: Real>(q: &crate::info::Pmf<T>, n: u32) -> Result<OneBitBound<T>> {
    if n == 0 {
        return Err(IldError::Range("n must be positive".into()));
    }
    let x = q.max().powi(2 * n as i32);
    let exact = lit::<T>(0.5) * (T::one() / (T::one() - x)).log2();
    let relaxed = x / (lit::<T>(2.0) * T::LN_2() * (T::one() - x));
    let achieved = if n <= 20 && q.support().len() > 1 {
        let book = Codebook::full_support(q, n)?;
        Some(Partition::llf(&book, 2)?.selection_divergence())
    } else {
        None
    };
    Ok(OneBitBound { exact, relaxed, achieved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::Pmf;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn example_one_both_algorithms() {
        let w = [0.3f64, 0.2, 0.125, 0.125, 0.125, 0.125];
        for algo in [Algo::Mlf, Algo::Llf, Algo::RoundRobin] {
            let p = Partition::from_weights(&w, 2, algo).unwrap();
            let s = sorted(p.set_probs().to_vec());
            assert!((s[0] - 0.45).abs() < 1e-12 && (s[1] - 0.55).abs() < 1e-12, "{algo}");
        }
    }

    #[test]
    fn three_strings_two_sets() {
        let w = [0.8f64, 0.1, 0.1];
        let mlf = Partition::from_weights(&w, 2, Algo::Mlf).unwrap();
        assert_eq!(mlf.assignment().unwrap(), &[0, 1, 1]);
        assert!((mlf.selection_divergence() - 0.321928).abs() < 1e-6);
        assert_eq!(mlf.pareto_check().unwrap(), (true, None));

        let llf = Partition::from_weights(&w, 2, Algo::Llf).unwrap();
        assert_eq!(llf.assignment().unwrap(), &[0, 1, 0]);
        assert!((llf.set_probs()[0] - 0.9).abs() < 1e-12);
        let (ok, witness) = llf.pareto_check().unwrap();
        assert!(!ok);
        let m = witness.unwrap();
        assert_eq!((m.rank, m.from, m.to), (2, 0, 1));

        let rr = Partition::from_weights(&w, 2, Algo::RoundRobin).unwrap();
        assert_eq!(rr.assignment().unwrap(), llf.assignment().unwrap());
        assert_eq!(rr.decode_rank(&BigUint::from(0u8)).unwrap(), 0);
    }

    #[test]
    fn singletons_and_single_set() {
        let w = [0.4f64, 0.3, 0.2, 0.1];
        let p = Partition::from_weights(&w, 4, Algo::Mlf).unwrap();
        let last = *p.delta_history().last().unwrap();
        assert!((last - 0.3).abs() < 1e-12);
        let one = Partition::from_weights(&w, 1, Algo::Llf).unwrap();
        assert!((one.set_probs()[0] - 1.0).abs() < 1e-12);
        assert!(one.pareto_check().unwrap().0);
        assert!(Partition::from_weights(&w, 5, Algo::Mlf).is_err());
        assert!(Partition::from_weights(&w, 0, Algo::Mlf).is_err());
    }

    #[test]
    fn adversarial_manual_partition_breaks_delta_bound() {
        let w = [0.4f64, 0.3, 0.2, 0.1];
        let p = Partition::manual_weights(&w, vec![0, 0, 1, 1], 2).unwrap();
        assert!(!p.delta_bounds_check());
        let p = Partition::manual_weights(&w, vec![0, 1, 1, 0], 2).unwrap();
        assert!(p.delta_bounds_check());
    }

    #[test]
    fn round_robin_parametric_matches_explicit() {
        let q = Pmf::new(vec![0.11f64, 0.89]).unwrap();
        let book = Codebook::weight_threshold(&q, 10, 1).unwrap();
        let explicit = Partition::round_robin(&book, 3).unwrap();
        let llf = Partition::llf(&book, 3).unwrap();
        assert_eq!(sorted(explicit.set_probs().to_vec()).len(), 3);
        for (a, b) in sorted(explicit.set_probs().to_vec()).iter().zip(sorted(llf.set_probs().to_vec())) {
            assert!((a - b).abs() < 1e-12);
        }
        let big = Codebook::full_support(&q, 30).unwrap();
        let rr = Partition::round_robin(&big, 5).unwrap();
        assert!((rr.total_prob() - 1.0).abs() < 1e-12);
        let sizes: BigUint = rr.set_sizes().iter().sum();
        assert_eq!(sizes, BigUint::from(1u64 << 30));
        assert!(rr.set_prob_sandwich_check());
    }

    #[test]
    fn dump_round_trip_decodes() {
        let q = Pmf::new(vec![0.23, 0.77]).unwrap();
        let book = Codebook::full_support(&q, 6).unwrap();
        for algo in [Algo::Mlf, Algo::Llf, Algo::RoundRobin] {
            let p = Partition::with_algo(&book, 5, algo).unwrap();
            let dump: PartitionDump = serde_json::from_str(&serde_json::to_string(&p.to_dump()).unwrap()).unwrap();
            for r in 0..64u32 {
                let r = BigUint::from(r);
                assert_eq!(dump.decode_rank(&r).unwrap(), p.decode_rank(&r).unwrap());
            }
        }
    }

    #[test]
    fn one_bit_examples() {
        let b = one_bit_worst_case(&Pmf::new(vec![0.11f64, 0.89]).unwrap(), 10).unwrap();
        assert!((b.exact - 0.0738).abs() < 1e-4);
        assert!(b.achieved.unwrap() <= b.exact + 1e-12);
        assert!(b.exact <= b.relaxed);
        let u = one_bit_worst_case(&Pmf::new(vec![0.5f64, 0.5]).unwrap(), 1).unwrap();
        assert!((u.exact - 0.5 * (4.0f64 / 3.0).log2()).abs() < 1e-12);
    }
}
