//! Canonically ordered codebooks.
//!
//! Members are grouped into type classes. Classes are sorted by descending
//! string probability; classes whose probabilities agree up to the tie
//! tolerance are ordered by descending count vector. Within a class, strings
//! appear in lexicographic order. For binary strings this is ascending packed
//! integer order inside each weight class.

mod enumerative;
mod spec;

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

pub use enumerative::{first_arrangement, lex_rank, lex_unrank, next_arrangement, next_same_weight};
pub use spec::{BookDoc, BookSpec};

use crate::combin::{compositions, multinomial};
use crate::error::{IldError, Result};
use crate::info::{type_log2_prob, typical_types, Pmf, SymbolString};
use crate::scalar::{lit, log2_biguint, nearly_equal, Log2Sum, Real};

/// Largest number of strings a book may materialize explicitly.
pub const EXPLICIT_CAP: u64 = 1 << 24;

/// 0-based position in the canonical order.
pub type StringRank = BigUint;

/// The members of one type class that belong to a book.
#[derive(Clone, Debug)]
pub struct TypeClass<T> {
    counts: Vec<u32>,
    log2_p: T,
    members: BigUint,
    offset: BigUint,
    full: bool,
}

impl<T: Real> TypeClass<T> {
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// log2 of the probability of each member string.
    pub fn log2_prob(&self) -> T {
        self.log2_p
    }

    pub fn string_prob(&self) -> T {
        self.log2_p.exp2()
    }

    /// Number of members (the whole class or a lexicographic prefix of it).
    pub fn members(&self) -> &BigUint {
        &self.members
    }

    /// Rank of the first member.
    pub fn offset(&self) -> &BigUint {
        &self.offset
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    /// log2 of the total probability of the members.
    pub fn log2_mass(&self) -> T {
        lit::<T>(log2_biguint(&self.members)) + self.log2_p
    }
}

#[derive(Clone, Debug)]
pub struct Codebook<T> {
    spec: BookSpec,
    q: Pmf<T>,
    n: u32,
    classes: Vec<TypeClass<T>>,
    index: HashMap<Vec<u32>, usize>,
    /// (offset, members) per class when the size fits in `u128`.
    small: Option<Vec<(u128, u128)>>,
    /// Pascal triangle for packed binary ranking (binary books, n <= 64).
    pascal: Option<Vec<Vec<u64>>>,
    size: BigUint,
    log2_prob: T,
    explicit: Option<Vec<SymbolString>>,
}

/// Free-function form of [`Codebook::full_support`].
pub fn build_full_support<T: Real>(q: &Pmf<T>, n: u32) -> Result<Codebook<T>> {
    Codebook::full_support(q, n)
}

/// Free-function form of [`Codebook::weight_threshold`].
pub fn build_weight_threshold<T: Real>(q: &Pmf<T>, n: u32, k: u32) -> Result<Codebook<T>> {
    Codebook::weight_threshold(q, n, k)
}

fn light_letter<T: Real>(q: &Pmf<T>) -> Result<usize> {
    if q.alphabet_size() != 2 {
        return Err(IldError::Range(format!("binary target required, got {} letters", q.alphabet_size())));
    }
    let light = q.lightest_letter();
    if q.get(light) >= lit(0.5) {
        return Err(IldError::Range("the light letter must have probability below 1/2".into()));
    }
    Ok(light)
}

fn binary_counts(light: usize, weight: u32, n: u32) -> Vec<u32> {
    let mut c = vec![n - weight; 2];
    c[light] = weight;
    c
}

fn check_supported<T: Real>(counts: &[u32], q: &Pmf<T>) -> Result<()> {
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 && q.get(i) <= T::zero() {
            return Err(IldError::SupportViolation { letter: i, p: c as f64 });
        }
    }
    Ok(())
}

fn canonical_types<T: Real>(types: Vec<Vec<u32>>, q: &Pmf<T>) -> Vec<(Vec<u32>, T)> {
    let mut v: Vec<(Vec<u32>, T)> = types
        .into_iter()
        .map(|c| {
            let l = type_log2_prob(&c, q);
            (c, l)
        })
        .collect();
    v.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| b.0.cmp(&a.0)));
    let mut i = 0;
    while i < v.len() {
        let mut j = i + 1;
        while j < v.len() && nearly_equal(v[i].1, v[j].1) {
            j += 1;
        }
        v[i..j].sort_by(|a, b| b.0.cmp(&a.0));
        i = j;
    }
    v
}

fn pascal(n: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; n + 1]; n + 1];
    for i in 0..=n {
        t[i][0] = 1;
        for j in 1..=i {
            t[i][j] = t[i - 1][j - 1] + if j < i { t[i - 1][j] } else { 0 };
        }
    }
    t
}

impl<T: Real> Codebook<T> {
    pub fn full_support(q: &Pmf<T>, n: u32) -> Result<Self> {
        Self::from_spec(q, BookSpec::FullSupport { n })
    }

    pub fn weight_threshold(q: &Pmf<T>, n: u32, k: u32) -> Result<Self> {
        Self::from_spec(q, BookSpec::WeightThreshold { n, k })
    }

    pub fn min_weight(q: &Pmf<T>, n: u32, k: u32) -> Result<Self> {
        Self::from_spec(q, BookSpec::MinWeight { n, k })
    }

    pub fn typical_set(q: &Pmf<T>, n: u32, eps: f64) -> Result<Self> {
        Self::from_spec(q, BookSpec::TypicalSet { n, eps })
    }

    pub fn from_types(q: &Pmf<T>, n: u32, types: Vec<Vec<u32>>) -> Result<Self> {
        Self::from_spec(q, BookSpec::Types { n, types })
    }

    pub fn explicit(q: &Pmf<T>, strings: Vec<SymbolString>) -> Result<Self> {
        Self::from_spec(q, BookSpec::Explicit { strings })
    }

    /// The first `len` members of `base`.
    pub fn truncated(base: &Codebook<T>, len: u64) -> Result<Self> {
        Self::from_spec(&base.q, BookSpec::Truncated { base: Box::new(base.spec.clone()), len })
    }

    pub fn from_doc(doc: &BookDoc) -> Result<Self> {
        let probs = doc.pmf.iter().map(|&p| lit(p)).collect();
        Self::from_spec(&Pmf::new(probs)?, doc.spec.clone())
    }

    pub fn to_doc(&self) -> BookDoc {
        BookDoc { spec: self.spec.clone(), pmf: self.q.probs().iter().map(|p| p.to_f64().unwrap()).collect() }
    }

    pub fn from_spec(q: &Pmf<T>, spec: BookSpec) -> Result<Self> {
        let a = q.alphabet_size();
        let check_n = |n: u32| {
            if n == 0 {
                Err(IldError::Range("block length must be positive".into()))
            } else {
                Ok(n)
            }
        };
        match &spec {
            BookSpec::FullSupport { n } => {
                let n = check_n(*n)?;
                let support = q.support();
                let types = compositions(n, support.len())
                    .map(|c| {
                        let mut full = vec![0; a];
                        for (&letter, &count) in support.iter().zip(&c) {
                            full[letter] = count;
                        }
                        full
                    })
                    .collect();
                Self::from_whole_types(spec.clone(), q, n, types)
            }
            BookSpec::WeightThreshold { n, k } | BookSpec::MinWeight { n, k } => {
                let n = check_n(*n)?;
                let light = light_letter(q)?;
                if *k > n {
                    return Err(IldError::Range(format!("threshold {k} exceeds block length {n}")));
                }
                let weights: Vec<u32> = match spec {
                    BookSpec::WeightThreshold { .. } => (0..=*k).collect(),
                    _ => (*k..=n).collect(),
                };
                let types = weights
                    .into_iter()
                    .map(|w| binary_counts(light, w, n))
                    .filter(|c| type_log2_prob(c, q) > T::neg_infinity())
                    .collect::<Vec<_>>();
                if types.is_empty() {
                    return Err(IldError::BadSpec("no supported strings in the threshold set".into()));
                }
                Self::from_whole_types(spec.clone(), q, n, types)
            }
            BookSpec::TypicalSet { n, eps } => {
                let n = check_n(*n)?;
                let types = typical_types(q, n, lit(*eps))?;
                if types.is_empty() {
                    return Err(IldError::EmptyTypicalSet { n: n as usize, eps: *eps });
                }
                Self::from_whole_types(spec.clone(), q, n, types)
            }
            BookSpec::Types { n, types } => {
                let n = check_n(*n)?;
                let mut seen = HashSet::new();
                let mut unique = Vec::new();
                for c in types {
                    if c.len() != a {
                        return Err(IldError::DimensionMismatch { left: c.len(), right: a });
                    }
                    if c.iter().sum::<u32>() != n {
                        return Err(IldError::BadSpec(format!("type {c:?} does not sum to {n}")));
                    }
                    check_supported(c, q)?;
                    if seen.insert(c.clone()) {
                        unique.push(c.clone());
                    }
                }
                if unique.is_empty() {
                    return Err(IldError::BadSpec("no types given".into()));
                }
                Self::from_whole_types(spec.clone(), q, n, unique)
            }
            BookSpec::Explicit { strings } => {
                let first = strings.first().ok_or_else(|| IldError::BadSpec("no strings given".into()))?;
                let n = check_n(first.len() as u32)?;
                let mut by_type: HashMap<Vec<u32>, Vec<SymbolString>> = HashMap::new();
                for s in strings {
                    if s.len() != n as usize {
                        return Err(IldError::InvalidString(format!("{s} has length {} instead of {n}", s.len())));
                    }
                    let ty = s.type_of(a)?;
                    check_supported(ty.counts(), q)?;
                    by_type.entry(ty.counts().to_vec()).or_default().push(s.clone());
                }
                let order = canonical_types(by_type.keys().cloned().collect(), q);
                let mut list = Vec::with_capacity(strings.len());
                let mut classes = Vec::with_capacity(order.len());
                for (counts, l) in order {
                    let mut members = by_type.remove(&counts).unwrap();
                    members.sort();
                    members.dedup();
                    let full = BigUint::from(members.len()) == multinomial(&counts);
                    classes.push((counts, l, BigUint::from(members.len()), full));
                    list.extend(members);
                }
                Ok(Self::assemble(spec.clone(), q, n, classes, Some(list)))
            }
            BookSpec::Truncated { base, len } => {
                let base = Self::from_spec(q, (**base).clone())?;
                if *len == 0 || BigUint::from(*len) > base.size {
                    return Err(IldError::Range(format!("prefix length {len} outside 1..={}", base.size)));
                }
                let mut remaining = BigUint::from(*len);
                let mut classes = Vec::new();
                for c in &base.classes {
                    if remaining.is_zero() {
                        break;
                    }
                    let take = if c.members <= remaining { c.members.clone() } else { remaining.clone() };
                    remaining -= &take;
                    let full = c.full && take == c.members;
                    classes.push((c.counts.clone(), c.log2_p, take, full));
                }
                let explicit = base.explicit.map(|mut l| {
                    l.truncate(*len as usize);
                    l
                });
                Ok(Self::assemble(spec.clone(), q, base.n, classes, explicit))
            }
        }
    }

    fn from_whole_types(spec: BookSpec, q: &Pmf<T>, n: u32, types: Vec<Vec<u32>>) -> Result<Self> {
        let classes = canonical_types(types, q)
            .into_iter()
            .map(|(c, l)| {
                let m = multinomial(&c);
                (c, l, m, true)
            })
            .collect();
        Ok(Self::assemble(spec, q, n, classes, None))
    }

    fn assemble(
        spec: BookSpec,
        q: &Pmf<T>,
        n: u32,
        raw: Vec<(Vec<u32>, T, BigUint, bool)>,
        explicit: Option<Vec<SymbolString>>,
    ) -> Self {
        let mut offset = BigUint::zero();
        let mut classes = Vec::with_capacity(raw.len());
        let mut index = HashMap::with_capacity(raw.len());
        let mut mass = Log2Sum::new();
        for (i, (counts, log2_p, members, full)) in raw.into_iter().enumerate() {
            index.insert(counts.clone(), i);
            let class = TypeClass { counts, log2_p, members, offset: offset.clone(), full };
            mass.add_log2(class.log2_mass());
            offset += &class.members;
            classes.push(class);
        }
        let size = offset;
        let small = size.to_u128().map(|_| {
            classes
                .iter()
                .map(|c| (c.offset.to_u128().unwrap(), c.members.to_u128().unwrap()))
                .collect()
        });
        let pascal = (q.alphabet_size() == 2 && n <= 64).then(|| pascal(n as usize));
        Self {
            spec,
            q: q.clone(),
            n,
            classes,
            index,
            small,
            pascal,
            size,
            log2_prob: mass.log2(),
            explicit,
        }
    }

    pub fn spec(&self) -> &BookSpec {
        &self.spec
    }

    pub fn pmf(&self) -> &Pmf<T> {
        &self.q
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.q.alphabet_size()
    }

    pub fn classes(&self) -> &[TypeClass<T>] {
        &self.classes
    }

    pub fn size(&self) -> &BigUint {
        &self.size
    }

    pub fn size_u64(&self) -> Option<u64> {
        self.size.to_u64()
    }

    /// `Q^n(S)`, accumulated per type in the log domain.
    pub fn probability(&self) -> T {
        self.log2_prob.exp2()
    }

    pub fn log2_probability(&self) -> T {
        self.log2_prob
    }

    /// Probability of the first (most likely) member.
    pub fn max_string_prob(&self) -> T {
        self.classes[0].string_prob()
    }

    /// Probability of the last (least likely) member.
    pub fn min_string_prob(&self) -> T {
        self.classes.last().unwrap().string_prob()
    }

    pub fn class_index(&self, counts: &[u32]) -> Option<usize> {
        self.index.get(counts).copied()
    }

    /// `Q^n(a)` for any string over the alphabet.
    pub fn string_prob(&self, a: &SymbolString) -> Result<T> {
        let ty = a.type_of(self.alphabet_size())?;
        Ok(type_log2_prob(ty.counts(), &self.q).exp2())
    }

    pub fn contains(&self, a: &SymbolString) -> bool {
        self.locate(a).is_ok()
    }

    fn class_of(&self, a: &SymbolString) -> Result<usize> {
        if a.len() != self.n as usize {
            return Err(IldError::NotInCodebook);
        }
        let ty = a.type_of(self.alphabet_size()).map_err(|_| IldError::NotInCodebook)?;
        self.class_index(ty.counts()).ok_or(IldError::NotInCodebook)
    }

    fn within_small(&self, a: &SymbolString, ci: usize) -> Option<u128> {
        if let (Some(bits), Some(t)) = (a.packed(), &self.pascal) {
            let n = self.n as usize;
            let mut ones = bits.count_ones() as usize;
            let mut acc = 0u128;
            for j in 0..n {
                if ones == 0 {
                    break;
                }
                if (bits >> (n - 1 - j)) & 1 == 1 {
                    acc += t[n - 1 - j][ones] as u128;
                    ones -= 1;
                }
            }
            return Some(acc);
        }
        enumerative::lex_rank_u128(&a.symbols(), &self.classes[ci].counts)
    }

    fn locate(&self, a: &SymbolString) -> Result<(usize, BigUint)> {
        let ci = self.class_of(a)?;
        if let Some(list) = &self.explicit {
            let pos = self.explicit_position(list, a, ci)?;
            return Ok((ci, BigUint::from(pos) - &self.classes[ci].offset));
        }
        let within = match self.within_small(a, ci) {
            Some(w) => BigUint::from(w),
            None => lex_rank(&a.symbols(), &self.classes[ci].counts),
        };
        if within >= self.classes[ci].members {
            return Err(IldError::NotInCodebook);
        }
        Ok((ci, within))
    }

    fn explicit_position(&self, list: &[SymbolString], a: &SymbolString, ci: usize) -> Result<usize> {
        let key = |s: &SymbolString| (self.class_of(s).unwrap_or(usize::MAX), s.clone());
        list.binary_search_by(|probe| key(probe).cmp(&(ci, a.clone()))).map_err(|_| IldError::NotInCodebook)
    }

    /// Position of `a` in the canonical order.
    pub fn rank(&self, a: &SymbolString) -> Result<StringRank> {
        let (ci, within) = self.locate(a)?;
        Ok(&self.classes[ci].offset + within)
    }

    /// Machine-word rank; fails with `SizeLimit` for books above `u64` range.
    pub fn rank_u64(&self, a: &SymbolString) -> Result<u64> {
        let Some(small) = &self.small else {
            return Err(IldError::SizeLimit { size: self.size.to_string(), cap: u64::MAX });
        };
        if self.explicit.is_none() {
            let ci = self.class_of(a)?;
            if let Some(w) = self.within_small(a, ci) {
                let (offset, members) = small[ci];
                if w >= members {
                    return Err(IldError::NotInCodebook);
                }
                return u64::try_from(offset + w)
                    .map_err(|_| IldError::SizeLimit { size: self.size.to_string(), cap: u64::MAX });
            }
        }
        self.rank(a)?.to_u64().ok_or_else(|| IldError::SizeLimit { size: self.size.to_string(), cap: u64::MAX })
    }

    /// The member at rank `r`.
    pub fn unrank(&self, r: &StringRank) -> Result<SymbolString> {
        if *r >= self.size {
            return Err(IldError::NotInCodebook);
        }
        if let Some(list) = &self.explicit {
            return Ok(list[r.to_usize().unwrap()].clone());
        }
        let ci = self.classes.partition_point(|c| c.offset <= *r) - 1;
        let class = &self.classes[ci];
        let within = r - &class.offset;
        Ok(SymbolString::from_symbols(lex_unrank(&within, &class.counts)))
    }

    /// Ordered stream of `(member, Q^n(member))`.
    pub fn member_iter(&self) -> MemberIter<'_, T> {
        MemberIter::new(self)
    }

    /// All members in canonical order, refusing books above [`EXPLICIT_CAP`].
    pub fn materialize(&self) -> Result<Vec<(SymbolString, T)>> {
        match self.size_u64() {
            Some(s) if s <= EXPLICIT_CAP => Ok(self.member_iter().collect()),
            _ => Err(IldError::SizeLimit { size: self.size.to_string(), cap: EXPLICIT_CAP }),
        }
    }
}

/// Iterator over the members of a book in canonical order.
pub struct MemberIter<'a, T> {
    book: &'a Codebook<T>,
    class: usize,
    left: u128,
    prob: T,
    cursor: Cursor,
    explicit_pos: usize,
}

enum Cursor {
    Packed(u64),
    Symbols(Vec<u8>),
    Done,
}

impl<'a, T: Real> MemberIter<'a, T> {
    fn new(book: &'a Codebook<T>) -> Self {
        let mut it = Self { book, class: 0, left: 0, prob: T::zero(), cursor: Cursor::Done, explicit_pos: 0 };
        it.enter_class(0);
        it
    }

    fn enter_class(&mut self, ci: usize) {
        self.class = ci;
        let Some(c) = self.book.classes.get(ci) else {
            self.cursor = Cursor::Done;
            return;
        };
        self.left = c.members.to_u128().unwrap_or(u128::MAX);
        self.prob = c.string_prob();
        self.cursor = if self.book.alphabet_size() == 2 && self.book.n <= 64 {
            let ones = c.counts[1];
            Cursor::Packed(if ones == 64 { u64::MAX } else { (1u64 << ones) - 1 })
        } else {
            Cursor::Symbols(first_arrangement(&c.counts))
        };
    }
}

impl<T: Real> Iterator for MemberIter<'_, T> {
    type Item = (SymbolString, T);

    fn next(&mut self) -> Option<Self::Item> {
        while self.left == 0 {
            if matches!(self.cursor, Cursor::Done) {
                return None;
            }
            self.enter_class(self.class + 1);
        }
        if let Some(list) = &self.book.explicit {
            let s = list.get(self.explicit_pos)?.clone();
            self.explicit_pos += 1;
            self.left -= 1;
            let p = self.book.classes[self.class].string_prob();
            return Some((s, p));
        }
        let s = match &mut self.cursor {
            Cursor::Packed(bits) => {
                let s = SymbolString::binary(*bits, self.book.n as usize).unwrap();
                *bits = next_same_weight(*bits);
                s
            }
            Cursor::Symbols(v) => {
                let s = SymbolString::from_symbols(v.clone());
                next_arrangement(v);
                s
            }
            Cursor::Done => return None,
        };
        self.left -= 1;
        Some((s, self.prob))
    }
}
