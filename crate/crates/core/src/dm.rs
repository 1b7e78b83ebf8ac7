//! Distribution matchers: constant composition, unique probabilities,
//! parallel composition and optimal binary codes.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::bounds::BoundPair;
use crate::codebook::{BookSpec, Codebook};
use crate::combin::{binomial, compositions, multinomial};
use crate::error::{IldError, Result};
use crate::info::{cross_entropy, divergence, Pmf, TypeVector};
use crate::scalar::{lit, log2_biguint, CompensatedSum, Real};

/// A one-to-one code: one string per message.
#[derive(Clone, Debug)]
pub struct DmCode<T> {
    book: Codebook<T>,
    r_info: T,
    p_bar: Pmf<T>,
}

impl<T: Real> DmCode<T> {
    pub fn from_book(book: Codebook<T>) -> Result<Self> {
        let n = T::from_u32(book.n()).unwrap();
        let log2_k = lit::<T>(log2_biguint(book.size()));
        let mut bar = vec![CompensatedSum::new(); book.alphabet_size()];
        for c in book.classes() {
            let weight = (lit::<T>(log2_biguint(c.members())) - log2_k).exp2();
            for (acc, &count) in bar.iter_mut().zip(c.counts()) {
                acc.add(weight * T::from_u32(count).unwrap() / n);
            }
        }
        let raw: Vec<T> = bar.iter().map(|s| s.value()).collect();
        let total: T = raw.iter().copied().sum();
        let p_bar = Pmf::new(raw.into_iter().map(|x| x / total).collect())?;
        Ok(Self { r_info: log2_k / n, book, p_bar })
    }

    pub fn book(&self) -> &Codebook<T> {
        &self.book
    }

    /// Number of messages `K = |S|`.
    pub fn k(&self) -> &BigUint {
        self.book.size()
    }

    pub fn n(&self) -> u32 {
        self.book.n()
    }

    pub fn r_info(&self) -> T {
        self.r_info
    }

    /// Code empirical pmf.
    pub fn p_bar(&self) -> &Pmf<T> {
        &self.p_bar
    }

    /// `D(U_K || Q^n) = (1/K) sum_a I(a) - log2 K`, summed per type.
    pub fn divergence(&self) -> T {
        let log2_k = lit::<T>(log2_biguint(self.book.size()));
        let mut acc = CompensatedSum::new();
        for c in self.book.classes() {
            let weight = (lit::<T>(log2_biguint(c.members())) - log2_k).exp2();
            acc.add(-weight * c.log2_prob());
        }
        acc.value() - log2_k
    }

    /// The same quantity as `n X(P_bar || Q) - log2 K`.
    pub fn divergence_via_cross_entropy(&self) -> Result<T> {
        let n = T::from_u32(self.n()).unwrap();
        Ok(n * cross_entropy(&self.p_bar, self.book.pmf())? - lit::<T>(log2_biguint(self.book.size())))
    }
}

/// Constant composition code over the single type class `p_type`.
pub fn ccdm<T: Real>(q: &Pmf<T>, p_type: &TypeVector) -> Result<DmCode<T>> {
    if p_type.alphabet_size() != q.alphabet_size() {
        return Err(IldError::DimensionMismatch { left: p_type.alphabet_size(), right: q.alphabet_size() });
    }
    let book = Codebook::from_types(q, p_type.n() as u32, vec![p_type.counts().to_vec()])?;
    DmCode::from_book(book)
}

/// Floors `n q_i`, then hands the deficit one unit at a time to the letters
/// with the largest fractional parts (lowest index first on ties).
pub fn quantize_type<T: Real>(q: &Pmf<T>, n: u32) -> Result<TypeVector> {
    let support = q.support().len();
    if (n as usize) < support {
        return Err(IldError::Range(format!("n = {n} is below the support size {support}")));
    }
    let nf = n as f64;
    let scaled: Vec<f64> = q.probs().iter().map(|p| p.to_f64().unwrap() * nf).collect();
    let mut counts: Vec<u32> = scaled.iter().map(|x| x.floor() as u32).collect();
    let deficit = n.saturating_sub(counts.iter().sum());
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - scaled[a].floor();
        let rb = scaled[b] - scaled[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().take(deficit as usize) {
        counts[i] += 1;
    }
    let l1 = |c: &[u32]| c.iter().zip(&scaled).map(|(&ci, &x)| (ci as f64 - x).abs()).sum::<f64>() / nf;
    let bound = counts.len() as f64 / (2.0 * nf) + 1e-12;
    if l1(&counts) > bound {
        log::warn!("largest-remainder type exceeds the l1 target; searching all remainder assignments");
        let floors: Vec<u32> = scaled.iter().map(|x| x.floor() as u32).collect();
        let mut best = counts.clone();
        for extra in compositions(deficit, counts.len()).filter(|e| e.iter().all(|&x| x <= 1)) {
            let cand: Vec<u32> = floors.iter().zip(&extra).map(|(a, b)| a + b).collect();
            if l1(&cand) < l1(&best) {
                best = cand;
            }
        }
        counts = best;
    }
    Ok(TypeVector::new(counts))
}

/// Exact divergence and the growth sandwich
/// `(m-1)/2 log2(2 pi n c) + n D(P||Q) <= D <= (m-1)/2 log2(8 n c) + n D(P||Q)`,
/// where `m` counts the classes with positive mass and `c` is the geometric
/// mean of their masses raised to `m / (m-1)`.
fn growth_sandwich<T: Real>(n: u32, masses: &[T], d_pq: T) -> BoundPair<T> {
    let masses: Vec<T> = masses.iter().copied().filter(|&r| r > T::zero()).collect();
    let nd = T::from_u32(n).unwrap() * d_pq;
    if masses.len() < 2 {
        return BoundPair::new(nd, nd);
    }
    let m1 = T::from_usize(masses.len() - 1).unwrap();
    let log2_c = masses.iter().map(|r| r.log2()).sum::<T>() / m1;
    let nf = T::from_u32(n).unwrap();
    let half = lit::<T>(0.5) * m1;
    let lower = half * ((lit::<T>(2.0) * T::PI() * nf).log2() + log2_c) + nd;
    let upper = half * ((lit::<T>(8.0) * nf).log2() + log2_c) + nd;
    BoundPair::new(lower, upper)
}

/// Exact divergence of a constant composition code and its sandwich.
pub fn ccdm_divergence<T: Real>(code: &DmCode<T>, q: &Pmf<T>) -> Result<(T, BoundPair<T>)> {
    let exact = code.divergence();
    let d = divergence(code.p_bar(), q)?;
    Ok((exact, growth_sandwich(code.n(), code.p_bar().probs(), d)))
}

/// Letters grouped into classes that share both their count and target probability.
fn unique_classes<T: Real>(q: &Pmf<T>, counts: &[u32]) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<(u32, u64), Vec<usize>> = BTreeMap::new();
    for (i, &c) in counts.iter().enumerate() {
        groups.entry((c, q.get(i).to_f64().unwrap().to_bits())).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Unique-probability code: every string whose per-class occupancy matches
/// that of `p_type`, over classes of letters with equal count and equal
/// target probability.
pub fn unique_prob_dm<T: Real>(q: &Pmf<T>, p_type: &TypeVector) -> Result<DmCode<T>> {
    if p_type.alphabet_size() != q.alphabet_size() {
        return Err(IldError::DimensionMismatch { left: p_type.alphabet_size(), right: q.alphabet_size() });
    }
    let counts = p_type.counts();
    let n = p_type.n() as u32;
    let mut types: Vec<Vec<u32>> = vec![vec![0; counts.len()]];
    for class in unique_classes(q, counts) {
        let occupancy: u32 = class.iter().map(|&i| counts[i]).sum();
        let mut next = Vec::new();
        for t in &types {
            for split in compositions(occupancy, class.len()) {
                let mut t = t.clone();
                for (&letter, &c) in class.iter().zip(&split) {
                    t[letter] = c;
                }
                next.push(t);
            }
        }
        types = next;
    }
    DmCode::from_book(Codebook::from_types(q, n, types)?)
}

/// Closed-form size `C(n; n r_1 .. n r_U) prod_j nu_j^(n r_j)`.
pub fn unique_prob_size<T: Real>(q: &Pmf<T>, p_type: &TypeVector) -> BigUint {
    let counts = p_type.counts();
    let classes = unique_classes(q, counts);
    let occupancy: Vec<u32> = classes.iter().map(|c| c.iter().map(|&i| counts[i]).sum()).collect();
    let mut k = multinomial(&occupancy);
    for (class, &occ) in classes.iter().zip(&occupancy) {
        k *= BigUint::from(class.len()).pow(occ);
    }
    k
}

/// Exact divergence of a unique-probability code and its sandwich.
pub fn unique_prob_divergence<T: Real>(code: &DmCode<T>, q: &Pmf<T>, p_type: &TypeVector) -> Result<(T, BoundPair<T>)> {
    let exact = code.divergence();
    let p = p_type.empirical::<T>()?;
    let n = T::from_usize(p_type.n()).unwrap();
    let masses: Vec<T> = unique_classes(q, p_type.counts())
        .iter()
        .map(|c| T::from_u32(c.iter().map(|&i| p_type.counts()[i]).sum()).unwrap() / n)
        .collect();
    Ok((exact, growth_sandwich(p_type.n() as u32, &masses, divergence(&p, q)?)))
}

/// Composite code of component codes run in parallel, with the composite
/// letter `(a_1, .., a_m)` numbered in mixed radix (first component most
/// significant). Also returns the sum of the component divergences.
pub fn pdm_compose<T: Real>(components: &[DmCode<T>], target: &Pmf<T>) -> Result<(DmCode<T>, T)> {
    let first = components.first().ok_or_else(|| IldError::BadSpec("no components".into()))?;
    let n = first.n();
    let radices: Vec<usize> = components.iter().map(|c| c.book().alphabet_size()).collect();
    let total: usize = radices.iter().product();
    if total != target.alphabet_size() {
        return Err(IldError::FactorizationMismatch(format!(
            "component alphabets multiply to {total}, target has {}",
            target.alphabet_size()
        )));
    }
    for (x, &tx) in target.probs().iter().enumerate() {
        let digits = mixed_radix(x, &radices);
        let prod = components.iter().zip(&digits).fold(T::one(), |acc, (c, &d)| acc * c.book().pmf().get(d));
        if (prod - tx).abs() > T::sum_tolerance() {
            return Err(IldError::FactorizationMismatch(format!("letter {x}: {tx} vs product {prod}")));
        }
    }
    let mut joint: Vec<Vec<u32>> = first.book().classes().iter().map(|c| c.counts().to_vec()).collect();
    let mut radix = radices[0];
    for comp in &components[1..] {
        if comp.n() != n {
            return Err(IldError::BadSpec(format!("component lengths {n} and {} differ", comp.n())));
        }
        if comp.book().classes().iter().any(|c| !c.is_full()) || first.book().classes().iter().any(|c| !c.is_full()) {
            return Err(IldError::BadSpec("components must be unions of whole type classes".into()));
        }
        let b = comp.book().alphabet_size();
        let mut next = Vec::new();
        for left in &joint {
            for right in comp.book().classes() {
                for table in contingency_tables(left, right.counts()) {
                    next.push(table);
                }
            }
        }
        joint = next;
        radix *= b;
    }
    debug_assert_eq!(radix, total);
    let composite = DmCode::from_book(Codebook::from_types(target, n, joint)?)?;
    let expected: BigUint = components.iter().fold(BigUint::one(), |acc, c| acc * c.k());
    if *composite.k() != expected {
        return Err(IldError::FactorizationMismatch(format!("composite size {} != {expected}", composite.k())));
    }
    let sum = components.iter().map(|c| c.divergence()).sum();
    Ok((composite, sum))
}

fn mixed_radix(mut x: usize, radices: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; radices.len()];
    for (d, &r) in digits.iter_mut().zip(radices).rev() {
        *d = x % r;
        x /= r;
    }
    digits
}

/// All non-negative integer tables with the given row and column sums,
/// flattened row-major.
fn contingency_tables(rows: &[u32], cols: &[u32]) -> Vec<Vec<u32>> {
    fn fill(rows: &[u32], cols: &mut Vec<u32>, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let Some((&r, rest)) = rows.split_first() else {
            if cols.iter().all(|&c| c == 0) {
                out.push(prefix.clone());
            }
            return;
        };
        let b = cols.len();
        for row in compositions(r, b) {
            if row.iter().zip(cols.iter()).any(|(x, c)| x > c) {
                continue;
            }
            for (c, x) in cols.iter_mut().zip(&row) {
                *c -= x;
            }
            prefix.extend(&row);
            fill(rest, cols, prefix, out);
            prefix.truncate(prefix.len() - b);
            for (c, x) in cols.iter_mut().zip(&row) {
                *c += x;
            }
        }
    }
    let mut out = Vec::new();
    fill(rows, &mut cols.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// The `k` most probable strings of the full-support book, with divergence.
pub fn optimal_dm<T: Real>(q: &Pmf<T>, n: u32, k: u64) -> Result<(DmCode<T>, T)> {
    if q.alphabet_size() != 2 {
        return Err(IldError::Range("optimal codes are evaluated for binary targets".into()));
    }
    let spec = BookSpec::Truncated { base: Box::new(BookSpec::FullSupport { n }), len: k };
    let book = Codebook::from_spec(q, spec)?;
    let code = DmCode::from_book(book)?;
    let d = code.divergence();
    Ok((code, d))
}

/// One threshold code (all strings with light-letter weight at most `k`).
#[derive(Clone, Debug)]
pub struct ThresholdCode<T> {
    pub k: u32,
    pub size: BigUint,
    pub divergence: T,
    /// Fraction of light letters in the code.
    pub p_bar: f64,
    /// `(0, upper)` of the `k/n - p_bar` sandwich; present for `k < n/2`.
    pub gap_bounds: Option<(f64, f64)>,
    pub gap_ok: bool,
}

#[derive(Clone, Debug)]
pub struct OptimalSweep<T> {
    /// `(K, D(U_K || Q^n))` for `K = 1 .. 2^n`.
    pub points: Vec<(u64, T)>,
    pub thresholds: Vec<ThresholdCode<T>>,
    /// Weight fraction beyond which the divergence grows linearly in n.
    pub p1: f64,
}

/// `p_bar = 1/2 - (k+1) C(n, k+1) / (2 n |S|)` for the weight-at-most-k code.
pub fn threshold_p_bar(n: u64, k: u64) -> f64 {
    let size: BigUint = (0..=k).map(|i| binomial(n, i)).sum();
    let num = binomial(n, k + 1) * (k + 1);
    0.5 - (log2_biguint(&num) - log2_biguint(&size)).exp2() / (2.0 * n as f64)
}

/// Upper end of the `k/n - p_bar` sandwich (`k < n/2`).
pub fn threshold_gap_upper(n: u64, k: u64) -> f64 {
    let nf = n as f64;
    let p = k as f64 / nf;
    (1.0 - p) / (nf * (1.0 - 2.0 * p)) + 1.0 / (2.0 * nf * nf * (1.0 - 2.0 * p).powi(2))
}

/// `p1 = (1 + log2(1-q)) / (log2(1-q) - log2 q)` for light-letter probability q.
pub fn p1_threshold(q: f64) -> f64 {
    (1.0 + (1.0 - q).log2()) / ((1.0 - q).log2() - q.log2())
}

pub fn optimal_dm_sweep<T: Real>(q: &Pmf<T>, n: u32) -> Result<OptimalSweep<T>> {
    if n > 20 {
        return Err(IldError::SizeLimit { size: format!("2^{n}"), cap: 1 << 20 });
    }
    let full = Codebook::full_support(q, n)?;
    let mut points = Vec::with_capacity(1 << n);
    let mut info = CompensatedSum::<T>::new();
    for (i, (_, p)) in full.member_iter().enumerate() {
        info.add(-p.log2());
        let k = (i + 1) as u64;
        let kf = T::from_u64(k).unwrap();
        points.push((k, info.value() / kf - kf.log2()));
    }
    let light = q.lightest_letter();
    let mut thresholds = Vec::with_capacity(n as usize + 1);
    let (nn, nf) = (n as u64, n as f64);
    for k in 0..=n {
        let code = DmCode::from_book(Codebook::weight_threshold(q, n, k)?)?;
        let p_bar = threshold_p_bar(nn, k as u64);
        let from_code = code.p_bar().get(light).to_f64().unwrap();
        debug_assert!((p_bar - from_code).abs() < 1e-9);
        let (gap_bounds, gap_ok) = if 2 * k < n {
            let upper = threshold_gap_upper(nn, k as u64);
            let gap = k as f64 / nf - p_bar;
            (Some((0.0, upper)), gap >= -1e-12 && gap <= upper + 1e-12)
        } else {
            (None, true)
        };
        thresholds.push(ThresholdCode {
            k,
            size: code.k().clone(),
            divergence: code.divergence(),
            p_bar,
            gap_bounds,
            gap_ok,
        });
    }
    Ok(OptimalSweep { points, thresholds, p1: p1_threshold(q.get(light).to_f64().unwrap()) })
}

/// `K` of a code as `u64` when it fits.
pub fn k_u64<T: Real>(code: &DmCode<T>) -> Option<u64> {
    code.k().to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pmf(v: &[f64]) -> Pmf<f64> {
        Pmf::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ccdm_sizes() {
        let q = pmf(&[0.6, 0.2, 0.2]);
        let code = ccdm(&q, &TypeVector::new(vec![3, 1, 1])).unwrap();
        assert_eq!(*code.k(), BigUint::from(20u8));
        let code = ccdm(&pmf(&[0.5, 0.5]), &TypeVector::new(vec![2, 2])).unwrap();
        assert_eq!(*code.k(), BigUint::from(6u8));
        assert!((code.r_info() - 6f64.log2() / 4.0).abs() < 1e-15);
        let code = ccdm(&q, &TypeVector::new(vec![5, 0, 0])).unwrap();
        assert_eq!(code.r_info(), 0.0);
    }

    #[test]
    fn quantization_examples() {
        assert_eq!(quantize_type(&pmf(&[0.11, 0.89]), 10).unwrap().counts(), &[1, 9]);
        assert_eq!(quantize_type(&pmf(&[0.5, 0.5]), 4).unwrap().counts(), &[2, 2]);
        let third = 1.0 / 3.0;
        let t = quantize_type(&pmf(&[third, third, third]), 4).unwrap();
        assert_eq!(t.n(), 4);
        let l1: f64 = t.counts().iter().map(|&c| (c as f64 / 4.0 - third).abs()).sum();
        assert!(l1 <= 3.0 / 8.0 + 1e-12);
    }

    #[test]
    fn ccdm_divergence_examples() {
        let q = pmf(&[0.5, 0.5]);
        let code = ccdm(&q, &TypeVector::new(vec![2, 2])).unwrap();
        let (exact, _) = ccdm_divergence(&code, &q).unwrap();
        assert!((exact - (4.0 - 6f64.log2())).abs() < 1e-12);
        assert!((exact - 1.415037).abs() < 1e-6);
        let q = pmf(&[0.11, 0.89]);
        let code = ccdm(&q, &TypeVector::new(vec![0, 7])).unwrap();
        let (exact, sandwich) = ccdm_divergence(&code, &q).unwrap();
        assert!((exact - 7.0 * -(0.89f64.log2())).abs() < 1e-12);
        assert!(sandwich.contains(exact, 1e-12));
    }

    #[test]
    fn unique_probability_example() {
        let q = pmf(&[0.6, 0.2, 0.2]);
        let t = TypeVector::new(vec![3, 1, 1]);
        let code = unique_prob_dm(&q, &t).unwrap();
        assert_eq!(*code.k(), BigUint::from(40u8));
        assert_eq!(unique_prob_size(&q, &t), BigUint::from(40u8));
        let u = pmf(&[0.25; 4]);
        let code = unique_prob_dm(&u, &TypeVector::new(vec![1, 1, 1, 1])).unwrap();
        assert_eq!(*code.k(), BigUint::from(256u16));
        assert!(code.divergence().abs() < 1e-12);
    }

    #[test]
    fn pdm_of_two_uniform_ccdms() {
        let half = pmf(&[0.5, 0.5]);
        let c = ccdm(&half, &TypeVector::new(vec![2, 2])).unwrap();
        let target = pmf(&[0.25; 4]);
        let (composite, sum) = pdm_compose(&[c.clone(), c], &target).unwrap();
        assert_eq!(*composite.k(), BigUint::from(36u8));
        let expected = 2.0 * (4.0 - 6f64.log2());
        assert!((sum - expected).abs() < 1e-12);
        assert!((composite.divergence() - expected).abs() < 1e-12);
        let wrong = pmf(&[0.1, 0.2, 0.3, 0.4]);
        let c = ccdm(&half, &TypeVector::new(vec![2, 2])).unwrap();
        assert!(matches!(pdm_compose(&[c.clone(), c], &wrong), Err(IldError::FactorizationMismatch(_))));
    }

    #[test]
    fn optimal_code_points() {
        let q = pmf(&[0.05, 0.95]);
        let (_, d1) = optimal_dm(&q, 4, 1).unwrap();
        let i0 = -4.0 * 0.95f64.log2();
        assert!((d1 - i0).abs() < 1e-12);
        let (_, d2) = optimal_dm(&q, 4, 2).unwrap();
        let i1 = -3.0 * 0.95f64.log2() - 0.05f64.log2();
        assert!((d2 - ((i0 + i1) / 2.0 - 1.0)).abs() < 1e-12);
        let (_, d) = optimal_dm(&pmf(&[0.5, 0.5]), 4, 16).unwrap();
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn sweep_minimum_on_threshold_sizes() {
        let q = pmf(&[0.23, 0.77]);
        let sweep = optimal_dm_sweep(&q, 4).unwrap();
        assert_eq!(sweep.points.len(), 16);
        for t in &sweep.thresholds {
            let k = t.size.to_u64().unwrap() as usize;
            assert!((sweep.points[k - 1].1 - t.divergence).abs() < 1e-12);
        }
        assert!(sweep.thresholds.iter().all(|t| t.gap_ok));
        assert_eq!(sweep.thresholds[0].p_bar, 0.0);
        let p1 = p1_threshold(0.11);
        assert!(0.11 < p1 && p1 < 0.5);
    }
}
