use ild_core::analysis::{bits_for, IldEncoder};
use ild_core::codebook::Codebook;
use ild_core::combin::{compositions, multinomial};
use ild_core::dm::{ccdm, pdm_compose, quantize_type, unique_prob_dm, DmCode};
use ild_core::info::{Pmf, TypeVector};
use ild_core::partition::{Algo, Partition};
use ild_core::resolution::{rates, RcMode, ResolutionCode};
use ild_core::{Pmf32, Pmf64};
use num_traits::ToPrimitive;
use proptest::prelude::*;

/// `D(U_S || Q^n)` by direct summation over the members.
fn direct_uniform_divergence(book: &Codebook<f64>) -> f64 {
    let k = book.size_u64().unwrap() as f64;
    book.member_iter().map(|(_, p)| (1.0 / k) * (1.0 / (k * p)).log2()).sum()
}

fn mtype_brute(t: &[f64], m: u32) -> f64 {
    compositions(m, t.len())
        .map(|c| {
            c.iter()
                .zip(t)
                .filter(|(&ci, _)| ci > 0)
                .map(|(&ci, &ti)| {
                    let x = ci as f64 / m as f64;
                    x * (x / ti).log2()
                })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ccdm_matches_direct_sum(a in 0.05f64..0.6, b in 0.05f64..0.6, n in 3u32..=10) {
        prop_assume!(a + b < 0.95);
        let q = Pmf::new(vec![a, b, 1.0 - a - b]).unwrap();
        let t = quantize_type(&q, n).unwrap();
        prop_assert_eq!(t.counts().iter().sum::<u32>(), n);
        let code = ccdm(&q, &t).unwrap();
        prop_assert_eq!(code.k(), &multinomial(t.counts()));
        let d = code.divergence();
        prop_assert!((d - direct_uniform_divergence(code.book())).abs() < 1e-10);
        prop_assert!((d - code.divergence_via_cross_entropy().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn mtype_generator_is_optimal(w in prop::collection::vec(0.01f64..1.0, 1..=5), extra in 0u32..=2) {
        let part = Partition::from_weights(&w, 1, Algo::Mlf).unwrap();
        let b = bits_for(w.len() as u64) + extra;
        let rc = ResolutionCode::build_mtype(&part, 0, b).unwrap();
        let m = rc.multiplicities().unwrap();
        prop_assert_eq!(m.iter().sum::<u64>(), 1u64 << b);
        prop_assert!((rc.divergence() - mtype_brute(rc.target(), 1 << b)).abs() < 1e-12);
        let law: f64 = rc.law().iter().sum();
        prop_assert!((law - 1.0).abs() < 1e-12);
    }

    #[test]
    fn encoder_round_trip(p in 0.02f64..0.48, n in 2u32..=9, k in 1usize..=20, algo_i in 0usize..3, extra in 0u32..3) {
        let book = Codebook::full_support(&Pmf::binary(p).unwrap(), n).unwrap();
        prop_assume!(k as u64 <= 1u64 << n);
        let algo = [Algo::Mlf, Algo::Llf, Algo::RoundRobin][algo_i];
        let part = Partition::with_algo(&book, k, algo).unwrap();
        let largest = part.set_sizes().iter().map(|s| s.to_u64().unwrap()).max().unwrap();
        let enc = IldEncoder::from_partition(part, RcMode::MType, Some(bits_for(largest) + extra)).unwrap();
        let mut hits = vec![0u64; 1 << n];
        for w in 0..k as u32 {
            for z in 0..enc.seed_count(w) {
                let a = enc.encode(w, z).unwrap();
                prop_assert_eq!(enc.decode(&a).unwrap(), w);
                hits[book.rank_u64(&a).unwrap() as usize] += 1;
            }
        }
        let seeds: u64 = (0..k as u32).map(|w| enc.seed_count(w)).sum();
        prop_assert_eq!(hits.iter().sum::<u64>(), seeds);
        let r = enc.full_divergence().unwrap();
        prop_assert!(r.consistent(1e-9));
    }
}

#[test]
fn unique_prob_collapses_equal_letters() {
    let q = Pmf::new(vec![0.25f64, 0.25, 0.5]).unwrap();
    let t = TypeVector::new(vec![2, 2, 4]);
    let u = unique_prob_dm(&q, &t).unwrap();
    let c = ccdm(&q, &t).unwrap();
    // letters 0 and 1 share a probability, so four light letters in any mix qualify
    assert!(u.k() > c.k());
    assert_eq!(u.k().to_u64().unwrap(), 70 * 16);
    assert!((u.divergence() - direct_uniform_divergence(u.book())).abs() < 1e-10);
}

#[test]
fn product_dm_adds_divergences() {
    let qa = Pmf::new(vec![0.3f64, 0.7]).unwrap();
    let qb = Pmf::new(vec![0.6f64, 0.4]).unwrap();
    let a = ccdm(&qa, &TypeVector::new(vec![1, 3])).unwrap();
    let b = ccdm(&qb, &TypeVector::new(vec![2, 2])).unwrap();
    let target = Pmf::new(vec![0.3f64 * 0.6, 0.3 * 0.4, 0.7 * 0.6, 0.7 * 0.4]).unwrap();
    let (code, sum): (DmCode<f64>, f64) = pdm_compose(&[a.clone(), b.clone()], &target).unwrap();
    assert_eq!(code.k().to_u64().unwrap(), 4 * 6);
    assert!((sum - (a.divergence() + b.divergence())).abs() < 1e-12);
}

#[test]
fn rng_rates_follow_budget() {
    let book = Codebook::full_support(&Pmf::binary(0.2f64).unwrap(), 8).unwrap();
    let part = Partition::llf(&book, 4).unwrap();
    let rcs: Vec<_> = (0..4).map(|w| ResolutionCode::build_mtype(&part, w, 7).unwrap()).collect();
    let r = rates(&rcs, 8).unwrap();
    assert_eq!(r.r_rng, Some(7.0 / 8.0));
    assert!(r.h_rng > 0.0 && r.h_rng <= 7.0 / 8.0);
    assert!(matches!(
        ResolutionCode::build_mtype(&part, 0, 5),
        Err(ild_core::IldError::BudgetTooSmall { .. })
    ));
}

#[test]
fn single_precision_pipeline() {
    let q32 = Pmf32::new(vec![0.11, 0.89]).unwrap();
    let q64 = Pmf64::new(vec![0.11, 0.89]).unwrap();
    let b32 = Codebook::full_support(&q32, 10).unwrap();
    let b64 = Codebook::full_support(&q64, 10).unwrap();
    for algo in [Algo::Mlf, Algo::Llf, Algo::RoundRobin] {
        let d32 = Partition::with_algo(&b32, 16, algo).unwrap().selection_divergence();
        let d64 = Partition::with_algo(&b64, 16, algo).unwrap().selection_divergence();
        assert!((d32 as f64 - d64).abs() < 1e-4, "{algo}: {d32} vs {d64}");
    }
    let enc = IldEncoder::assemble(&b32, 8, Algo::Llf, RcMode::MType, None).unwrap();
    let r = enc.full_divergence().unwrap();
    assert!(r.consistent(1e-4));
}
