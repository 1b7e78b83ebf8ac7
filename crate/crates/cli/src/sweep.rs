//! `bounds sweep`: evaluates the growth and concentration bounds on a small
//! grid and lists every case where an exact value falls outside its bracket.

use anyhow::Result;
use ild_core::bounds::{
    binomial_bounds, binomial_identity, binomial_sum_bounds, multinomial_bounds_counts, pinsker_bounds,
    typical_set_bounds,
};
use ild_core::codebook::Codebook;
use ild_core::combin::{compositions, log2_binomial, log2_multinomial};
use ild_core::info::{divergence, Pmf};
use serde::Serialize;

#[derive(Serialize)]
pub struct SweepReport {
    pub checks: u64,
    pub violations: Vec<String>,
}

const TOL: f64 = 1e-12;

pub fn run(q: &Pmf<f64>, n_max: u32) -> Result<SweepReport> {
    let mut checks = 0;
    let mut violations = Vec::new();
    let mut check = |ok: bool, what: String| {
        checks += 1;
        if !ok {
            violations.push(what);
        }
    };

    for n in 1..=n_max as u64 {
        for k in 0..=n {
            if k < n {
                check(binomial_identity(n, k)?.holds(), format!("binomial identity n={n} k={k}"));
            }
            let exact = log2_binomial(n, k).exp2();
            if k > 0 && k < n {
                check(binomial_bounds::<f64>(n, k)?.contains(exact, TOL), format!("binomial n={n} k={k}"));
            }
            if 2 * k < n {
                let sum: f64 = (0..=k).map(|i| log2_binomial(n, i).exp2()).sum();
                check(binomial_sum_bounds::<f64>(n, k)?.contains(sum, TOL), format!("binomial sum n={n} k={k}"));
            }
        }
    }

    let a = q.alphabet_size();
    let small = |n: u32| (n as f64) * (a as f64).log2() <= 20.0;
    for n in 1..=n_max {
        for counts in compositions(n, a) {
            if counts.contains(&0) {
                continue;
            }
            let exact = log2_multinomial(&counts).exp2();
            check(multinomial_bounds_counts::<f64>(&counts)?.contains(exact, TOL), format!("multinomial {counts:?}"));
            let p = Pmf::<f64>::from_counts(&counts)?;
            check(pinsker_bounds(&p, q)?.contains(divergence(&p, q)?, TOL), format!("pinsker type {counts:?}"));
        }
        if !small(n) {
            continue;
        }
        for eps in [0.2, 0.5, 1.0] {
            let Ok(book) = Codebook::typical_set(q, n, eps) else { continue };
            let b = typical_set_bounds(q, n as u64, eps)?;
            let size = book.size_u64().unwrap_or(u64::MAX) as f64;
            check(b.prob.contains(book.probability(), TOL), format!("typical-set probability n={n} eps={eps}"));
            check(size <= b.size.upper * (1.0 + TOL), format!("typical-set size n={n} eps={eps}"));
            check(
                b.string_prob.contains(book.max_string_prob(), TOL) && b.string_prob.contains(book.min_string_prob(), TOL),
                format!("typical string probability n={n} eps={eps}"),
            );
        }
    }
    Ok(SweepReport { checks, violations })
}
