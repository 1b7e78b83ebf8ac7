use num_traits::ToPrimitive;
use serde::Serialize;

use super::encoder::{DivergenceReport, IldEncoder};
use super::limits::{llf_upper_curve, lower_bound};
use crate::codebook::Codebook;
use crate::combin::binomial;
use crate::dm::{optimal_dm_sweep, DmCode};
use crate::error::{IldError, Result};
use crate::info::{entropy, Pmf};
use crate::partition::{Algo, Partition};
use crate::resolution::RcMode;
use crate::scalar::log2_biguint;

#[derive(Clone, Debug, Serialize)]
pub struct TypicalSetRun {
    pub n: u32,
    pub algo: Algo,
    pub k: usize,
    pub bits: u32,
    pub book_size: u64,
    pub report: DivergenceReport<f64>,
    /// `2 eps H(Q) + 2 gamma`
    pub r_rng_target: f64,
    /// `H(Q)(1 - eps) - gamma`
    pub r_info_target: f64,
    pub max_set_size: u64,
    /// `q_w 2^(n H(Q)(1-eps)) <= |S_w|` for every message.
    pub set_size_bound_holds: bool,
}

/// `K = round((1-delta)^n / max_a Q^n(a))` over the typical set, clamped to `[1, |S|]`.
pub fn typical_set_k(book: &Codebook<f64>, n: u32, delta: f64) -> usize {
    let target = (n as f64 * (1.0 - delta).log2() - book.max_string_prob().log2()).exp2();
    let size = book.size_u64().unwrap_or(u64::MAX);
    ((target + 0.5).floor().max(1.0) as u64).min(size) as usize
}

/// Typical-set book, K from the target rate, M-type generators with
/// `B = ceil(n (2 eps H + 2 gamma))` unless `bits` overrides it.
pub fn typical_set_experiment(q: &Pmf<f64>, n: u32, eps: f64, delta: f64, algo: Algo, bits: Option<u32>) -> Result<TypicalSetRun> {
    if !(0.0..1.0).contains(&delta) {
        return Err(IldError::Domain(format!("delta = {delta} must lie in [0, 1)")));
    }
    let book = Codebook::typical_set(q, n, eps)?;
    let h = entropy(q);
    let gamma = -(1.0 - delta).log2();
    let r_rng_target = 2.0 * eps * h + 2.0 * gamma;
    let bits = bits.unwrap_or_else(|| (n as f64 * r_rng_target - 1e-9).ceil().max(0.0) as u32);
    let k = typical_set_k(&book, n, delta);
    let part = Partition::with_algo(&book, k, algo)?;
    let sizes: Vec<u64> = part.set_sizes().iter().map(|s| s.to_u64().unwrap()).collect();
    let max_set_size = sizes.iter().copied().max().unwrap_or(0);
    if bits < 63 && max_set_size > 1u64 << bits {
        return Err(IldError::BudgetTooSmall { set_size: max_set_size, bits });
    }
    let scale = (n as f64 * h * (1.0 - eps)).exp2();
    let set_size_bound_holds = part
        .set_probs()
        .iter()
        .zip(&sizes)
        .all(|(&qw, &s)| qw * scale <= s as f64 * (1.0 + 1e-12));
    let enc = IldEncoder::from_partition(part, RcMode::MType, Some(bits))?;
    Ok(TypicalSetRun {
        n,
        algo,
        k,
        bits,
        book_size: book.size_u64().unwrap(),
        report: enc.full_divergence()?,
        r_rng_target,
        r_info_target: h * (1.0 - eps) - gamma,
        max_set_size,
        set_size_bound_holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig4Row {
    pub q: f64,
    pub n: u32,
    #[serde(rename = "K")]
    pub k: u64,
    pub divergence_bits: f64,
}

/// Divergence of the `K` most likely strings, `K = 1 .. 2^n`, per light-letter probability.
pub fn fig4_rows(qs: &[f64], n: u32) -> Result<Vec<Fig4Row>> {
    let mut rows = Vec::new();
    for &q in qs {
        let pmf = Pmf::binary(q)?;
        for (k, d) in optimal_dm_sweep(&pmf, n)?.points {
            rows.push(Fig4Row { q, n, k, divergence_bits: d });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig5Row {
    pub series: String,
    pub algo: String,
    pub n: u32,
    pub q: f64,
    pub r_info: f64,
    #[serde(rename = "K")]
    pub k: Option<u64>,
    pub selection_div_bits: Option<f64>,
    pub lower_bound_bits: Option<f64>,
}

/// `(R_info, D)` of the code of all strings with at most `k` light letters.
pub fn optimal_dm_marker(q: f64, n: u32, k: u32) -> Result<(u64, f64, f64)> {
    let code = DmCode::from_book(Codebook::weight_threshold(&Pmf::binary(q)?, n, k)?)?;
    let size = code.k().to_u64().unwrap();
    Ok((size, code.r_info(), code.divergence()))
}

/// Partition sizes swept for one `n`: powers of two and the threshold-book
/// sizes `sum_{i<=k} C(n,i)`, with `2 <= K <= 2^(n/2)`.
pub fn fig5_k_grid(n: u32) -> Vec<u64> {
    let cap = 1u64 << (n / 2);
    let mut grid: Vec<u64> = (1..=n / 2).map(|j| 1u64 << j).collect();
    let mut acc = 0u64;
    for i in 0..=n as u64 {
        acc += binomial(n as u64, i).to_u64().unwrap();
        grid.push(acc);
    }
    grid.retain(|&k| (2..=cap).contains(&k));
    grid.sort_unstable();
    grid.dedup();
    grid
}

pub struct Fig5Config<'a> {
    pub q: f64,
    pub ns: &'a [u32],
    pub algos: &'a [Algo],
    /// Block length of the analytic bound curves (0 disables them).
    pub lb_n: u32,
    /// Rate grid for the analytic curves.
    pub rates: Vec<f64>,
}

impl Default for Fig5Config<'_> {
    fn default() -> Self {
        Self {
            q: 0.11,
            ns: &[10, 16, 20],
            algos: &[Algo::Mlf, Algo::Llf],
            lb_n: 10_000,
            rates: (1..=50).map(|i| i as f64 / 100.0).collect(),
        }
    }
}

pub fn fig5_rows(cfg: &Fig5Config<'_>) -> Result<Vec<Fig5Row>> {
    let q = cfg.q;
    let pmf = Pmf::binary(q)?;
    let mut rows = Vec::new();
    for &n in cfg.ns {
        let book = Codebook::full_support(&pmf, n)?;
        for &algo in cfg.algos {
            for k in fig5_k_grid(n) {
                let part = Partition::with_algo(&book, k as usize, algo)?;
                let r_info = (k as f64).log2() / n as f64;
                rows.push(Fig5Row {
                    series: format!("{algo}_n{n}"),
                    algo: algo.to_string(),
                    n,
                    q,
                    r_info,
                    k: Some(k),
                    selection_div_bits: Some(part.selection_divergence()),
                    lower_bound_bits: Some(lower_bound(n, q, r_info)?.value),
                });
            }
        }
    }
    for (n, kw) in [(10u32, 1u32), (16, 2)] {
        let (size, r_info, d) = optimal_dm_marker(q, n, kw)?;
        rows.push(Fig5Row {
            series: format!("optimal_dm_n{n}"),
            algo: "dm".into(),
            n,
            q,
            r_info,
            k: Some(size),
            selection_div_bits: Some(d),
            lower_bound_bits: Some(lower_bound(n, q, r_info)?.value),
        });
    }
    if cfg.lb_n > 0 {
        let n = cfg.lb_n;
        for &r in &cfg.rates {
            rows.push(Fig5Row {
                series: format!("lower_bound_n{n}"),
                algo: "bound".into(),
                n,
                q,
                r_info: r,
                k: None,
                selection_div_bits: None,
                lower_bound_bits: Some(lower_bound(n, q, r)?.value),
            });
            if let Ok((u, _)) = llf_upper_curve(n, q, r) {
                rows.push(Fig5Row {
                    series: format!("upper_bound_llf_n{n}"),
                    algo: "bound".into(),
                    n,
                    q,
                    r_info: r,
                    k: None,
                    selection_div_bits: Some(u.bound),
                    lower_bound_bits: None,
                });
            }
        }
    }
    Ok(rows)
}

/// `log2 |S|` of a book, for reporting.
pub fn log2_size(book: &Codebook<f64>) -> f64 {
    log2_biguint(book.size())
}
