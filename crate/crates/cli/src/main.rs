use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ild_core::analysis::{fig4_rows, fig5_rows, llf_upper_curve, lower_bound, typical_set_experiment, Fig5Config, IldEncoder};
use ild_core::bounds::rate_region_check;
use ild_core::codebook::Codebook;
use ild_core::info::{entropy, Pmf, SymbolString};
use ild_core::partition::{Algo, Partition, PartitionDump};
use ild_core::resolution::RcMode;
use ild_core::{BookDoc, IldError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod sweep;

#[derive(Parser)]
#[command(name = "ild", version, about = "Invertible low-divergence coding experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Divergence of the K most likely strings for every K, per light-letter probability.
    Fig4 {
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.15,0.23")]
        q: Vec<f64>,
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// MLF/LLF sweeps, optimal-code markers and the large-n bound curves.
    Fig5 {
        #[arg(long, default_value_t = 0.11)]
        q: f64,
        #[arg(long, value_delimiter = ',', default_value = "10,16,20")]
        n: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "mlf,llf")]
        algos: Vec<Algo>,
        /// Block length of the bound curves; 0 skips them.
        #[arg(long, default_value_t = 10_000)]
        lb_n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partition a codebook and optionally dump the result as JSON.
    Partition {
        #[command(flatten)]
        part: PartArgs,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Map a message and a seed to a string.
    Encode {
        #[command(flatten)]
        part: PartArgs,
        #[arg(long)]
        w: u32,
        #[arg(long, value_enum, default_value_t = Mode::Mtype)]
        mode: Mode,
        /// Generator budget in bits (default: smallest that fits every set).
        #[arg(long)]
        bits: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of strings to draw.
        #[arg(long, default_value_t = 1)]
        count: u32,
    },
    /// Recover the message of a string.
    Decode {
        /// A partition dump written by `partition --dump`.
        #[arg(long, conflicts_with_all = ["spec", "k"])]
        part: Option<PathBuf>,
        #[arg(long, requires = "k")]
        spec: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "mlf")]
        algo: Algo,
        /// Digits (`0110`) or comma-separated symbols.
        #[arg(long)]
        string: String,
    },
    /// Typical-set encoder runs over several block lengths.
    #[command(name = "theorem2")]
    TypicalSet {
        #[arg(long, value_delimiter = ',', default_value = "0.11,0.89")]
        pmf: Vec<f64>,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, value_delimiter = ',', default_value = "10,14,18,22")]
        n_list: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "mlf")]
        algos: Vec<Algo>,
        #[arg(long)]
        bits: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rate-region check and inequality sweeps.
    Bounds {
        #[command(subcommand)]
        which: BoundsCmd,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Compare R_info + H_rng with the finite-xi limits.
    Region {
        #[arg(long, value_delimiter = ',')]
        pmf: Vec<f64>,
        #[arg(long)]
        r_info: f64,
        #[arg(long)]
        h_rng: f64,
        #[arg(long, default_value_t = 0.0)]
        xi: f64,
    },
    /// Lower bound and LLF upper bound over a rate grid.
    Limits {
        #[arg(long, default_value_t = 0.11)]
        q: f64,
        #[arg(long, default_value_t = 10_000)]
        n: u32,
        #[arg(long, value_delimiter = ',')]
        rates: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the growth and inequality bounds on a grid and report violations.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "0.11,0.89")]
        pmf: Vec<f64>,
        #[arg(long, default_value_t = 30)]
        n_max: u32,
    },
}

#[derive(Args)]
struct PartArgs {
    /// Codebook document, e.g. {"kind":"full_support","n":10,"pmf":[0.11,0.89]}.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "mlf")]
    algo: Algo,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ideal,
    Mtype,
}

impl From<Mode> for RcMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Ideal => RcMode::Ideal,
            Mode::Mtype => RcMode::MType,
        }
    }
}

/// 15 significant digits, printed in the shortest form that round-trips.
pub(crate) fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let y: f64 = format!("{x:.14e}").parse().expect("formatted float");
    if y == 0.0 || (1e-4..1e15).contains(&y.abs()) {
        y.to_string()
    } else {
        format!("{y:e}")
    }
}

pub(crate) fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

pub(crate) fn write_csv(out: Option<&Path>, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn load_book(path: &Path) -> Result<Codebook<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: BookDoc = serde_json::from_str(&text).map_err(|e| IldError::BadSpec(format!("{}: {e}", path.display())))?;
    Ok(Codebook::from_doc(&doc)?)
}

fn build_partition(args: &PartArgs) -> Result<Partition<f64>> {
    let book = load_book(&args.spec)?;
    Ok(Partition::with_algo(&book, args.k, args.algo)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Fig4 { q, n, out } => {
            let rows = fig4_rows(&q, n)?
                .into_iter()
                .map(|r| vec![num(r.q), r.n.to_string(), r.k.to_string(), num(r.divergence_bits)])
                .collect();
            write_csv(out.as_deref(), &["q", "n", "K", "divergence_bits"], rows)
        }
        Cmd::Fig5 { q, n, algos, lb_n, out } => {
            let cfg = Fig5Config { q, ns: &n, algos: &algos, lb_n, ..Fig5Config::default() };
            let rows = fig5_rows(&cfg)?
                .into_iter()
                .map(|r| {
                    vec![
                        r.series,
                        r.algo,
                        r.n.to_string(),
                        num(r.q),
                        num(r.r_info),
                        r.k.map(|k| k.to_string()).unwrap_or_default(),
                        opt_num(r.selection_div_bits),
                        opt_num(r.lower_bound_bits),
                    ]
                })
                .collect();
            let header = ["series", "algo", "n", "q", "r_info", "K", "selection_div_bits", "lower_bound_bits"];
            write_csv(out.as_deref(), &header, rows)
        }
        Cmd::Partition { part, dump } => {
            let p = build_partition(&part)?;
            let d = p.to_dump();
            if let Some(path) = dump {
                fs::write(&path, serde_json::to_string_pretty(&d)?).with_context(|| format!("writing {}", path.display()))?;
            }
            let summary = serde_json::json!({
                "algo": d.algo,
                "K": d.k,
                "size": d.size,
                "selection_div_bits": p.selection_divergence(),
                "set_probs": d.set_probs,
            });
            println!("{}", serde_json::to_string(&summary)?);
            Ok(())
        }
        Cmd::Encode { part, w, mode, bits, seed, count } => {
            let p = build_partition(&part)?;
            let enc = IldEncoder::from_partition(p, mode.into(), bits)?;
            if w as usize >= enc.k() {
                bail!(IldError::Range(format!("message {w} outside 0..{}", enc.k())));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut stdout = io::stdout().lock();
            for _ in 0..count {
                let z = rng.gen_range(0..enc.seed_count(w));
                writeln!(stdout, "{}", enc.encode(w, z)?)?;
            }
            Ok(())
        }
        Cmd::Decode { part, spec, k, algo, string } => {
            let a: SymbolString = string.parse()?;
            let w = match (part, spec, k) {
                (Some(path), _, _) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    let dump: PartitionDump =
                        serde_json::from_str(&text).map_err(|e| IldError::BadSpec(format!("{}: {e}", path.display())))?;
                    let doc = dump.book.as_ref().ok_or_else(|| IldError::BadSpec("dump carries no codebook".into()))?;
                    let rank = Codebook::<f64>::from_doc(doc)?.rank(&a)?;
                    dump.decode_rank(&rank)?
                }
                (None, Some(spec), Some(k)) => build_partition(&PartArgs { spec, k, algo })?.decode(&a)?,
                _ => bail!(IldError::BadSpec("decode needs --part or --spec with --k".into())),
            };
            println!("{w}");
            Ok(())
        }
        Cmd::TypicalSet { pmf, eps, delta, n_list, algos, bits, out } => {
            let q = Pmf::new(pmf)?;
            let mut rows = Vec::new();
            for &algo in &algos {
                for &n in &n_list {
                    let r = typical_set_experiment(&q, n, eps, delta, algo, bits)?;
                    rows.push(vec![
                        n.to_string(),
                        algo.to_string(),
                        r.k.to_string(),
                        r.bits.to_string(),
                        r.book_size.to_string(),
                        num(r.report.total),
                        num(r.report.selection_term),
                        num(r.report.rng_term),
                        num(r.report.r_info),
                        num(r.r_info_target),
                        num(r.report.h_rng),
                        opt_num(r.report.r_rng),
                        num(r.r_rng_target),
                        r.max_set_size.to_string(),
                        r.set_size_bound_holds.to_string(),
                    ]);
                }
            }
            let header = [
                "n", "algo", "K", "B", "book_size", "total_bits", "selection_bits", "rng_bits", "r_info", "r_info_target",
                "h_rng", "r_rng", "r_rng_target", "max_set_size", "set_size_bound_holds",
            ];
            write_csv(out.as_deref(), &header, rows)
        }
        Cmd::Bounds { which } => match which {
            BoundsCmd::Region { pmf, r_info, h_rng, xi } => {
                let q = Pmf::new(pmf)?;
                let r = rate_region_check(r_info, h_rng, &q, xi)?;
                let out = serde_json::json!({
                    "entropy": entropy(&q),
                    "upper_limit": r.upper_limit,
                    "lower_limit": r.lower_limit,
                    "upper_ok": r.upper_ok,
                    "lower_ok": r.lower_ok,
                });
                println!("{}", serde_json::to_string(&out)?);
                Ok(())
            }
            BoundsCmd::Limits { q, n, rates, out } => {
                let rates = if rates.is_empty() { (1..=50).map(|i| i as f64 / 100.0).collect() } else { rates };
                let mut rows = Vec::new();
                for r in rates {
                    let lb = lower_bound(n, q, r)?;
                    let up = llf_upper_curve(n, q, r).ok();
                    rows.push(vec![
                        num(r),
                        lb.k_max.map(|k| k.to_string()).unwrap_or_default(),
                        num(lb.value),
                        opt_num(up.as_ref().map(|(u, _)| u.bound)),
                        up.map(|(_, k)| k.to_string()).unwrap_or_default(),
                    ]);
                }
                write_csv(out.as_deref(), &["r_info", "k_max", "lower_bound_bits", "llf_upper_bits", "llf_k"], rows)
            }
            BoundsCmd::Sweep { pmf, n_max } => {
                let report = sweep::run(&Pmf::new(pmf)?, n_max)?;
                println!("{}", serde_json::to_string_pretty(&report)?);
                if report.violations.is_empty() {
                    Ok(())
                } else {
                    bail!("{} bound violations", report.violations.len())
                }
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<IldError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
