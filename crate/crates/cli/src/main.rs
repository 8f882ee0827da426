//! `stirval`: valuation series, conjecture checks and figure data.
//!
//! Exit codes: 0 consistent / success, 1 counterexample, 2 inconclusive,
//! 64 usage error, 70 internal error, 74 i/o error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stirval::series::{figure_table, val_series, Figure, Series, Table};
use stirval::{ConjectureReport, Error, Precision};

const EXIT_USAGE: u8 = 64;
const EXIT_SOFTWARE: u8 = 70;
const EXIT_IO: u8 = 74;

/// Environment override for the precision ceiling (bits).
const ENV_MAX_BITS: &str = "STIRVAL_M_MAX";

#[derive(Parser, Debug)]
#[command(name = "stirval", version, about = "2-adic valuations of Stirling numbers of the second kind")]
struct Cli {
    /// Precision ceiling in bits for the modular engine [env: STIRVAL_M_MAX] [default: 65536]
    #[arg(long, global = true, value_name = "BITS")]
    precision: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a valuation series as CSV (`n,value`).
    Val(ValArgs),
    /// Run a checker and print its JSON report; the exit code follows its status.
    Verify(VerifyArgs),
    /// Print the data behind one plot as CSV.
    Figure(FigureArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SeriesName {
    Stirling,
    Factorial,
    Int,
    Cohen,
}

#[derive(Args, Debug)]
struct ValArgs {
    #[arg(long, value_enum)]
    series: SeriesName,
    /// Order for `stirling` and `cohen`
    #[arg(long)]
    k: Option<u32>,
    /// Single index (shorthand for --n-min N --n-max N)
    #[arg(long, conflicts_with_all = ["n_min", "n_max"])]
    n: Option<u64>,
    #[arg(long, default_value_t = 1)]
    n_min: u64,
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Target {
    MainConjecture,
    K5Theorem,
    Exceptional,
    Approx,
    Clarke,
    Identities,
    Lemmas,
    Alm,
    Cohen,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    target: Target,
    /// Stirling order (main-conjecture)
    #[arg(long)]
    k: Option<u32>,
    /// Deepest level (main-conjecture, k5-theorem) [default: 10]
    #[arg(long)]
    levels: Option<u32>,
    /// Members sampled per class (main-conjecture) [default: 64]
    #[arg(long)]
    samples: Option<u32>,
    /// Index bound (exceptional, k5-theorem) [default: 200]
    #[arg(long)]
    i_max: Option<u64>,
    /// Upper bound on m (approx [2000], lemmas [20], alm [40], cohen [12])
    #[arg(long)]
    m_max: Option<u64>,
    /// Lower bound on m (cohen) [default: 4]
    #[arg(long)]
    m_min: Option<u32>,
    /// Upper bound on l (alm) [default: m-max]
    #[arg(long)]
    l_max: Option<u64>,
    /// Upper bound on n (identities [300], clarke [2000])
    #[arg(long)]
    n_max: Option<u64>,
    /// Upper bound on k (identities special values [64], clarke [10])
    #[arg(long)]
    k_max: Option<u32>,
    /// Upper bound on q (identities) [default: 12]
    #[arg(long)]
    q_max: Option<u32>,
    /// Bits to which the 2-adic zeros are lifted (clarke) [default: 24]
    #[arg(long)]
    bits: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// val-n | val-factorial | err-factorial | cohen | stirling-k | wannemacker-diff
    name: Figure,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    n_max: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn precision(flag: Option<u32>) -> Result<Precision, Failure> {
    let bits = match flag {
        Some(b) => Some(b),
        None => match std::env::var(ENV_MAX_BITS) {
            Ok(s) => Some(s.trim().parse().map_err(|_| usage(format!("{ENV_MAX_BITS}={s:?} is not a bit count")))?),
            Err(_) => None,
        },
    };
    match bits {
        None => Ok(Precision::default()),
        Some(0) => Err(usage("precision must be at least 1 bit")),
        Some(b) => Ok(Precision::with_max_bits(b)),
    }
}

fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    let res = match out {
        Some(path) => std::fs::write(path, bytes),
        None => std::io::stdout().lock().write_all(bytes),
    };
    res.map_err(|e| Failure::Lib(e.into()))
}

fn emit_table(out: Option<&PathBuf>, t: &Table) -> Result<(), Failure> {
    emit(out, t.to_csv_string().as_bytes())
}

fn run_val(a: &ValArgs, prec: Precision) -> Result<u8, Failure> {
    let (lo, hi) = match (a.n, a.n_max) {
        (Some(n), _) => (n, n),
        (None, Some(hi)) => (a.n_min, hi),
        (None, None) => return Err(usage("give --n or --n-max")),
    };
    let need_k = || a.k.filter(|&k| k >= 1).ok_or_else(|| usage("this series needs --k >= 1"));
    let series = match a.series {
        SeriesName::Stirling => Series::Stirling { k: need_k()? },
        SeriesName::Factorial => Series::Factorial,
        SeriesName::Int => Series::Int,
        SeriesName::Cohen => Series::Cohen { k: need_k()? },
    };
    emit_table(a.out.as_ref(), &val_series(series, lo, hi, prec)?)?;
    Ok(0)
}

fn to_u32(v: u64, flag: &str) -> Result<u32, Failure> {
    u32::try_from(v).map_err(|_| usage(format!("--{flag} too large")))
}

fn verify_report(a: &VerifyArgs, prec: Precision) -> Result<ConjectureReport, Failure> {
    use stirval::{approx, clarke, classes, k5, padic, sequences, stirling};
    let r = match a.target {
        Target::MainConjecture => {
            let k = a.k.ok_or_else(|| usage("main-conjecture needs --k"))?;
            let levels = a.levels.unwrap_or(10);
            let samples = a.samples.unwrap_or(classes::DEFAULT_SAMPLES);
            classes::verify_main_conjecture_with(k, levels, samples, prec)?
        }
        Target::K5Theorem => k5::k5_theorem_report(a.levels.unwrap_or(10), a.i_max.unwrap_or(200), prec)?,
        Target::Exceptional => k5::exceptional_report(a.i_max.unwrap_or(200), prec)?,
        Target::Approx => approx::approx_report(a.m_max.unwrap_or(2000), prec)?,
        Target::Clarke => {
            let n_max = a.n_max.unwrap_or(2000);
            let mut r = ConjectureReport::new("clarke").param("n_max", n_max);
            r.push_sub(sequences::clarke_conjecture_check(n_max, a.k_max.unwrap_or(10), prec)?);
            r.push_sub(clarke::clarke_val_check(n_max, a.bits.unwrap_or(24), prec)?);
            r
        }
        Target::Identities => {
            let n_max = a.n_max.unwrap_or(300);
            let mut r = ConjectureReport::new("identities").param("n_max", n_max);
            r.push_sub(stirling::de_wannemacker_report(n_max, prec)?);
            r.push_sub(stirling::special_values_check(a.q_max.unwrap_or(12), a.k_max.unwrap_or(64), prec)?);
            r.push_sub(stirling::closed_forms_report(n_max, prec)?);
            r.push_sub(stirling::oracle_equivalence_report(n_max.min(stirling::ORACLE_BOUND), prec)?);
            r
        }
        Target::Lemmas => padic::power_lemma_report(to_u32(a.m_max.unwrap_or(20), "m-max")?)?,
        Target::Alm => {
            let m_max = a.m_max.unwrap_or(40);
            sequences::a_lm_val_check(a.l_max.unwrap_or(m_max), m_max)?
        }
        Target::Cohen => sequences::cohen_check(a.m_min.unwrap_or(4), to_u32(a.m_max.unwrap_or(12), "m-max")?)?,
    };
    Ok(r)
}

fn run_verify(a: &VerifyArgs, prec: Precision) -> Result<u8, Failure> {
    let report = verify_report(a, prec)?;
    let mut text = report.to_json_pretty();
    text.push('\n');
    emit(a.out.as_ref(), text.as_bytes())?;
    Ok(report.exit_code() as u8)
}

fn run_figure(a: &FigureArgs, prec: Precision) -> Result<u8, Failure> {
    emit_table(a.out.as_ref(), &figure_table(a.name, a.k, a.n_max, prec)?)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let outcome = precision(cli.precision).and_then(|prec| match &cli.command {
        Command::Val(a) => run_val(a, prec),
        Command::Verify(a) => run_verify(a, prec),
        Command::Figure(a) => run_figure(a, prec),
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                _ if e.is_usage() => EXIT_USAGE,
                Error::PrecisionExceeded { .. } | Error::Inconclusive(_) | Error::NoRoot { .. } | Error::NonUnique { .. } => 2,
                Error::Io(_) => EXIT_IO,
                _ => EXIT_SOFTWARE,
            };
            ExitCode::from(code)
        }
    }
}
