mod config;
mod output;
mod selftest;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use littlewood_core::cf::expand;
use littlewood_core::lab::{map_indices, period_stats, sweep, PeriodStatsReport, Sweep};
use littlewood_core::{Error, QuadraticSurd};
use serde_json::json;

use config::{ExperimentConfig, Flags};

#[derive(Parser)]
#[command(name = "littlewood-lab", version, about = "Exact Mixed Littlewood experiments on quadratic irrationals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the periodic continued fraction of a surd.
    Expand {
        surd: String,
        /// Show at most this many terms of each part.
        #[arg(long, default_value_t = 64)]
        limit: usize,
    },
    /// Littlewood products along the distinguished convergents of u_n alpha.
    Littlewood(Flags),
    /// Period statistics against the Gauss–Kuzmin mean.
    Stats(Flags),
    /// Run the invariant suite at small scale.
    Selftest {
        /// Fast subset.
        #[arg(long)]
        quick: bool,
        /// Directory with golden files to compare against instead of the built-in ones.
        #[arg(long)]
        goldens: Option<std::path::PathBuf>,
    },
}

const OK: u8 = 0;
const VERIFY_FAILED: u8 = 1;
const CONFIG_ERROR: u8 = 2;

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(CONFIG_ERROR)
}

fn io_error(e: io::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(VERIFY_FAILED)
}

fn cmd_expand(text: &str, limit: usize) -> ExitCode {
    let x: QuadraticSurd = match text.parse() {
        Ok(x) => x,
        Err(e) => return config_error(e),
    };
    let cf = expand(&x);
    let (pre, per) = (cf.preperiod(), cf.period());
    if pre.len() <= limit && per.len() <= limit {
        let _ = writeln!(io::stdout().lock(), "{}", cf.to_json());
    } else {
        let show = |v: &[num_bigint::BigInt]| v.iter().take(limit).map(|a| a.to_string()).collect::<Vec<_>>();
        let j = json!({
            "preperiod": show(pre),
            "period": show(per),
            "pre_len": pre.len(),
            "period_len": per.len(),
            "truncated": true,
        });
        let _ = writeln!(io::stdout().lock(), "{j}");
    }
    ExitCode::from(OK)
}

/// Runs `f` on a pool of the configured size.
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build().expect("thread pool").install(f)
}

pub fn run_littlewood(cfg: &ExperimentConfig) -> Sweep {
    with_threads(cfg.threads, || sweep(&cfg.alpha, &cfg.sequence, cfg.n_from, cfg.n_to, &cfg.tol))
}

pub fn run_stats(cfg: &ExperimentConfig) -> (Vec<PeriodStatsReport>, Vec<(usize, Error)>) {
    let indices: Vec<usize> = (cfg.n_from..=cfg.n_to).collect();
    let results = with_threads(cfg.threads, || {
        map_indices(&indices, |n| period_stats(&cfg.alpha, &cfg.sequence, n, &cfg.delta0, &cfg.tol))
    });
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (n, r) in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => failures.push((n, e)),
        }
    }
    (reports, failures)
}

/// Records go to the output file when one is configured, otherwise to stdout;
/// the summary goes to whichever stream the records do not use.
/// A closed stdout (e.g. piping into `head`) is not an error.
fn emit(cfg: &ExperimentConfig, write: impl FnOnce(&mut dyn Write) -> io::Result<()>, summary: &serde_json::Value) -> io::Result<()> {
    let r = match &cfg.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            write(&mut f)?;
            f.flush()?;
            writeln!(io::stdout().lock(), "{summary}")
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).and_then(|_| lock.flush()).map(|_| eprintln!("{summary}"))
        }
    };
    match r {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => r,
    }
}

fn failure_list(failures: &[(usize, Error)]) -> serde_json::Value {
    failures.iter().map(|(n, e)| json!({"n": n, "error": e.to_string()})).collect()
}

fn is_verification_error(e: &Error) -> bool {
    matches!(e, Error::AssertionFailure(_) | Error::Precision(_))
}

fn cmd_littlewood(flags: &Flags) -> ExitCode {
    let cfg = match ExperimentConfig::resolve(flags) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let sw = run_littlewood(&cfg);
    for (n, e) in &sw.failures {
        eprintln!("n = {n}: {e}");
    }
    let summary = json!({
        "alpha": cfg.alpha.to_string(),
        "sequence": cfg.sequence.spec().to_string(),
        "M": cfg.sequence.primes(),
        "summary": sw.summary,
        "failures": failure_list(&sw.failures),
    });
    if let Err(e) = emit(&cfg, |w| output::write_littlewood(&sw.records, cfg.format, w), &summary) {
        return io_error(e);
    }
    let failed = !sw.summary.all_checks || sw.failures.iter().any(|(_, e)| is_verification_error(e));
    ExitCode::from(if failed { VERIFY_FAILED } else { OK })
}

fn cmd_stats(flags: &Flags) -> ExitCode {
    let cfg = match ExperimentConfig::resolve(flags) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let (reports, failures) = run_stats(&cfg);
    for (n, e) in &failures {
        eprintln!("n = {n}: {e}");
    }
    let steps = reports.len().saturating_sub(1);
    let shrinking = reports.windows(2).filter(|w| w[1].gamma_dev.abs().hi() < w[0].gamma_dev.abs().lo()).count();
    let summary = json!({
        "alpha": cfg.alpha.to_string(),
        "sequence": cfg.sequence.spec().to_string(),
        "delta0": cfg.delta0.to_string(),
        "kappa": reports.first().map(|r| r.kappa.to_string()),
        "reports": reports.len(),
        "gamma_dev_shrinking_steps": shrinking,
        "steps": steps,
        "all_sandwich": reports.iter().all(|r| r.sandwich),
        "all_upper_bound": reports.iter().all(|r| r.upper_bound),
        "all_lower_bound": reports.iter().all(|r| r.lower_bound),
        "failures": failure_list(&failures),
    });
    if let Err(e) = emit(&cfg, |w| output::write_stats(&reports, cfg.format, w), &summary) {
        return io_error(e);
    }
    let failed = reports.iter().any(|r| !(r.sandwich && r.upper_bound && r.lower_bound))
        || failures.iter().any(|(_, e)| is_verification_error(e));
    ExitCode::from(if failed { VERIFY_FAILED } else { OK })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Expand { surd, limit } => cmd_expand(surd, *limit),
        Command::Littlewood(flags) => cmd_littlewood(flags),
        Command::Stats(flags) => cmd_stats(flags),
        Command::Selftest { quick, goldens } => {
            if selftest::run(*quick, goldens.as_deref()) {
                ExitCode::from(OK)
            } else {
                ExitCode::from(VERIFY_FAILED)
            }
        }
    }
}

