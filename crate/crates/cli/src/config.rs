//! Experiment configuration: JSON file merged with command-line flags, then
//! validated before any work starts.

use std::path::{Path, PathBuf};

use littlewood_core::sequence::make_sequence;
use littlewood_core::{PseudoAbsoluteSequence, QuadraticSurd, SequenceSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Deserialize;

/// A configuration problem; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<littlewood_core::Error> for ConfigError {
    fn from(e: littlewood_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Jsonl,
    Csv,
}

/// Either form of a number in a config file: `"25/64"`, `"1e-12"` or a JSON integer.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum NumberText {
    Int(i64),
    Text(String),
}

impl NumberText {
    fn to_text(&self) -> String {
        match self {
            NumberText::Int(i) => i.to_string(),
            NumberText::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Threads {
    Count(usize),
    Auto(String),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// The config file layout.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<String>,
    pub sequence: Option<SequenceSpec>,
    pub n_range: Option<[usize; 2]>,
    pub delta0: Option<NumberText>,
    pub tol: Option<NumberText>,
    pub output: Option<OutputFile>,
    pub threads: Option<Threads>,
}

/// Flag values; every field overrides the config file when present.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Flags {
    /// Surd, e.g. "sqrt(2)" or "(1+sqrt(5))/2".
    #[arg(long)]
    pub alpha: Option<String>,
    /// Sequence: "p=2", "M=2,3" (round-robin), "terms=1,2,6,12" or a JSON spec.
    #[arg(long)]
    pub seq: Option<String>,
    #[arg(long)]
    pub n_from: Option<usize>,
    #[arg(long)]
    pub n_to: Option<usize>,
    /// Spectral-gap exponent in [25/64, 1/2].
    #[arg(long)]
    pub delta0: Option<String>,
    /// Target width of reported enclosures, e.g. 1e-12 or 1/1000.
    #[arg(long)]
    pub tol: Option<String>,
    /// Output file; records go to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads, or "auto".
    #[arg(long)]
    pub threads: Option<String>,
    /// JSON config file mirroring the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub alpha: QuadraticSurd,
    pub alpha_text: String,
    pub sequence: PseudoAbsoluteSequence,
    pub n_from: usize,
    pub n_to: usize,
    pub delta0: BigRational,
    pub tol: BigRational,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

/// `"25/64"`, `"-3"`, `"0.125"`, `"1e-12"`, `"2.5E3"`, parsed exactly.
pub fn parse_rational(text: &str) -> Result<BigRational, ConfigError> {
    let t = text.trim();
    let bad = || ConfigError(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(ConfigError(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}0").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32 - 1;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Short sequence syntax or a JSON spec.
pub fn parse_sequence(text: &str) -> Result<SequenceSpec, ConfigError> {
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| ConfigError(format!("sequence spec: {e}")));
    }
    let list = |s: &str| -> Result<Vec<u64>, ConfigError> {
        s.split(',')
            .map(|x| x.trim().parse::<u64>().map_err(|_| ConfigError(format!("sequence: bad integer {x:?}"))))
            .collect()
    };
    match t.split_once('=') {
        Some(("p", v)) => {
            let p = v.trim().parse().map_err(|_| ConfigError(format!("sequence: bad prime {v:?}")))?;
            Ok(SequenceSpec::p_power(p))
        }
        Some(("M", v)) => Ok(SequenceSpec::round_robin(list(v)?)),
        Some(("terms", v)) => Ok(SequenceSpec::explicit(list(v)?)),
        _ => Err(ConfigError(format!("sequence: expected p=..., M=..., terms=... or JSON, got {text:?}"))),
    }
}

fn parse_threads(text: &str) -> Result<Option<usize>, ConfigError> {
    if text == "auto" {
        return Ok(None);
    }
    match text.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Some(n)),
        _ => Err(ConfigError(format!("threads must be a positive integer or \"auto\", got {text:?}"))),
    }
}

fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

pub const DEFAULT_TOL: &str = "1e-12";
pub const DEFAULT_DELTA0: &str = "25/64";

impl ExperimentConfig {
    /// Merges the config file (if any) with the flags and validates the result.
    pub fn resolve(flags: &Flags) -> Result<Self, ConfigError> {
        let file = match &flags.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let alpha_text = flags
            .alpha
            .clone()
            .or(file.alpha)
            .ok_or_else(|| ConfigError("missing alpha (--alpha or \"alpha\" in the config)".into()))?;
        let alpha: QuadraticSurd = alpha_text.parse()?;
        let spec = match &flags.seq {
            Some(s) => parse_sequence(s)?,
            None => file.sequence.ok_or_else(|| ConfigError("missing sequence (--seq or \"sequence\")".into()))?,
        };
        let sequence = make_sequence(&spec)?;
        let range = file.n_range.unwrap_or([1, 12]);
        let n_from = flags.n_from.unwrap_or(range[0]);
        let n_to = flags.n_to.unwrap_or(range[1]);
        if n_from == 0 {
            return Err(ConfigError("indices start at 1".into()));
        }
        if let Some(len) = sequence.len() {
            if n_to > len && n_from <= n_to {
                return Err(ConfigError(format!("n_to = {n_to} exceeds the {len} terms of the sequence")));
            }
        }
        let delta0_text = flags.delta0.clone().or(file.delta0.map(|d| d.to_text())).unwrap_or(DEFAULT_DELTA0.into());
        let delta0 = parse_rational(&delta0_text)?;
        if delta0 < BigRational::new(25.into(), 64.into()) || delta0 > BigRational::new(1.into(), 2.into()) {
            return Err(ConfigError(format!("delta0 = {delta0} is outside [25/64, 1/2]")));
        }
        let tol_text = flags.tol.clone().or(file.tol.map(|t| t.to_text())).unwrap_or(DEFAULT_TOL.into());
        let tol = parse_rational(&tol_text)?;
        if !tol.is_positive() {
            return Err(ConfigError(format!("tolerance must be positive, got {tol_text}")));
        }
        let output = file.output.unwrap_or_default();
        let threads = match (&flags.threads, file.threads) {
            (Some(t), _) => parse_threads(t)?,
            (None, Some(Threads::Count(n))) => parse_threads(&n.to_string())?,
            (None, Some(Threads::Auto(s))) => parse_threads(&s)?,
            (None, None) => None,
        };
        Ok(ExperimentConfig {
            alpha,
            alpha_text,
            sequence,
            n_from,
            n_to,
            delta0,
            tol,
            out: flags.out.clone().or(output.path),
            format: flags.format.or(output.format).unwrap_or_default(),
            threads,
        })
    }
}
