//! Pseudo-absolute sequences `1 = u_1 | u_2 | u_3 | ...` whose terms are
//! `M`-units for a finite prime set `M`, and the associated size `|q|_D`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer literal in a config: a JSON number or a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntLiteral {
    Small(u64),
    Text(String),
}

impl IntLiteral {
    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            IntLiteral::Small(v) => Ok(BigInt::from(*v)),
            IntLiteral::Text(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|_| Error::InvalidSequence(format!("not an integer: {s:?}"))),
        }
    }
}

impl From<u64> for IntLiteral {
    fn from(v: u64) -> Self {
        IntLiteral::Small(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedSchedule {
    /// Multiply by the primes of `M` in turn: `u_{n+1} = u_n * M[(n-1) mod |M|]`.
    #[serde(rename = "round-robin")]
    RoundRobin,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Schedule {
    Named(NamedSchedule),
    /// Exponent vectors over `M`, one per index starting at `n = 1`.
    Exponents(Vec<Vec<u32>>),
}

/// Config description of a sequence, e.g. `{"kind":"p-power","p":2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SequenceSpec {
    PPower {
        p: u64,
    },
    MUnit {
        #[serde(rename = "M")]
        primes: Vec<u64>,
        schedule: Schedule,
    },
    Explicit {
        terms: Vec<IntLiteral>,
        #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
        primes: Option<Vec<u64>>,
    },
}

impl SequenceSpec {
    pub fn p_power(p: u64) -> Self {
        SequenceSpec::PPower { p }
    }

    pub fn round_robin(primes: Vec<u64>) -> Self {
        SequenceSpec::MUnit { primes, schedule: Schedule::Named(NamedSchedule::RoundRobin) }
    }

    pub fn explicit(terms: impl IntoIterator<Item = u64>) -> Self {
        SequenceSpec::Explicit { terms: terms.into_iter().map(IntLiteral::from).collect(), primes: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Generator {
    PPower(u64),
    RoundRobin,
    Exponents(Vec<Vec<u32>>),
    Explicit(Vec<BigInt>),
}

/// A validated pseudo-absolute sequence. Generated kinds are unbounded and
/// evaluated in closed form; explicit and exponent-vector kinds are finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoAbsoluteSequence {
    spec: SequenceSpec,
    primes: Vec<u64>,
    generator: Generator,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Divides out every prime of `primes` and reports the cofactor.
fn strip_primes(v: &BigInt, primes: &[u64]) -> BigInt {
    let mut v = v.clone();
    for &p in primes {
        let p = BigInt::from(p);
        loop {
            let (q, r) = v.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            v = q;
        }
    }
    v
}

/// Primes below `bound` dividing `v`, and the cofactor left over.
fn small_factor_primes(v: &BigInt, bound: u64) -> (Vec<u64>, BigInt) {
    let mut v = v.clone();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p < bound && !v.is_one() {
        let bp = BigInt::from(p);
        if (&v % &bp).is_zero() {
            out.push(p);
            while (&v % &bp).is_zero() {
                v /= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (out, v)
}

fn check_primes(primes: &[u64]) -> Result<Vec<u64>> {
    if primes.is_empty() {
        return Err(Error::InvalidSequence("M must contain at least one prime".into()));
    }
    if let Some(p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::InvalidSequence(format!("{p} is not prime")));
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != primes.len() {
        return Err(Error::InvalidSequence("M contains a repeated prime".into()));
    }
    Ok(sorted)
}

/// Checks `u_1 = 1`, the divisibility chain, strict growth and the `M`-unit condition.
fn validate_terms(terms: &[BigInt], primes: &[u64]) -> Result<()> {
    match terms.first() {
        None => return Err(Error::InvalidSequence("empty sequence".into())),
        Some(u) if !u.is_one() => return Err(Error::InvalidSequence(format!("u_1 must be 1, got {u}"))),
        _ => {}
    }
    for (i, pair) in terms.windows(2).enumerate() {
        let (prev, next) = (&pair[0], &pair[1]);
        if next <= prev {
            return Err(Error::NotIncreasing { index: i + 2, value: next.to_string() });
        }
        if !(next % prev).is_zero() {
            return Err(Error::InvalidChain { index: i + 1, prev: prev.to_string(), next: next.to_string() });
        }
    }
    for (i, u) in terms.iter().enumerate() {
        if !strip_primes(u, primes).is_one() {
            return Err(Error::NotMUnit { index: i + 1, value: u.to_string(), primes: primes.to_vec() });
        }
    }
    Ok(())
}

fn monomial(primes: &[u64], exps: &[u32]) -> BigInt {
    primes.iter().zip(exps).fold(BigInt::one(), |acc, (&p, &e)| acc * BigInt::from(p).pow(e))
}

/// Largest trial-division bound used to infer `M` for explicit lists.
const INFER_BOUND: u64 = 1 << 20;

pub fn make_sequence(spec: &SequenceSpec) -> Result<PseudoAbsoluteSequence> {
    let (primes, generator) = match spec {
        SequenceSpec::PPower { p } => {
            if !is_prime(*p) {
                return Err(Error::InvalidSequence(format!("{p} is not prime")));
            }
            (vec![*p], Generator::PPower(*p))
        }
        SequenceSpec::MUnit { primes, schedule } => {
            // keep the caller's order: the round-robin schedule follows it
            check_primes(primes)?;
            let primes = primes.clone();
            match schedule {
                Schedule::Named(NamedSchedule::RoundRobin) => (primes, Generator::RoundRobin),
                Schedule::Exponents(rows) => {
                    if let Some(row) = rows.iter().find(|r| r.len() != primes.len()) {
                        return Err(Error::InvalidSequence(format!(
                            "exponent vector {row:?} has {} entries, M has {}",
                            row.len(),
                            primes.len()
                        )));
                    }
                    for (i, w) in rows.windows(2).enumerate() {
                        if w[0].iter().zip(&w[1]).any(|(a, b)| b < a) {
                            let value = monomial(&primes, &w[1]).to_string();
                            let prev = monomial(&primes, &w[0]).to_string();
                            return Err(Error::InvalidChain { index: i + 1, prev, next: value });
                        }
                    }
                    let terms: Vec<BigInt> = rows.iter().map(|r| monomial(&primes, r)).collect();
                    validate_terms(&terms, &primes)?;
                    (primes, Generator::Exponents(rows.clone()))
                }
            }
        }
        SequenceSpec::Explicit { terms, primes } => {
            let terms = terms.iter().map(IntLiteral::to_bigint).collect::<Result<Vec<_>>>()?;
            let primes = match primes {
                Some(m) => check_primes(m)?,
                None => {
                    let last = terms.last().cloned().unwrap_or_else(BigInt::one);
                    if !last.is_positive() {
                        return Err(Error::InvalidSequence("terms must be positive".into()));
                    }
                    let (found, rest) = small_factor_primes(&last, INFER_BOUND);
                    if !rest.is_one() {
                        return Err(Error::InvalidSequence(format!(
                            "cannot infer M: u_{} has a factor {rest} without prime divisors below {INFER_BOUND}; give M explicitly",
                            terms.len()
                        )));
                    }
                    found
                }
            };
            validate_terms(&terms, &primes)?;
            (primes, Generator::Explicit(terms))
        }
    };
    Ok(PseudoAbsoluteSequence { spec: spec.clone(), primes, generator })
}

impl PseudoAbsoluteSequence {
    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    /// The prime set `M`.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of terms, or `None` for unbounded generators.
    pub fn len(&self) -> Option<usize> {
        match &self.generator {
            Generator::PPower(_) | Generator::RoundRobin => None,
            Generator::Exponents(rows) => Some(rows.len()),
            Generator::Explicit(t) => Some(t.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `u_n` for `n >= 1`.
    pub fn term(&self, n: usize) -> Result<BigInt> {
        if n == 0 {
            return Err(Error::IndexOutOfRange { index: 0, len: self.len().unwrap_or(usize::MAX) });
        }
        let k = n - 1;
        match &self.generator {
            Generator::PPower(p) => Ok(BigInt::from(*p).pow(k as u32)),
            Generator::RoundRobin => {
                let m = self.primes.len();
                let exps: Vec<u32> = (0..m).map(|j| (k / m + usize::from(j < k % m)) as u32).collect();
                Ok(monomial(&self.primes, &exps))
            }
            Generator::Exponents(rows) => rows
                .get(k)
                .map(|r| monomial(&self.primes, r))
                .ok_or(Error::IndexOutOfRange { index: n, len: rows.len() }),
            Generator::Explicit(t) => t.get(k).cloned().ok_or(Error::IndexOutOfRange { index: n, len: t.len() }),
        }
    }

    /// Terms `u_from ..= u_to`.
    pub fn terms(&self, from: usize, to: usize) -> Result<Vec<BigInt>> {
        (from..=to).map(|n| self.term(n)).collect()
    }

    /// Largest `n` with `u_n | q`; the indices with `u_n | q` form a prefix.
    pub fn max_dividing_index(&self, q: &BigInt) -> Result<usize> {
        if !q.is_positive() {
            return Err(Error::NonPositiveInput(format!("q = {q}")));
        }
        if let Generator::PPower(p) = self.generator {
            let p = BigInt::from(p);
            let mut v = q.clone();
            let mut n = 1;
            loop {
                let (d, r) = v.div_rem(&p);
                if !r.is_zero() {
                    return Ok(n);
                }
                v = d;
                n += 1;
            }
        }
        let mut n = 1;
        loop {
            let next = match self.term(n + 1) {
                Ok(t) => t,
                Err(Error::IndexOutOfRange { .. }) => return Ok(n),
                Err(e) => return Err(e),
            };
            if &next > q || !(q % &next).is_zero() {
                return Ok(n);
            }
            n += 1;
        }
    }

    /// `|q|_D = 1 / u_{n*}` with `n*` the largest index such that `u_{n*} | q`.
    pub fn valuation(&self, q: &BigInt) -> Result<BigRational> {
        let n = self.max_dividing_index(q)?;
        Ok(BigRational::new(BigInt::one(), self.term(n)?))
    }

    /// Largest ratio `u_{n+1} / u_n` over `from <= n < to`.
    pub fn max_ratio(&self, from: usize, to: usize) -> Result<Option<BigInt>> {
        let mut best: Option<BigInt> = None;
        for n in from.max(1)..to {
            let r = self.term(n + 1)? / self.term(n)?;
            if best.as_ref().is_none_or(|b| &r > b) {
                best = Some(r);
            }
        }
        Ok(best)
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::PPower { p } => write!(f, "({p}^n)"),
            SequenceSpec::MUnit { primes, schedule } => match schedule {
                Schedule::Named(NamedSchedule::RoundRobin) => write!(f, "round-robin M-units over {primes:?}"),
                Schedule::Exponents(rows) => write!(f, "{} scheduled M-units over {primes:?}", rows.len()),
            },
            SequenceSpec::Explicit { terms, .. } => write!(f, "explicit list of {} terms", terms.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: u64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn p_power_terms() {
        let s = make_sequence(&SequenceSpec::p_power(2)).unwrap();
        assert_eq!(s.terms(1, 5).unwrap(), vec![b(1), b(2), b(4), b(8), b(16)]);
        assert_eq!(s.term(12).unwrap(), b(2048));
        assert!(matches!(make_sequence(&SequenceSpec::p_power(6)), Err(Error::InvalidSequence(_))));
    }

    #[test]
    fn round_robin_terms() {
        let s = make_sequence(&SequenceSpec::round_robin(vec![2, 3])).unwrap();
        assert_eq!(s.terms(1, 5).unwrap(), vec![b(1), b(2), b(6), b(12), b(36)]);
        let s = make_sequence(&SequenceSpec::round_robin(vec![3, 2])).unwrap();
        assert_eq!(s.terms(1, 4).unwrap(), vec![b(1), b(3), b(6), b(18)]);
    }

    #[test]
    fn explicit_validation() {
        assert_eq!(
            make_sequence(&SequenceSpec::explicit([1, 2, 5])),
            Err(Error::InvalidChain { index: 2, prev: "2".into(), next: "5".into() })
        );
        assert!(matches!(make_sequence(&SequenceSpec::explicit([1, 4, 4])), Err(Error::NotIncreasing { index: 3, .. })));
        assert!(matches!(make_sequence(&SequenceSpec::explicit([2, 4])), Err(Error::InvalidSequence(_))));
        let spec = SequenceSpec::Explicit { terms: vec![1.into(), 2.into(), 10.into()], primes: Some(vec![2, 3]) };
        assert!(matches!(make_sequence(&spec), Err(Error::NotMUnit { index: 3, .. })));
        let s = make_sequence(&SequenceSpec::explicit([1, 6, 30])).unwrap();
        assert_eq!(s.primes(), &[2, 3, 5]);
        assert_eq!(s.len(), Some(3));
        assert!(matches!(s.term(4), Err(Error::IndexOutOfRange { index: 4, len: 3 })));
    }

    #[test]
    fn exponent_schedule() {
        let spec = SequenceSpec::MUnit { primes: vec![2, 3], schedule: Schedule::Exponents(vec![vec![0, 0], vec![1, 0], vec![1, 2]]) };
        let s = make_sequence(&spec).unwrap();
        assert_eq!(s.terms(1, 3).unwrap(), vec![b(1), b(2), b(18)]);
        let bad = SequenceSpec::MUnit { primes: vec![2, 3], schedule: Schedule::Exponents(vec![vec![0, 0], vec![2, 0], vec![1, 1]]) };
        assert!(matches!(make_sequence(&bad), Err(Error::InvalidChain { .. })));
    }

    #[test]
    fn valuation_examples() {
        let s = make_sequence(&SequenceSpec::p_power(2)).unwrap();
        assert_eq!(s.valuation(&b(12)).unwrap(), BigRational::new(b(1), b(4)));
        assert_eq!(s.valuation(&b(7)).unwrap(), BigRational::one());
        assert_eq!(s.valuation(&b(1024)).unwrap(), BigRational::new(b(1), b(1024)));
        let s = make_sequence(&SequenceSpec::round_robin(vec![2, 3])).unwrap();
        assert_eq!(s.valuation(&b(24)).unwrap(), BigRational::new(b(1), b(12)));
        assert_eq!(s.valuation(&b(9)).unwrap(), BigRational::one());
        let s = make_sequence(&SequenceSpec::explicit([1, 6, 30])).unwrap();
        assert_eq!(s.valuation(&b(60)).unwrap(), BigRational::new(b(1), b(30)));
    }
}
