//! Real quadratic irrationals `(P + sqrt(D)) / Q`.
//!
//! Only the `+sqrt(D)` branch is stored; negative quantities and Galois
//! conjugates are expressed through the sign of `Q`. Every value carries the
//! invariant `Q | D - P^2` that the continued-fraction recurrence needs.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::RationalInterval;

/// Integer square root `floor(sqrt(n))` by Newton iteration.
pub fn isqrt(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    let bits = n.bits();
    let mut x = BigUint::one() << bits.div_ceil(2);
    loop {
        let y = (&x + n / &x) >> 1u32;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// `floor(sqrt(n))` for a nonnegative `BigInt`.
pub fn isqrt_int(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative integer");
    BigInt::from(isqrt(n.magnitude()))
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = isqrt(n.magnitude());
    &s * &s == *n.magnitude()
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        const LIMIT: usize = 1 << 16;
        let mut sieve = vec![true; LIMIT];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i < LIMIT {
            if sieve[i] {
                let mut j = i * i;
                while j < LIMIT {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..LIMIT).filter(|&k| sieve[k]).map(|k| k as u32).collect()
    })
}

/// Largest `t` with `t | h` and `t^2 | g`, given `g | h^2`.
///
/// Exact whenever the part of `h` free of primes below 2^16 is below 2^48;
/// beyond that, square factors made of two or more distinct large primes may
/// be missed.
fn shared_square_root(h: &BigUint, g: &BigUint) -> BigUint {
    let mut t = BigUint::one();
    let mut h = h.clone();
    let mut g = g.clone();
    let mut h_is_prime = false;
    for &p in small_primes() {
        let p = BigUint::from(p);
        if &p * &p > h {
            h_is_prime = !h.is_one();
            break;
        }
        if (&h % &p).is_zero() {
            let mut vh = 0u32;
            while (&h % &p).is_zero() {
                h /= &p;
                vh += 1;
            }
            let mut vg = 0u32;
            while (&g % &p).is_zero() {
                g /= &p;
                vg += 1;
            }
            t *= p.pow(vh.min(vg / 2));
        }
    }
    if h.is_one() {
        return t;
    }
    if h_is_prime {
        if (&g % (&h * &h)).is_zero() {
            t *= h;
        }
        return t;
    }
    // Every remaining prime exceeds 2^16. Equalize the valuations of g and h.
    h = h.gcd(&g);
    let w = &g / &h;
    g /= &w * &w;
    t *= &w;
    // Now g == h; its largest square divisor is found by a perfect-square test,
    // which is complete when h has at most two prime factors.
    let s = isqrt(&g);
    if &s * &s == g {
        t *= s;
    }
    t
}

/// A real quadratic irrational `(p + sqrt(d)) / q` with `q | d - p^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    p: BigInt,
    d: BigInt,
    q: BigInt,
}

impl QuadraticSurd {
    /// Builds the canonical triple with the same value as `(p + sqrt(d)) / q`.
    ///
    /// The canonical triple is the unique one of minimal `|q|` among all
    /// integer triples `(k p, k^2 d, k q)` satisfying `q | d - p^2`.
    pub fn new(p: impl Into<BigInt>, d: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (p, d, q) = (p.into(), d.into(), q.into());
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if d < BigInt::from(2) {
            if is_perfect_square(&d) {
                return Err(Error::PerfectSquare(d.to_string()));
            }
            return Err(Error::InvalidRadicand(d.to_string()));
        }
        if is_perfect_square(&d) {
            return Err(Error::PerfectSquare(d.to_string()));
        }
        Ok(Self::canonical(p, d, q))
    }

    pub(crate) fn canonical(p: BigInt, d: BigInt, q: BigInt) -> Self {
        // Strip the largest common factor g with g | p, g | q, g^2 | d.
        let h = p.magnitude().gcd(q.magnitude());
        let g2 = (&h * &h).gcd(d.magnitude());
        let g = BigInt::from(shared_square_root(&h, &g2));
        let (p, d, q) = if g.is_one() {
            (p, d, q)
        } else {
            (&p / &g, &d / (&g * &g), &q / &g)
        };
        // Smallest multiplier restoring q | d - p^2.
        let rem = &d - &p * &p;
        let qa = q.abs();
        let m = &qa / qa.gcd(&rem);
        if m.is_one() {
            QuadraticSurd { p, d, q }
        } else {
            QuadraticSurd { p: &p * &m, d: &d * &m * &m, q: &q * &m }
        }
    }

    /// Trusted constructor for triples produced by the continued-fraction
    /// recurrence, which preserves `q | d - p^2` but not minimality.
    pub(crate) fn from_state(p: BigInt, d: BigInt, q: BigInt) -> Self {
        debug_assert!(!q.is_zero());
        debug_assert!(((&d - &p * &p) % &q).is_zero());
        QuadraticSurd { p, d, q }
    }

    pub fn sqrt(d: impl Into<BigInt>) -> Result<Self> {
        Self::new(0, d, 1)
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn is_canonical(&self) -> bool {
        Self::canonical(self.p.clone(), self.d.clone(), self.q.clone()) == *self
    }

    /// Exact `floor((p + sqrt(d)) / q)`.
    pub fn floor(&self) -> BigInt {
        floor_with_root(&self.p, &self.q, &isqrt_int(&self.d))
    }

    /// The canonical surd with value `t * self`.
    pub fn scale_by_integer(&self, t: impl Into<BigInt>) -> Self {
        let t: BigInt = t.into();
        assert!(t.is_positive(), "scale factor must be positive");
        Self::canonical(&self.p * &t, &self.d * &t * &t, self.q.clone())
    }

    /// The Galois conjugate `(p - sqrt(d)) / q`, written as `(-p + sqrt(d)) / (-q)`.
    pub fn conjugate(&self) -> Self {
        QuadraticSurd { p: -&self.p, d: self.d.clone(), q: -&self.q }
    }

    pub fn neg(&self) -> Self {
        QuadraticSurd { p: self.p.clone(), d: self.d.clone(), q: -&self.q }
    }

    pub fn add_integer(&self, k: &BigInt) -> Self {
        QuadraticSurd { p: &self.p + k * &self.q, d: self.d.clone(), q: self.q.clone() }
    }

    /// `1 / self = (-p + sqrt(d)) / ((d - p^2) / q)`.
    pub fn recip(&self) -> Self {
        let q = (&self.d - &self.p * &self.p) / &self.q;
        Self::canonical(-&self.p, self.d.clone(), q)
    }

    pub fn is_positive(&self) -> bool {
        !self.floor().is_negative()
    }

    /// True iff `self > 1` and its conjugate lies in `(-1, 0)`.
    pub fn is_reduced(&self) -> bool {
        let s = isqrt_int(&self.d);
        is_reduced_state(&self.p, &self.q, &s)
    }

    /// Exact equality of values, independent of the triple normalization.
    pub fn value_eq(&self, other: &Self) -> bool {
        self.q.sign() == other.q.sign()
            && &self.p * &other.q == &other.p * &self.q
            && &self.d * &other.q * &other.q == &other.d * &self.q * &self.q
    }

    /// Enclosure of width at most `2^-bits`.
    pub fn enclosure(&self, bits: u64) -> RationalInterval {
        let qa = self.q.magnitude();
        let k = bits.saturating_sub(qa.bits().saturating_sub(1));
        let root = sqrt_interval(&self.d, k);
        (root + RationalInterval::from_integer(self.p.clone())).div_integer(&self.q)
    }

    /// Enclosure with relative width at most `2^-bits`.
    pub fn enclosure_rel(&self, bits: u64) -> RationalInterval {
        let mut abs_bits = bits + 8;
        loop {
            let iv = self.enclosure(abs_bits);
            if !iv.contains_zero() && iv.relative_width_bits() >= bits as i64 {
                return iv;
            }
            abs_bits += bits.max(32);
        }
    }

    /// Rational approximation for display and plotting only.
    pub fn to_f64(&self) -> f64 {
        self.enclosure_rel(60).midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        if self.value_eq(other) {
            return Ordering::Equal;
        }
        let mut bits = 64;
        loop {
            let a = self.enclosure(bits);
            let b = other.enclosure(bits);
            if a.hi() < b.lo() {
                return Ordering::Less;
            }
            if b.hi() < a.lo() {
                return Ordering::Greater;
            }
            bits *= 2;
        }
    }

    /// Compares the value against a rational exactly.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        // (p + sqrt d)/q  vs  r   <=>  sign(q) * (sqrt d - (r q - p))
        let t = r * BigRational::from_integer(self.q.clone()) - BigRational::from_integer(self.p.clone());
        let ord = cmp_sqrt_rational(&self.d, &t);
        if self.q.is_negative() {
            ord.reverse()
        } else {
            ord
        }
    }
}

/// Compares `sqrt(d)` (d not a square) with the rational `t`.
fn cmp_sqrt_rational(d: &BigInt, t: &BigRational) -> Ordering {
    if !t.is_positive() {
        return Ordering::Greater;
    }
    let lhs = d * t.denom() * t.denom();
    let rhs = t.numer() * t.numer();
    lhs.cmp(&rhs)
}

/// `floor((p + sqrt(d)) / q)` given `s = isqrt(d)` with `d` not a square.
pub(crate) fn floor_with_root(p: &BigInt, q: &BigInt, s: &BigInt) -> BigInt {
    if q.is_positive() {
        (p + s).div_floor(q)
    } else {
        (-p - s - 1u32).div_floor(&-q)
    }
}

pub(crate) fn is_reduced_state(p: &BigInt, q: &BigInt, s: &BigInt) -> bool {
    let above_one = floor_with_root(p, q, s) >= BigInt::one();
    // conjugate (p - sqrt d)/q = (-p + sqrt d)/(-q)
    let conj_floor = floor_with_root(&-p, &-q, s);
    above_one && conj_floor == -BigInt::one()
}

/// `[s / 2^k, (s+1) / 2^k]` with `s = isqrt(d * 4^k)`.
pub(crate) fn sqrt_interval(d: &BigInt, k: u64) -> RationalInterval {
    let scaled = d.magnitude() << (2 * k);
    let s = BigInt::from(isqrt(&scaled));
    let den = BigInt::one() << k;
    RationalInterval::new(
        BigRational::new(s.clone(), den.clone()),
        BigRational::new(s + 1u32, den),
    )
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+sqrt({}))/{}", self.p, self.d, self.q)
    }
}

impl FromStr for QuadraticSurd {
    type Err = Error;

    /// Accepts `(P+sqrt(D))/Q`, `(P-sqrt(D))/Q`, `P+sqrt(D)`, `sqrt(D)` and
    /// `sqrt(D)/Q`, with optional whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let mut parser = Parser { src: s.as_bytes(), pos: 0 };
        let (p, neg_root, d, q) = parser.surd()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        if neg_root {
            QuadraticSurd::new(-p, d, -q)
        } else {
            QuadraticSurd::new(p, d, q)
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return Err(self.error("expected an integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse().map_err(|_| Error::Parse { pos: start, msg: "bad integer".into() })
    }

    fn sqrt_term(&mut self) -> Result<BigInt> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(b"sqrt") {
            self.pos += 4;
        } else {
            return Err(self.error("expected 'sqrt('"));
        }
        self.expect(b'(')?;
        let d = self.integer()?;
        self.expect(b')')?;
        Ok(d)
    }

    /// Returns `(p, root_negated, d, q)`.
    fn surd(&mut self) -> Result<(BigInt, bool, BigInt, BigInt)> {
        let grouped = self.eat(b'(');
        let (p, neg, d) = match self.peek() {
            Some(b's') => (BigInt::zero(), false, self.sqrt_term()?),
            Some(_) => {
                let p = self.integer()?;
                let neg = if self.eat(b'+') {
                    false
                } else if self.eat(b'-') {
                    true
                } else {
                    return Err(self.error("expected '+' or '-'"));
                };
                (p, neg, self.sqrt_term()?)
            }
            None => return Err(self.error("empty input")),
        };
        if grouped {
            self.expect(b')')?;
        }
        let q = if self.eat(b'/') { self.integer()? } else { BigInt::one() };
        Ok((p, neg, d, q))
    }
}

impl serde::Serialize for QuadraticSurd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
