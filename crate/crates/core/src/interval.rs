//! Closed intervals with exact rational endpoints.
//!
//! Arithmetic is exact; callers bound the growth of endpoint sizes by rounding
//! outward to a dyadic grid ([`RationalInterval::round_abs`],
//! [`RationalInterval::round_rel`]). Every operation returns an interval that
//! contains all values obtainable from points of its operands.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// Total order on rationals by cross multiplication.
///
/// `BigRational`'s own `Ord` recurses once per continued-fraction step, which
/// overflows the stack on endpoints with very large dyadic denominators.
pub fn cmp_rat(a: &BigRational, b: &BigRational) -> Ordering {
    if a.denom() == b.denom() {
        return a.numer().cmp(b.numer());
    }
    match (a.numer().sign(), b.numer().sign()) {
        (sa, sb) if sa != sb => return sa.cmp(&sb),
        _ => {}
    }
    (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
}

pub fn le(a: &BigRational, b: &BigRational) -> bool {
    cmp_rat(a, b) != Ordering::Greater
}

pub fn lt(a: &BigRational, b: &BigRational) -> bool {
    cmp_rat(a, b) == Ordering::Less
}

pub fn min_rat<'a>(a: &'a BigRational, b: &'a BigRational) -> &'a BigRational {
    if le(a, b) { a } else { b }
}

pub fn max_rat<'a>(a: &'a BigRational, b: &'a BigRational) -> &'a BigRational {
    if le(a, b) { b } else { a }
}

/// Floor of `log2 |x|`, exact, for nonzero `x`.
pub(crate) fn floor_log2(x: &BigRational) -> i64 {
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    let mut e = n.bits() as i64 - d.bits() as i64;
    // 2^e <= |x| < 2^(e+1) fixes e; the estimate is off by at most one.
    let ge = |e: i64| -> bool {
        if e >= 0 {
            n >= &(d << e as u64)
        } else {
            &(n << (-e) as u64) >= d
        }
    };
    if !ge(e) {
        e -= 1;
    }
    e
}

/// `floor(x * 2^k) / 2^k`.
fn floor_dyadic(x: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        let m = (x.numer() << k as u64).div_floor(x.denom());
        BigRational::new(m, pow2(k as u64))
    } else {
        let scale = pow2((-k) as u64);
        let m = x.numer().div_floor(&(x.denom() * &scale));
        BigRational::from_integer(m * scale)
    }
}

fn ceil_dyadic(x: &BigRational, k: i64) -> BigRational {
    -floor_dyadic(&-x, k)
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(le(&lo, &hi), "interval endpoints out of order");
        RationalInterval { lo, hi }
    }

    pub fn try_new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if le(&lo, &hi) {
            Ok(RationalInterval { lo, hi })
        } else {
            Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")))
        }
    }

    pub fn point(x: BigRational) -> Self {
        RationalInterval { lo: x.clone(), hi: x }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::point(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::point(BigRational::new(n.into(), d.into()))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        le(&self.lo, x) && le(x, &self.hi)
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        le(&self.lo, &other.lo) && le(&other.hi, &self.hi)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Certainly below `other`.
    pub fn lt(&self, other: &Self) -> bool {
        lt(&self.hi, &other.lo)
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        !(lt(&self.hi, &other.lo) || lt(&other.hi, &self.lo))
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = max_rat(&self.lo, &other.lo).clone();
        let hi = min_rat(&self.hi, &other.hi).clone();
        le(&lo, &hi).then_some(RationalInterval { lo, hi })
    }

    pub fn hull(&self, other: &Self) -> Self {
        RationalInterval {
            lo: min_rat(&self.lo, &other.lo).clone(),
            hi: max_rat(&self.hi, &other.hi).clone(),
        }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            -self
        } else {
            RationalInterval { lo: BigRational::zero(), hi: max_rat(&-&self.lo, &self.hi).clone() }
        }
    }

    /// A conservative lower bound on `-log2(width / min |endpoint|)`;
    /// `i64::MIN` when the interval contains zero.
    pub fn relative_width_bits(&self) -> i64 {
        if self.contains_zero() {
            return i64::MIN;
        }
        let w = self.width();
        if w.is_zero() {
            return i64::MAX;
        }
        let m = min_rat(&self.lo.abs(), &self.hi.abs()).clone();
        let r = w / m;
        -(floor_log2(&r) + 1)
    }

    /// Outward rounding of both endpoints to multiples of `2^-bits`.
    pub fn round_abs(&self, bits: i64) -> Self {
        RationalInterval { lo: floor_dyadic(&self.lo, bits), hi: ceil_dyadic(&self.hi, bits) }
    }

    /// Outward rounding keeping about `bits` significant bits per endpoint.
    pub fn round_rel(&self, bits: u64) -> Self {
        let round = |x: &BigRational, up: bool| -> BigRational {
            if x.is_zero() || (x.denom().bits() + x.numer().bits()) <= 2 * bits + 8 {
                return x.clone();
            }
            let k = bits as i64 - floor_log2(x);
            if up {
                ceil_dyadic(x, k)
            } else {
                floor_dyadic(x, k)
            }
        };
        RationalInterval { lo: round(&self.lo, false), hi: round(&self.hi, true) }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let a = &self.lo * r;
        let b = &self.hi * r;
        if r.is_negative() {
            RationalInterval { lo: b, hi: a }
        } else {
            RationalInterval { lo: a, hi: b }
        }
    }

    pub fn mul_integer(&self, n: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(n.clone()))
    }

    pub fn div_integer(&self, n: &BigInt) -> Self {
        assert!(!n.is_zero(), "division by zero");
        self.scale(&BigRational::new(BigInt::one(), n.clone()))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::InvalidArgument("reciprocal of an interval containing zero".into()));
        }
        Ok(RationalInterval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::from_integer(1);
        for _ in 0..n {
            acc = &acc * self;
        }
        if n % 2 == 0 && self.contains_zero() {
            acc.lo = BigRational::zero();
        }
        acc
    }

    /// `"mid ± bound"` with the printed bound covering the whole interval.
    pub fn to_pm_string(&self) -> String {
        format_pm(self)
    }

    /// Lower endpoint rounded down to `sig` significant decimal digits.
    pub fn lo_decimal(&self, sig: usize) -> String {
        format_sci(&self.lo, sig, false)
    }

    /// Upper endpoint rounded up to `sig` significant decimal digits.
    pub fn hi_decimal(&self, sig: usize) -> String {
        format_sci(&self.hi, sig, true)
    }
}

impl Neg for &RationalInterval {
    type Output = RationalInterval;
    fn neg(self) -> RationalInterval {
        RationalInterval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl Neg for RationalInterval {
    type Output = RationalInterval;
    fn neg(self) -> RationalInterval {
        -&self
    }
}

impl Add for &RationalInterval {
    type Output = RationalInterval;
    fn add(self, rhs: &RationalInterval) -> RationalInterval {
        RationalInterval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl Sub for &RationalInterval {
    type Output = RationalInterval;
    fn sub(self, rhs: &RationalInterval) -> RationalInterval {
        RationalInterval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl Mul for &RationalInterval {
    type Output = RationalInterval;
    fn mul(self, rhs: &RationalInterval) -> RationalInterval {
        if !self.lo.is_negative() && !rhs.lo.is_negative() {
            return RationalInterval { lo: &self.lo * &rhs.lo, hi: &self.hi * &rhs.hi };
        }
        let c = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = c.iter().min_by(|a, b| cmp_rat(a, b)).expect("nonempty").clone();
        let hi = c.iter().max_by(|a, b| cmp_rat(a, b)).expect("nonempty").clone();
        RationalInterval { lo, hi }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalInterval {
            type Output = RationalInterval;
            fn $m(self, rhs: RationalInterval) -> RationalInterval {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalInterval> for RationalInterval {
            type Output = RationalInterval;
            fn $m(self, rhs: &RationalInterval) -> RationalInterval {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pm_string())
    }
}

/// Significant digits used when an interval is serialized.
pub const SERIAL_DIGITS: usize = 20;

impl serde::Serialize for RationalInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RationalInterval", 2)?;
        st.serialize_field("lo", &self.lo_decimal(SERIAL_DIGITS))?;
        st.serialize_field("hi", &self.hi_decimal(SERIAL_DIGITS))?;
        st.end()
    }
}

fn pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

/// Exact `floor(log10 |x|)` for nonzero `x`.
fn floor_log10(x: &BigRational) -> i64 {
    let n = x.numer().magnitude().to_string().len() as i64;
    let d = x.denom().to_string().len() as i64;
    let mut e = n - d;
    let ax = x.abs();
    let ge = |e: i64| -> bool {
        if e >= 0 {
            *&ax >= BigRational::from_integer(pow10(e as u32))
        } else {
            &ax * BigRational::from_integer(pow10((-e) as u32)) >= BigRational::one()
        }
    };
    while !ge(e) {
        e -= 1;
    }
    while ge(e + 1) {
        e += 1;
    }
    e
}

/// `x * 10^k` exactly.
fn shift10(x: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        x * BigRational::from_integer(pow10(k as u32))
    } else {
        x / BigRational::from_integer(pow10((-k) as u32))
    }
}

/// Scientific notation with `sig` significant digits, rounded toward
/// `+inf` when `up`, toward `-inf` otherwise.
pub fn format_sci(x: &BigRational, sig: usize, up: bool) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let sig = sig.max(1);
    let e = floor_log10(x);
    let scaled = shift10(x, sig as i64 - 1 - e);
    let m = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let (neg, mut digits) = (m.is_negative(), m.magnitude().to_string());
    let mut e = e;
    if digits.len() > sig {
        // rounding carried into a new digit, e.g. 9.99 -> 10.0
        digits.truncate(sig);
        e += 1;
    }
    let sign = if neg { "-" } else { "" };
    let (head, tail) = digits.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

fn format_fixed(m: &BigInt, k: i64) -> String {
    // value m * 10^k with k <= 0
    let neg = m.is_negative();
    let mut s = m.magnitude().to_string();
    let places = (-k) as usize;
    if s.len() <= places {
        s = "0".repeat(places + 1 - s.len()) + &s;
    }
    let (int, frac) = s.split_at(s.len() - places);
    let sign = if neg { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

fn format_pm(iv: &RationalInterval) -> String {
    let mid = iv.midpoint();
    let rad = iv.width() / BigRational::from_integer(2.into());
    if rad.is_zero() {
        return format!("{} ± 0", format_sci(&mid, 20, false).trim_end_matches("e0"));
    }
    // Print the midpoint one decimal below the radius scale.
    let e = floor_log10(&rad);
    let k = e - 1;
    let m = shift10(&mid, -k).round().to_integer();
    let printed = shift10(&BigRational::from_integer(m.clone()), k);
    let total = (&mid - &printed).abs() + &rad;
    let mut be = floor_log10(&total);
    let mut b = shift10(&total, -be).ceil().to_integer();
    if b >= BigInt::from(10) {
        b = BigInt::one();
        be += 1;
    }
    let mid_str = if k <= 0 && k >= -60 && (mid.is_zero() || floor_log10(&mid) >= -6) {
        format_fixed(&m, k)
    } else {
        let digits = (floor_log10(&printed.abs().max(rad.clone())) - k + 1).max(1) as usize;
        format_sci(&printed, digits, false)
    };
    format!("{mid_str} ± {b}e{be}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cmp_rat_agrees_with_ord() {
        for a in [r(-7, 3), r(-1, 2), r(0, 1), r(1, 3), r(2, 6), r(5, 4), r(9, 2)] {
            for b in [r(-7, 3), r(-2, 5), r(0, 5), r(1, 3), r(7, 5), r(9, 2)] {
                assert_eq!(cmp_rat(&a, &b), a.cmp(&b), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn huge_dyadic_endpoints_compare_without_recursion() {
        let iv = crate::surd::sqrt_interval(&BigInt::from(6), 400_000);
        let shifted = iv.scale(&r(3, 1)).round_abs(399_999);
        std::thread::Builder::new()
            .stack_size(64 * 1024)
            .spawn(move || {
                assert!(iv.lt(&shifted));
                assert!(!iv.overlaps(&shifted) && iv.hull(&shifted).contains_interval(&iv));
            })
            .unwrap()
            .join()
            .unwrap();
    }

    #[test]
    fn arithmetic_contains_pointwise_results() {
        let a = RationalInterval::new(r(-1, 2), r(3, 4));
        let b = RationalInterval::new(r(2, 3), r(5, 3));
        let prod = &a * &b;
        assert_eq!(prod, RationalInterval::new(r(-5, 6), r(5, 4)));
        assert_eq!(&a - &b, RationalInterval::new(r(-13, 6), r(1, 12)));
        assert_eq!(b.recip().unwrap(), RationalInterval::new(r(3, 5), r(3, 2)));
        assert!(a.recip().is_err());
        assert_eq!(a.abs(), RationalInterval::new(r(0, 1), r(3, 4)));
        assert_eq!(a.powi(2), RationalInterval::new(r(0, 1), r(9, 16)));
    }

    #[test]
    fn rounding_is_outward() {
        let x = RationalInterval::new(r(1, 3), r(2, 3));
        let y = x.round_abs(10);
        assert!(y.contains_interval(&x));
        assert!(y.width() <= x.width() + r(2, 1024));
        let tiny = RationalInterval::new(r(1, 3_000_000_007), r(1, 3_000_000_001));
        let z = tiny.round_rel(8);
        assert!(z.contains_interval(&tiny));
        assert!(z.lo().is_positive());
    }

    #[test]
    fn log_helpers() {
        assert_eq!(floor_log2(&r(1, 1)), 0);
        assert_eq!(floor_log2(&r(3, 1)), 1);
        assert_eq!(floor_log2(&r(1, 3)), -2);
        assert_eq!(floor_log2(&r(-8, 1)), 3);
        assert_eq!(floor_log10(&r(999, 1)), 2);
        assert_eq!(floor_log10(&r(1000, 1)), 3);
        assert_eq!(floor_log10(&r(1, 1000)), -3);
        assert_eq!(floor_log10(&r(1, 1001)), -4);
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(format_sci(&r(1, 3), 5, false), "3.3333e-1");
        assert_eq!(format_sci(&r(1, 3), 5, true), "3.3334e-1");
        assert_eq!(format_sci(&r(-1, 3), 3, false), "-3.34e-1");
        assert_eq!(format_sci(&r(9999, 1), 2, true), "1.0e4");
        assert_eq!(format_sci(&r(12, 1), 1, false), "1e1");
        let iv = RationalInterval::new(r(1185670013, 1_000_000_000), r(1185670014, 1_000_000_000));
        let s = iv.to_pm_string();
        assert!(s.starts_with("1.18567001"), "{s}");
        assert!(s.ends_with("e-9") || s.ends_with("e-10"), "{s}");
    }

    #[test]
    fn pm_string_covers_interval() {
        let iv = RationalInterval::new(r(-7, 3), r(-2, 3));
        let s = iv.to_pm_string();
        let (mid, bound) = s.split_once(" ± ").unwrap();
        let mid: f64 = mid.parse().unwrap();
        let bound: f64 = bound.parse().unwrap();
        assert!(mid - bound <= -7.0 / 3.0 && mid + bound >= -2.0 / 3.0, "{s}");
    }
}
