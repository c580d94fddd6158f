//! Certified enclosures of the transcendental quantities the lab reports:
//! square roots, natural logarithms, exponentials, rational powers, pi, the
//! Lévy constant `pi^2 / (12 log 2)` and the Gauss–Kuzmin mean of `-log x`.
//!
//! Internally everything works at a bit precision; the public entry points
//! take a rational tolerance and retry at higher precision until the returned
//! interval is no wider than the tolerance.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::{floor_log2, RationalInterval};
use crate::surd::{is_perfect_square, sqrt_interval};

/// Number of doublings attempted before giving up on a tolerance.
pub(crate) const REFINE_BUDGET: u32 = 10;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn pow2_rat(k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from_integer(BigInt::one() << k as u64)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-k) as u64)
    }
}

/// Smallest `k >= 0` with `2^-k <= tol`.
pub fn tol_bits(tol: &BigRational) -> u64 {
    assert!(tol.is_positive(), "tolerance must be positive");
    (-floor_log2(tol)).max(0) as u64
}

fn check_tol(tol: &BigRational) -> Result<()> {
    if tol.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

/// Retries `f(bits)` with growing precision until the width is at most `tol`.
fn refine<F>(tol: &BigRational, what: &str, mut f: F) -> Result<RationalInterval>
where
    F: FnMut(u64) -> Result<RationalInterval>,
{
    let mut bits = tol_bits(tol) + 8;
    let mut prev: Option<BigRational> = None;
    for _ in 0..REFINE_BUDGET {
        let iv = f(bits)?;
        let w = iv.width();
        if &w <= tol {
            return Ok(iv);
        }
        // doubling the precision no longer halves the width: the argument itself is too wide
        if prev.as_ref().is_some_and(|p| &w * rat(2, 1) > *p) {
            return Err(Error::Precision(format!("{what}: argument too wide for tolerance {tol}")));
        }
        prev = Some(w);
        bits *= 2;
    }
    Err(Error::Precision(format!("{what}: tolerance {tol} not reached")))
}

/// `sqrt(d)` enclosed in an interval of width at most `tol`.
pub fn sqrt_enclosure(d: &BigInt, tol: &BigRational) -> Result<RationalInterval> {
    check_tol(tol)?;
    if is_perfect_square(d) {
        return Err(Error::PerfectSquare(d.to_string()));
    }
    if d < &BigInt::from(2) {
        return Err(Error::InvalidRadicand(d.to_string()));
    }
    Ok(sqrt_interval(d, tol_bits(tol)))
}

/// Partial sums of `atanh(z) = sum z^(2j+1) / (2j+1)` for `0 <= z <= 1/3`,
/// with the geometric tail bound folded into the upper endpoint.
fn atanh_small(z: &BigRational, bits: u64) -> RationalInterval {
    if z.is_zero() {
        return RationalInterval::zero();
    }
    let w = bits as i64 + 8;
    let zi = RationalInterval::point(z.clone());
    let z2 = (&zi * &zi).round_abs(w);
    let eps = pow2_rat(-w);
    let mut pw = zi.round_abs(w);
    let mut sum = RationalInterval::zero();
    let mut j: i64 = 0;
    loop {
        let term = pw.div_integer(&BigInt::from(2 * j + 1));
        sum = (&sum + &term).round_abs(w);
        pw = (&pw * &z2).round_abs(w);
        j += 1;
        if pw.hi() <= &eps {
            // remaining terms: sum_{i>=j} z^(2i+1)/(2i+1) <= pw / ((2j+1)(1 - z^2)), z^2 <= 1/9
            let tail = pw.hi() * rat(9, 8) / BigRational::from_integer((2 * j + 1).into());
            return RationalInterval::new(sum.lo().clone(), sum.hi() + tail);
        }
    }
}

fn ln2_compute(bits: u64) -> RationalInterval {
    atanh_small(&rat(1, 3), bits + 2).scale(&rat(2, 1)).round_abs(bits as i64 + 2)
}

static LN2_CACHE: Mutex<Option<(u64, RationalInterval)>> = Mutex::new(None);

/// `log 2` with absolute error below `2^-bits`.
pub fn ln2(bits: u64) -> RationalInterval {
    let mut cache = LN2_CACHE.lock().expect("ln2 cache poisoned");
    if let Some((b, iv)) = cache.as_ref() {
        if *b >= bits {
            return iv.round_abs(bits as i64 + 2);
        }
    }
    let target = bits.max(256);
    let iv = ln2_compute(target);
    *cache = Some((target, iv.clone()));
    iv.round_abs(bits as i64 + 2)
}

/// Natural log of a positive rational with absolute error below `2^-bits`.
pub(crate) fn log_rational(x: &BigRational, bits: u64) -> RationalInterval {
    assert!(x.is_positive(), "log of a nonpositive rational");
    if x.is_one() {
        return RationalInterval::zero();
    }
    let e = floor_log2(x);
    let m = x * pow2_rat(-e);
    let w = bits as i64 + 6;
    let grid = RationalInterval::point(m).round_abs(w);
    let (m_lo, m_hi) = (grid.lo().clone(), grid.hi().clone());
    let one = BigRational::one();
    let z = (&m_lo - &one) / (&m_lo + &one);
    let at = atanh_small(&z, bits + 4).scale(&rat(2, 1));
    // log(m_hi) - log(m_lo) <= (m_hi - m_lo) / m_lo
    let slack = (&m_hi - &m_lo) / &m_lo;
    let log_m = RationalInterval::new(at.lo().clone(), at.hi() + slack);
    let extra = 64 - e.unsigned_abs().leading_zeros() as u64;
    let scaled_ln2 = ln2(bits + extra + 4).scale(&BigRational::from_integer(e.into()));
    (&scaled_ln2 + &log_m).round_abs(bits as i64 + 2)
}

/// Natural log of an interval with positive lower endpoint.
pub(crate) fn log_interval(x: &RationalInterval, bits: u64) -> Result<RationalInterval> {
    if !x.is_positive() {
        return Err(Error::NonPositiveInput(format!("log of [{}, {}]", x.lo(), x.hi())));
    }
    if x.is_point() {
        return Ok(log_rational(x.lo(), bits));
    }
    let lo = log_rational(x.lo(), bits);
    let hi = log_rational(x.hi(), bits);
    Ok(RationalInterval::new(lo.lo().clone(), hi.hi().clone()))
}

/// Natural log of a positive integer of any size; argument reduction uses the
/// bit length, so the cost is independent of the number of digits beyond one
/// shift.
pub fn log_integer(n: &BigInt, bits: u64) -> RationalInterval {
    assert!(n.is_positive(), "log of a nonpositive integer");
    let len = n.bits();
    let keep = bits + 16;
    if len <= keep {
        return log_rational(&BigRational::from_integer(n.clone()), bits);
    }
    let shift = len - keep;
    let top = n >> shift;
    let lo = BigRational::from_integer(top.clone()) * pow2_rat(shift as i64);
    let hi = BigRational::from_integer(top + 1u32) * pow2_rat(shift as i64);
    log_interval(&RationalInterval::new(lo, hi), bits).expect("positive")
}

/// Natural log, certified, with width at most `tol`.
pub fn log_enclosure(x: &RationalInterval, tol: &BigRational) -> Result<RationalInterval> {
    check_tol(tol)?;
    if !x.is_positive() {
        return Err(Error::NonPositiveInput(format!("log of [{}, {}]", x.lo(), x.hi())));
    }
    if x.is_point() && x.lo().is_one() {
        return Ok(RationalInterval::zero());
    }
    refine(tol, "log", |bits| log_interval(x, bits))
}

/// `exp(r)` with relative error about `2^-bits`.
fn exp_point(r: &BigRational, bits: u64) -> RationalInterval {
    if r.is_zero() {
        return RationalInterval::from_integer(1);
    }
    // exp(r) = exp(r / 2^s)^(2^s) with |r / 2^s| <= 1/4
    let s = (floor_log2(r) + 3).max(0) as u64;
    let w = (bits + s + 12) as i64;
    let y = RationalInterval::point(r * pow2_rat(-(s as i64))).round_abs(w);
    let ay = y.lo().abs().max(y.hi().abs());
    let eps = pow2_rat(-w);
    let mut sum = RationalInterval::from_integer(1);
    let mut term = RationalInterval::from_integer(1);
    let mut bound = BigRational::one();
    let mut j: i64 = 1;
    loop {
        term = (&term * &y).div_integer(&BigInt::from(j)).round_abs(w);
        sum = (&sum + &term).round_abs(w);
        bound = RationalInterval::point(&bound * &ay / BigRational::from_integer(j.into())).round_abs(w + 8).hi().clone();
        j += 1;
        if bound < eps {
            // |remainder| <= 2 |y|^j / j!  for |y| <= 1/4
            let rem = &bound * &ay * rat(2, 1) / BigRational::from_integer(j.into());
            sum = RationalInterval::new(sum.lo() - &rem, sum.hi() + &rem);
            break;
        }
    }
    for _ in 0..s {
        sum = (&sum * &sum).round_rel(bits + s + 12);
    }
    sum
}

pub(crate) fn exp_interval(x: &RationalInterval, bits: u64) -> RationalInterval {
    // exp(y) <= 2^y for y <= 0, so arguments below -(bits + 1) are only bounded above
    let cutoff = BigRational::from_integer(-BigInt::from(bits + 1));
    if x.hi() <= &cutoff {
        return RationalInterval::new(BigRational::zero(), pow2_rat(-(bits as i64) - 1));
    }
    if x.is_point() {
        return exp_point(x.lo(), bits);
    }
    let lo = if x.lo() < &cutoff { BigRational::zero() } else { exp_point(x.lo(), bits).lo().clone() };
    let hi = exp_point(x.hi(), bits);
    RationalInterval::new(lo, hi.hi().clone())
}

pub fn exp_enclosure(x: &RationalInterval, tol: &BigRational) -> Result<RationalInterval> {
    check_tol(tol)?;
    let growth = x.hi().to_f64().unwrap_or(0.0).max(0.0) / std::f64::consts::LN_2;
    if growth > 1e6 {
        return Err(Error::InvalidArgument("exponent too large".into()));
    }
    let extra = growth.ceil() as u64;
    refine(tol, "exp", |bits| Ok(exp_interval(x, bits + extra)))
}

/// Exact value of `u^e` when it is rational.
fn exact_rational_power(u: &BigInt, e: &BigRational) -> Option<BigRational> {
    let a = e.numer();
    let b = e.denom().to_u32()?;
    let a_abs = a.magnitude().to_u32()?;
    if (a_abs as u64) * u.bits() > 1 << 16 {
        return None;
    }
    let v = u.pow(a_abs);
    let root = v.nth_root(b);
    if root.pow(b) != v {
        return None;
    }
    Some(if a.is_negative() {
        BigRational::new(BigInt::one(), root)
    } else {
        BigRational::from_integer(root)
    })
}

pub(crate) fn pow_interval(u: &BigInt, e: &BigRational, bits: u64) -> RationalInterval {
    if let Some(v) = exact_rational_power(u, e) {
        return RationalInterval::point(v);
    }
    let l = log_integer(u, bits + 16);
    exp_interval(&l.scale(e).round_abs(bits as i64 + 16), bits + 4)
}

/// `u^e` for a positive integer `u` and rational exponent `e`.
pub fn rational_pow_enclosure(u: &BigInt, e: &BigRational, tol: &BigRational) -> Result<RationalInterval> {
    check_tol(tol)?;
    if !u.is_positive() {
        return Err(Error::NonPositiveInput(format!("base {u}")));
    }
    if u.is_one() || e.is_zero() {
        return Ok(RationalInterval::from_integer(1));
    }
    if let Some(v) = exact_rational_power(u, e) {
        return Ok(RationalInterval::point(v));
    }
    let growth = (e * BigRational::from_integer(u.bits().into())).to_f64().unwrap_or(0.0).max(0.0);
    let extra = growth.ceil() as u64;
    refine(tol, "rational power", |bits| Ok(pow_interval(u, e, bits + extra)))
}

/// `atan(1/k)` from the alternating series; successive partial sums bracket the value.
fn atan_inv(k: i64, bits: u64) -> RationalInterval {
    let k2 = BigInt::from(k * k);
    let eps = pow2_rat(-(bits as i64) - 4);
    let mut den = BigInt::from(k);
    let mut sum = BigRational::zero();
    let mut j: i64 = 0;
    loop {
        let term = BigRational::new(BigInt::one(), &den * BigInt::from(2 * j + 1));
        let next = if j % 2 == 0 { &sum + &term } else { &sum - &term };
        if term < eps {
            let (lo, hi) = if sum <= next { (sum, next) } else { (next, sum) };
            return RationalInterval::new(lo, hi);
        }
        sum = next;
        den *= &k2;
        j += 1;
    }
}

/// `pi = 16 atan(1/5) - 4 atan(1/239)`, intersected with `[3, 4]`.
pub fn pi_enclosure(bits: u64) -> RationalInterval {
    let a = atan_inv(5, bits + 6).scale(&rat(16, 1));
    let b = atan_inv(239, bits + 6).scale(&rat(4, 1));
    let pi = (&a - &b).round_abs(bits as i64 + 2);
    pi.intersect(&RationalInterval::new(rat(3, 1), rat(4, 1))).expect("pi lies in [3, 4]")
}

/// The Lévy constant `pi^2 / (12 log 2)` from the closed form.
pub fn levy_constant(bits: u64) -> RationalInterval {
    let pi = pi_enclosure(bits + 8);
    let den = ln2(bits + 8).scale(&rat(12, 1));
    (&pi * &pi).div(&den).expect("log 2 > 0").round_abs(bits as i64 + 2)
}

/// Closed-form Lévy constant at width at most `tol`.
pub fn levy_constant_enclosure(tol: &BigRational) -> Result<RationalInterval> {
    check_tol(tol)?;
    refine(tol, "levy constant", |bits| Ok(levy_constant(bits)))
}

/// Quadrature bounds for `∫_0^1 -log(x) / ((1+x) log 2) dx` on a mesh of `n`
/// cubically graded cells.
///
/// `g(x) = -log(x) / (1+x)` is positive, decreasing and convex on `(0, 1]`,
/// so on every cell the midpoint rule is a lower bound and the trapezoid
/// rule an upper bound. On `[0, eps]` with `eps = n^-3`,
/// `eps (1 - log eps) / (1 + eps) <= ∫ g <= eps (1 - log eps)`.
fn gauss_kuzmin_mesh(n: u32, bits: u64) -> RationalInterval {
    let nn = BigInt::from(n);
    let n3 = BigInt::from(n).pow(3);
    let node = |i: u32| BigRational::new(BigInt::from(i).pow(3), n3.clone());
    let ln_n = log_integer(&nn, bits);
    let one = BigRational::one();
    // g at the nodes: -log((i/n)^3)/(1 + x_i) = 3 (log n - log i) / (1 + x_i)
    let g_node: Vec<RationalInterval> = (1..=n)
        .map(|i| {
            let x = node(i);
            let l = log_integer(&BigInt::from(i), bits);
            (&ln_n - &l).scale(&(rat(3, 1) / (&one + &x))).round_abs(bits as i64)
        })
        .collect();
    let mut lower = BigRational::zero();
    let mut upper = BigRational::zero();
    for i in 1..n {
        let (a, b) = (node(i), node(i + 1));
        let h = &b - &a;
        let mid = (&a + &b) / rat(2, 1);
        let g_mid = log_rational(&mid, bits).scale(&(-(&one + &mid).recip())).round_abs(bits as i64);
        lower += &h * g_mid.lo();
        let ga = &g_node[(i - 1) as usize];
        let gb = &g_node[i as usize];
        upper += &h * (ga.hi() + gb.hi()) / rat(2, 1);
    }
    let eps = BigRational::new(BigInt::one(), n3);
    // 1 - log eps = 1 + 3 log n
    let t = ln_n.scale(&rat(3, 1)) + RationalInterval::from_integer(1);
    let tail_hi = &eps * t.hi();
    let tail_lo = &eps * t.lo() / (&one + &eps);
    let body = RationalInterval::new(lower + tail_lo, upper + tail_hi);
    body.div(&ln2(bits + 4)).expect("log 2 > 0").round_abs(bits as i64 + 2)
}

/// Certified enclosure of `∫_0^1 -log x dν_Gauss`, computed by quadrature
/// without reference to the closed form.
pub fn gauss_kuzmin_log_integral(tol: &BigRational) -> Result<RationalInterval> {
    check_tol(tol)?;
    let bits = tol_bits(tol) + 12;
    // the bracket width decays like 5 / n^2
    let guess = (5.0 / tol.to_f64().unwrap_or(1.0)).sqrt().min(8192.0);
    let mut n = 8u32;
    while (n as f64) * 2.0 <= guess {
        n *= 2;
    }
    while n <= 1 << 14 {
        let iv = gauss_kuzmin_mesh(n, bits + 32 - n.leading_zeros() as u64);
        if &iv.width() <= tol {
            return Ok(iv);
        }
        n *= 2;
    }
    Err(Error::Precision(format!("Gauss–Kuzmin quadrature: tolerance {tol} not reached")))
}
