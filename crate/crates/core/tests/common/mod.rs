//! Independent multiprecision float oracle (astro-float) and small helpers.
#![allow(dead_code)]

use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use littlewood_core::{QuadraticSurd, RationalInterval};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

const RM: RoundingMode = RoundingMode::ToEven;

pub struct Oracle {
    pub p: usize,
    cc: std::cell::RefCell<Consts>,
}

/// Binary precision comfortably above `digits` decimal digits.
pub fn bits_for_digits(digits: usize) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64
}

impl Oracle {
    pub fn with_digits(digits: usize) -> Self {
        Oracle { p: bits_for_digits(digits), cc: std::cell::RefCell::new(Consts::new().expect("constants cache")) }
    }

    pub fn int(&self, n: &BigInt) -> BigFloat {
        // exact: the parse precision covers every bit of n
        let p = self.p.max(n.bits() as usize + 64);
        BigFloat::parse(&n.to_string(), Radix::Dec, p, RM, &mut self.cc.borrow_mut())
    }

    pub fn i64(&self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.p)
    }

    pub fn rational(&self, r: &BigRational, rm: RoundingMode) -> BigFloat {
        let n = self.int(r.numer());
        let d = self.int(r.denom());
        n.div(&d, self.p, rm)
    }

    pub fn surd(&self, x: &QuadraticSurd) -> BigFloat {
        let root = self.int(x.d()).sqrt(self.p, RM);
        let num = self.int(x.p()).add(&root, self.p, RM);
        num.div(&self.int(x.q()), self.p, RM)
    }

    pub fn ln(&self, x: &BigFloat) -> BigFloat {
        x.ln(self.p, RM, &mut self.cc.borrow_mut())
    }

    pub fn exp(&self, x: &BigFloat) -> BigFloat {
        x.exp(self.p, RM, &mut self.cc.borrow_mut())
    }

    pub fn pi(&self) -> BigFloat {
        self.cc.borrow_mut().pi(self.p, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.p, RM)
    }

    /// `n <= x < n + 1`.
    pub fn floor_is(&self, x: &BigFloat, n: &BigInt) -> bool {
        let lo = self.int(n);
        let hi = self.int(&(n + 1u32));
        cmp(&lo, x) != Ordering::Greater && cmp(x, &hi) == Ordering::Less
    }

    /// Whether `x` lies in `iv` widened by `slack` times `max(1, |x|)`.
    pub fn contains(&self, iv: &RationalInterval, x: &BigFloat, slack: &BigFloat) -> bool {
        let one = BigFloat::from_i64(1, self.p);
        let mag = if cmp(&x.abs(), &one) == Ordering::Greater { x.abs() } else { one };
        let pad = slack.mul(&mag, self.p, RM);
        let lo = self.rational(iv.lo(), RoundingMode::Down).sub(&pad, self.p, RoundingMode::Down);
        let hi = self.rational(iv.hi(), RoundingMode::Up).add(&pad, self.p, RoundingMode::Up);
        cmp(&lo, x) != Ordering::Greater && cmp(x, &hi) != Ordering::Greater
    }

    /// `2^-k` as a float.
    pub fn pow2_neg(&self, k: usize) -> BigFloat {
        let two = BigFloat::from_i64(2, self.p);
        let mut x = BigFloat::from_i64(1, self.p);
        for _ in 0..k {
            x = x.div(&two, self.p, RM);
        }
        x
    }

    pub fn to_f64(&self, x: &BigFloat) -> f64 {
        let s = x.format(Radix::Dec, RM, &mut self.cc.borrow_mut()).expect("format");
        s.parse().unwrap_or(f64::NAN)
    }
}

pub fn cmp(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b).expect("comparable floats") {
        x if x < 0 => Ordering::Less,
        0 => Ordering::Equal,
        _ => Ordering::Greater,
    }
}

pub fn s(p: i64, d: i64, q: i64) -> QuadraticSurd {
    QuadraticSurd::new(p, d, q).unwrap()
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn ten_pow_neg(k: u32) -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(10).pow(k))
}

pub fn is_square(n: i64) -> bool {
    n >= 0 && {
        let r = (n as f64).sqrt() as i64;
        (r - 1..=r + 1).any(|k| k >= 0 && k * k == n)
    }
}

/// Surds `(P + sqrt(D)) / Q` for nonsquare `D <= 50`, `phi` and a spread of
/// mixed samples with `Q | D - P^2` forced by scaling.
pub fn corpus() -> Vec<QuadraticSurd> {
    let mut v: Vec<QuadraticSurd> = (2..=50).filter(|&d| !is_square(d)).map(|d| QuadraticSurd::sqrt(d).unwrap()).collect();
    v.push(s(1, 5, 2));
    for (p, d, q) in [(3, 7, 2), (-5, 13, 3), (7, 19, -4), (2, 3, 5), (-11, 61, 6), (1, 94, 7), (17, 109, 10), (0, 1003, 3)] {
        v.push(s(p, d, q));
    }
    v
}

/// Checks the first `min(cap, m + 2l)` partial quotients of `cf` against a
/// float expansion of `x` carried out at `digits` decimal digits.
pub fn oracle_expansion_check(o: &Oracle, x: &QuadraticSurd, cf: &littlewood_core::PeriodicCF, cap: usize) -> Result<usize, String> {
    let terms = cap.min(cf.pre_len() + 2 * cf.period_len());
    let mut v = o.surd(x);
    for (k, a) in cf.quotients().take(terms).enumerate() {
        if !o.floor_is(&v, a) {
            return Err(format!("{x}: quotient {k} is {a}, oracle disagrees"));
        }
        let ai = o.int(a);
        let frac = o.sub(&v, &ai);
        v = o.div(&o.i64(1), &frac);
    }
    Ok(terms)
}

/// Preperiod and period lengths from the first repeated `(P, Q)` state of an
/// independent PQa iteration on `(P + sqrt D) / Q`.
pub fn state_cycle(x: &QuadraticSurd) -> (usize, usize) {
    use std::collections::HashMap;
    let d = x.d().clone();
    let s = d.sqrt();
    let (mut p, mut q) = (x.p().clone(), x.q().clone());
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut k = 0;
    loop {
        if let Some(&first) = seen.get(&(p.clone(), q.clone())) {
            return (first, k - first);
        }
        seen.insert((p.clone(), q.clone()), k);
        // floor((p + sqrt d) / q) using floor(sqrt d) with the sign of q
        let num = if q > BigInt::from(0) { &p + &s } else { &p + &s + 1u32 };
        let a = num_integer::Integer::div_floor(&num, &q);
        let np = &a * &q - &p;
        let nq = (&d - &np * &np) / &q;
        p = np;
        q = nq;
        k += 1;
    }
}

/// One random composition of interval operations evaluated alongside the
/// oracle. Returns the interval, the oracle value and a readable trace.
pub fn random_composition<R: rand::Rng>(rng: &mut R, o: &Oracle, tol: &BigRational) -> (RationalInterval, BigFloat, String) {
    use littlewood_core::numerics::{
        exp_enclosure, levy_constant_enclosure, log_enclosure, pi_enclosure, rational_pow_enclosure, sqrt_enclosure,
    };
    let leaf = |rng: &mut R, o: &Oracle| -> (RationalInterval, BigFloat, String) {
        match rng.gen_range(0..6) {
            0 | 1 => {
                let n: i64 = rng.gen_range(-1000..=1000);
                let d: i64 = rng.gen_range(1..=1000);
                let r = rat(n, d);
                let v = o.rational(&r, RM);
                (RationalInterval::point(r), v, format!("{n}/{d}"))
            }
            2 => {
                let mut d: i64 = rng.gen_range(2..10_000);
                while is_square(d) {
                    d += 1;
                }
                let v = o.sqrt(&o.i64(d));
                (sqrt_enclosure(&BigInt::from(d), tol).unwrap(), v, format!("sqrt({d})"))
            }
            3 => {
                let u: i64 = rng.gen_range(2..5000);
                let e = rat(rng.gen_range(-40..=40), rng.gen_range(1..=48));
                let ln = o.ln(&o.i64(u));
                let er = o.rational(&e, RM);
                let v = o.exp(&o.mul(&ln, &er));
                (rational_pow_enclosure(&BigInt::from(u), &e, tol).unwrap(), v, format!("{u}^({e})"))
            }
            4 => {
                let pi = o.pi();
                (pi_enclosure(littlewood_core::numerics::tol_bits(tol)), pi, "pi".into())
            }
            _ => {
                let pi = o.pi();
                let ln2 = o.ln(&o.i64(2));
                let v = o.div(&o.mul(&pi, &pi), &o.mul(&o.i64(12), &ln2));
                (levy_constant_enclosure(tol).unwrap(), v, "levy".into())
            }
        }
    };
    let (mut iv, mut v, mut trace) = leaf(rng, o);
    let steps = rng.gen_range(1..=6);
    for _ in 0..steps {
        let big = iv.hi().abs().max(iv.lo().abs()) > rat(1_000_000, 1);
        match rng.gen_range(0..7) {
            0 => {
                let (b, bv, bt) = leaf(rng, o);
                iv = &iv + &b;
                v = o.add(&v, &bv);
                trace = format!("({trace} + {bt})");
            }
            1 => {
                let (b, bv, bt) = leaf(rng, o);
                iv = &iv - &b;
                v = o.sub(&v, &bv);
                trace = format!("({trace} - {bt})");
            }
            2 if !big => {
                let (b, bv, bt) = leaf(rng, o);
                iv = &iv * &b;
                v = o.mul(&v, &bv);
                trace = format!("({trace} * {bt})");
            }
            3 => {
                let (b, bv, bt) = leaf(rng, o);
                if b.contains_zero() {
                    continue;
                }
                iv = iv.div(&b).unwrap();
                v = o.div(&v, &bv);
                trace = format!("({trace} / {bt})");
            }
            4 if iv.is_positive() => {
                let t0 = op_tol(tol, &(iv.width() * (BigRational::from_integer(4.into()) + iv.lo().recip())));
                iv = widening(&t0, |t| log_enclosure(&iv, t)).unwrap_or_else(|e| panic!("log of {trace}: {e}"));
                v = o.ln(&v);
                trace = format!("log({trace})");
            }
            5 if iv.hi() < &rat(40, 1) && iv.width() < rat(1, 1) => {
                let t0 = op_tol(tol, &(iv.width() * BigRational::from_integer(BigInt::from(1u64 << 62))));
                iv = widening(&t0, |t| exp_enclosure(&iv, t)).unwrap_or_else(|e| panic!("exp of {trace}: {e}"));
                v = o.exp(&v);
                trace = format!("exp({trace})");
            }
            6 if !big => {
                iv = iv.powi(2);
                v = o.mul(&v, &v);
                trace = format!("({trace})^2");
            }
            _ => {
                iv = -iv;
                v = v.neg();
                trace = format!("-{trace}");
            }
        }
        // keep endpoint sizes bounded between steps
        iv = iv.round_rel(littlewood_core::numerics::tol_bits(tol) + 64);
    }
    (iv, v, trace)
}

/// Retries with a looser tolerance while the argument is too wide for `tol`.
fn widening<F>(tol: &BigRational, f: F) -> littlewood_core::Result<RationalInterval>
where
    F: Fn(&BigRational) -> littlewood_core::Result<RationalInterval>,
{
    let mut t = tol.clone();
    loop {
        match f(&t) {
            Err(littlewood_core::Error::Precision(_)) if t < BigRational::from_integer(1u32.into()) => {
                t *= BigRational::from_integer((1u64 << 32).into());
            }
            r => return r,
        }
    }
}

fn op_tol(tol: &BigRational, floor: &BigRational) -> BigRational {
    if floor > tol {
        floor.clone()
    } else {
        tol.clone()
    }
}
