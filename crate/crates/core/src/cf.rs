//! Periodic continued fractions of quadratic surds.
//!
//! The expansion runs the classical recurrence on states `(P_k, Q_k)` with
//! complete quotient `x_k = (P_k + sqrt(D)) / Q_k`:
//!
//! ```text
//! a_k = floor(x_k),  P_{k+1} = a_k Q_k - P_k,  Q_{k+1} = (D - P_{k+1}^2) / Q_k
//! ```
//!
//! A complete quotient is purely periodic exactly when it is reduced, so the
//! preperiod ends at the first reduced state and the period closes when that
//! state recurs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::RationalInterval;
use crate::numerics::tol_bits;
use crate::surd::{floor_with_root, is_reduced_state, isqrt_int, QuadraticSurd};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicCF {
    radicand: BigInt,
    preperiod: Vec<BigInt>,
    period: Vec<BigInt>,
    /// `(P_k, Q_k)` for `k < preperiod.len() + period.len()`.
    states: Vec<(BigInt, BigInt)>,
}

impl PeriodicCF {
    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn preperiod(&self) -> &[BigInt] {
        &self.preperiod
    }

    pub fn period(&self) -> &[BigInt] {
        &self.period
    }

    pub fn states(&self) -> &[(BigInt, BigInt)] {
        &self.states
    }

    pub fn pre_len(&self) -> usize {
        self.preperiod.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    fn wrap(&self, k: usize) -> usize {
        let m = self.pre_len();
        if k < m {
            k
        } else {
            m + (k - m) % self.period_len()
        }
    }

    /// Partial quotient `a_k`, unrolling the period.
    pub fn quotient(&self, k: usize) -> &BigInt {
        let m = self.pre_len();
        if k < m {
            &self.preperiod[k]
        } else {
            &self.period[(k - m) % self.period_len()]
        }
    }

    pub fn quotients(&self) -> impl Iterator<Item = &BigInt> + '_ {
        (0..).map(move |k| self.quotient(k))
    }

    pub fn state(&self, k: usize) -> &(BigInt, BigInt) {
        &self.states[self.wrap(k)]
    }

    /// The complete quotient `x_k`; `x_0` is the expanded value.
    pub fn complete_quotient(&self, k: usize) -> QuadraticSurd {
        let (p, q) = self.state(k);
        QuadraticSurd::from_state(p.clone(), self.radicand.clone(), q.clone())
    }

    pub fn value(&self) -> QuadraticSurd {
        self.complete_quotient(0)
    }

    pub fn max_quotient(&self) -> &BigInt {
        self.preperiod.iter().chain(&self.period).max().expect("period is nonempty")
    }

    /// Rewrites a purely periodic expansion `[overline(b_0, ..., b_{l-1})]` as
    /// `[b_0; overline(b_1, ..., b_{l-1}, b_0)]`, so that every expansion has a
    /// nonempty preperiod. Other expansions are returned unchanged.
    pub fn with_leading_term(&self) -> PeriodicCF {
        if self.pre_len() > 0 {
            return self.clone();
        }
        let l = self.period_len();
        let mut period: Vec<BigInt> = self.period[1..].to_vec();
        period.push(self.period[0].clone());
        let mut states = self.states.clone();
        states.push(self.states[0].clone());
        debug_assert_eq!(states.len(), l + 1);
        PeriodicCF { radicand: self.radicand.clone(), preperiod: vec![self.period[0].clone()], period, states }
    }

    /// JSON object `{"preperiod": [...], "period": [...]}` with exact integers.
    pub fn to_json(&self) -> String {
        let join = |v: &[BigInt]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        format!("{{\"preperiod\":[{}],\"period\":[{}]}}", join(&self.preperiod), join(&self.period))
    }
}

/// Expands `x` into its (minimal) eventually periodic continued fraction.
pub fn expand(x: &QuadraticSurd) -> PeriodicCF {
    let d = x.d().clone();
    let s = isqrt_int(&d);
    let mut p = x.p().clone();
    let mut q = x.q().clone();
    let mut preperiod = Vec::new();
    let mut states = Vec::new();
    let step = |p: &BigInt, q: &BigInt, a: &BigInt| -> (BigInt, BigInt) {
        let np = a * q - p;
        let nq = (&d - &np * &np) / q;
        (np, nq)
    };
    while !is_reduced_state(&p, &q, &s) {
        let a = floor_with_root(&p, &q, &s);
        let (np, nq) = step(&p, &q, &a);
        states.push((p, q));
        preperiod.push(a);
        p = np;
        q = nq;
    }
    let start = (p.clone(), q.clone());
    let mut period = Vec::new();
    loop {
        let a = floor_with_root(&p, &q, &s);
        let (np, nq) = step(&p, &q, &a);
        states.push((p, q));
        period.push(a);
        p = np;
        q = nq;
        if p == start.0 && q == start.1 {
            break;
        }
    }
    PeriodicCF { radicand: d, preperiod, period, states }
}

/// The first reduced complete quotient of `x`.
pub fn reduce_to_purely_periodic(x: &QuadraticSurd) -> QuadraticSurd {
    let cf = expand(x);
    let (p, q) = cf.state(cf.pre_len()).clone();
    QuadraticSurd::canonical(p, cf.radicand().clone(), q)
}

/// Numerators `p_k` and denominators `r_k` of the convergents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentTable {
    pub p: Vec<BigInt>,
    pub r: Vec<BigInt>,
}

/// Convergents `p_k / r_k` for `k = 0..=upto`.
pub fn convergents(cf: &PeriodicCF, upto: usize) -> ConvergentTable {
    let mut p: Vec<BigInt> = Vec::with_capacity(upto + 1);
    let mut r: Vec<BigInt> = Vec::with_capacity(upto + 1);
    for (k, a) in cf.quotients().take(upto + 1).enumerate() {
        // p_{-1} = 1, r_{-1} = 0
        let (pk, rk) = match k {
            0 => (a.clone(), BigInt::one()),
            1 => (a * &p[0] + 1u32, a.clone()),
            _ => (a * &p[k - 1] + &p[k - 2], a * &r[k - 1] + &r[k - 2]),
        };
        p.push(pk);
        r.push(rk);
    }
    ConvergentTable { p, r }
}

/// `(p_k, r_k, p_{k-1}, r_{k-1})` without storing the table.
pub fn convergent_pair(cf: &PeriodicCF, k: usize) -> (BigInt, BigInt, BigInt, BigInt) {
    let (mut p_prev, mut r_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut r) = (cf.quotient(0).clone(), BigInt::one());
    for j in 1..=k {
        let a = cf.quotient(j);
        let np = a * &p + &p_prev;
        let nr = a * &r + &r_prev;
        p_prev = std::mem::replace(&mut p, np);
        r_prev = std::mem::replace(&mut r, nr);
    }
    (p, r, p_prev, r_prev)
}

/// `|r_k x - p_k|` for the expanded value `x`.
#[derive(Clone, Debug)]
pub struct ApproximationError {
    pub k: usize,
    pub p: BigInt,
    pub r: BigInt,
    /// The exact value as a surd.
    pub exact: QuadraticSurd,
    /// True when the value is below 1/2, i.e. equals `||r_k x||`.
    pub is_nearest: bool,
    pub enclosure: RationalInterval,
}

/// Exact `|r_k x - p_k|` together with a certified enclosure of width at most `tol`.
///
/// The enclosure is computed as `1 / (x_{k+1} r_k + r_{k-1})`, which avoids the
/// cancellation in the direct difference.
pub fn exact_error(cf: &PeriodicCF, k: usize, tol: &BigRational) -> Result<ApproximationError> {
    let (p, r, _, r_prev) = convergent_pair(cf, k);
    let x = cf.value();
    let direct = QuadraticSurd::canonical(x.p() * &r - &p * x.q(), x.d() * &r * &r, x.q().clone());
    let exact = if k % 2 == 0 { direct } else { direct.neg() };
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let is_nearest = exact.cmp_rational(&half).is_lt();
    let enclosure = error_enclosure(cf, k, &r, &r_prev, tol)?;
    Ok(ApproximationError { k, p, r, exact, is_nearest, enclosure })
}

pub(crate) fn error_enclosure(
    cf: &PeriodicCF,
    k: usize,
    r: &BigInt,
    r_prev: &BigInt,
    tol: &BigRational,
) -> Result<RationalInterval> {
    let mut bits = tol_bits(tol) + 24;
    for _ in 0..10 {
        let next = cf.complete_quotient(k + 1).enclosure_rel(bits + 8);
        let den = next.mul_integer(r) + RationalInterval::from_integer(r_prev.clone());
        let iv = den.recip()?.round_rel(bits);
        if &iv.width() <= tol {
            return Ok(iv);
        }
        bits *= 2;
    }
    Err(Error::Precision(format!("approximation error at k = {k}")))
}

/// The purely periodic numbers `x_i = [0; overline(b_i, ..., b_l, b_1, ..., b_{i-1})]`
/// for every rotation of the period `b_1..b_l`.
///
/// Each `x_i` is the reciprocal of the complete quotient at which `b_i` is
/// read, `1 / x_k = (-P_k + sqrt(D)) / Q_{k-1}`.
pub fn shifts(cf: &PeriodicCF) -> Vec<QuadraticSurd> {
    let m = cf.pre_len();
    (0..cf.period_len()).map(|i| cf.complete_quotient(m + i).recip()).collect()
}

/// Value of `[pre_0; pre_1, ..., overline(period)]` by solving the fixed-point
/// equation of the period and applying the preperiod as a Möbius map.
pub fn evaluate(preperiod: &[BigInt], period: &[BigInt]) -> Result<QuadraticSurd> {
    if period.is_empty() || period.iter().any(|b| !b.is_positive()) {
        return Err(Error::InvalidArgument("period must be a nonempty list of positive integers".into()));
    }
    if preperiod.iter().skip(1).any(|b| !b.is_positive()) {
        return Err(Error::InvalidArgument("partial quotients after the first must be positive".into()));
    }
    // [[a, b], [c, e]] = prod [[b_i, 1], [1, 0]]; y = (a y + b) / (c y + e)
    let mat = |seq: &[BigInt]| {
        let (mut a, mut b, mut c, mut e) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
        for t in seq {
            let na = &a * t + &b;
            let nc = &c * t + &e;
            b = std::mem::replace(&mut a, na);
            e = std::mem::replace(&mut c, nc);
        }
        (a, b, c, e)
    };
    let (a, b, c, e) = mat(period);
    let diff = &a - &e;
    let disc = &diff * &diff + BigInt::from(4) * &b * &c;
    let y = QuadraticSurd::new(diff, disc, BigInt::from(2) * &c)?;
    if preperiod.is_empty() {
        return Ok(y);
    }
    let (a, b, c, e) = mat(preperiod);
    // x = (a y + b) / (c y + e) with y = (P + sqrt D) / Q
    let (yp, yd, yq) = (y.p(), y.d(), y.q());
    let num0 = &a * yp + &b * yq;
    let den0 = &c * yp + &e * yq;
    let den = &den0 * &den0 - &c * &c * yd;
    let n0 = &num0 * &den0 - &a * &c * yd;
    let det = &a * &e - &b * &c;
    let coeff = yq * det;
    let rad = &coeff * &coeff * yd;
    if coeff.is_positive() {
        QuadraticSurd::new(n0, rad, den)
    } else {
        QuadraticSurd::new(-n0, rad, -den)
    }
}

/// Convergent order `m + l - 2` preceding the last partial quotient of the
/// first period instance.
pub fn distinguished_index(pre_len: usize, period_len: usize) -> Result<usize> {
    (pre_len + period_len).checked_sub(2).ok_or(Error::DegeneratePeriod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn s(p: i64, d: i64, q: i64) -> QuadraticSurd {
        QuadraticSurd::new(p, d, q).unwrap()
    }

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|a| i64::try_from(a).unwrap()).collect()
    }

    #[test]
    fn expansion_examples() {
        let cf = expand(&s(0, 2, 1));
        assert_eq!((ints(cf.preperiod()), ints(cf.period())), (vec![1], vec![2]));
        let cf = expand(&s(1, 5, 2));
        assert_eq!((ints(cf.preperiod()), ints(cf.period())), (vec![], vec![1]));
        assert_eq!(cf.states().len(), 1);
        let cf = expand(&s(0, 50, 1));
        assert_eq!((ints(cf.preperiod()), ints(cf.period())), (vec![7], vec![14]));
        let cf = expand(&s(0, 32, 1));
        assert_eq!((ints(cf.preperiod()), ints(cf.period())), (vec![5], vec![1, 1, 1, 10]));
        assert_eq!(cf.to_json(), "{\"preperiod\":[5],\"period\":[1,1,1,10]}");
    }

    #[test]
    fn negative_denominator_expansion() {
        // -sqrt(2) = [-2; 1, 1, 2, 2, ...]
        let cf = expand(&s(0, 2, -1));
        assert_eq!(ints(cf.preperiod()), vec![-2, 1, 1]);
        assert_eq!(ints(cf.period()), vec![2]);
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_to_purely_periodic(&s(0, 2, 1)), s(1, 2, 1));
        assert_eq!(reduce_to_purely_periodic(&s(1, 5, 2)), s(1, 5, 2));
        let r = reduce_to_purely_periodic(&s(0, 32, 1));
        assert_eq!(r, s(5, 32, 7));
        assert!(r.is_reduced());
        assert_eq!(expand(&r).pre_len(), 0);
    }

    #[test]
    fn convergent_examples() {
        let t = convergents(&expand(&s(0, 32, 1)), 3);
        assert_eq!(ints(&t.r), vec![1, 1, 2, 3]);
        assert_eq!(ints(&t.p), vec![5, 6, 11, 17]);
        let t = convergents(&expand(&s(0, 2, 1)), 3);
        assert_eq!(ints(&t.r), vec![1, 2, 5, 12]);
        assert_eq!(ints(&t.p), vec![1, 3, 7, 17]);
        let t = convergents(&expand(&s(3, 7, 1)), 0);
        assert_eq!((ints(&t.r), ints(&t.p)), (vec![1], vec![5]));
        let cf = expand(&s(0, 32, 1));
        let (p, r, pp, rp) = convergent_pair(&cf, 3);
        assert_eq!((p, r, pp, rp), (17.into(), 3.into(), 11.into(), 2.into()));
    }

    #[test]
    fn exact_error_examples() {
        let tol = BigRational::new(1.into(), BigInt::from(10).pow(12));
        let e = exact_error(&expand(&s(0, 2, 1)), 1, &tol).unwrap();
        assert!(e.exact.value_eq(&s(-3, 8, -1)), "{}", e.exact); // 3 - 2 sqrt 2
        assert!(e.is_nearest);
        let v = 3.0 - 2.0 * 2f64.sqrt();
        let lo = e.enclosure.lo().to_f64().unwrap();
        assert!((lo - v).abs() < 1e-15 && e.enclosure.width() <= tol);
        let e = exact_error(&expand(&s(1, 5, 2)), 0, &tol).unwrap();
        assert!(!e.is_nearest);
        assert!(e.exact.value_eq(&s(-1, 5, 2)));
        let e = exact_error(&expand(&s(0, 32, 1)), 3, &tol).unwrap();
        assert!(e.exact.value_eq(&s(-17, 288, -1)));
        assert!((e.enclosure.lo().to_f64().unwrap() - 0.029437251522859).abs() < 1e-12);
        assert!(e.enclosure.width() <= tol);
    }

    #[test]
    fn shift_examples() {
        let sh = shifts(&expand(&s(0, 2, 1)));
        assert_eq!(sh.len(), 1);
        assert!(sh[0].value_eq(&s(-1, 2, 1)));
        let sh = shifts(&expand(&s(1, 5, 2)));
        assert!(sh[0].value_eq(&s(-1, 5, 2)));
        let sh = shifts(&expand(&s(0, 32, 1)));
        assert_eq!(sh.len(), 4);
        // x_4 = [0; 10, 1, 1, 1, ...] = 1 / (5 + sqrt 32)
        assert!(sh[3].value_eq(&s(5, 32, 1).recip()));
        assert!((sh[3].to_f64() - 0.0938363213560543).abs() < 1e-12);
        for x in [s(8, 128, 1), s(3, 7, 2), s(0, 13, 1), s(-3, 2, 2)] {
            let cf = expand(&x);
            let per: Vec<f64> = cf.period().iter().map(|b| b.to_f64().unwrap()).collect();
            for (i, sh) in shifts(&cf).iter().enumerate() {
                let v = (0..60).rev().fold(0.0, |v, k| 1.0 / (per[(i + k) % per.len()] + v));
                assert!((sh.to_f64() - v).abs() < 1e-12, "{x}: shift {i}");
            }
        }
    }

    #[test]
    fn evaluate_reconstructs_values() {
        for x in [s(0, 2, 1), s(1, 5, 2), s(0, 32, 1), s(-3, 2, 2), s(3, 27, 9), s(0, 2, -1)] {
            let cf = expand(&x);
            let y = evaluate(cf.preperiod(), cf.period()).unwrap();
            assert!(y.value_eq(&x), "{x} vs {y}");
        }
        assert!(evaluate(&[], &[]).is_err());
    }

    #[test]
    fn leading_term_normalization() {
        let cf = expand(&s(1, 2, 1)).with_leading_term();
        assert_eq!((ints(cf.preperiod()), ints(cf.period())), (vec![2], vec![2]));
        let cf = expand(&s(5, 32, 7)).with_leading_term();
        assert_eq!((ints(cf.preperiod()), ints(cf.period())), (vec![1], vec![1, 1, 10, 1]));
        assert!(evaluate(cf.preperiod(), cf.period()).unwrap().value_eq(&s(5, 32, 7)));
        for k in 0..12 {
            assert!(cf.complete_quotient(k).floor() == *cf.quotient(k));
        }
    }

    #[test]
    fn distinguished_index_rules() {
        assert_eq!(distinguished_index(1, 4), Ok(3));
        assert_eq!(distinguished_index(0, 3), Ok(1));
        assert_eq!(distinguished_index(0, 1), Err(Error::DegeneratePeriod));
        assert_eq!(distinguished_index(1, 1), Ok(0));
    }
}
