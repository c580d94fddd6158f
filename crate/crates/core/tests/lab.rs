mod common;

use common::{rat, s, ten_pow_neg, Oracle};
use littlewood_core::cf::reduce_to_purely_periodic;
use littlewood_core::lab::{
    build_record, quotient_bound_check, markov_bruteforce, markov_lower_bound, period_stats, sweep, LittlewoodRecord,
};
use littlewood_core::sequence::make_sequence;
use littlewood_core::{Error, PseudoAbsoluteSequence, QuadraticSurd, SequenceSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

fn tol() -> BigRational {
    ten_pow_neg(12)
}

/// Recomputes `||q alpha||`, `log q` and the product with the float oracle and
/// an independent valuation, and checks the record's enclosures against them.
fn oracle_check(alpha: &QuadraticSurd, seq_p: Option<u64>, r: &LittlewoodRecord) {
    // q alpha cancels against its integer part: carry twice the digits of q
    let o = &Oracle::with_digits(2 * r.q_digits + 80);
    let a = o.surd(&reduce_to_purely_periodic(alpha));
    let q = o.int(&r.q);
    let qa = o.mul(&q, &a);
    let fl = qa.floor();
    let frac = o.sub(&qa, &fl);
    let half = o.div(&o.i64(1), &o.i64(2));
    let err = if common::cmp(&frac, &half).is_lt() { frac } else { o.sub(&o.i64(1), &frac) };
    let slack = o.pow2_neg(200);
    assert!(o.contains(&r.err, &err, &slack), "n = {}: err {}", r.n, r.err);
    let log_q = o.ln(&q);
    assert!(o.contains(&r.log_q, &log_q, &slack), "n = {}", r.n);
    if let Some(p) = seq_p {
        let mut v = r.q.clone();
        let mut part = BigInt::one();
        while (&v % p).is_zero() {
            v /= p;
            part *= p;
        }
        assert_eq!(r.val, BigRational::new(BigInt::one(), part), "n = {}", r.n);
    }
    let val = o.rational(&r.val, astro_float::RoundingMode::ToEven);
    let prod = o.mul(&o.mul(&o.mul(&q, &err), &log_q), &val);
    assert!(o.contains(&r.product, &prod, &slack), "n = {}", r.n);
}

fn p_seq(p: u64) -> PseudoAbsoluteSequence {
    make_sequence(&SequenceSpec::p_power(p)).unwrap()
}

#[test]
fn sqrt2_record_u4() {
    let a = QuadraticSurd::sqrt(2).unwrap();
    let r = build_record(&a, &p_seq(2), 3, &tol()).unwrap();
    assert_eq!(r.u_n, BigInt::from(4));
    assert_eq!(r.q, BigInt::from(12));
    oracle_check(&a, Some(2), &r);
    // 12 (17 - 12 sqrt 2) log 12 / 4, computed by hand
    let hand = 3.0 * (17.0 - 12.0 * 2f64.sqrt()) * 12f64.ln();
    assert!((r.product.midpoint().to_f64().unwrap() - hand).abs() < 1e-9);
    assert!((hand - 0.2195).abs() < 1e-3);
}

#[test]
fn phi_three_adic_sweep() {
    let phi = s(1, 5, 2);
    let sw = sweep(&phi, &p_seq(3), 1, 8, &tol());
    assert!(sw.failures.is_empty(), "{:?}", sw.failures);
    assert_eq!(sw.records.len(), 8);
    for r in &sw.records {
        oracle_check(&phi, Some(3), r);
        assert!(r.val <= BigRational::new(BigInt::one(), r.u_n.clone()));
        assert!(r.checks.all(), "n = {}: {:?}", r.n, r.checks);
    }
    assert!(sw.summary.all_positive && sw.summary.all_checks);
}

#[test]
fn sqrt2_sweep_against_oracle() {
    let a = QuadraticSurd::sqrt(2).unwrap();
    let sw = sweep(&a, &p_seq(2), 1, 10, &tol());
    assert!(sw.failures.is_empty());
    for r in &sw.records {
        oracle_check(&a, Some(2), r);
        assert!(r.product.width() <= tol());
    }
    let c_hat = sw.summary.c_hat.unwrap();
    let c_lo = sw.summary.c_lo.unwrap();
    assert!(c_lo.is_positive() && c_hat.hi() / c_lo.lo() <= rat(100, 1));
}

#[test]
fn mixed_m_unit_sweep() {
    let a = QuadraticSurd::sqrt(3).unwrap();
    let seq = make_sequence(&SequenceSpec::round_robin(vec![2, 3])).unwrap();
    let sw = sweep(&a, &seq, 1, 8, &tol());
    assert!(sw.failures.is_empty(), "{:?}", sw.failures);
    assert_eq!(sw.records.len(), 8);
    for r in &sw.records {
        oracle_check(&a, None, r);
        assert!(r.checks.all());
    }
}

#[test]
fn records_serialize_without_floats() {
    let a = QuadraticSurd::sqrt(2).unwrap();
    let r = build_record(&a, &p_seq(2), 4, &tol()).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    fn walk(v: &serde_json::Value) {
        match v {
            serde_json::Value::Number(n) => assert!(n.is_u64() || n.is_i64(), "bare float {n}"),
            serde_json::Value::Array(a) => a.iter().for_each(walk),
            serde_json::Value::Object(m) => m.values().for_each(walk),
            _ => {}
        }
    }
    walk(&v);
    assert!(v["product"]["lo"].is_string() && v["product"]["hi"].is_string());
    assert_eq!(v["q"], "408");
}

#[test]
fn quotient_bound_examples_and_range() {
    let a = s(1, 2, 1);
    let r = quotient_bound_check(&a, 5).unwrap();
    assert_eq!(r.floor_t_alpha, BigInt::from(12));
    let r = quotient_bound_check(&s(1, 5, 2), 2).unwrap();
    assert_eq!(r.floor_t_alpha, BigInt::from(3));
    for t in 2..=40 {
        let r = quotient_bound_check(&a, t).unwrap();
        assert!(r.holds());
    }
    assert!(matches!(quotient_bound_check(&s(0, 2, 1), 2), Err(Error::HypothesisViolation(_))));
}

#[test]
fn markov_examples() {
    assert_eq!(markov_lower_bound(&s(0, 2, 1)), rat(1, 4));
    assert_eq!(markov_lower_bound(&s(1, 5, 2)), rat(1, 3));
    assert_eq!(markov_lower_bound(&s(0, 32, 1)), rat(1, 12));
    let m = markov_bruteforce(&s(0, 2, 1), 2000, &tol()).unwrap();
    assert_eq!(m.q, 2);
    assert!(m.exact.value_eq(&s(-6, 32, -1)));
    let o = Oracle::with_digits(40);
    let want = o.sub(&o.i64(6), &o.mul(&o.i64(4), &o.sqrt(&o.i64(2))));
    assert!(o.contains(&m.value, &want, &o.pow2_neg(100)));
    let m = markov_bruteforce(&s(1, 5, 2), 1000, &tol()).unwrap();
    assert!(m.value.lo() >= &rat(1, 3));
    assert!((m.value.midpoint().to_f64().unwrap() - 0.38197).abs() < 1e-2);
}

#[test]
fn period_stats_reports() {
    let a = QuadraticSurd::sqrt(2).unwrap();
    let seq = p_seq(2);
    let d0 = rat(25, 64);
    assert!(matches!(period_stats(&a, &seq, 3, &d0, &tol()), Err(Error::HypothesisViolation(_))));
    let o = Oracle::with_digits(60);
    let pi = o.pi();
    let levy = o.div(&o.mul(&pi, &pi), &o.mul(&o.i64(12), &o.ln(&o.i64(2))));
    for n in 4..=8 {
        let r = period_stats(&a, &seq, n, &d0, &tol()).unwrap();
        assert_eq!(r.kappa, rat(1536, 25));
        assert!(r.sandwich && r.upper_bound && r.lower_bound);
        assert!(o.contains(&r.gamma, &levy, &o.pow2_neg(150)));
        assert_eq!(r.unresolved, 0);
    }
    let r = period_stats(&a, &seq, 5, &rat(1, 2), &tol()).unwrap();
    assert_eq!(r.kappa, BigRational::from_integer(48.into()));
}
