mod common;

use common::{rat, ten_pow_neg, Oracle};
use littlewood_core::numerics::{
    exp_enclosure, gauss_kuzmin_log_integral, levy_constant_enclosure, ln2, log_enclosure, log_integer,
    pi_enclosure, rational_pow_enclosure, sqrt_enclosure,
};
use littlewood_core::{Error, RationalInterval};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;

#[test]
fn spec_examples() {
    let o = Oracle::with_digits(60);
    let slack = o.pow2_neg(180);
    let iv = sqrt_enclosure(&BigInt::from(2), &ten_pow_neg(3)).unwrap();
    assert!(iv.width() <= ten_pow_neg(3));
    let v = o.sqrt(&o.i64(2));
    assert!(o.contains(&iv, &v, &slack));
    let iv = sqrt_enclosure(&BigInt::from(50), &ten_pow_neg(6)).unwrap();
    let v = o.sqrt(&o.i64(50));
    assert!(o.contains(&iv, &v, &slack));
    let iv = sqrt_enclosure(&BigInt::from(5), &rat(1, 1)).unwrap();
    assert!(iv.contains_interval(&RationalInterval::point(rat(9, 4))) || iv.width() <= rat(1, 1));
    assert!(matches!(sqrt_enclosure(&BigInt::from(49), &rat(1, 1)), Err(Error::PerfectSquare(_))));

    assert_eq!(log_enclosure(&RationalInterval::from_integer(1), &ten_pow_neg(9)).unwrap(), RationalInterval::zero());
    let iv = log_enclosure(&RationalInterval::from_integer(12), &ten_pow_neg(9)).unwrap();
    let v = o.ln(&o.i64(12));
    assert!(iv.width() <= ten_pow_neg(9) && o.contains(&iv, &v, &slack));
    let big = BigInt::from(1) << 100u32;
    let iv = log_enclosure(&RationalInterval::from_integer(big.clone()), &ten_pow_neg(6)).unwrap();
    let v = o.mul(&o.i64(100), &o.ln(&o.i64(2)));
    assert!(o.contains(&iv, &v, &slack));
    assert!(matches!(log_enclosure(&RationalInterval::from_integer(0), &ten_pow_neg(3)), Err(Error::NonPositiveInput(_))));

    let e = rat(-25, 768);
    let iv = rational_pow_enclosure(&BigInt::from(1024), &e, &ten_pow_neg(6)).unwrap();
    let v = o.exp(&o.mul(&o.rational(&e, astro_float::RoundingMode::ToEven), &o.ln(&o.i64(1024))));
    assert!(o.contains(&iv, &v, &slack));
    assert!((o.to_f64(&v) - 0.798).abs() < 1e-3);
    assert_eq!(rational_pow_enclosure(&BigInt::from(4), &rat(1, 2), &ten_pow_neg(6)).unwrap(), RationalInterval::from_integer(2));
    assert_eq!(rational_pow_enclosure(&BigInt::from(1), &rat(7, 3), &ten_pow_neg(6)).unwrap(), RationalInterval::from_integer(1));
}

#[test]
fn constants_against_oracle() {
    let o = Oracle::with_digits(200);
    let slack = o.pow2_neg(650);
    let pi = o.pi();
    assert!(o.contains(&pi_enclosure(600), &pi, &slack));
    let l2 = o.ln(&o.i64(2));
    assert!(o.contains(&ln2(600), &l2, &slack));
    let levy = o.div(&o.mul(&pi, &pi), &o.mul(&o.i64(12), &l2));
    let iv = levy_constant_enclosure(&ten_pow_neg(100)).unwrap();
    assert!(o.contains(&iv, &levy, &slack));
}

#[test]
fn gauss_kuzmin_contains_closed_form() {
    let o = Oracle::with_digits(60);
    let slack = o.pow2_neg(180);
    let pi = o.pi();
    let l2 = o.ln(&o.i64(2));
    let levy = o.div(&o.mul(&pi, &pi), &o.mul(&o.i64(12), &l2));
    for k in [2, 3, 4] {
        let iv = gauss_kuzmin_log_integral(&ten_pow_neg(k)).unwrap();
        assert!(iv.width() <= ten_pow_neg(k));
        assert!(o.contains(&iv, &levy, &slack), "tol 1e-{k}: {iv}");
    }
    let coarse = gauss_kuzmin_log_integral(&rat(10, 1)).unwrap();
    assert!(o.contains(&coarse, &levy, &slack));
}

#[test]
fn random_compositions_contain_oracle() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let o = Oracle::with_digits(200);
    let slack = o.pow2_neg(500);
    let tol = ten_pow_neg(40);
    for i in 0..500 {
        let (iv, v, trace) = common::random_composition(&mut rng, &o, &tol);
        assert!(o.contains(&iv, &v, &slack), "case {i}: {trace} -> {iv}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn log_refines_monotonically(n in 2u64..1_000_000_000, d in 1u64..1_000_000) {
        let x = RationalInterval::point(BigRational::new(n.into(), d.into()));
        let o = Oracle::with_digits(80);
        let v = o.ln(&o.rational(x.lo(), astro_float::RoundingMode::ToEven));
        let slack = o.pow2_neg(250);
        let mut prev: Option<RationalInterval> = None;
        for k in [3u32, 10, 25, 60] {
            let iv = log_enclosure(&x, &ten_pow_neg(k)).unwrap();
            prop_assert!(iv.width() <= ten_pow_neg(k));
            prop_assert!(o.contains(&iv, &v, &slack));
            if let Some(p) = &prev {
                prop_assert!(p.overlaps(&iv));
            }
            prev = Some(iv);
        }
    }

    #[test]
    fn exp_log_round_trip(n in -2000i64..2000, d in 100i64..1000) {
        let x = RationalInterval::point(rat(n, d));
        let e = exp_enclosure(&x, &ten_pow_neg(40)).unwrap();
        let back = log_enclosure(&e, &ten_pow_neg(25)).unwrap();
        prop_assert!(back.contains(x.lo()));
    }

    #[test]
    fn log_integer_matches_oracle(digits in 1usize..300, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let s: String = (0..digits).map(|i| char::from(b'0' + if i == 0 { rng.gen_range(1..10) } else { rng.gen_range(0..10) })).collect();
        let n: BigInt = s.parse().unwrap();
        let o = Oracle::with_digits(400);
        let nv = o.int(&n);
        let v = o.ln(&nv);
        let slack = o.pow2_neg(300);
        let iv = log_integer(&n, 200);
        prop_assert!(iv.width() <= BigRational::new(1.into(), BigInt::from(1) << 199u32));
        prop_assert!(o.contains(&iv, &v, &slack));
    }
}
