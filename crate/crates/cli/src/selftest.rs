//! Small-scale invariant suite over every module, plus golden regression files.

use std::path::Path;
use std::time::Instant;

use littlewood_core::cf::{convergents, evaluate, exact_error, expand, reduce_to_purely_periodic, shifts};
use littlewood_core::lab::{quotient_bound_check, markov_bruteforce, markov_lower_bound};
use littlewood_core::numerics::{
    exp_enclosure, gauss_kuzmin_log_integral, levy_constant, log_enclosure, sqrt_enclosure,
};
use littlewood_core::sequence::make_sequence;
use littlewood_core::{QuadraticSurd, RationalInterval, SequenceSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};

use crate::config::{parse_rational, ExperimentConfig, Flags};
use crate::output::jsonl_lines;

type Check = Result<String, String>;

pub struct Golden {
    pub file: &'static str,
    pub builtin: &'static str,
    pub command: &'static str,
    pub n_from: usize,
    pub n_to: usize,
}

pub const GOLDENS: [Golden; 2] = [
    Golden {
        file: "littlewood_sqrt2_p2_n1-12.jsonl",
        builtin: include_str!("../../../goldens/littlewood_sqrt2_p2_n1-12.jsonl"),
        command: "littlewood",
        n_from: 1,
        n_to: 12,
    },
    Golden {
        file: "stats_sqrt2_p2_n4-12.jsonl",
        builtin: include_str!("../../../goldens/stats_sqrt2_p2_n4-12.jsonl"),
        command: "stats",
        n_from: 4,
        n_to: 12,
    },
];

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn s(p: i64, d: i64, q: i64) -> QuadraticSurd {
    QuadraticSurd::new(p, d, q).expect("valid surd")
}

fn tol(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10).pow(k))
}

fn random_surd(rng: &mut impl Rng) -> QuadraticSurd {
    loop {
        let d: i64 = rng.gen_range(2..20_000);
        let p: i64 = rng.gen_range(-2000..2000);
        let q: i64 = rng.gen_range(1..300) * if rng.gen_bool(0.5) { 1 } else { -1 };
        if let Ok(x) = QuadraticSurd::new(p, d, q) {
            return x;
        }
    }
}

fn surds(quick: bool) -> Check {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let n = if quick { 500 } else { 5000 };
    for _ in 0..n {
        let x = random_surd(&mut rng);
        let f = BigRational::from_integer(x.floor());
        let iv = x.enclosure(64);
        ensure(iv.hi() >= &f && iv.lo() < &(&f + BigRational::one()), || format!("floor of {x}"))?;
        ensure(x.scale_by_integer(6).value_eq(&x.scale_by_integer(2).scale_by_integer(3)), || format!("scaling {x}"))?;
        ensure(x.to_string().parse::<QuadraticSurd>().as_ref() == Ok(&x), || format!("round trip {x}"))?;
        if x.is_reduced() {
            ensure(x.floor() >= BigInt::one(), || format!("reduced {x} has floor < 1"))?;
        }
    }
    ensure(s(1, 3, 3) == s(3, 27, 9), || "canonical form of (1+sqrt 3)/3".into())?;
    Ok(format!("{n} random surds"))
}

fn continued_fractions(quick: bool) -> Check {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let n = if quick { 100 } else { 1000 };
    for _ in 0..n {
        let x = random_surd(&mut rng);
        let cf = expand(&x);
        let back = evaluate(cf.preperiod(), cf.period()).map_err(|e| e.to_string())?;
        ensure(back.value_eq(&x), || format!("reconstruction of {x}"))?;
        ensure(cf.complete_quotient(cf.pre_len()).is_reduced(), || format!("period start of {x}"))?;
        ensure(cf.pre_len() == 0 || !cf.complete_quotient(cf.pre_len() - 1).is_reduced(), || format!("preperiod of {x}"))?;
        let t = convergents(&cf, 20);
        for k in 1..=20 {
            let det = &t.p[k] * &t.r[k - 1] - &t.p[k - 1] * &t.r[k];
            ensure(det.abs().is_one(), || format!("determinant at {k} for {x}"))?;
        }
        let e = exact_error(&cf, 3, &tol(20)).map_err(|e| e.to_string())?;
        ensure(e.enclosure.contains(&e.enclosure.midpoint()) && e.exact.is_positive(), || format!("error of {x}"))?;
        let per = cf.period();
        if per.len() > 24 {
            continue;
        }
        for (i, y) in shifts(&cf).iter().enumerate() {
            let mut rot = per[i..].to_vec();
            rot.extend_from_slice(&per[..i]);
            let z = evaluate(&[BigInt::from(0)], &rot).map_err(|e| e.to_string())?;
            ensure(y.value_eq(&z), || format!("shift {i} of {x}"))?;
        }
    }
    Ok(format!("{n} random expansions"))
}

fn numerics(quick: bool) -> Check {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..if quick { 50 } else { 400 } {
        let d: i64 = rng.gen_range(2..1_000_000);
        if let Ok(iv) = sqrt_enclosure(&BigInt::from(d), &tol(30)) {
            let sq = iv.powi(2);
            ensure(sq.contains(&BigRational::from_integer(d.into())), || format!("sqrt({d})"))?;
        }
        let x = RationalInterval::point(BigRational::new(rng.gen_range(-3000..3000).into(), rng.gen_range(100..1000).into()));
        let e = exp_enclosure(&x, &tol(40)).map_err(|e| e.to_string())?;
        let back = log_enclosure(&e, &tol(20)).map_err(|e| e.to_string())?;
        ensure(back.contains(x.lo()), || format!("log exp {}", x.lo()))?;
    }
    let k = if quick { 3 } else { 5 };
    let gk = gauss_kuzmin_log_integral(&tol(k)).map_err(|e| e.to_string())?;
    ensure(gk.overlaps(&levy_constant(80)), || format!("quadrature {gk} misses the closed form"))?;
    Ok(format!("Gauss–Kuzmin mean {gk}"))
}

fn sequences(_quick: bool) -> Check {
    let p2 = make_sequence(&SequenceSpec::p_power(2)).map_err(|e| e.to_string())?;
    let rr = make_sequence(&SequenceSpec::round_robin(vec![2, 3])).map_err(|e| e.to_string())?;
    let want: Vec<BigInt> = [1, 2, 6, 12, 36].iter().map(|&v| BigInt::from(v)).collect();
    ensure(rr.terms(1, 5).map_err(|e| e.to_string())? == want, || "round-robin terms".into())?;
    ensure(make_sequence(&SequenceSpec::explicit([1, 2, 5])).is_err(), || "1, 2, 5 accepted".into())?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    for _ in 0..2000 {
        let q: u64 = rng.gen_range(1..1 << 40);
        let v = 1u64 << q.trailing_zeros();
        ensure(p2.valuation(&BigInt::from(q)).ok() == Some(BigRational::new(1.into(), v.into())), || format!("|{q}|_2"))?;
    }
    Ok("2000 valuations".into())
}

fn markov(quick: bool) -> Check {
    let a = s(0, 2, 1);
    let c = markov_lower_bound(&a);
    let m = markov_bruteforce(&a, if quick { 1000 } else { 10_000 }, &tol(12)).map_err(|e| e.to_string())?;
    ensure(m.q == 2 && m.exact.value_eq(&s(-6, 32, -1)) && m.value.lo() >= &c, || format!("minimum {} at {}", m.value, m.q))?;
    Ok(format!("min q||q sqrt2|| = {} >= {c}", m.value))
}

fn quotient_bound(quick: bool) -> Check {
    let alphas = [s(1, 2, 1), s(1, 5, 2), reduce_to_purely_periodic(&s(0, 3, 1)), reduce_to_purely_periodic(&s(0, 7, 1))];
    let t_max = if quick { 30 } else { 200 };
    for a in &alphas {
        for t in 2..=t_max {
            quotient_bound_check(a, t).map_err(|e| e.to_string())?;
        }
    }
    Ok(format!("t = 2..{t_max} for 4 surds"))
}

fn golden_config(g: &Golden) -> ExperimentConfig {
    let flags = Flags {
        alpha: Some("sqrt(2)".into()),
        seq: Some("p=2".into()),
        n_from: Some(g.n_from),
        n_to: Some(g.n_to),
        delta0: Some("25/64".into()),
        tol: Some("1e-12".into()),
        ..Flags::default()
    };
    ExperimentConfig::resolve(&flags).expect("golden config is valid")
}

/// Current output for a golden's configuration.
pub fn golden_lines(g: &Golden, threads: Option<usize>) -> Vec<String> {
    let mut cfg = golden_config(g);
    cfg.threads = threads;
    match g.command {
        "littlewood" => jsonl_lines(&crate::run_littlewood(&cfg).records),
        _ => jsonl_lines(&crate::run_stats(&cfg).0),
    }
}

fn diff(expected: &[&str], actual: &[String]) -> String {
    let mut out = Vec::new();
    for i in 0..expected.len().max(actual.len()) {
        let e = expected.get(i).copied();
        let a = actual.get(i).map(String::as_str);
        if e != a {
            out.push(format!("    line {}:\n    - {}\n    + {}", i + 1, e.unwrap_or("<missing>"), a.unwrap_or("<missing>")));
        }
        if out.len() == 3 {
            break;
        }
    }
    out.join("\n")
}

fn goldens(dir: Option<&Path>) -> Check {
    for g in &GOLDENS {
        let text = match dir {
            Some(d) => std::fs::read_to_string(d.join(g.file)).map_err(|e| format!("{}: {e}", g.file))?,
            None => g.builtin.to_string(),
        };
        let expected: Vec<&str> = text.lines().collect();
        let actual = golden_lines(g, None);
        ensure(expected == actual, || format!("{} differs:\n{}", g.file, diff(&expected, &actual)))?;
    }
    Ok(format!("{} golden files", GOLDENS.len()))
}

fn determinism(_quick: bool) -> Check {
    for g in &GOLDENS {
        let one = golden_lines(g, Some(1));
        for k in [2, 4] {
            ensure(golden_lines(g, Some(k)) == one, || format!("{} changes with {k} threads", g.file))?;
        }
    }
    Ok("1/2/4 threads".into())
}

fn config_parsing(_quick: bool) -> Check {
    ensure(parse_rational("1e-12").is_ok_and(|t| t == tol(12)), || "tolerance syntax".into())?;
    let flags = Flags { alpha: Some("sqrt(4)".into()), seq: Some("p=2".into()), ..Flags::default() };
    ensure(ExperimentConfig::resolve(&flags).is_err(), || "perfect square accepted".into())?;
    Ok("flags".into())
}

/// Runs the suite and prints one line per check; true when all pass.
pub fn run(quick: bool, golden_dir: Option<&Path>) -> bool {
    type Step<'a> = (&'static str, bool, Box<dyn Fn() -> Check + 'a>);
    let steps: Vec<Step> = vec![
        ("surd", true, Box::new(move || surds(quick))),
        ("continued fractions", true, Box::new(move || continued_fractions(quick))),
        ("numerics", true, Box::new(move || numerics(quick))),
        ("sequences", true, Box::new(move || sequences(quick))),
        ("markov", true, Box::new(move || markov(quick))),
        ("partial-quotient bounds", true, Box::new(move || quotient_bound(quick))),
        ("config", true, Box::new(move || config_parsing(quick))),
        ("goldens", true, Box::new(move || goldens(golden_dir))),
        ("thread determinism", false, Box::new(move || determinism(quick))),
    ];
    let mut ok = true;
    for (name, in_quick, f) in steps {
        if quick && !in_quick {
            continue;
        }
        let t = Instant::now();
        match f() {
            Ok(msg) => println!("ok    {name}: {msg} ({:.2?})", t.elapsed()),
            Err(msg) => {
                ok = false;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    println!("{}", if ok { "selftest passed" } else { "selftest FAILED" });
    ok
}
