//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Every entry point takes plain strings/numbers and returns a JSON string, so
//! the same functions are usable (and tested) natively.

use littlewood_core::cf::{convergents, expand as expand_cf, shifts};
use littlewood_core::lab::sweep as run_sweep;
use littlewood_core::numerics::levy_constant;
use littlewood_core::sequence::make_sequence;
use littlewood_core::{QuadraticSurd, SequenceSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Out = Result<String, String>;

fn surd(text: &str) -> Result<QuadraticSurd, String> {
    text.parse::<QuadraticSurd>().map_err(|e| e.to_string())
}

fn json(v: &impl Serialize) -> Out {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Expansion {
    canonical: String,
    value: f64,
    preperiod: Vec<String>,
    period: Vec<String>,
    period_len: usize,
    truncated: bool,
    convergents: Vec<(String, String)>,
}

/// Continued fraction of a surd such as `(1+sqrt(5))/2`, with at most
/// `limit` period terms and the first few convergents.
pub fn expand_json(text: &str, limit: usize) -> Out {
    let x = surd(text)?;
    let cf = expand_cf(&x);
    let k = 8.min(cf.pre_len() + cf.period_len() * 4);
    let t = convergents(&cf, k);
    json(&Expansion {
        canonical: x.to_string(),
        value: x.to_f64(),
        preperiod: cf.preperiod().iter().map(ToString::to_string).collect(),
        period: cf.period().iter().take(limit).map(ToString::to_string).collect(),
        period_len: cf.period_len(),
        truncated: cf.period_len() > limit,
        convergents: (0..=k).map(|i| (t.p[i].to_string(), t.r[i].to_string())).collect(),
    })
}

fn sequence(primes: &[u32]) -> Result<SequenceSpec, String> {
    match primes {
        [] => Err("at least one prime is required".into()),
        [p] => Ok(SequenceSpec::p_power(*p as u64)),
        ps => Ok(SequenceSpec::round_robin(ps.iter().map(|&p| p as u64).collect())),
    }
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    u_n: String,
    l: usize,
    q_digits: usize,
    product: f64,
    product_bounds: (String, String),
    l_over_un: f64,
}

#[derive(Serialize)]
struct SweepOut {
    rows: Vec<SweepRow>,
    failures: Vec<(usize, String)>,
    all_checks: bool,
    c_hat: Option<f64>,
}

/// Littlewood records `n = from..=to` for `alpha` and the sequence built from
/// `primes` (one prime: powers of it; several: round-robin M-units).
pub fn sweep_json(alpha: &str, primes: &[u32], from: usize, to: usize, tol_digits: u32) -> Out {
    let a = surd(alpha)?;
    let seq = make_sequence(&sequence(primes)?).map_err(|e| e.to_string())?;
    let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(tol_digits.clamp(3, 60)));
    let s = run_sweep(&a, &seq, from, to, &tol);
    let mid = |iv: &littlewood_core::RationalInterval| iv.midpoint().to_f64().unwrap_or(f64::NAN);
    json(&SweepOut {
        rows: s
            .records
            .iter()
            .map(|r| SweepRow {
                n: r.n,
                u_n: r.u_n.to_string(),
                l: r.l,
                q_digits: r.q_digits,
                product: mid(&r.product),
                product_bounds: (r.product.lo_decimal(12), r.product.hi_decimal(12)),
                l_over_un: r.l_over_un.to_f64().unwrap_or(f64::NAN),
            })
            .collect(),
        failures: s.failures.iter().map(|(n, e)| (*n, e.to_string())).collect(),
        all_checks: s.summary.all_checks,
        c_hat: s.summary.c_hat.as_ref().map(mid),
    })
}

#[derive(Serialize)]
struct Histogram {
    period_len: usize,
    counts: Vec<usize>,
    density: Vec<f64>,
    log_q_per_step: f64,
    levy: f64,
}

/// Histogram of the shifts `[0; a_k, a_(k+1), ...]` over one period, next to
/// the Gauss–Kuzmin mass of each bin, plus `log(q_k) / k` at the end of the
/// first period next to the Lévy constant.
pub fn shift_histogram_json(text: &str, bins: usize) -> Out {
    let x = surd(text)?;
    let cf = expand_cf(&x);
    let bins = bins.clamp(1, 200);
    let mut counts = vec![0; bins];
    for y in shifts(&cf) {
        let v = y.to_f64();
        counts[((v * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let mass = |t: f64| (1.0 + t).log2();
    let density = (0..bins).map(|i| mass((i + 1) as f64 / bins as f64) - mass(i as f64 / bins as f64)).collect();
    let k = cf.pre_len() + cf.period_len();
    let t = convergents(&cf, k);
    json(&Histogram {
        period_len: cf.period_len(),
        counts,
        density,
        log_q_per_step: ln_big(&t.r[k]) / k as f64,
        levy: levy_constant(64).midpoint().to_f64().unwrap_or(f64::NAN),
    })
}

fn ln_big(x: &BigInt) -> f64 {
    let shift = x.bits().saturating_sub(64);
    (x >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

fn js(r: Out) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn expand(surd: &str, limit: usize) -> Result<String, JsError> {
    js(expand_json(surd, limit))
}

#[wasm_bindgen]
pub fn sweep(alpha: &str, primes: &[u32], from: usize, to: usize, tol_digits: u32) -> Result<String, JsError> {
    js(sweep_json(alpha, primes, from, to, tol_digits))
}

#[wasm_bindgen]
pub fn shift_histogram(surd: &str, bins: usize) -> Result<String, JsError> {
    js(shift_histogram_json(surd, bins))
}
