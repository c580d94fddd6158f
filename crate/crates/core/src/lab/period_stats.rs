use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::cf::{expand, reduce_to_purely_periodic, shifts};
use crate::error::{Error, Result};
use crate::interval::RationalInterval;
use crate::numerics::{levy_constant, log_integer, log_interval, pow_interval, tol_bits, REFINE_BUDGET};
use crate::sequence::PseudoAbsoluteSequence;
use crate::surd::QuadraticSurd;

use super::markov::markov_lower_bound;
use super::{bigint_str, rational_str};

/// Period statistics of `u_n alpha` against the Gauss–Kuzmin mean `gamma`.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodStatsReport {
    pub n: usize,
    #[serde(with = "bigint_str")]
    pub u_n: BigInt,
    pub l: usize,
    #[serde(with = "rational_str")]
    pub delta0: BigRational,
    /// `u_n^(-delta0/12)`.
    pub threshold: RationalInterval,
    /// `(1/l) sum f(x_i)`.
    pub birkhoff: RationalInterval,
    pub gamma: RationalInterval,
    /// `birkhoff - gamma`.
    pub gamma_dev: RationalInterval,
    /// `u_n^(-delta0/24)`.
    pub delta_ref: RationalInterval,
    /// `gamma_dev / delta_ref`.
    pub delta_ratio: RationalInterval,
    /// `(1/l) sum log b_i`.
    pub gm_log_b: RationalInterval,
    /// `(1/l) sum log (b_i + 1)`.
    pub gm_log_b1: RationalInterval,
    /// `24 / delta0`.
    #[serde(with = "rational_str")]
    pub kappa: BigRational,
    /// Shifts below the threshold, where `f` is the constant `(delta0/12) log u_n`.
    pub below_threshold: usize,
    /// Shifts whose side of the threshold stayed unresolved; both branches are in the hull.
    pub unresolved: usize,
    /// `prod b_i <= prod (b_i + 1) <= 2^l prod b_i`, exact.
    pub sandwich: bool,
    /// `gm_log_b <= kappa (gamma + |gamma_dev|)`, certified.
    pub upper_bound: bool,
    /// `birkhoff <= gm_log_b1`, certified.
    pub lower_bound: bool,
}

fn balanced_product(v: Vec<BigInt>) -> BigInt {
    let mut layer = v;
    if layer.is_empty() {
        return BigInt::one();
    }
    while layer.len() > 1 {
        layer = layer.chunks(2).map(|c| if c.len() == 2 { &c[0] * &c[1] } else { c[0].clone() }).collect();
    }
    layer.pop().expect("nonempty")
}

fn log_or_zero(x: &BigInt, bits: u64) -> RationalInterval {
    if x.is_one() {
        RationalInterval::zero()
    } else {
        log_integer(x, bits)
    }
}

/// `f(x) = min(-log x, (delta0/12) log u_n)` with a certified branch decision.
fn test_function(
    x: &QuadraticSurd,
    threshold: &dyn Fn(u64) -> RationalInterval,
    cap: &RationalInterval,
    bits: u64,
) -> Result<(RationalInterval, Option<bool>)> {
    let mut b = bits;
    for _ in 0..REFINE_BUDGET {
        let xi = x.enclosure_rel(b);
        let t = threshold(b);
        if xi.lo() >= t.hi() {
            return Ok((log_interval(&xi, bits + 4)?.scale(&-BigRational::one()), Some(false)));
        }
        if xi.hi() < t.lo() {
            return Ok((cap.clone(), Some(true)));
        }
        b *= 2;
    }
    let xi = x.enclosure_rel(b);
    let neg_log = log_interval(&xi, bits + 4)?.scale(&-BigRational::one());
    Ok((neg_log.hull(cap), None))
}

/// Birkhoff average of the test function over the shifts of the period of
/// `u_n alpha`, the geometric means of its partial quotients, and the
/// inequalities relating them.
pub fn period_stats(
    alpha: &QuadraticSurd,
    seq: &PseudoAbsoluteSequence,
    n: usize,
    delta0: &BigRational,
    tol: &BigRational,
) -> Result<PeriodStatsReport> {
    let lo = BigRational::new(25.into(), 64.into());
    let hi = BigRational::new(1.into(), 2.into());
    if delta0 < &lo || delta0 > &hi {
        return Err(Error::InvalidArgument(format!("delta0 = {delta0} is outside [25/64, 1/2]")));
    }
    if !tol.is_positive() {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let alpha = reduce_to_purely_periodic(alpha);
    let u_n = seq.term(n)?;
    let c = markov_lower_bound(&alpha);
    if BigRational::from_integer(u_n.clone()) <= c.recip() {
        return Err(Error::HypothesisViolation(format!("u_{n} = {u_n} does not exceed 1/c_alpha = {}", c.recip())));
    }
    let cf = expand(&alpha.scale_by_integer(u_n.clone())).with_leading_term();
    let period = cf.period().to_vec();
    let l = period.len();
    let l_rat = BigRational::from_integer(BigInt::from(l));
    let bits = tol_bits(tol) + 16;

    let e12 = -delta0 / BigRational::from_integer(12.into());
    let threshold0 = pow_interval(&u_n, &e12, bits + 4);
    let threshold_at = |b: u64| if b == bits { threshold0.clone() } else { pow_interval(&u_n, &e12, b + 4) };
    let cap = log_integer(&u_n, bits + 8).scale(&(delta0 / BigRational::from_integer(12.into())));

    let mut sum = RationalInterval::zero();
    let (mut below, mut unresolved) = (0, 0);
    for x in shifts(&cf) {
        let (fx, side) = test_function(&x, &threshold_at, &cap, bits)?;
        match side {
            Some(true) => below += 1,
            None => unresolved += 1,
            Some(false) => {}
        }
        sum = (&sum + &fx).round_abs(bits as i64 + 8);
    }
    let birkhoff = sum.scale(&l_rat.recip()).round_abs(bits as i64);
    let gamma = levy_constant(bits);
    let gamma_dev = &birkhoff - &gamma;
    let delta_ref = pow_interval(&u_n, &(-delta0 / BigRational::from_integer(24.into())), bits);
    let delta_ratio = gamma_dev.div(&delta_ref)?.round_abs(bits as i64);

    let prod_b = balanced_product(period.clone());
    let prod_b1 = balanced_product(period.iter().map(|b| b + 1u32).collect());
    let sandwich = prod_b <= prod_b1 && prod_b1 <= (&prod_b << l);
    let gm_log_b = log_or_zero(&prod_b, bits).scale(&l_rat.recip()).round_abs(bits as i64);
    let gm_log_b1 = log_or_zero(&prod_b1, bits).scale(&l_rat.recip()).round_abs(bits as i64);

    let kappa = BigRational::from_integer(24.into()) / delta0;
    let bound = (&gamma + &gamma_dev.abs()).scale(&kappa);
    let upper_bound = gm_log_b.hi() <= bound.lo();
    let lower_bound = birkhoff.hi() <= gm_log_b1.lo();
    let keep = |iv: RationalInterval| iv.round_abs(bits as i64);
    Ok(PeriodStatsReport {
        n,
        u_n: u_n.clone(),
        l,
        delta0: delta0.clone(),
        threshold: keep(threshold0.clone()),
        birkhoff,
        gamma: keep(gamma),
        gamma_dev: keep(gamma_dev),
        delta_ref: keep(delta_ref),
        delta_ratio,
        gm_log_b,
        gm_log_b1,
        kappa,
        below_threshold: below,
        unresolved,
        sandwich,
        upper_bound,
        lower_bound,
    })
}
