use num_bigint::BigInt;
use serde::Serialize;

use crate::cf::expand;
use crate::error::{Error, Result};
use crate::surd::QuadraticSurd;

use super::bigint_str;

/// Witnesses for the partial-quotient bounds of `t alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientBoundReport {
    pub t: u64,
    /// `A`, the largest partial quotient of `alpha`.
    #[serde(with = "bigint_str")]
    pub a_max: BigInt,
    /// `t (A + 2)`, i.e. `t / c_alpha`.
    #[serde(with = "bigint_str")]
    pub upper: BigInt,
    #[serde(with = "bigint_str")]
    pub max_quotient: BigInt,
    #[serde(with = "bigint_str")]
    pub floor_t_alpha: BigInt,
    #[serde(with = "bigint_str")]
    pub max_period: BigInt,
    /// Position in the period of the first element attaining `max_period`.
    pub argmax_period: usize,
    /// Last period element once the expansion is written `[a_0; overline(b_1, ..., b_l)]`.
    #[serde(with = "bigint_str")]
    pub last_period: BigInt,
    pub pre_len: usize,
    pub period_len: usize,
    pub upper_holds: bool,
    pub max_lower_holds: bool,
    pub last_lower_holds: bool,
}

impl QuotientBoundReport {
    pub fn holds(&self) -> bool {
        self.upper_holds && self.max_lower_holds && self.last_lower_holds
    }
}

/// Checks, for a purely periodic `alpha` and `t >= 2`, that every partial
/// quotient of `t alpha` is at most `t (A + 2)` and that the period contains an
/// element at least `floor(t alpha)`. A failed check is reported as
/// [`Error::AssertionFailure`] carrying the witness.
pub fn quotient_bound_check(alpha: &QuadraticSurd, t: u64) -> Result<QuotientBoundReport> {
    if !alpha.is_reduced() {
        return Err(Error::HypothesisViolation(format!("{alpha} is not purely periodic")));
    }
    if t < 2 {
        return Err(Error::InvalidArgument(format!("t must be at least 2, got {t}")));
    }
    let a_max = expand(alpha).max_quotient().clone();
    let upper = BigInt::from(t) * (&a_max + 2u32);
    let x = alpha.scale_by_integer(t);
    let cf = expand(&x).with_leading_term();
    let floor_t_alpha = x.floor();
    let max_quotient = cf.max_quotient().clone();
    let (argmax_period, max_period) = cf
        .period()
        .iter()
        .enumerate()
        .fold((0, cf.period()[0].clone()), |(i, m), (j, b)| if b > &m { (j, b.clone()) } else { (i, m) });
    let last_period = cf.period().last().expect("nonempty period").clone();
    let report = QuotientBoundReport {
        t,
        upper_holds: max_quotient <= upper,
        max_lower_holds: max_period >= floor_t_alpha,
        last_lower_holds: last_period >= floor_t_alpha,
        a_max,
        upper,
        max_quotient,
        floor_t_alpha,
        max_period,
        argmax_period,
        last_period,
        pre_len: cf.pre_len(),
        period_len: cf.period_len(),
    };
    if report.holds() {
        Ok(report)
    } else {
        Err(Error::AssertionFailure(format!("partial-quotient bounds fail for t = {t}, alpha = {alpha}: {report:?}")))
    }
}
