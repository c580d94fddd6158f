use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::cf::expand;
use crate::error::{Error, Result};
use crate::interval::RationalInterval;
use crate::numerics::tol_bits;
use crate::surd::QuadraticSurd;

/// Certified `c = 1 / (A + 2)` with `A` the largest partial quotient of `alpha`,
/// so that `q ||q alpha|| >= c` for every `q >= 1`.
pub fn markov_lower_bound(alpha: &QuadraticSurd) -> BigRational {
    let cf = expand(alpha);
    BigRational::new(BigInt::one(), cf.max_quotient() + 2u32)
}

/// `||x||` for a surd, as an exact surd.
pub fn nearest_integer_distance(x: &QuadraticSurd) -> QuadraticSurd {
    let f = x.floor();
    let frac = x.add_integer(&-&f);
    if frac.cmp_rational(&BigRational::new(1.into(), 2.into())).is_lt() {
        frac
    } else {
        // 1 - frac
        x.add_integer(&-(f + 1u32)).neg()
    }
}

#[derive(Clone, Debug)]
pub struct MarkovMinimum {
    pub q: u64,
    /// Exact value of `q ||q alpha||`.
    pub exact: QuadraticSurd,
    pub value: RationalInterval,
}

/// Exact minimum of `q ||q alpha||` over `1 <= q <= q_max`; ties keep the smallest `q`.
pub fn markov_bruteforce(alpha: &QuadraticSurd, q_max: u64, tol: &BigRational) -> Result<MarkovMinimum> {
    if q_max == 0 {
        return Err(Error::InvalidArgument("q_max must be at least 1".into()));
    }
    let screen = 64;
    let mut best: Option<(u64, QuadraticSurd, RationalInterval)> = None;
    for q in 1..=q_max {
        let x = alpha.scale_by_integer(q);
        let v = nearest_integer_distance(&x).scale_by_integer(q);
        let iv = v.enclosure(screen);
        let better = match &best {
            None => true,
            Some((_, b, biv)) => {
                if iv.lo() > biv.hi() {
                    false
                } else if iv.hi() < biv.lo() {
                    true
                } else {
                    v.cmp_value(b) == Ordering::Less
                }
            }
        };
        if better {
            best = Some((q, v, iv));
        }
    }
    let (q, exact, _) = best.expect("q_max >= 1");
    let value = exact.enclosure(tol_bits(tol) + 1);
    if &value.width() > tol {
        return Err(Error::Precision(format!("Markov minimum at q = {q}")));
    }
    Ok(MarkovMinimum { q, exact, value })
}
