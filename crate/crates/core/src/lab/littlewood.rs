use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cf::{convergent_pair, distinguished_index, error_enclosure, expand, reduce_to_purely_periodic, PeriodicCF};
use crate::error::{Error, Result};
use crate::interval::{lt, RationalInterval};
use crate::numerics::{log_integer, tol_bits, REFINE_BUDGET};
use crate::sequence::PseudoAbsoluteSequence;
use crate::surd::QuadraticSurd;

use super::{bigint_str, rational_str};

/// Exact side conditions verified while building a record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecordChecks {
    /// `1 / (r (a_last + 2)) < err < 1 / (r a_last)`.
    pub convergent_bounds: bool,
    /// `r >= Fib(j* + 1)`.
    pub fibonacci: bool,
    /// `r <= prod_{1 <= k <= j*} (a_k + 1)`.
    pub recurrence: bool,
    /// `q ||q alpha|| <= u_n / a_last`.
    pub s_membership: bool,
    /// `|q|_D <= 1 / u_n`.
    pub valuation: bool,
}

impl RecordChecks {
    pub fn all(&self) -> bool {
        self.convergent_bounds && self.fibonacci && self.recurrence && self.s_membership && self.valuation
    }
}

/// The data of one index `n`: `u_n alpha = [a_0; overline(a_1, ..., a_l)]`,
/// `q = u_n r_{j*}` and the certified Littlewood product.
#[derive(Clone, Debug, Serialize)]
pub struct LittlewoodRecord {
    pub n: usize,
    #[serde(with = "bigint_str")]
    pub u_n: BigInt,
    pub m: usize,
    pub l: usize,
    #[serde(with = "bigint_str")]
    pub a_last: BigInt,
    pub j_star: usize,
    #[serde(with = "bigint_str")]
    pub r: BigInt,
    #[serde(with = "bigint_str")]
    pub q: BigInt,
    /// `||q alpha||`.
    pub err: RationalInterval,
    /// `|q|_D`.
    #[serde(with = "rational_str")]
    pub val: BigRational,
    pub log_q: RationalInterval,
    /// `q log q ||q alpha|| |q|_D`.
    pub product: RationalInterval,
    /// `q ||q alpha||`.
    pub qnorm: RationalInterval,
    /// `r (log r + log u_n) ||r u_n alpha||`.
    pub ec2: RationalInterval,
    /// `r ||r u_n alpha|| a_last`, always inside `(a_last / (a_last + 2), 1)`.
    pub ec3_ratio: RationalInterval,
    /// `(log r + log u_n) / a_last`.
    pub ec4_ratio: RationalInterval,
    /// `log r / l`.
    pub log_r_over_l: RationalInterval,
    /// `l / u_n`.
    #[serde(with = "rational_str")]
    pub l_over_un: BigRational,
    pub r_digits: usize,
    pub q_digits: usize,
    pub baseline: bool,
    pub checks: RecordChecks,
}

fn fib_at_most(r: &BigInt, k: usize) -> bool {
    // Fib(k + 1) <= r, with Fib(1) = Fib(2) = 1
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..k {
        let c = &a + &b;
        a = std::mem::replace(&mut b, c);
        if &b > r {
            return false;
        }
    }
    &b <= r
}

fn product_plus_one(cf: &PeriodicCF, upto: usize) -> BigInt {
    // balanced product keeps this near-linear for long periods
    let mut layer: Vec<BigInt> = (1..=upto).map(|k| cf.quotient(k) + 1u32).collect();
    if layer.is_empty() {
        return BigInt::one();
    }
    while layer.len() > 1 {
        layer = layer
            .chunks(2)
            .map(|c| if c.len() == 2 { &c[0] * &c[1] } else { c[0].clone() })
            .collect();
    }
    layer.pop().expect("nonempty")
}

fn digits(x: &BigInt) -> usize {
    x.magnitude().to_string().len()
}

/// Builds the record for index `n`. `alpha` is first replaced by its first
/// purely periodic complete quotient.
pub fn build_record(
    alpha: &QuadraticSurd,
    seq: &PseudoAbsoluteSequence,
    n: usize,
    tol: &BigRational,
) -> Result<LittlewoodRecord> {
    if !tol.is_positive() {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let alpha = reduce_to_purely_periodic(alpha);
    let u_n = seq.term(n)?;
    let cf = expand(&alpha.scale_by_integer(u_n.clone())).with_leading_term();
    let (m, l) = (cf.pre_len(), cf.period_len());
    let j_star = distinguished_index(m, l)?;
    let a_last = cf.period()[l - 1].clone();
    let (_, r, _, r_prev) = convergent_pair(&cf, j_star);
    let q = &u_n * &r;
    let val = seq.valuation(&q)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let q_bits = q.bits() + 1;
    let baseline = u_n.is_one();

    let mut inner = tol.clone() / BigRational::from_integer(BigInt::from(8) * &r * BigInt::from(q_bits));
    let mut bits = tol_bits(tol) + 16;
    for _ in 0..REFINE_BUDGET {
        let raw = error_enclosure(&cf, j_star, &r, &r_prev, &inner)?;
        let err = if raw.hi() < &half {
            raw.clone()
        } else if raw.lo() > &half {
            // |r x - p| > 1/2 only happens at the baseline index
            RationalInterval::from_integer(1) - raw.clone()
        } else {
            inner = inner / BigRational::from_integer(BigInt::from(1u64 << 16));
            continue;
        };
        let log_q = if q.is_one() { RationalInterval::zero() } else { log_integer(&q, bits) };
        let log_r = if r.is_one() { RationalInterval::zero() } else { log_integer(&r, bits) };
        let r_err = err.mul_integer(&r);
        let qnorm = err.mul_integer(&q);
        let ec2 = &r_err * &log_q;
        let uval = &val * BigRational::from_integer(u_n.clone());
        let product = ec2.scale(&uval).round_abs(tol_bits(tol) as i64 + 8);
        if &product.width() > tol {
            inner = inner / BigRational::from_integer(BigInt::from(1u64 << 16));
            bits += 16;
            continue;
        }
        let a_big = BigRational::from_integer(a_last.clone());
        let ec3_ratio = r_err.scale(&a_big);
        let ec4_ratio = log_q.scale(&a_big.recip());
        let log_r_over_l = log_r.scale(&BigRational::new(BigInt::one(), BigInt::from(l)));
        let r_rat = BigRational::from_integer(r.clone());
        let checks = RecordChecks {
            convergent_bounds: raw.hi() < &(BigRational::one() / (&r_rat * &a_big))
                && raw.lo() > &(BigRational::one() / (&r_rat * (&a_big + BigRational::from_integer(2.into())))),
            fibonacci: fib_at_most(&r, j_star),
            recurrence: r <= product_plus_one(&cf, j_star),
            s_membership: qnorm.hi() <= &(BigRational::from_integer(u_n.clone()) / &a_big),
            valuation: val <= BigRational::new(BigInt::one(), u_n.clone()),
        };
        let l_over_un = BigRational::new(BigInt::from(l), u_n.clone());
        let keep = |iv: RationalInterval| iv.round_rel(bits + 32);
        return Ok(LittlewoodRecord {
            n,
            r_digits: digits(&r),
            q_digits: digits(&q),
            u_n,
            m,
            l,
            a_last,
            j_star,
            r,
            q,
            err: keep(err),
            val,
            log_q: keep(log_q),
            product,
            qnorm: keep(qnorm),
            ec2: keep(ec2),
            ec3_ratio: keep(ec3_ratio),
            ec4_ratio: keep(ec4_ratio),
            log_r_over_l: keep(log_r_over_l),
            l_over_un,
            baseline,
            checks,
        });
    }
    Err(Error::Precision(format!("Littlewood product at n = {n}")))
}

/// Smallest and largest value of a positive quantity over a set of records.
#[derive(Clone, Debug, Serialize)]
pub struct RatioBand {
    pub from_n: usize,
    pub count: usize,
    pub min: RationalInterval,
    pub max: RationalInterval,
    /// `max / min`.
    pub spread: RationalInterval,
}

/// Band of `value(record)` over non-baseline records with `n >= from_n`.
pub fn ratio_band<F>(records: &[LittlewoodRecord], from_n: usize, value: F) -> Option<RatioBand>
where
    F: Fn(&LittlewoodRecord) -> RationalInterval,
{
    let vals: Vec<RationalInterval> = records.iter().filter(|r| !r.baseline && r.n >= from_n).map(value).collect();
    let mut it = vals.iter();
    let first = it.next()?.clone();
    let (mut lo, mut hi) = (first.clone(), first);
    for v in it {
        if v.midpoint() < lo.midpoint() {
            lo = v.clone();
        }
        if v.midpoint() > hi.midpoint() {
            hi = v.clone();
        }
    }
    let spread = hi.div(&lo).ok()?;
    Some(RatioBand { from_n, count: vals.len(), min: lo, max: hi, spread })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub records: usize,
    pub failures: usize,
    /// Largest upper end of the product over non-baseline records.
    pub c_hat: Option<RationalInterval>,
    /// Smallest lower end of the product over non-baseline records.
    pub c_lo: Option<RationalInterval>,
    pub all_positive: bool,
    pub all_checks: bool,
    pub l_over_un: Option<RatioBand>,
    pub ec4_ratio: Option<RatioBand>,
    pub log_r_over_l: Option<RatioBand>,
    /// Largest `q ||q alpha||`.
    pub qnorm_max: Option<RationalInterval>,
    /// Largest `q ||q alpha|| a_last / u_n`, the constant in `||q alpha|| << 1/q`.
    pub s_constant: Option<RationalInterval>,
}

#[derive(Clone, Debug)]
pub struct Sweep {
    pub records: Vec<LittlewoodRecord>,
    pub failures: Vec<(usize, Error)>,
    pub summary: SweepSummary,
}

/// Index from which the band statistics are taken.
pub const BAND_FROM: usize = 4;

pub fn summarize(records: &[LittlewoodRecord], failures: usize) -> SweepSummary {
    let main: Vec<&LittlewoodRecord> = records.iter().filter(|r| !r.baseline).collect();
    let pick = |better: &dyn Fn(&RationalInterval, &RationalInterval) -> bool, f: &dyn Fn(&LittlewoodRecord) -> RationalInterval| {
        main.iter().map(|r| f(r)).reduce(|a, b| if better(&b, &a) { b } else { a })
    };
    let c_hat = pick(&|a, b| lt(b.hi(), a.hi()), &|r| r.product.clone());
    let c_lo = pick(&|a, b| lt(a.lo(), b.lo()), &|r| r.product.clone());
    let qnorm_max = pick(&|a, b| lt(b.hi(), a.hi()), &|r| r.qnorm.clone());
    let s_constant = pick(&|a, b| lt(b.hi(), a.hi()), &|r| {
        r.qnorm.scale(&BigRational::new(r.a_last.clone(), r.u_n.clone()))
    });
    SweepSummary {
        records: records.len(),
        failures,
        all_positive: main.iter().all(|r| r.product.is_positive()),
        all_checks: records.iter().all(|r| r.checks.all()),
        c_hat,
        c_lo,
        l_over_un: ratio_band(records, BAND_FROM, |r| RationalInterval::point(r.l_over_un.clone())),
        ec4_ratio: ratio_band(records, BAND_FROM, |r| r.ec4_ratio.clone()),
        log_r_over_l: ratio_band(records, BAND_FROM, |r| r.log_r_over_l.clone()),
        qnorm_max,
        s_constant,
    }
}

/// Records for every `n` in `from..=to`, ordered by `n`. Per-index failures are
/// collected rather than aborting the sweep.
pub fn sweep(
    alpha: &QuadraticSurd,
    seq: &PseudoAbsoluteSequence,
    from: usize,
    to: usize,
    tol: &BigRational,
) -> Sweep {
    let alpha = reduce_to_purely_periodic(alpha);
    let indices: Vec<usize> = (from.max(1)..=to).collect();
    let results: Vec<(usize, Result<LittlewoodRecord>)> = super::map_indices(&indices, |n| build_record(&alpha, seq, n, tol));
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (n, r) in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => failures.push((n, e)),
        }
    }
    let summary = summarize(&records, failures.len());
    Sweep { records, failures, summary }
}
