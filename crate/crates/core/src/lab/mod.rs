//! The experiments: Markov constant bounds, partial-quotient bounds for
//! `t alpha`, the Littlewood product along the distinguished convergents of
//! `u_n alpha`, and period statistics against the Gauss–Kuzmin law.

mod quotient_bound;
mod littlewood;
mod markov;
mod period_stats;

pub use quotient_bound::{quotient_bound_check, QuotientBoundReport};
pub use littlewood::{
    build_record, ratio_band, summarize, sweep, LittlewoodRecord, RatioBand, RecordChecks, Sweep, SweepSummary, BAND_FROM,
};
pub use markov::{markov_bruteforce, markov_lower_bound, nearest_integer_distance, MarkovMinimum};
pub use period_stats::{period_stats, PeriodStatsReport};

/// Runs `f` over the indices, in parallel when the `parallel` feature is on;
/// the output keeps the input order.
pub fn map_indices<T, F>(indices: &[usize], f: F) -> Vec<(usize, T)>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        indices.par_iter().map(|&n| (n, f(n))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        indices.iter().map(|&n| (n, f(n))).collect()
    }
}

pub(crate) mod bigint_str {
    use num_bigint::BigInt;

    pub fn serialize<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }
}

pub(crate) mod rational_str {
    use num_rational::BigRational;

    pub fn serialize<S: serde::Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }
}
