//! Exact-arithmetic laboratory for the bounded Mixed Littlewood problem on
//! quadratic irrationals.
//!
//! The crate is layered bottom-up:
//!
//! * [`surd`]: real quadratic irrationals `(P + sqrt(D)) / Q` in canonical form.
//! * [`cf`]: periodic continued fractions, convergents and exact approximation errors.
//! * [`interval`] and [`numerics`]: certified rational enclosures of square roots,
//!   logarithms, rational powers and the Gauss–Kuzmin mean of `-log x`.
//! * [`sequence`]: pseudo-absolute sequences `1 = u_1 | u_2 | ...` and `|q|_D`.
//! * [`lab`]: the experiments (Markov constant, partial-quotient bounds, the
//!   Littlewood product along the distinguished convergents, period statistics).

pub mod cf;
pub mod error;
pub mod interval;
pub mod lab;
pub mod numerics;
pub mod sequence;
pub mod surd;

pub use cf::{ConvergentTable, PeriodicCF};
pub use error::{Error, Result};
pub use interval::RationalInterval;
pub use sequence::{PseudoAbsoluteSequence, SequenceSpec};
pub use surd::QuadraticSurd;
