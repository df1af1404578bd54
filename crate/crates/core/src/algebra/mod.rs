//! Exact arithmetic: Gaussian rationals, polynomials in `z` and `z̄`,
//! polynomial matrices, division, and interval enclosures.

mod context;
mod division;
mod gauss;
mod interval;
mod linalg;
mod matrix;
mod poly;

pub use context::VarContext;
pub use division::{divide_exact, initial_form, series_divide, SeriesQuotient};
pub use gauss::{rat, GaussRat};
pub use interval::{
    certify_no_common_zero, interval_eval, CInterval, Certification, Interval, IntervalBox,
};
pub use linalg::CMatrix;
pub use matrix::subsets;
pub use matrix::PolyMatrix;
pub use poly::{CompiledPoly, Monomial, Poly};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("undefined input: {0}")]
    UndefinedInput(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("no exact polynomial quotient")]
    NoExactQuotient,
}
