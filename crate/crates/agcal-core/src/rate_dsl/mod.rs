//! Rate expressions over the index ε ∈ (0,1]: parsing, canonical printing,
//! normal forms, the exact big-O oracle and floating point evaluation.

mod ast;
mod eval;
mod growth;
mod normal;
mod parser;

pub use ast::RateExpr;
pub use eval::{eval_at, EvalError};
pub use growth::{Basis, Growth, LTerm};
pub use normal::{compare_o, compose, normalize, OrderRelation, RateNormalForm, Series, Term};
pub use parser::{parse, parse_syntax};

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Exact rational numbers used for exponents and coefficients.
pub type Q = num_rational::Ratio<i64>;

/// Failures raised by the rate-expression layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RateError {
    /// Malformed text. `pos` is a byte offset into the input.
    Syntax {
        pos: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    /// Well-formed input outside the decidable fragment.
    Fragment(String),
    /// The leading behaviour was cancelled below the tracked precision.
    Indeterminate(String),
    /// A documented precondition was violated.
    Precondition(String),
}

impl fmt::Display for RateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateError::Syntax {
                pos,
                found,
                expected,
            } => {
                write!(f, "syntax error at position {pos}: found {found}, expected ")?;
                for (i, e) in expected.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    f.write_str(e)?;
                }
                Ok(())
            }
            RateError::Fragment(m) => write!(f, "fragment error: {m}"),
            RateError::Indeterminate(m) => write!(f, "indeterminate: {m}"),
            RateError::Precondition(m) => write!(f, "precondition violated: {m}"),
        }
    }
}

pub(crate) fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn q_to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Continued-fraction approximation of `x` with denominator at most
/// `max_den`. `None` for non-finite input or when the numerator does not
/// fit.
pub fn approx_q(x: f64, max_den: i64) -> Option<Q> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = libm::floor(r);
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i64;
        let p2 = ai.checked_mul(p1)?.checked_add(p0)?;
        let q2 = ai.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    Some(Q::new(p1, q1))
}

/// `x` as an exact rational when a small-denominator rational reproduces
/// it to within floating resolution.
pub fn exact_q(x: f64) -> Option<Q> {
    let r = approx_q(x, 1_000_000)?;
    if (q_to_f64(r) - x).abs() <= 1e-14 * x.abs().max(1.0) {
        Some(r)
    } else {
        None
    }
}
