use super::ast::RateExpr;
use super::q_to_f64;
use crate::math;
use alloc::string::String;
use core::fmt;

/// Failure of a floating point evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    /// The value (or an intermediate) left the range of doubles.
    Overflow,
    /// A function was applied outside its domain.
    Domain(String),
    /// ε outside (0, 1].
    Argument(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Overflow => f.write_str("overflow"),
            EvalError::Domain(m) => write!(f, "domain error: {m}"),
            EvalError::Argument(m) => write!(f, "argument error: {m}"),
        }
    }
}

fn finite(x: f64) -> Result<f64, EvalError> {
    if x.is_finite() {
        Ok(x)
    } else if x.is_nan() {
        Err(EvalError::Domain("undefined value".into()))
    } else {
        Err(EvalError::Overflow)
    }
}

fn ev(e: &RateExpr, eps: f64) -> Result<f64, EvalError> {
    match e {
        RateExpr::Eps => Ok(eps),
        RateExpr::Num(c) => Ok(q_to_f64(*c)),
        RateExpr::Add(a, b) => finite(ev(a, eps)? + ev(b, eps)?),
        RateExpr::Sub(a, b) => finite(ev(a, eps)? - ev(b, eps)?),
        RateExpr::Mul(a, b) => finite(ev(a, eps)? * ev(b, eps)?),
        RateExpr::Div(a, b) => {
            let d = ev(b, eps)?;
            if d == 0.0 {
                return Err(EvalError::Overflow);
            }
            finite(ev(a, eps)? / d)
        }
        RateExpr::Pow(a, p) => {
            let x = ev(a, eps)?;
            let pf = q_to_f64(*p);
            if x < 0.0 && !p.is_integer() {
                return Err(EvalError::Domain("fractional power of a negative value".into()));
            }
            if x == 0.0 && pf < 0.0 {
                return Err(EvalError::Overflow);
            }
            finite(math::powf(x, pf))
        }
        RateExpr::Log(a) => {
            let x = ev(a, eps)?;
            if x < 0.0 {
                Err(EvalError::Domain("logarithm of a negative value".into()))
            } else if x == 0.0 {
                Err(EvalError::Overflow)
            } else {
                finite(math::ln(x))
            }
        }
        RateExpr::Exp(a) => finite(math::exp(ev(a, eps)?)),
        RateExpr::ExpIter(k, a) => {
            let mut x = ev(a, eps)?;
            for _ in 0..*k {
                x = finite(math::exp(x))?;
            }
            Ok(x)
        }
        RateExpr::Hyper(a) => {
            let n = math::floor(1.0 / eps) as u64;
            let mut x = 1.0 / eps;
            for _ in 1..n {
                x = finite(math::exp(x))?;
            }
            finite(math::exp(q_to_f64(*a) * x))
        }
        RateExpr::Abs(a) => Ok(math::abs(ev(a, eps)?)),
        RateExpr::Comp(inner, scale) => {
            let s = ev(scale, eps)?;
            if !(s > 0.0) {
                return Err(EvalError::Domain("scale left (0, 1]".into()));
            }
            ev(inner, s)
        }
    }
}

/// Evaluates `e` at a single index value `eps ∈ (0, 1]`.
pub fn eval_at(e: &RateExpr, eps: f64) -> Result<f64, EvalError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(EvalError::Argument(alloc::format!(
            "eps = {eps} is outside (0, 1]"
        )));
    }
    ev(e, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_dsl::parse;

    #[test]
    fn basic_values() {
        let e = parse("eps^-2").unwrap();
        assert!((eval_at(&e, 0.1).unwrap() - 100.0).abs() < 1e-9);
        let e2 = parse("exp@2(1/eps)").unwrap();
        let v = eval_at(&e2, 0.5).unwrap();
        let expected = libm::exp(libm::exp(2.0));
        assert!((v - expected).abs() < 1e-9 * expected);
        assert!((v - 1618.1779919126539).abs() < 1e-6);
    }

    #[test]
    fn argument_and_overflow_are_distinct() {
        let e = parse("eps^-1").unwrap();
        assert!(matches!(eval_at(&e, 0.0), Err(EvalError::Argument(_))));
        assert!(matches!(eval_at(&e, 1.5), Err(EvalError::Argument(_))));
        let big = parse("exp@3(1/eps)").unwrap();
        assert_eq!(eval_at(&big, 0.1), Err(EvalError::Overflow));
    }

    #[test]
    fn hyper_small_index_values() {
        let h = parse("hyper(1)").unwrap();
        assert!((eval_at(&h, 1.0).unwrap() - libm::exp(1.0)).abs() < 1e-12);
        assert!((eval_at(&h, 0.5).unwrap() - libm::exp(libm::exp(2.0))).abs() < 1e-9);
    }
}
