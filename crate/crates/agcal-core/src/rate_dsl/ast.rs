use super::{q, Q};
use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

/// Abstract syntax of a rate expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RateExpr {
    Eps,
    Num(Q),
    Add(Box<RateExpr>, Box<RateExpr>),
    Sub(Box<RateExpr>, Box<RateExpr>),
    Mul(Box<RateExpr>, Box<RateExpr>),
    Div(Box<RateExpr>, Box<RateExpr>),
    Pow(Box<RateExpr>, Q),
    Log(Box<RateExpr>),
    Exp(Box<RateExpr>),
    /// `exp@k(e)`: the exponential applied `k` times.
    ExpIter(u32, Box<RateExpr>),
    /// `hyper(a)`: the super-exponential atom, dominating every finite tower.
    Hyper(Q),
    Abs(Box<RateExpr>),
    /// `comp(e, s)`: `e` with ε replaced by the scale `s(ε)`.
    Comp(Box<RateExpr>, Box<RateExpr>),
}

impl RateExpr {
    pub fn num(n: i64) -> Self {
        RateExpr::Num(q(n))
    }
    pub fn rational(n: i64, d: i64) -> Self {
        RateExpr::Num(Q::new(n, d))
    }
    /// `eps^a`.
    pub fn eps_pow(a: Q) -> Self {
        RateExpr::Pow(Box::new(RateExpr::Eps), a)
    }
    /// `1/eps` written as `eps^-1`.
    pub fn inv_eps() -> Self {
        Self::eps_pow(q(-1))
    }
    pub fn add(a: Self, b: Self) -> Self {
        RateExpr::Add(Box::new(a), Box::new(b))
    }
    pub fn sub(a: Self, b: Self) -> Self {
        RateExpr::Sub(Box::new(a), Box::new(b))
    }
    pub fn mul(a: Self, b: Self) -> Self {
        RateExpr::Mul(Box::new(a), Box::new(b))
    }
    pub fn div(a: Self, b: Self) -> Self {
        RateExpr::Div(Box::new(a), Box::new(b))
    }
    pub fn pow(a: Self, e: Q) -> Self {
        RateExpr::Pow(Box::new(a), e)
    }
    pub fn log(a: Self) -> Self {
        RateExpr::Log(Box::new(a))
    }
    pub fn exp(a: Self) -> Self {
        RateExpr::Exp(Box::new(a))
    }
    pub fn exp_iter(k: u32, a: Self) -> Self {
        RateExpr::ExpIter(k, Box::new(a))
    }
    pub fn abs(a: Self) -> Self {
        RateExpr::Abs(Box::new(a))
    }
    pub fn comp(e: Self, scale: Self) -> Self {
        RateExpr::Comp(Box::new(e), Box::new(scale))
    }
    pub fn neg(a: Self) -> Self {
        Self::mul(Self::num(-1), a)
    }

    /// Canonical text form; `parse` of this string returns `self`.
    pub fn to_canonical(&self) -> String {
        alloc::format!("{self}")
    }

    /// True when the expression never mentions `hyper`.
    pub fn is_hyper_free(&self) -> bool {
        match self {
            RateExpr::Eps | RateExpr::Num(_) => true,
            RateExpr::Hyper(_) => false,
            RateExpr::Add(a, b)
            | RateExpr::Sub(a, b)
            | RateExpr::Mul(a, b)
            | RateExpr::Div(a, b)
            | RateExpr::Comp(a, b) => a.is_hyper_free() && b.is_hyper_free(),
            RateExpr::Pow(a, _)
            | RateExpr::Log(a)
            | RateExpr::Exp(a)
            | RateExpr::ExpIter(_, a)
            | RateExpr::Abs(a) => a.is_hyper_free(),
        }
    }

    fn level(&self) -> u8 {
        match self {
            RateExpr::Add(..) | RateExpr::Sub(..) => 0,
            RateExpr::Mul(..) | RateExpr::Div(..) => 1,
            RateExpr::Pow(..) => 2,
            _ => 3,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            RateExpr::Eps => f.write_str("eps"),
            RateExpr::Num(v) => write_rational(f, *v),
            RateExpr::Add(a, b) => {
                a.write_at(f, 0)?;
                f.write_str(" + ")?;
                b.write_at(f, 1)
            }
            RateExpr::Sub(a, b) => {
                a.write_at(f, 0)?;
                f.write_str(" - ")?;
                b.write_at(f, 1)
            }
            RateExpr::Mul(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(" * ")?;
                b.write_at(f, 2)
            }
            RateExpr::Div(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(" / ")?;
                b.write_at(f, 2)
            }
            RateExpr::Pow(a, e) => {
                a.write_at(f, 3)?;
                f.write_str("^")?;
                if e.is_integer() {
                    write!(f, "{}", e.numer())
                } else {
                    f.write_str("(")?;
                    write_rational(f, *e)?;
                    f.write_str(")")
                }
            }
            RateExpr::Log(a) => {
                f.write_str("log(")?;
                a.write_at(f, 0)?;
                f.write_str(")")
            }
            RateExpr::Exp(a) => {
                f.write_str("exp(")?;
                a.write_at(f, 0)?;
                f.write_str(")")
            }
            RateExpr::ExpIter(k, a) => {
                write!(f, "exp@{k}(")?;
                a.write_at(f, 0)?;
                f.write_str(")")
            }
            RateExpr::Hyper(a) => {
                f.write_str("hyper(")?;
                write_rational(f, *a)?;
                f.write_str(")")
            }
            RateExpr::Abs(a) => {
                f.write_str("abs(")?;
                a.write_at(f, 0)?;
                f.write_str(")")
            }
            RateExpr::Comp(a, b) => {
                f.write_str("comp(")?;
                a.write_at(f, 0)?;
                f.write_str(", ")?;
                b.write_at(f, 0)?;
                f.write_str(")")
            }
        }
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, v: Q) -> fmt::Result {
    if v.is_integer() {
        write!(f, "{}", v.numer())
    } else {
        write!(f, "{}/{}", v.numer(), v.denom())
    }
}

impl fmt::Display for RateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}
