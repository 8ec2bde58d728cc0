use super::ast::RateExpr;
use super::growth::Growth;
use super::{q, RateError, Q};
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use num_traits::{One, Signed, Zero};

/// A signed rational multiple of a growth class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coef: Q,
    pub growth: Growth,
}

/// A finite asymptotic expansion: exact terms in strictly decreasing growth
/// order, followed by an optional remainder `O(tail)` that every listed term
/// strictly dominates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Series {
    pub(crate) terms: Vec<Term>,
    pub(crate) tail: Option<Growth>,
}

fn max_growth(a: Option<Growth>, b: Option<Growth>) -> Option<Growth> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if x.cmp_growth(&y) == Ordering::Less {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Exact `c^p` for rationals, when it is rational and fits.
pub(crate) fn rational_pow(c: Q, p: Q) -> Option<Q> {
    if p.is_zero() {
        return Some(q(1));
    }
    if c.is_zero() {
        return if p.is_positive() { Some(Q::zero()) } else { None };
    }
    let d = *p.denom();
    let n = *p.numer();
    let root = |x: i64| -> Option<i64> {
        if d == 1 {
            return Some(x);
        }
        if x < 0 {
            if d % 2 == 0 {
                return None;
            }
            let r = int_root((-x) as u64, d as u32)?;
            return Some(-(r as i64));
        }
        int_root(x as u64, d as u32).map(|r| r as i64)
    };
    let base = Q::new(root(*c.numer())?, root(*c.denom())?);
    let e = n.unsigned_abs();
    if base.is_one() {
        return Some(base);
    }
    if base == -Q::one() {
        return Some(if e % 2 == 0 { Q::one() } else { base });
    }
    if e > 62 {
        return None;
    }
    let mut num: i64 = 1;
    let mut den: i64 = 1;
    for _ in 0..e {
        num = num.checked_mul(*base.numer())?;
        den = den.checked_mul(*base.denom())?;
    }
    let v = Q::new(num, den);
    Some(if n < 0 { v.recip() } else { v })
}

fn int_root(x: u64, d: u32) -> Option<u64> {
    if x <= 1 {
        return Some(x);
    }
    let guess = crate::math::round(crate::math::powf(x as f64, 1.0 / d as f64)) as u64;
    for r in guess.saturating_sub(1)..=guess + 1 {
        let mut acc: u64 = 1;
        let mut ok = true;
        for _ in 0..d {
            match acc.checked_mul(r) {
                Some(v) => acc = v,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && acc == x {
            return Some(r);
        }
    }
    None
}

impl Series {
    pub fn zero() -> Series {
        Series {
            terms: Vec::new(),
            tail: None,
        }
    }
    pub fn constant(c: Q) -> Series {
        Series::term(c, Growth::one())
    }
    pub fn term(coef: Q, growth: Growth) -> Series {
        if coef.is_zero() {
            return Series::zero();
        }
        Series {
            terms: vec![Term { coef, growth }],
            tail: None,
        }
    }
    pub fn eps() -> Series {
        Series::term(q(1), Growth::eps())
    }
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }
    pub fn tail(&self) -> Option<&Growth> {
        self.tail.as_ref()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.tail.is_none()
    }
    pub fn lead(&self) -> Option<&Term> {
        self.terms.first()
    }

    fn from_parts(terms: Vec<Term>, tail: Option<Growth>) -> Series {
        let mut merged: Vec<Term> = Vec::new();
        for t in terms {
            if t.coef.is_zero() {
                continue;
            }
            if let Some(m) = merged.iter_mut().find(|m| m.growth == t.growth) {
                m.coef += t.coef;
            } else {
                merged.push(t);
            }
        }
        merged.retain(|t| !t.coef.is_zero());
        merged.sort_by(|a, b| b.growth.cmp_growth(&a.growth));
        if let Some(tl) = &tail {
            merged.retain(|t| t.growth.cmp_growth(tl) == Ordering::Greater);
        }
        Series {
            terms: merged,
            tail,
        }
    }

    pub fn add(&self, o: &Series) -> Series {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Series::from_parts(terms, max_growth(self.tail.clone(), o.tail.clone()))
    }

    pub fn neg(&self) -> Series {
        self.scale(q(-1))
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: Q) -> Series {
        if c.is_zero() {
            return Series::zero();
        }
        Series {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coef: t.coef * c,
                    growth: t.growth.clone(),
                })
                .collect(),
            tail: self.tail.clone(),
        }
    }

    pub fn mul(&self, o: &Series) -> Series {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &o.terms {
                terms.push(Term {
                    coef: a.coef * b.coef,
                    growth: a.growth.mul(&b.growth),
                });
            }
        }
        let mut tail = None;
        if let Some(tb) = &o.tail {
            if let Some(la) = self.lead() {
                tail = max_growth(tail, Some(la.growth.mul(tb)));
            }
            if let Some(ta) = &self.tail {
                tail = max_growth(tail, Some(ta.mul(tb)));
            }
        }
        if let Some(ta) = &self.tail {
            if let Some(lb) = o.lead() {
                tail = max_growth(tail, Some(ta.mul(&lb.growth)));
            }
        }
        Series::from_parts(terms, tail)
    }

    fn second_growth(&self) -> Option<Growth> {
        self.terms
            .get(1)
            .map(|t| t.growth.clone())
            .or_else(|| self.tail.clone())
    }

    pub fn pow(&self, p: Q) -> Result<Series, RateError> {
        if p.is_zero() {
            return Ok(Series::constant(q(1)));
        }
        if self.is_zero() {
            return if p.is_positive() {
                Ok(Series::zero())
            } else {
                Err(RateError::Fragment("zero raised to a negative power".into()))
            };
        }
        let lead = self.lead().ok_or_else(|| {
            RateError::Indeterminate("power of an expression with unknown leading term".into())
        })?;
        if lead.coef.is_negative() && !p.is_integer() {
            return Err(RateError::Fragment(
                "non-integer power of an eventually negative expression".into(),
            ));
        }
        if p.is_integer() && p.is_positive() && *p.numer() <= 12 && self.terms.len() > 1 {
            let mut acc = self.clone();
            for _ in 1..*p.numer() {
                acc = acc.mul(self);
            }
            return Ok(acc);
        }
        let coef = rational_pow(lead.coef, p).ok_or_else(|| {
            RateError::Fragment("irrational constant from a rational power".into())
        })?;
        let growth = lead.growth.pow(p);
        let tail = self
            .second_growth()
            .map(|s| growth.mul(&s.div(&lead.growth)));
        Ok(Series::from_parts(vec![Term { coef, growth }], tail))
    }

    pub fn abs(&self) -> Series {
        match self.lead() {
            Some(l) if l.coef.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    pub fn log(&self) -> Result<Series, RateError> {
        let lead = self.lead().ok_or_else(|| {
            RateError::Indeterminate("logarithm of an expression with unknown leading term".into())
        })?;
        if !lead.coef.is_positive() {
            return Err(RateError::Fragment(
                "logarithm of an eventually non-positive expression".into(),
            ));
        }
        let main: Vec<Term> = lead
            .growth
            .log_terms_representable()?
            .into_iter()
            .map(|(coef, growth)| Term { coef, growth })
            .collect();
        let mut out = Series::from_parts(main, None);
        if !lead.coef.is_one() {
            if out.terms.is_empty() {
                return Err(RateError::Fragment(
                    "logarithm with a transcendental limit".into(),
                ));
            }
            out.tail = max_growth(out.tail.take(), Some(Growth::one()));
        }
        let rest = self.second_growth().map(|s| s.div(&lead.growth));
        if let Some(u1) = rest {
            if !out.terms.is_empty() || out.tail.is_some() {
                out.tail = max_growth(out.tail.take(), Some(u1));
            } else if let Some(t2) = self.terms.get(1) {
                let first = Term {
                    coef: t2.coef / lead.coef,
                    growth: u1.clone(),
                };
                let after = self
                    .terms
                    .get(2)
                    .map(|t| t.growth.clone())
                    .or_else(|| self.tail.clone())
                    .map(|g| g.div(&lead.growth));
                let tail = max_growth(after, Some(u1.pow(q(2))));
                return Ok(Series::from_parts(vec![first], tail));
            } else {
                return Ok(Series {
                    terms: Vec::new(),
                    tail: Some(u1),
                });
            }
        }
        Ok(Series::from_parts(out.terms, out.tail))
    }

    pub fn exp(&self) -> Result<Series, RateError> {
        if let Some(t) = &self.tail {
            if !t.is_vanishing() {
                return Err(RateError::Fragment(
                    "exponential of an expression with a non-vanishing remainder".into(),
                ));
            }
        }
        let mut g = Growth::one();
        let mut vanishing: Vec<&Term> = Vec::new();
        for t in &self.terms {
            match t.growth.cmp_growth(&Growth::one()) {
                Ordering::Greater => g = g.mul(&Growth::exp_of(t.coef, &t.growth)?),
                Ordering::Equal => {
                    return Err(RateError::Fragment(
                        "exponential of a nonzero constant".into(),
                    ))
                }
                Ordering::Less => vanishing.push(t),
            }
        }
        let mut terms = vec![Term {
            coef: q(1),
            growth: g.clone(),
        }];
        let tail = match vanishing.first() {
            Some(first) => {
                terms.push(Term {
                    coef: first.coef,
                    growth: g.mul(&first.growth),
                });
                let rest = max_growth(
                    vanishing.get(1).map(|t| t.growth.clone()),
                    self.tail.clone(),
                );
                let bound = max_growth(rest, Some(first.growth.pow(q(2))));
                bound.map(|b| g.mul(&b))
            }
            None => self.tail.as_ref().map(|w| g.mul(w)),
        };
        Ok(Series::from_parts(terms, tail))
    }

    /// Sum of the exact terms as an expression (the remainder is dropped).
    pub fn to_expr(&self) -> RateExpr {
        let mut out: Option<RateExpr> = None;
        for t in &self.terms {
            let mag = t.coef.abs();
            let body = if t.growth.is_one() {
                RateExpr::Num(mag)
            } else if mag.is_one() {
                t.growth.to_expr()
            } else {
                RateExpr::mul(RateExpr::Num(mag), t.growth.to_expr())
            };
            out = Some(match out {
                None => {
                    if t.coef.is_negative() {
                        if t.growth.is_one() {
                            RateExpr::Num(t.coef)
                        } else {
                            RateExpr::mul(RateExpr::Num(q(-1)), body)
                        }
                    } else {
                        body
                    }
                }
                Some(acc) => {
                    if t.coef.is_negative() {
                        RateExpr::Sub(Box::new(acc), Box::new(body))
                    } else {
                        RateExpr::Add(Box::new(acc), Box::new(body))
                    }
                }
            });
        }
        out.unwrap_or_else(|| RateExpr::num(0))
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() && self.tail.is_some() {
            write!(f, "O({})", self.tail.as_ref().unwrap())
        } else {
            write!(f, "{}", self.to_expr())?;
            if let Some(t) = &self.tail {
                write!(f, " + O({t})")?;
            }
            Ok(())
        }
    }
}

/// Canonical form of a rate expression.
///
/// For big-O purposes only the leading term matters; the full expansion is
/// kept so that limits and signs of differences stay exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RateNormalForm {
    series: Series,
}

impl RateNormalForm {
    pub fn from_series(series: Series) -> Result<Self, RateError> {
        if series.terms.is_empty() && series.tail.is_some() {
            return Err(RateError::Indeterminate(
                "leading term cancelled below the tracked remainder".into(),
            ));
        }
        Ok(RateNormalForm { series })
    }
    pub fn series(&self) -> &Series {
        &self.series
    }
    pub fn is_zero(&self) -> bool {
        self.series.is_zero()
    }
    pub fn lead(&self) -> Option<&Term> {
        self.series.lead()
    }
    /// Magnitude of the leading coefficient (zero for the zero net).
    pub fn constant(&self) -> Q {
        self.lead().map(|t| t.coef.abs()).unwrap_or_else(Q::zero)
    }
    /// Growth class of the leading term (`1` for the zero net).
    pub fn growth(&self) -> Growth {
        self.lead().map(|t| t.growth.clone()).unwrap_or_default()
    }
    /// True when the expression was a sum reduced to its dominant term.
    pub fn sum_remainder(&self) -> bool {
        self.series.terms.len() > 1 || self.series.tail.is_some()
    }
    /// Sign of the net for ε small: `Greater` positive, `Less` negative.
    pub fn eventual_sign(&self) -> Ordering {
        match self.lead() {
            None => Ordering::Equal,
            Some(t) => {
                if t.coef.is_positive() {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }
    pub fn to_expr(&self) -> RateExpr {
        self.series.to_expr()
    }
}

impl fmt::Display for RateNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.series)
    }
}

/// Outcome of the exact big-O comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderRelation {
    /// x = O(y) and not y = O(x).
    XbigOofY,
    /// y = O(x) and not x = O(y).
    YbigOofX,
    Both,
    Neither,
}

impl OrderRelation {
    pub fn x_is_o_of_y(self) -> bool {
        matches!(self, OrderRelation::XbigOofY | OrderRelation::Both)
    }
    pub fn y_is_o_of_x(self) -> bool {
        matches!(self, OrderRelation::YbigOofX | OrderRelation::Both)
    }
    pub fn name(self) -> &'static str {
        match self {
            OrderRelation::XbigOofY => "XbigOofY",
            OrderRelation::YbigOofX => "YbigOofX",
            OrderRelation::Both => "Both",
            OrderRelation::Neither => "Neither",
        }
    }
}

pub fn compare_o(x: &RateNormalForm, y: &RateNormalForm) -> OrderRelation {
    match (x.lead(), y.lead()) {
        (None, None) => OrderRelation::Both,
        (None, Some(_)) => OrderRelation::XbigOofY,
        (Some(_), None) => OrderRelation::YbigOofX,
        (Some(a), Some(b)) => match a.growth.cmp_growth(&b.growth) {
            Ordering::Less => OrderRelation::XbigOofY,
            Ordering::Greater => OrderRelation::YbigOofX,
            Ordering::Equal => OrderRelation::Both,
        },
    }
}

fn normalize_in(e: &RateExpr, env: &Series, identity: bool) -> Result<Series, RateError> {
    Ok(match e {
        RateExpr::Eps => env.clone(),
        RateExpr::Num(c) => Series::constant(*c),
        RateExpr::Add(a, b) => normalize_in(a, env, identity)?.add(&normalize_in(b, env, identity)?),
        RateExpr::Sub(a, b) => normalize_in(a, env, identity)?.sub(&normalize_in(b, env, identity)?),
        RateExpr::Mul(a, b) => normalize_in(a, env, identity)?.mul(&normalize_in(b, env, identity)?),
        RateExpr::Div(a, b) => {
            let den = normalize_in(b, env, identity)?;
            if den.is_zero() {
                return Err(RateError::Fragment("division by zero".into()));
            }
            normalize_in(a, env, identity)?.mul(&den.pow(q(-1))?)
        }
        RateExpr::Pow(a, p) => normalize_in(a, env, identity)?.pow(*p)?,
        RateExpr::Log(a) => normalize_in(a, env, identity)?.log()?,
        RateExpr::Exp(a) => normalize_in(a, env, identity)?.exp()?,
        RateExpr::ExpIter(k, a) => {
            let mut s = normalize_in(a, env, identity)?;
            for _ in 0..*k {
                s = s.exp()?;
            }
            s
        }
        RateExpr::Hyper(a) => {
            if !identity {
                return Err(RateError::Fragment(
                    "hyper atom under a change of scale".into(),
                ));
            }
            Series::term(q(1), Growth::hyper(*a))
        }
        RateExpr::Abs(a) => normalize_in(a, env, identity)?.abs(),
        RateExpr::Comp(inner, scale) => {
            let s = normalize_in(scale, env, identity)?;
            check_scale(&s)?;
            let ident = identity && s == Series::eps();
            normalize_in(inner, &s, ident)?
        }
    })
}

fn check_scale(s: &Series) -> Result<(), RateError> {
    match s.lead() {
        Some(t) if t.coef.is_positive() && t.growth.is_vanishing() => Ok(()),
        _ => Err(RateError::Precondition(
            "scale must be positive and tend to zero".into(),
        )),
    }
}

/// Canonical form of `e`.
pub fn normalize(e: &RateExpr) -> Result<RateNormalForm, RateError> {
    RateNormalForm::from_series(normalize_in(e, &Series::eps(), true)?)
}

/// `e` with ε replaced by `scale(ε)`. The scale must be a positive
/// infinitesimal of the fragment.
pub fn compose(e: &RateExpr, scale: &RateExpr) -> Result<RateExpr, RateError> {
    let s = normalize_in(scale, &Series::eps(), true)?;
    check_scale(&s)?;
    Ok(RateExpr::comp(e.clone(), scale.clone()))
}
