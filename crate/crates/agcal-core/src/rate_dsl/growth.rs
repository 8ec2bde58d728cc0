use super::ast::RateExpr;
use super::{q, RateError, Q};
use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use num_traits::{One, Signed, Zero};

/// Basis nets, listed from slowest to fastest growth.
///
/// `LogLogLog` is log log log(1/ε), `LogLog` is log log(1/ε), `Log` is
/// log(1/ε), `Inv` is 1/ε and `HyperLog` is the logarithm of the
/// super-exponential atom, which already beats every finite tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    LogLogLog,
    LogLog,
    Log,
    Inv,
    HyperLog,
}

/// A coefficient-free growth class: a product of basis powers times
/// `exp(h * k)` factors whose keys `k` are themselves growing classes.
///
/// The representation is canonical: keys equal to `log(1/ε)`,
/// `log log(1/ε)` or `log log log(1/ε)` are folded back into powers of the
/// next basis element, so structurally distinct values are distinct
/// functions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Growth {
    pub(crate) mono: BTreeMap<Basis, Q>,
    pub(crate) exps: BTreeMap<Growth, Q>,
}

/// Terms of a logarithm of a growth class. `L4` is log log log log(1/ε)
/// and `HL2` the iterated logarithm of the hyper atom; neither is a
/// representable growth class but both are needed to compare logs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LTerm {
    L4,
    G(Growth),
    HL2,
}

impl Growth {
    pub fn one() -> Self {
        Growth::default()
    }
    pub fn basis(b: Basis) -> Self {
        Self::basis_pow(b, q(1))
    }
    pub fn basis_pow(b: Basis, a: Q) -> Self {
        let mut g = Growth::default();
        if !a.is_zero() {
            g.mono.insert(b, a);
        }
        g
    }
    /// ε itself.
    pub fn eps() -> Self {
        Self::basis_pow(Basis::Inv, q(-1))
    }
    pub fn is_one(&self) -> bool {
        self.mono.is_empty() && self.exps.is_empty()
    }
    pub fn mono(&self) -> &BTreeMap<Basis, Q> {
        &self.mono
    }
    pub fn exps(&self) -> &BTreeMap<Growth, Q> {
        &self.exps
    }

    pub fn mul(&self, other: &Growth) -> Growth {
        let mut out = self.clone();
        for (b, a) in &other.mono {
            let e = out.mono.entry(*b).or_insert_with(Q::zero);
            *e += *a;
            if e.is_zero() {
                out.mono.remove(b);
            }
        }
        for (k, h) in &other.exps {
            let e = out.exps.entry(k.clone()).or_insert_with(Q::zero);
            *e += *h;
            if e.is_zero() {
                out.exps.remove(k);
            }
        }
        out
    }

    pub fn pow(&self, p: Q) -> Growth {
        if p.is_zero() {
            return Growth::one();
        }
        Growth {
            mono: self.mono.iter().map(|(b, a)| (*b, *a * p)).collect(),
            exps: self.exps.iter().map(|(k, h)| (k.clone(), *h * p)).collect(),
        }
    }

    pub fn recip(&self) -> Growth {
        self.pow(q(-1))
    }

    pub fn div(&self, other: &Growth) -> Growth {
        self.mul(&other.recip())
    }

    /// `exp(h * key)` for a growing `key`, in canonical form.
    pub fn exp_of(h: Q, key: &Growth) -> Result<Growth, RateError> {
        if h.is_zero() {
            return Ok(Growth::one());
        }
        if key.exps.is_empty() && key.mono.len() == 1 {
            let (b, a) = key.mono.iter().next().unwrap();
            if a.is_one() {
                match b {
                    Basis::Log => return Ok(Self::basis_pow(Basis::Inv, h)),
                    Basis::LogLog => return Ok(Self::basis_pow(Basis::Log, h)),
                    Basis::LogLogLog => return Ok(Self::basis_pow(Basis::LogLog, h)),
                    _ => {}
                }
            }
        }
        if key.involves_hyper() && *key != Self::basis(Basis::HyperLog) {
            return Err(RateError::Fragment(
                "exponential of a hyper-exponential expression".into(),
            ));
        }
        let mut g = Growth::one();
        g.exps.insert(key.clone(), h);
        Ok(g)
    }

    /// `hyper(a)`.
    pub fn hyper(a: Q) -> Growth {
        if a.is_zero() {
            return Growth::one();
        }
        let mut g = Growth::one();
        g.exps.insert(Self::basis(Basis::HyperLog), a);
        g
    }

    pub fn involves_hyper(&self) -> bool {
        self.mono.contains_key(&Basis::HyperLog) || self.exps.keys().any(|k| k.involves_hyper())
    }

    /// Number of nested exponentials above the basis.
    pub fn tower_height(&self) -> u32 {
        self.exps
            .keys()
            .map(|k| k.tower_height() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Logarithm as a linear combination of log terms.
    pub fn logterms(&self) -> Vec<(LTerm, Q)> {
        let mut out: Vec<(LTerm, Q)> = Vec::new();
        let mut push = |t: LTerm, c: Q| {
            if c.is_zero() {
                return;
            }
            if let Some(slot) = out.iter_mut().find(|(u, _)| *u == t) {
                slot.1 += c;
            } else {
                out.push((t, c));
            }
        };
        for (b, a) in &self.mono {
            let t = match b {
                Basis::LogLogLog => LTerm::L4,
                Basis::LogLog => LTerm::G(Growth::basis(Basis::LogLogLog)),
                Basis::Log => LTerm::G(Growth::basis(Basis::LogLog)),
                Basis::Inv => LTerm::G(Growth::basis(Basis::Log)),
                Basis::HyperLog => LTerm::HL2,
            };
            push(t, *a);
        }
        for (k, h) in &self.exps {
            push(LTerm::G(k.clone()), *h);
        }
        out.retain(|(_, c)| !c.is_zero());
        out
    }

    /// Logarithm as representable (coefficient, growth) terms.
    pub fn log_terms_representable(&self) -> Result<Vec<(Q, Growth)>, RateError> {
        let mut out = Vec::new();
        for (t, c) in self.logterms() {
            match t {
                LTerm::G(g) => out.push((c, g)),
                LTerm::L4 => {
                    return Err(RateError::Fragment(
                        "logarithm below log log log(1/eps)".into(),
                    ))
                }
                LTerm::HL2 => {
                    return Err(RateError::Fragment("logarithm of log(hyper)".into()))
                }
            }
        }
        Ok(out)
    }

    /// Growth order: `Greater` means `self / other → ∞`.
    pub fn cmp_growth(&self, other: &Growth) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let mut diff = self.logterms();
        for (t, c) in other.logterms() {
            if let Some(slot) = diff.iter_mut().find(|(u, _)| *u == t) {
                slot.1 -= c;
            } else {
                diff.push((t, -c));
            }
        }
        dominant_sign(diff)
    }

    /// Leading term of the logarithm with its coefficient; `None` for the
    /// constant class.
    pub fn dominant_log(&self) -> Option<(LTerm, Q)> {
        dominant_term(self.logterms())
    }

    pub fn is_growing(&self) -> bool {
        self.cmp_growth(&Growth::one()) == Ordering::Greater
    }
    pub fn is_vanishing(&self) -> bool {
        self.cmp_growth(&Growth::one()) == Ordering::Less
    }

    pub fn to_expr(&self) -> RateExpr {
        let mut factors: Vec<RateExpr> = Vec::new();
        for (k, h) in self.exps.iter().rev() {
            if *k == Growth::basis(Basis::HyperLog) {
                factors.push(RateExpr::Hyper(*h));
                continue;
            }
            let inner = k.to_expr();
            let arg = if h.is_one() {
                inner
            } else {
                RateExpr::mul(RateExpr::Num(*h), inner)
            };
            factors.push(RateExpr::exp(arg));
        }
        for (b, a) in self.mono.iter().rev() {
            let lam = || RateExpr::div(RateExpr::num(1), RateExpr::Eps);
            let f = match b {
                Basis::Inv => {
                    factors.push(RateExpr::eps_pow(-*a));
                    continue;
                }
                Basis::Log => RateExpr::log(lam()),
                Basis::LogLog => RateExpr::log(RateExpr::log(lam())),
                Basis::LogLogLog => RateExpr::log(RateExpr::log(RateExpr::log(lam()))),
                Basis::HyperLog => RateExpr::log(RateExpr::Hyper(q(1))),
            };
            factors.push(if a.is_one() { f } else { RateExpr::pow(f, *a) });
        }
        let mut it = factors.into_iter();
        match it.next() {
            None => RateExpr::num(1),
            Some(first) => it.fold(first, |acc, f| RateExpr::Mul(Box::new(acc), Box::new(f))),
        }
    }
}

impl LTerm {
    /// Growth order between two log terms, all of which tend to infinity.
    pub fn cmp_growth(&self, other: &LTerm) -> Ordering {
        match (self, other) {
            (LTerm::L4, LTerm::L4) | (LTerm::HL2, LTerm::HL2) => Ordering::Equal,
            (LTerm::L4, _) => Ordering::Less,
            (_, LTerm::L4) => Ordering::Greater,
            (LTerm::HL2, LTerm::G(g)) => {
                if g.involves_hyper() {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            (LTerm::G(_), LTerm::HL2) => other.cmp_growth(self).reverse(),
            (LTerm::G(a), LTerm::G(b)) => a.cmp_growth(b),
        }
    }
}

/// Sign of the limit of a combination of growing log terms, read as an
/// ordering against zero.
pub(crate) fn dominant_sign(mut terms: Vec<(LTerm, Q)>) -> Ordering {
    terms.retain(|(_, c)| !c.is_zero());
    terms.sort_by(|a, b| b.0.cmp_growth(&a.0));
    let mut i = 0;
    while i < terms.len() {
        let mut j = i;
        let mut sum = Q::zero();
        while j < terms.len() && terms[j].0.cmp_growth(&terms[i].0) == Ordering::Equal {
            sum += terms[j].1;
            j += 1;
        }
        if !sum.is_zero() {
            return if sum.is_positive() {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        i = j;
    }
    Ordering::Equal
}

/// The dominant log term with its coefficient, if any.
pub(crate) fn dominant_term(mut terms: Vec<(LTerm, Q)>) -> Option<(LTerm, Q)> {
    terms.retain(|(_, c)| !c.is_zero());
    terms.sort_by(|a, b| b.0.cmp_growth(&a.0));
    terms.into_iter().next()
}

impl fmt::Display for Growth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(a: i64) -> Growth {
        Growth::basis_pow(Basis::Inv, q(a))
    }
    fn e(k: u32) -> Growth {
        let mut g = lam(1);
        for _ in 0..k {
            g = Growth::exp_of(q(1), &g).unwrap();
        }
        g
    }

    #[test]
    fn powers_are_ordered_by_exponent() {
        assert_eq!(lam(2).cmp_growth(&lam(3)), Ordering::Less);
        assert_eq!(lam(3).cmp_growth(&lam(3)), Ordering::Equal);
        assert!(lam(1).is_growing());
        assert!(lam(-1).is_vanishing());
    }

    #[test]
    fn log_is_slower_than_any_power() {
        let l = Growth::basis_pow(Basis::Log, q(50));
        let p = Growth::basis_pow(Basis::Inv, Q::new(1, 100));
        assert_eq!(l.cmp_growth(&p), Ordering::Less);
    }

    #[test]
    fn towers_and_exp_factors_compare_consistently() {
        let e2 = e(2);
        let two_e1 = Growth::exp_of(q(2), &e(1)).unwrap();
        assert_eq!(e2.cmp_growth(&two_e1), Ordering::Less);
        assert_eq!(e(1).pow(q(5)).cmp_growth(&e(2)), Ordering::Less);
        let exp_sq = Growth::exp_of(q(1), &lam(2)).unwrap();
        assert_eq!(e(1).pow(q(1000)).cmp_growth(&exp_sq), Ordering::Less);
    }

    #[test]
    fn hyper_dominates_every_finite_tower() {
        let h = Growth::hyper(Q::new(1, 10));
        assert_eq!(e(6).pow(q(100)).cmp_growth(&h), Ordering::Less);
        assert_eq!(
            Growth::hyper(q(1)).cmp_growth(&Growth::hyper(q(2))),
            Ordering::Less
        );
    }

    #[test]
    fn exp_of_log_folds_into_a_power() {
        let g = Growth::exp_of(q(3), &Growth::basis(Basis::Log)).unwrap();
        assert_eq!(g, lam(3));
    }
}
