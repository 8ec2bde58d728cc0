//! Asymptotic gauges as closed family descriptors.
//!
//! Every gauge compiles to a [`Ceiling`], an exact description of its ring
//! of moderate nets in terms of growth classes. Moderateness, negligibility,
//! equivalence and inclusion queries then become decidable comparisons of
//! ceilings, with numeric fallbacks for nets outside the symbolic fragment.

use crate::index_core::{GridConfig, IndexSet, Net, Status, Verdict};
use crate::math;
use crate::rate_dsl::{eval_at, normalize, Growth, LTerm, RateError, RateExpr, Q};
use crate::{Error, Result};
use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use num_traits::Signed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExponentDomain {
    PositiveReals,
    Naturals,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// {base^a}, a ranging over the exponent domain.
    PowerFamily { base: RateExpr, domain: ExponentDomain },
    FiniteGenerators(Vec<RateExpr>),
    /// {exp(H·b) | H > 0, b in inner}.
    ExpOf(Box<Gauge>),
    /// {exp^k(base) | k ≥ 1}.
    IteratedExp(RateExpr),
}

/// Exact description of a ring of moderate nets.
///
/// Items are log terms: a growth class `g` appears as `LTerm::G(g)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Ceiling {
    /// Items dominated by the given one.
    Upto(LTerm),
    /// Bounded items, and items whose logarithm has its leading term in
    /// the inner ceiling.
    Exp(Box<Ceiling>),
    /// Items dominated by some finite exponential tower over the base.
    Tower(LTerm),
}

fn bounded_item(t: &LTerm) -> bool {
    matches!(t, LTerm::G(g) if !g.is_growing())
}

fn hyper_item(t: &LTerm) -> bool {
    match t {
        LTerm::G(g) => g.involves_hyper(),
        LTerm::HL2 => true,
        LTerm::L4 => false,
    }
}

fn item_le(a: &LTerm, b: &LTerm, strict: bool) -> bool {
    match a.cmp_growth(b) {
        Ordering::Less => true,
        Ordering::Equal => !strict,
        Ordering::Greater => false,
    }
}

fn log_lead(g: &Growth) -> LTerm {
    g.dominant_log().map(|(t, _)| t).unwrap_or(LTerm::G(Growth::one()))
}

fn tower_contains(base: &LTerm, t: &LTerm) -> bool {
    match t {
        LTerm::L4 => true,
        LTerm::HL2 => hyper_item(base),
        LTerm::G(g) => {
            if !g.is_growing() {
                return true;
            }
            if hyper_item(t) && !hyper_item(base) {
                return false;
            }
            if item_le(t, base, false) {
                return true;
            }
            tower_contains(base, &log_lead(g))
        }
    }
}

impl Ceiling {
    /// Membership of an item; `strict` asks for strict domination when the
    /// ceiling is a single item.
    pub fn contains(&self, t: &LTerm, strict: bool) -> bool {
        if bounded_item(t) {
            return true;
        }
        match self {
            Ceiling::Upto(top) => !bounded_item(top) && item_le(t, top, strict),
            Ceiling::Exp(inner) => match t {
                LTerm::L4 => true,
                LTerm::HL2 => inner.contains(&LTerm::HL2, false),
                LTerm::G(g) => inner.contains(&log_lead(g), false),
            },
            Ceiling::Tower(b) => tower_contains(b, t),
        }
    }

    pub fn contains_growth(&self, g: &Growth) -> bool {
        self.contains(&LTerm::G(g.clone()), false)
    }

    fn involves_hyper(&self) -> bool {
        match self {
            Ceiling::Upto(t) | Ceiling::Tower(t) => hyper_item(t),
            Ceiling::Exp(inner) => inner.involves_hyper(),
        }
    }

    /// Inclusion `self ⊆ other`; with `strict`, a single-item `other` must
    /// dominate strictly.
    pub fn subset_of(&self, other: &Ceiling, strict: bool) -> bool {
        match (self, other) {
            (Ceiling::Upto(h), _) => other.contains(h, strict),
            (_, Ceiling::Upto(x)) if bounded_item(x) => false,
            (Ceiling::Exp(s1), Ceiling::Upto(x)) => match x {
                LTerm::L4 => false,
                LTerm::HL2 => !s1.involves_hyper(),
                LTerm::G(g) => s1.subset_of(&Ceiling::Upto(log_lead(g)), true),
            },
            (Ceiling::Exp(s1), Ceiling::Exp(s2)) => s1.subset_of(s2, false),
            (Ceiling::Exp(s1), Ceiling::Tower(_)) => s1.subset_of(other, false),
            (Ceiling::Tower(b1), Ceiling::Upto(x)) => !hyper_item(b1) && hyper_item(x),
            (Ceiling::Tower(_), Ceiling::Exp(s2)) => self.subset_of(s2, false),
            (Ceiling::Tower(b1), Ceiling::Tower(b2)) => tower_contains(b2, b1),
        }
    }
}

fn fmt_item(t: &LTerm) -> String {
    match t {
        LTerm::G(g) => g.to_string(),
        LTerm::L4 => "log(log(log(log(1 / eps))))".into(),
        LTerm::HL2 => "log(log(hyper(1)))".into(),
    }
}

impl fmt::Display for Ceiling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ceiling::Upto(t) => write!(f, "O({})", fmt_item(t)),
            Ceiling::Exp(s) => write!(f, "exp({s})"),
            Ceiling::Tower(t) => write!(f, "tower({})", fmt_item(t)),
        }
    }
}

/// An asymptotic gauge: a family descriptor on an index set, with its
/// flags and ceiling computed once at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge {
    family: Family,
    index: IndexSet,
    positive: bool,
    totally_ordered: bool,
    ceiling: Ceiling,
}

fn growth_of(e: &RateExpr) -> Result<Option<Growth>> {
    let nf = normalize(e)?;
    Ok(if nf.is_zero() { None } else { Some(nf.growth()) })
}

fn pre(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn pow_expr(b: &RateExpr, a: Q) -> RateExpr {
    let p = RateExpr::pow(b.clone(), a);
    normalize(&p).map(|n| n.to_expr()).unwrap_or(p)
}

fn tidy(e: RateExpr) -> RateExpr {
    normalize(&e).map(|n| n.to_expr()).unwrap_or(e)
}

fn exp_times(h: Q, m: &RateExpr) -> RateExpr {
    tidy(RateExpr::exp(RateExpr::mul(RateExpr::Num(h), m.clone())))
}

fn q_floor(x: Q) -> Q {
    Q::from_integer(x.floor().to_integer())
}

impl Gauge {
    pub fn new(family: Family, index: IndexSet) -> Result<Gauge> {
        let family = match family {
            Family::ExpOf(inner) => {
                let inner = if inner.index == index {
                    *inner
                } else {
                    Gauge::new(inner.family, index.clone())?
                };
                Family::ExpOf(Box::new(inner))
            }
            f => f,
        };
        let eff = |e: &RateExpr| match &index {
            IndexSet::Composed(s) => RateExpr::comp(e.clone(), s.clone()),
            _ => e.clone(),
        };
        let (positive, totally_ordered, ceiling) = match &family {
            Family::PowerFamily { base, .. } => {
                let nf = normalize(&eff(base))?;
                if !(nf.growth().is_growing() && nf.eventual_sign() == Ordering::Greater) {
                    return Err(pre(format!("power base {base} must tend to +infinity")));
                }
                (true, true, Ceiling::Exp(Box::new(Ceiling::Upto(log_lead(&nf.growth())))))
            }
            Family::FiniteGenerators(list) => {
                if list.is_empty() {
                    return Err(Error::Argument("a generator list cannot be empty".into()));
                }
                let mut nfs = Vec::new();
                for m in list {
                    nfs.push(normalize(&eff(m))?);
                }
                let positive = nfs.iter().all(|n| n.eventual_sign() == Ordering::Greater);
                let mut top = Growth::one();
                for n in &nfs {
                    if n.growth().cmp_growth(&top) == Ordering::Greater {
                        top = n.growth();
                    }
                }
                (positive, true, Ceiling::Upto(LTerm::G(top)))
            }
            Family::ExpOf(inner) => (
                true,
                inner.totally_ordered,
                Ceiling::Exp(Box::new(inner.ceiling.clone())),
            ),
            Family::IteratedExp(base) => {
                let nf = normalize(&eff(base))?;
                if !(nf.growth().is_growing() && nf.eventual_sign() == Ordering::Greater) {
                    return Err(pre(format!("tower base {base} must tend to +infinity")));
                }
                if !base.is_hyper_free() {
                    return Err(Error::Rate(RateError::Fragment(
                        "exponentials of the hyper atom".into(),
                    )));
                }
                (true, true, Ceiling::Tower(LTerm::G(nf.growth())))
            }
        };
        Ok(Gauge {
            family,
            index,
            positive,
            totally_ordered,
            ceiling,
        })
    }

    /// {base^a | a > 0}.
    pub fn powers(base: RateExpr) -> Result<Gauge> {
        Gauge::new(
            Family::PowerFamily {
                base,
                domain: ExponentDomain::PositiveReals,
            },
            IndexSet::HalfOpenUnit,
        )
    }

    /// AG(b) = {b^m | m ∈ ℕ}.
    pub fn powers_nat(base: RateExpr) -> Result<Gauge> {
        Gauge::new(
            Family::PowerFamily {
                base,
                domain: ExponentDomain::Naturals,
            },
            IndexSet::HalfOpenUnit,
        )
    }

    pub fn generators(list: Vec<RateExpr>) -> Result<Gauge> {
        Gauge::new(Family::FiniteGenerators(list), IndexSet::HalfOpenUnit)
    }

    pub fn iterated_exp(base: RateExpr) -> Result<Gauge> {
        Gauge::new(Family::IteratedExp(base), IndexSet::HalfOpenUnit)
    }

    /// {ε^-a | a > 0}.
    pub fn special() -> Gauge {
        Gauge::powers(RateExpr::inv_eps()).expect("valid base")
    }

    /// {exp^k(1/ε) | k ≥ 1}.
    pub fn finite_exp() -> Gauge {
        Gauge::iterated_exp(RateExpr::inv_eps()).expect("valid base")
    }

    /// {hyper(a) | a > 0}.
    pub fn infinite_exp() -> Gauge {
        Gauge::powers(RateExpr::Hyper(Q::from_integer(1))).expect("valid base")
    }

    /// The same family read through a change of scale.
    pub fn with_scale(&self, scale: RateExpr) -> Result<Gauge> {
        let index = IndexSet::composed(scale)?;
        Gauge::new(self.family.clone(), index)
    }

    pub fn on_index(&self, index: IndexSet) -> Result<Gauge> {
        Gauge::new(self.family.clone(), index)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }
    pub fn index(&self) -> &IndexSet {
        &self.index
    }
    pub fn is_positive(&self) -> bool {
        self.positive
    }
    pub fn is_totally_ordered(&self) -> bool {
        self.totally_ordered
    }
    pub fn ceiling(&self) -> &Ceiling {
        &self.ceiling
    }

    fn eff(&self, e: &RateExpr) -> RateExpr {
        match &self.index {
            IndexSet::Composed(s) => RateExpr::comp(e.clone(), s.clone()),
            _ => e.clone(),
        }
    }

    fn eff_growth(&self, e: &RateExpr) -> Option<Growth> {
        growth_of(&self.eff(e)).ok().flatten()
    }

    /// Representative members, slowest first within each kind.
    pub fn members(&self, n: usize) -> Vec<RateExpr> {
        let mut out = Vec::new();
        match &self.family {
            Family::PowerFamily { base, domain } => {
                if *domain == ExponentDomain::PositiveReals {
                    out.push(pow_expr(base, Q::new(1, 2)));
                }
                for k in 1..=n as i64 {
                    out.push(pow_expr(base, Q::from_integer(k)));
                }
            }
            Family::FiniteGenerators(list) => out.extend(list.iter().cloned()),
            Family::ExpOf(inner) => {
                for m in inner.members(n) {
                    for h in [1, 2] {
                        out.push(exp_times(Q::from_integer(h), &m));
                    }
                }
            }
            Family::IteratedExp(base) => {
                for k in 1..=n.min(6) as u32 {
                    out.push(RateExpr::exp_iter(k, base.clone()));
                }
            }
        }
        out.truncate(n.max(1));
        out
    }

    fn first_growing_member(&self) -> RateExpr {
        self.members(8)
            .into_iter()
            .find(|m| self.eff_growth(m).map_or(false, |g| g.is_growing()))
            .unwrap_or_else(RateExpr::inv_eps)
    }

    /// A member dominating the growth class `gx`, if one is found.
    pub fn member_dominating(&self, gx: &Growth) -> Option<RateExpr> {
        if !self.ceiling.contains_growth(gx) {
            return None;
        }
        let dominated = |m: &RateExpr| {
            self.eff_growth(m)
                .map_or(false, |gm| gx.cmp_growth(&gm) != Ordering::Greater)
        };
        let found = match &self.family {
            Family::PowerFamily { base, domain } => {
                let gb = self.eff_growth(base)?;
                let (tb, beta) = gb.dominant_log()?;
                let mut cands: Vec<Q> = Vec::new();
                match gx.dominant_log() {
                    Some((tx, alpha)) if alpha.is_positive() && tx.cmp_growth(&tb) == Ordering::Equal => {
                        let a0 = alpha / beta;
                        match domain {
                            ExponentDomain::PositiveReals => {
                                cands.push(a0);
                                cands.push(q_floor(a0) + 1);
                            }
                            ExponentDomain::Naturals => {
                                let c = Q::from_integer(a0.ceil().to_integer().max(1));
                                cands.push(c);
                                cands.push(c + 1);
                            }
                        }
                    }
                    _ => cands.push(Q::from_integer(1)),
                }
                cands
                    .into_iter()
                    .map(|a| pow_expr(base, a))
                    .find(|m| dominated(m))
            }
            Family::ExpOf(inner) => match gx.dominant_log() {
                Some((LTerm::G(t), alpha)) if alpha.is_positive() => {
                    let m = inner.member_dominating(&t)?;
                    let nm = normalize(&inner.eff(&m)).ok()?;
                    let hs: Vec<Q> = if nm.growth().cmp_growth(&t) == Ordering::Equal {
                        let h0 = alpha / nm.constant();
                        let h1 = q_floor(h0) + 1;
                        alloc::vec![h0, h1, h1 * 2]
                    } else {
                        alloc::vec![Q::from_integer(1), Q::from_integer(2), Q::from_integer(4)]
                    };
                    hs.into_iter().map(|h| exp_times(h, &m)).find(|c| dominated(c))
                }
                Some((_, alpha)) if alpha.is_positive() => None,
                _ => Some(RateExpr::exp(inner.first_growing_member())),
            },
            Family::FiniteGenerators(list) => {
                let mut sorted: Vec<(Growth, RateExpr)> = list
                    .iter()
                    .filter_map(|m| self.eff_growth(m).map(|g| (g, m.clone())))
                    .collect();
                sorted.sort_by(|a, b| a.0.cmp_growth(&b.0));
                sorted.into_iter().map(|p| p.1).find(|m| dominated(m))
            }
            Family::IteratedExp(base) => (1..=10)
                .map(|k| RateExpr::exp_iter(k, base.clone()))
                .find(|m| dominated(m)),
        };
        found.or_else(|| self.members(24).into_iter().find(|m| dominated(m)))
    }

    pub fn literal(&self) -> String {
        let body = match &self.family {
            Family::PowerFamily { base, domain } => match domain {
                ExponentDomain::PositiveReals => format!("powers({base})"),
                ExponentDomain::Naturals => format!("powers_nat({base})"),
            },
            Family::FiniteGenerators(list) => {
                let parts: Vec<String> = list.iter().map(|m| m.to_string()).collect();
                format!("gens[{}]", parts.join(", "))
            }
            Family::ExpOf(inner) => format!("expof({})", inner.family_literal()),
            Family::IteratedExp(base) => format!("iterexp({base})"),
        };
        match &self.index {
            IndexSet::Composed(s) => format!("comp({body}, {s})"),
            _ => body,
        }
    }

    fn family_literal(&self) -> String {
        match &self.index {
            IndexSet::Composed(_) => {
                Gauge::new(self.family.clone(), IndexSet::HalfOpenUnit)
                    .map(|g| g.literal())
                    .unwrap_or_default()
            }
            _ => self.literal(),
        }
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literal())
    }
}

/// e^g.
pub fn exp_gauge(g: &Gauge) -> Gauge {
    Gauge::new(Family::ExpOf(Box::new(g.clone())), g.index.clone()).expect("exponential of a valid gauge")
}

fn check_index(x: &Net, g: &Gauge) -> Result<()> {
    if x.index() != g.index() {
        return Err(Error::Argument(format!(
            "net lives on {} but the gauge on {}",
            x.index().name(),
            g.index().name()
        )));
    }
    Ok(())
}

/// Whether x is dominated by some member of g.
pub fn is_moderate(x: &Net, g: &Gauge) -> Result<Verdict> {
    is_moderate_with(x, g, &GridConfig::default())
}

pub fn is_moderate_with(x: &Net, g: &Gauge, cfg: &GridConfig) -> Result<Verdict> {
    check_index(x, g)?;
    if let Some(Ok(nf)) = x.normal_form() {
        if nf.is_zero() {
            return Ok(Verdict::exact(Status::Holds).with_detail("zero net"));
        }
        let gx = nf.growth();
        if g.ceiling.contains_growth(&gx) {
            let mut v = Verdict::exact(Status::Holds).with_detail(format!("growth {gx} within {}", g.ceiling));
            if let Some(m) = g.member_dominating(&gx) {
                v = v.with_evidence("member", m);
            }
            return Ok(v);
        }
        return Ok(Verdict::exact(Status::Fails)
            .with_detail(format!("growth {gx} escapes {}", g.ceiling)));
    }
    if vanishes_on_tail(x, cfg) {
        return Ok(Verdict::numeric(Status::Holds, 0.9).with_detail("net vanishes on the grid tail"));
    }
    Ok(moderate_log(&log_points(x, cfg), g, 0))
}

/// Whether x = O(w⁻¹) for every positive member w of z.
pub fn is_negligible_num(x: &Net, z: &Gauge) -> Result<Verdict> {
    is_negligible_num_with(x, z, &GridConfig::default())
}

pub fn is_negligible_num_with(x: &Net, z: &Gauge, cfg: &GridConfig) -> Result<Verdict> {
    check_index(x, z)?;
    if !z.positive {
        return Err(pre("negligibility needs a positive gauge"));
    }
    if let Some(Ok(nf)) = x.normal_form() {
        if nf.is_zero() {
            return Ok(Verdict::exact(Status::Holds).with_detail("zero net"));
        }
        let inv = nf.growth().recip();
        if z.ceiling.subset_of(&Ceiling::Upto(LTerm::G(inv.clone())), false) {
            return Ok(Verdict::exact(Status::Holds)
                .with_detail(format!("every member of {} is O({inv})", z.literal())));
        }
        let mut v = Verdict::exact(Status::Fails)
            .with_detail(format!("some member of {} outgrows {inv}", z.literal()));
        if let Some(w) = negligibility_counter(&nf.growth(), z) {
            v = v.with_evidence("member", &w).with_evidence(
                "reciprocal",
                tidy(RateExpr::pow(w, Q::from_integer(-1))),
            );
        }
        return Ok(v);
    }
    if vanishes_on_tail(x, cfg) {
        return Ok(Verdict::numeric(Status::Holds, 0.9).with_detail("net vanishes on the grid tail"));
    }
    Ok(negligible_log(&log_points(x, cfg), z))
}

/// Whether the last grid values are all exactly zero.
fn vanishes_on_tail(x: &Net, cfg: &GridConfig) -> bool {
    let pts = x.eval_points(cfg);
    let k = cfg.tail_len().min(pts.len());
    k >= 5 && pts[pts.len() - k..].iter().all(|&e| matches!(x.value(e), Ok(v) if v == 0.0))
}

/// A member w of z with x ≠ O(w⁻¹).
fn negligibility_counter(gx: &Growth, z: &Gauge) -> Option<RateExpr> {
    let escapes = |w: &RateExpr| {
        z.eff_growth(w)
            .map_or(false, |gw| gx.mul(&gw).is_growing())
    };
    if let Family::PowerFamily { base, .. } = &z.family {
        let gb = z.eff_growth(base)?;
        let (tb, beta) = gb.dominant_log()?;
        let a = match gx.dominant_log() {
            Some((tx, alpha)) if alpha.is_negative() && tx.cmp_growth(&tb) == Ordering::Equal => {
                q_floor(alpha.abs() / beta) + 1
            }
            _ => Q::from_integer(1),
        };
        let w = pow_expr(base, a);
        if escapes(&w) {
            return Some(w);
        }
    }
    z.members(32).into_iter().find(|w| escapes(w))
}

fn log_points(x: &Net, cfg: &GridConfig) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for e in x.eval_points(cfg) {
        match x.value(e) {
            Ok(v) if v != 0.0 => out.push((e, math::ln(math::abs(v)))),
            Ok(_) => {}
            Err(crate::rate_dsl::EvalError::Overflow) => break,
            Err(_) => {}
        }
    }
    out
}

fn log_of(e: &RateExpr) -> RateExpr {
    let l = RateExpr::log(e.clone());
    normalize(&l).map(|n| n.to_expr()).unwrap_or(l)
}

/// Numeric test that a sampled sequence stays bounded above.
fn bounded_above(vals: &[f64]) -> (Status, f64) {
    let n = vals.len();
    if n < 10 {
        return (Status::Inconclusive, 0.0);
    }
    let tail = &vals[n - 10..];
    let mut run = 1;
    let mut prev: Option<f64> = None;
    for k in (1..tail.len()).rev() {
        let inc = tail[k] - tail[k - 1];
        if !(inc > 0.0) || prev.map_or(false, |p| p < 0.9 * inc) {
            break;
        }
        prev = Some(inc);
        run += 1;
    }
    let first = tail[1] - tail[0];
    let last = tail[9] - tail[8];
    if run >= 10 && last >= 0.8 * first {
        return (Status::Fails, 0.9);
    }
    let earlier = vals[..n - 10].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let recent = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = 1.0 + math::abs(earlier);
    if recent <= earlier + 0.05 * scale {
        return (Status::Holds, 0.9);
    }
    let incs: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let decaying = incs.windows(2).all(|w| w[1] <= 0.95 * w[0].abs() || w[1] <= 0.0);
    if decaying {
        return (Status::Holds, 0.7);
    }
    (Status::Inconclusive, 0.4)
}

fn tail_max(vals: &[f64]) -> f64 {
    let k = vals.len().saturating_sub(25);
    vals[k..].iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Values of `e` (on the gauge's index) at the given points; points where
/// evaluation fails are dropped from both sequences.
fn paired(pts: &[(f64, f64)], g: &Gauge, e: &RateExpr) -> (Vec<f64>, Vec<f64>) {
    let ee = g.eff(e);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for &(eps, l) in pts {
        if let Ok(v) = eval_at(&ee, eps) {
            a.push(l);
            b.push(v);
        }
    }
    (a, b)
}

/// Numeric moderateness from samples of ln|x|.
pub fn moderate_log(pts: &[(f64, f64)], g: &Gauge, depth: usize) -> Verdict {
    if pts.len() < 10 {
        return Verdict::numeric(Status::Inconclusive, 0.0)
            .with_detail(format!("only {} usable grid points", pts.len()));
    }
    match &g.family {
        Family::PowerFamily { base, .. } => {
            let (l, lb) = paired(pts, g, &log_of(base));
            let y: Vec<f64> = l.iter().zip(&lb).filter(|p| *p.1 > 0.0).map(|(a, b)| a / b).collect();
            let (st, conf) = bounded_above(&y);
            let mut v = Verdict::numeric(st, conf).with_detail("log|x| / log(base) on the grid");
            if st == Status::Holds {
                let a = math::floor(tail_max(&y).max(0.0)) as i64 + 1;
                v = v.with_evidence("member", pow_expr(base, Q::from_integer(a)));
            }
            v
        }
        Family::FiniteGenerators(list) => {
            let mut sorted: Vec<(Growth, RateExpr)> = list
                .iter()
                .filter_map(|m| g.eff_growth(m).map(|gr| (gr, m.clone())))
                .collect();
            sorted.sort_by(|a, b| a.0.cmp_growth(&b.0));
            let mut all_fail = true;
            for (_, m) in sorted {
                let (l, lm) = paired(pts, g, &log_of(&RateExpr::abs(m.clone())));
                let d: Vec<f64> = l.iter().zip(&lm).map(|(a, b)| a - b).collect();
                match bounded_above(&d) {
                    (Status::Holds, c) => {
                        return Verdict::numeric(Status::Holds, c).with_evidence("member", m)
                    }
                    (Status::Inconclusive, _) => all_fail = false,
                    _ => {}
                }
            }
            if all_fail {
                Verdict::numeric(Status::Fails, 0.8).with_detail("outgrows every generator")
            } else {
                Verdict::numeric(Status::Inconclusive, 0.4)
            }
        }
        Family::ExpOf(inner) => {
            let l: Vec<f64> = pts.iter().map(|p| p.1).collect();
            if bounded_above(&l).0 == Status::Holds {
                return Verdict::numeric(Status::Holds, 0.9)
                    .with_evidence("member", RateExpr::exp(inner.first_growing_member()));
            }
            let inner_pts: Vec<(f64, f64)> = pts
                .iter()
                .filter(|p| p.1 > 0.0)
                .map(|p| (p.0, math::ln(p.1)))
                .collect();
            let iv = moderate_log(&inner_pts, inner, depth + 1);
            let mut v = Verdict::numeric(iv.status, iv.confidence.unwrap_or(0.0))
                .with_detail("log|x| tested against the inner gauge");
            if let (Status::Holds, Some(m)) = (iv.status, iv.evidence("member")) {
                if let Ok(me) = crate::rate_dsl::parse(m) {
                    let (l2, mv) = paired(pts, g, &me);
                    let ratio = l2
                        .iter()
                        .zip(&mv)
                        .filter(|p| *p.1 > 0.0)
                        .map(|(a, b)| a / b)
                        .fold(0.0, f64::max);
                    let h = math::ceil(1.05 * ratio).max(1.0) as i64;
                    v = v.with_evidence("member", exp_times(Q::from_integer(h), &me));
                }
            }
            v
        }
        Family::IteratedExp(base) => {
            let mut cur: Vec<(f64, f64)> = pts.to_vec();
            for k in 1..=6u32 {
                let (l, b) = paired(&cur, g, base);
                let d: Vec<f64> = l.iter().zip(&b).map(|(a, c)| a - c).collect();
                if bounded_above(&d).0 == Status::Holds {
                    return Verdict::numeric(Status::Holds, 0.8)
                        .with_evidence("member", RateExpr::exp_iter(k + 1, base.clone()));
                }
                cur = cur
                    .iter()
                    .filter(|p| p.1 > 0.0)
                    .map(|p| (p.0, math::ln(p.1)))
                    .collect();
                if cur.len() < 10 {
                    break;
                }
            }
            Verdict::numeric(Status::Inconclusive, 0.3)
        }
    }
}

/// Numeric negligibility from samples of ln|x|.
pub fn negligible_log(pts: &[(f64, f64)], z: &Gauge) -> Verdict {
    if pts.len() < 10 {
        return Verdict::numeric(Status::Inconclusive, 0.0)
            .with_detail(format!("only {} usable grid points", pts.len()));
    }
    let flip = |st: Status| match st {
        Status::Holds => Status::Fails,
        Status::Fails => Status::Holds,
        s => s,
    };
    match &z.family {
        Family::PowerFamily { base, .. } => {
            let (l, lb) = paired(pts, z, &log_of(base));
            let y: Vec<f64> = l.iter().zip(&lb).filter(|p| *p.1 > 0.0).map(|(a, b)| -a / b).collect();
            let (st, conf) = bounded_above(&y);
            let mut v = Verdict::numeric(flip(st), conf).with_detail("-log|x| / log(base) on the grid");
            if st == Status::Holds {
                let a = math::floor(tail_max(&y).max(0.0)) as i64 + 1;
                v = v.with_evidence("member", pow_expr(base, Q::from_integer(a)));
            }
            v
        }
        Family::FiniteGenerators(list) => {
            let mut out = Verdict::numeric(Status::Holds, 1.0);
            for m in list {
                let (l, lm) = paired(pts, z, &log_of(&RateExpr::abs(m.clone())));
                let d: Vec<f64> = l.iter().zip(&lm).map(|(a, b)| -(a + b)).collect();
                let (st, conf) = bounded_above(&d);
                let mut v = Verdict::numeric(flip(st), conf);
                if st == Status::Holds {
                    v = v.with_evidence("member", m);
                }
                out = out.and(v);
            }
            out
        }
        Family::ExpOf(inner) => {
            let u: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, -p.1)).collect();
            let uv: Vec<f64> = u.iter().map(|p| p.1).collect();
            if bounded_above(&uv).0 == Status::Holds {
                return Verdict::numeric(Status::Fails, 0.9)
                    .with_evidence("member", RateExpr::exp(inner.first_growing_member()));
            }
            let lu: Vec<(f64, f64)> = u.iter().filter(|p| p.1 > 0.0).map(|p| (p.0, math::ln(p.1))).collect();
            let iv = moderate_log(&lu, inner, 1);
            Verdict::numeric(flip(iv.status), iv.confidence.unwrap_or(0.0))
                .with_detail("-log|x| tested against the inner gauge")
        }
        Family::IteratedExp(_) => {
            let lu: Vec<(f64, f64)> = pts
                .iter()
                .filter(|p| p.1 < 0.0)
                .map(|p| (p.0, math::ln(-p.1)))
                .collect();
            let iv = moderate_log(&lu, z, 1);
            Verdict::numeric(flip(iv.status), iv.confidence.unwrap_or(0.0))
        }
    }
}

/// Per-axiom verdicts for the five gauge axioms.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub verdicts: [Verdict; 5],
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds())
    }
    /// Index (0-based) of the first axiom that does not hold.
    pub fn first_failure(&self) -> Option<usize> {
        self.verdicts.iter().position(|v| !v.holds())
    }
}

pub const AXIOM_NAMES: [&str; 5] = ["nets", "infinite", "product", "scalar", "abs_sum"];

fn pair_str(a: &RateExpr, b: &RateExpr) -> String {
    format!("({a}, {b})")
}

pub fn check_axioms(g: &Gauge) -> AxiomReport {
    let nets = Verdict::exact(Status::Holds).with_detail("members are real-valued nets");
    let scalar = Verdict::exact(Status::Holds).with_detail("r·i = O(i)");
    let (infinite, product, abs_sum) = match &g.family {
        Family::PowerFamily { base, domain } => {
            let m = match domain {
                ExponentDomain::PositiveReals => "b^a · b^c = b^(a+c)",
                ExponentDomain::Naturals => "b^m · b^n = b^(m+n)",
            };
            (
                Verdict::exact(Status::Holds).with_evidence("member", base),
                Verdict::exact(Status::Holds).with_detail(m),
                Verdict::exact(Status::Holds).with_detail("b^a + b^c = O(b^max(a,c)) and b > 0"),
            )
        }
        Family::FiniteGenerators(list) => {
            let gs: Vec<Option<Growth>> = list.iter().map(|m| g.eff_growth(m)).collect();
            let pos: Vec<bool> = list
                .iter()
                .map(|m| {
                    normalize(&g.eff(m)).map_or(false, |n| n.eventual_sign() == Ordering::Greater)
                })
                .collect();
            let gr = |k: usize| gs[k].clone().unwrap_or_else(Growth::one);
            let infinite = match (0..list.len()).find(|&k| gr(k).is_growing()) {
                Some(k) => Verdict::exact(Status::Holds).with_evidence("member", &list[k]),
                None => Verdict::exact(Status::Fails).with_detail("no member tends to infinity"),
            };
            let mut product = Verdict::exact(Status::Holds).with_detail("all pairwise products dominated");
            let mut abs_sum = Verdict::exact(Status::Holds).with_detail("all pairwise sums dominated");
            'outer: for i in 0..list.len() {
                for j in i..list.len() {
                    let p = gr(i).mul(&gr(j));
                    if !(0..list.len()).any(|k| p.cmp_growth(&gr(k)) != Ordering::Greater) {
                        product = Verdict::exact(Status::Fails)
                            .with_detail("product dominated by no member")
                            .with_evidence("pair", pair_str(&list[i], &list[j]));
                        break 'outer;
                    }
                }
            }
            'outer2: for i in 0..list.len() {
                for j in i..list.len() {
                    let ok = (0..list.len()).any(|k| {
                        pos[k]
                            && gr(i).cmp_growth(&gr(k)) != Ordering::Greater
                            && gr(j).cmp_growth(&gr(k)) != Ordering::Greater
                    });
                    if !ok {
                        abs_sum = Verdict::exact(Status::Fails)
                            .with_detail("|i| + |j| dominated by no positive member")
                            .with_evidence("pair", pair_str(&list[i], &list[j]));
                        break 'outer2;
                    }
                }
            }
            (infinite, product, abs_sum)
        }
        Family::ExpOf(inner) => {
            let ir = check_axioms(inner);
            let base = |v: &Verdict, d: &str| {
                Verdict {
                    detail: format!("{d} (from the inner gauge)"),
                    ..v.clone()
                }
            };
            (
                base(&ir.verdicts[1], "exp(H·b) tends to infinity with b"),
                base(&ir.verdicts[4], "exp(H1·b1)·exp(H2·b2) ≤ exp((H1+H2)·s)"),
                base(&ir.verdicts[4], "exp(H1·b1) + exp(H2·b2) ≤ 2·exp((H1+H2)·s)"),
            )
        }
        Family::IteratedExp(base) => (
            Verdict::exact(Status::Holds).with_evidence("member", RateExpr::exp(base.clone())),
            Verdict::exact(Status::Holds).with_detail("exp^k(b)·exp^j(b) = O(exp^(max(k,j)+1)(b))"),
            Verdict::exact(Status::Holds).with_detail("exp^k(b) + exp^j(b) = O(exp^max(k,j)(b))"),
        ),
    };
    AxiomReport {
        verdicts: [nets, infinite, product, scalar, abs_sum],
    }
}

/// Proof data that a gauge has no generator.
#[derive(Clone, Debug, PartialEq)]
pub struct NonPrincipalCertificate {
    /// Any candidate generator has the form exp(H · inner) for this inner
    /// net (or, for towers, exp^k of the base with `inner` = exp^(k-1)).
    pub candidate_inner: RateExpr,
    pub candidate: String,
    /// A net moderate in the gauge but outside every candidate's ring.
    pub escaper: RateExpr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Principal {
    pub generator: Option<RateExpr>,
    pub certificate: Option<NonPrincipalCertificate>,
    pub verdict: Verdict,
}

pub fn principal_generator(g: &Gauge) -> Principal {
    match &g.family {
        Family::PowerFamily { base, .. } => Principal {
            generator: Some(base.clone()),
            certificate: None,
            verdict: Verdict::exact(Status::Holds).with_evidence("generator", base),
        },
        Family::FiniteGenerators(list) => {
            let mut best: Option<(Growth, RateExpr)> = None;
            for m in list {
                if let Some(gm) = g.eff_growth(m) {
                    if best.as_ref().map_or(true, |b| gm.cmp_growth(&b.0) == Ordering::Greater) {
                        best = Some((gm, m.clone()));
                    }
                }
            }
            match best {
                Some((gm, m)) if gm.is_growing() => Principal {
                    generator: Some(m.clone()),
                    certificate: None,
                    verdict: Verdict::exact(Status::Holds)
                        .with_detail("every member is dominated by the fastest one")
                        .with_evidence("generator", m),
                },
                _ => Principal {
                    generator: None,
                    certificate: None,
                    verdict: Verdict::exact(Status::Fails).with_detail("no member tends to infinity"),
                },
            }
        }
        Family::ExpOf(inner) => {
            let c = principal_generator(inner)
                .generator
                .unwrap_or_else(|| inner.first_growing_member());
            let escaper = tidy(RateExpr::exp(RateExpr::pow(c.clone(), Q::from_integer(2))));
            let candidate = format!("exp(H * {})", tidy(c.clone()));
            let verdict = certify_escape(g, &c, &escaper, &candidate);
            Principal {
                generator: None,
                certificate: Some(NonPrincipalCertificate {
                    candidate_inner: tidy(c),
                    candidate,
                    escaper,
                }),
                verdict,
            }
        }
        Family::IteratedExp(base) => {
            let escaper = RateExpr::exp_iter(2, base.clone());
            let candidate = format!("exp({base})");
            let verdict = certify_escape(g, base, &escaper, &candidate)
                .with_detail("each candidate exp^k(b) is escaped by exp^(k+1)(b)");
            Principal {
                generator: None,
                certificate: Some(NonPrincipalCertificate {
                    candidate_inner: base.clone(),
                    candidate,
                    escaper,
                }),
                verdict,
            }
        }
    }
}

/// Fails (no generator) when the escaper is moderate in g but outside the
/// ring of AG(exp(H·c)) for every H > 0.
fn certify_escape(g: &Gauge, c: &RateExpr, escaper: &RateExpr, candidate: &str) -> Verdict {
    let gc = g.eff_growth(c);
    let ge = g.eff_growth(escaper);
    match (gc, ge) {
        (Some(gc), Some(ge)) => {
            let cand_ceiling = Ceiling::Exp(Box::new(Ceiling::Upto(LTerm::G(gc))));
            let inside = g.ceiling.contains_growth(&ge);
            let outside = !cand_ceiling.contains_growth(&ge);
            if inside && outside {
                Verdict::exact(Status::Fails)
                    .with_detail(format!("{escaper} is moderate but escapes AG({candidate}) for every H"))
                    .with_evidence("escaper", escaper)
                    .with_evidence("candidate", candidate)
            } else {
                Verdict::exact(Status::Inconclusive).with_detail("escape certificate did not verify")
            }
        }
        _ => Verdict::exact(Status::Inconclusive).with_detail("certificate outside the fragment"),
    }
}

fn escaping_member(from: &Gauge, to: &Gauge) -> Option<RateExpr> {
    from.members(24).into_iter().find(|m| {
        from.eff_growth(m)
            .map_or(false, |gm| !to.ceiling.contains_growth(&gm))
    })
}

fn inclusion(a: &Gauge, b: &Gauge, label: &str) -> Verdict {
    if a.ceiling.subset_of(&b.ceiling, false) {
        Verdict::exact(Status::Holds).with_detail(format!("{label}: {} within {}", a.ceiling, b.ceiling))
    } else {
        let mut v = Verdict::exact(Status::Fails).with_detail(format!("{label}: {} not within {}", a.ceiling, b.ceiling));
        if let Some(m) = escaping_member(a, b) {
            v = v.with_evidence("escaper", m);
        }
        v
    }
}

fn same_index(a: &Gauge, b: &Gauge) -> Result<()> {
    if a.index != b.index {
        Err(Error::Argument("gauges live on different index sets".into()))
    } else {
        Ok(())
    }
}

/// R_M(a) = R_M(b).
pub fn equivalent_gauges(a: &Gauge, b: &Gauge) -> Result<Verdict> {
    same_index(a, b)?;
    Ok(inclusion(a, b, "R_M(a) in R_M(b)").and(inclusion(b, a, "R_M(b) in R_M(a)")))
}

/// Decided through R_M(B) ⊆ R_M(Z).
pub fn ideal_compatible(b: &Gauge, z: &Gauge) -> Result<Verdict> {
    same_index(b, z)?;
    Ok(inclusion(b, z, "R_M(B) in R_M(Z)").with_evidence("direction", "moderate-ring inclusion"))
}

/// A pair of gauges (B, Z) with R_M(B) ⊆ R_M(Z).
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraSpec {
    pub b: Gauge,
    pub z: Gauge,
}

impl AlgebraSpec {
    pub fn new(b: Gauge, z: Gauge) -> Result<AlgebraSpec> {
        if !ideal_compatible(&b, &z)?.holds() {
            return Err(pre(format!("R_M({b}) is not contained in R_M({z})")));
        }
        Ok(AlgebraSpec { b, z })
    }

    /// (g, g).
    pub fn diagonal(g: Gauge) -> AlgebraSpec {
        AlgebraSpec { b: g.clone(), z: g }
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.b, self.z)
    }
}

/// s1 ⪯ s2: the square of moderate-ring inclusions commutes.
pub fn algebra_order(s1: &AlgebraSpec, s2: &AlgebraSpec) -> Result<Verdict> {
    same_index(&s1.b, &s2.b)?;
    Ok(Verdict::all([
        inclusion(&s1.b, &s2.b, "R_M(B1) in R_M(B2)"),
        inclusion(&s1.b, &s1.z, "R_M(B1) in R_M(Z1)"),
        inclusion(&s1.z, &s2.z, "R_M(Z1) in R_M(Z2)"),
        inclusion(&s2.b, &s2.z, "R_M(B2) in R_M(Z2)"),
    ]))
}

/// Error in a gauge literal, with a byte offset into the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for LiteralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.offset, self.message)
    }
}

fn lit_err(offset: usize, message: impl Into<String>) -> LiteralError {
    LiteralError {
        offset,
        message: message.into(),
    }
}

/// Position of the bracket closing the one at `open`.
fn matching(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s[open..].char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth == 0 {
                    return Some(open + i);
                }
            }
            _ => {}
        }
    }
    None
}

fn split_top(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}

fn expr_at(s: &str, offset: usize) -> core::result::Result<RateExpr, LiteralError> {
    crate::rate_dsl::parse(s).map_err(|e| match e {
        RateError::Syntax { pos, .. } => lit_err(offset + pos, e.to_string()),
        other => lit_err(offset, other.to_string()),
    })
}

fn gauge_err(offset: usize, e: Error) -> LiteralError {
    lit_err(offset, e.to_string())
}

/// Parses `powers(e)`, `powers_nat(e)`, `gens[e, ...]`, `expof(g)`,
/// `iterexp(e)` and `comp(g, scale)`.
pub fn parse_gauge(text: &str) -> core::result::Result<Gauge, LiteralError> {
    parse_gauge_at(text, 0)
}

fn parse_gauge_at(text: &str, base: usize) -> core::result::Result<Gauge, LiteralError> {
    let lead = text.len() - text.trim_start().len();
    let t = text.trim();
    let off = base + lead;
    let name_end = t
        .find(|c: char| c == '(' || c == '[')
        .ok_or_else(|| lit_err(off, "expected a gauge constructor"))?;
    let name = t[..name_end].trim();
    let close = matching(t, name_end).ok_or_else(|| lit_err(off + name_end, "unbalanced bracket"))?;
    if close + 1 != t.len() {
        return Err(lit_err(off + close + 1, "unexpected text after gauge literal"));
    }
    let open_c = &t[name_end..name_end + 1];
    let body = &t[name_end + 1..close];
    let body_off = off + name_end + 1;
    let want = |c: &str| -> core::result::Result<(), LiteralError> {
        if open_c == c {
            Ok(())
        } else {
            Err(lit_err(off + name_end, format!("expected '{c}' after {name}")))
        }
    };
    match name {
        "powers" | "powers_nat" | "iterexp" => {
            want("(")?;
            let e = expr_at(body, body_off)?;
            let g = match name {
                "powers" => Gauge::powers(e),
                "powers_nat" => Gauge::powers_nat(e),
                _ => Gauge::iterated_exp(e),
            };
            g.map_err(|e| gauge_err(body_off, e))
        }
        "gens" => {
            want("[")?;
            let mut list = Vec::new();
            for (o, part) in split_top(body) {
                list.push(expr_at(part, body_off + o)?);
            }
            Gauge::generators(list).map_err(|e| gauge_err(body_off, e))
        }
        "expof" => {
            want("(")?;
            Ok(exp_gauge(&parse_gauge_at(body, body_off)?))
        }
        "comp" => {
            want("(")?;
            let parts = split_top(body);
            if parts.len() != 2 {
                return Err(lit_err(body_off, "comp expects a gauge and a scale"));
            }
            let g = parse_gauge_at(parts[0].1, body_off)?;
            let s = expr_at(parts[1].1, body_off + parts[1].0)?;
            g.with_scale(s).map_err(|e| gauge_err(body_off + parts[1].0, e))
        }
        other => Err(lit_err(off, format!("unknown gauge constructor '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_dsl::parse;

    fn e(s: &str) -> RateExpr {
        parse(s).unwrap()
    }
    fn net(s: &str) -> Net {
        Net::parse(s).unwrap()
    }
    fn bs() -> Gauge {
        Gauge::special()
    }
    fn ebs() -> Gauge {
        exp_gauge(&bs())
    }

    #[test]
    fn axioms_of_named_gauges() {
        for g in [
            bs(),
            Gauge::powers_nat(e("eps^-1")).unwrap(),
            Gauge::finite_exp(),
            Gauge::infinite_exp(),
            ebs(),
        ] {
            let r = check_axioms(&g);
            assert!(r.all_hold(), "{g}: {r:?}");
        }
        let r = check_axioms(&Gauge::generators(alloc::vec![e("eps^-1")]).unwrap());
        assert_eq!(r.first_failure(), Some(2));
        assert_eq!(r.verdicts[2].evidence("pair"), Some("(eps^-1, eps^-1)"));
    }

    #[test]
    fn moderate_examples() {
        let v = is_moderate(&net("eps^-7 * log(1/eps)"), &bs()).unwrap();
        assert!(v.holds());
        assert_eq!(v.evidence("member"), Some("eps^-8"));
        assert!(is_moderate(&net("exp(1/eps)"), &bs()).unwrap().fails());
        let v = is_moderate(&net("exp(1/eps) * eps^-3"), &ebs()).unwrap();
        assert!(v.holds());
        assert_eq!(v.evidence("member"), Some("exp(2 * eps^-1)"));
        assert!(is_moderate(&net("exp(exp(1/eps))"), &ebs()).unwrap().fails());
        assert!(is_moderate(&net("exp@5(1/eps)"), &Gauge::finite_exp()).unwrap().holds());
        assert!(is_moderate(&net("exp@5(1/eps)"), &Gauge::infinite_exp()).unwrap().holds());
        assert!(is_moderate(&net("hyper(1)"), &Gauge::finite_exp()).unwrap().fails());
    }

    #[test]
    fn numeric_moderate_fallback() {
        let x = Net::callable(|t| libm::pow(t, -3.0) * (2.0 + libm::sin(1.0 / t)));
        let v = is_moderate(&x, &bs()).unwrap();
        assert!(v.holds(), "{v:?}");
        assert_eq!(v.mode, crate::index_core::Mode::Numeric);
        let y = Net::callable(|t| libm::exp(libm::pow(t, -0.5)));
        assert!(is_moderate(&y, &bs()).unwrap().fails());
        assert!(is_moderate(&y, &ebs()).unwrap().holds());
    }

    #[test]
    fn negligible_examples() {
        let ag = Gauge::powers_nat(e("eps^-1")).unwrap();
        assert!(is_negligible_num(&net("exp(-1/eps)"), &ag).unwrap().holds());
        let v = is_negligible_num(&net("eps^10"), &ag).unwrap();
        assert!(v.fails());
        assert_eq!(v.evidence("member"), Some("eps^-11"));
        for m in 1..6 {
            let x = net(&format!("eps^{m}"));
            assert!(is_negligible_num(&x, &ebs()).unwrap().fails());
        }
        assert!(is_negligible_num(&net("exp(-1 * exp(1/eps))"), &ebs()).unwrap().holds());
        let num = Net::callable(|t| libm::exp(-1.0 / t));
        assert!(is_negligible_num(&num, &ag).unwrap().holds());
    }

    #[test]
    fn principal_examples() {
        assert_eq!(principal_generator(&bs()).generator, Some(e("eps^-1")));
        let p = principal_generator(&ebs());
        assert!(p.generator.is_none());
        let c = p.certificate.unwrap();
        assert_eq!(c.escaper.to_string(), "exp(eps^-2)");
        assert!(p.verdict.fails());
        let f = Gauge::generators(alloc::vec![e("eps^-1"), e("eps^-3")]).unwrap();
        assert_eq!(principal_generator(&f).generator, Some(e("eps^-3")));
        assert!(principal_generator(&Gauge::finite_exp()).generator.is_none());
    }

    #[test]
    fn equivalence_examples() {
        let b1 = bs();
        let b2 = Gauge::powers(e("eps^-2")).unwrap();
        let b3 = Gauge::powers_nat(e("eps^-1")).unwrap();
        for (a, b) in [(&b1, &b2), (&b1, &b3), (&b2, &b3)] {
            assert!(equivalent_gauges(a, b).unwrap().holds());
        }
        let v = equivalent_gauges(&b1, &ebs()).unwrap();
        assert!(v.fails());
        assert!(v.evidence("escaper").is_some());
    }

    #[test]
    fn exp_gauge_contains_powers() {
        let eg = ebs();
        let v = is_moderate(&net("exp(1/eps) * eps^-5"), &eg).unwrap();
        assert!(v.holds());
        for a in [1, 5, 40] {
            assert!(is_moderate(&net(&format!("eps^-{a}")), &eg).unwrap().holds());
        }
        let ag = exp_gauge(&Gauge::powers_nat(e("eps^-1")).unwrap());
        assert!(equivalent_gauges(&ag, &eg).unwrap().holds());
    }

    #[test]
    fn ideal_compatibility_and_order() {
        assert!(ideal_compatible(&bs(), &bs()).unwrap().holds());
        assert!(ideal_compatible(&ebs(), &bs()).unwrap().fails());
        assert!(ideal_compatible(&bs(), &ebs()).unwrap().holds());
        let s = AlgebraSpec::diagonal(bs());
        let t = AlgebraSpec::diagonal(ebs());
        assert!(algebra_order(&s, &t).unwrap().holds());
        assert!(algebra_order(&s, &s).unwrap().holds());
        assert!(algebra_order(&t, &s).unwrap().fails());
        assert!(AlgebraSpec::new(ebs(), bs()).is_err());
    }

    #[test]
    fn literals_round_trip() {
        for s in [
            "powers(eps^-1)",
            "powers_nat(eps^-2)",
            "gens[eps^-1, eps^-3]",
            "expof(powers(eps^-1))",
            "iterexp(eps^-1)",
            "comp(powers(eps^-1), eps^2)",
        ] {
            let g = parse_gauge(s).unwrap();
            assert_eq!(g.literal(), s);
        }
        let err = parse_gauge("powers(eps^)").unwrap_err();
        assert_eq!(err.offset, 11);
        assert!(parse_gauge("nope(eps)").is_err());
    }

    #[test]
    fn composed_gauges() {
        let g = parse_gauge("comp(powers(eps^-1), eps^2)").unwrap();
        let x = net("eps^-3").with_index(g.index().clone());
        assert!(is_moderate(&x, &g).unwrap().holds());
        assert!(parse_gauge("comp(powers(hyper(1)), eps^2)").is_err());
    }
}
