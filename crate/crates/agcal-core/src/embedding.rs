//! Mollifiers, the model δ-net embedding of compactly supported
//! distributions, strict δ-nets, and the certificates built on them.

use crate::gauges::{ideal_compatible, is_negligible_num, AlgebraSpec, Gauge, LiteralError};
use crate::gen_functions::{GenFunction, Interval, SmoothFamily};
use crate::gen_numbers::{gn_eq, GenNumber};
use crate::index_core::{big_o, limit_of, GridConfig, Limit, Net, Status, Verdict};
use crate::linalg::{solve, Matrix};
use crate::math;
use crate::profiles::{parse_profile, SmoothProfile};
use crate::quadrature::{integrate, integrate_panels, integrate_with, kronrod15, QuadConfig, GAUSS_TAIL};
use crate::rate_dsl::{eval_at, exact_q, normalize, RateExpr, Q};
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Largest supported moment order.
pub const MAX_MOMENT_ORDER: u32 = 12;

/// Largest supported strict δ-net order.
pub const MAX_STRICT_ORDER: u32 = 8;

const MAX_CONDITION: f64 = 1e13;
const MOMENT_TOL: f64 = 1e-10;
const REMAINDER_TAIL: f64 = 10.0;
const REMAINDER_PANELS: usize = 10;
const DIRECT_STEP: f64 = 0.05;

/// The residual and pairing grid: ε from 0.1 down to about 1.4e-3.
pub fn residual_grid() -> GridConfig {
    GridConfig {
        eps0: 0.1,
        ratio: 0.7,
        count: 13,
    }
}

fn tight() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-15,
        rel_tol: 1e-14,
        max_intervals: 4000,
    }
}

/// (2n-1)!!/2^n, the moment ∫x^{2n}e^{-x²} divided by √π.
fn gauss_moment_ratio(n: u32) -> f64 {
    let mut v = 1.0;
    for i in 1..=n {
        v *= (2 * i - 1) as f64 / 2.0;
    }
    v
}

/// ∫ x^k e^{-x²} dx.
pub fn gaussian_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        math::sqrt(math::PI) * gauss_moment_ratio(k / 2)
    }
}

/// An even kernel ρ(x) = p(x)·e^{-x²} with unit mass and vanishing
/// moments of orders 1..=M.
#[derive(Clone, Debug, PartialEq)]
pub struct Mollifier {
    order: u32,
    coeffs: Vec<f64>,
    scaled_rational: Option<Vec<Q>>,
    profile: SmoothProfile,
    integral: f64,
    moments: Vec<f64>,
    l1: f64,
    condition: f64,
}

/// Builds the moment-order-M mollifier by solving the Hankel system of
/// Gaussian moments for the even coefficients of p.
pub fn build_mollifier(order: u32) -> Result<Mollifier> {
    if order > MAX_MOMENT_ORDER {
        return Err(Error::Argument(format!(
            "moment order {order} exceeds the supported maximum {MAX_MOMENT_ORDER}"
        )));
    }
    let n = (order / 2 + 1) as usize;
    let mut a = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, gauss_moment_ratio((i + j) as u32));
        }
    }
    let mut rhs = vec![0.0; n];
    rhs[0] = 1.0;
    let (x, condition) = solve(&a, &rhs)?;
    if condition > MAX_CONDITION {
        return Err(Error::Numeric(format!(
            "moment system for order {order} is ill-conditioned (condition {condition:.3e})"
        )));
    }
    let scaled_rational = x.iter().map(|v| exact_q(*v)).collect::<Option<Vec<Q>>>().map(|qs| {
        let mut out = Vec::new();
        for (j, q) in qs.into_iter().enumerate() {
            if j > 0 {
                out.push(Q::from_integer(0));
            }
            out.push(q);
        }
        out
    });
    let inv_root_pi = 1.0 / math::sqrt(math::PI);
    let mut coeffs = vec![0.0; 2 * (n - 1) + 1];
    for (j, v) in x.iter().enumerate() {
        coeffs[2 * j] = v * inv_root_pi;
    }
    let profile = SmoothProfile::poly_gauss(coeffs.clone());
    let moment = |k: i32| {
        let f = |t: f64| math::powi(t, k) * profile.eval(t);
        integrate_panels(&f, -GAUSS_TAIL, GAUSS_TAIL, 208)
    };
    let integral = moment(0);
    let moments: Vec<f64> = (1..=order as i32).map(moment).collect();
    let l1 = integrate_with(&|t: f64| math::abs(profile.eval(t)), -GAUSS_TAIL, GAUSS_TAIL, &tight())?.value;
    if math::abs(integral - 1.0) > MOMENT_TOL {
        return Err(Error::Numeric(format!("mollifier mass is {integral:.15}")));
    }
    if let Some((k, v)) = moments.iter().enumerate().find(|(_, v)| math::abs(**v) > MOMENT_TOL) {
        return Err(Error::Numeric(format!("moment {} of the mollifier is {v:.3e}", k + 1)));
    }
    Ok(Mollifier {
        order,
        coeffs,
        scaled_rational,
        profile,
        integral,
        moments,
        l1,
        condition,
    })
}

impl Mollifier {
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficients of p in increasing degree.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficients of √π·p as rationals, when all of them are recognised.
    pub fn scaled_rational(&self) -> Option<&[Q]> {
        self.scaled_rational.as_deref()
    }

    pub fn profile(&self) -> &SmoothProfile {
        &self.profile
    }

    /// ∫ρ measured by quadrature.
    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// ∫ρ(x)x^k dx for k = 1..=M, measured by quadrature.
    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    pub fn l1_norm(&self) -> f64 {
        self.l1
    }

    pub fn value_at_zero(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.profile.eval(x)
    }

    /// ∫_{-q}^{q} t^j ρ(t) dt.
    pub fn partial_moment(&self, q: f64, j: u32) -> Result<f64> {
        let f = |t: f64| math::powi(t, j as i32) * self.profile.eval(t);
        Ok(integrate_with(&f, -q, q, &tight())?.value)
    }

    /// The first positive zero of ρ, or infinity when ρ > 0 everywhere.
    pub fn positivity_radius(&self) -> f64 {
        let p = |x: f64| crate::profiles::poly::eval(&self.coeffs, x);
        let h = 1e-3;
        let mut x = 0.0;
        while x < GAUSS_TAIL {
            let y = x + h;
            if p(y) <= 0.0 {
                let (mut lo, mut hi) = (x, y);
                for _ in 0..80 {
                    let m = 0.5 * (lo + hi);
                    if p(m) > 0.0 {
                        lo = m;
                    } else {
                        hi = m;
                    }
                }
                return lo;
            }
            x = y;
        }
        f64::INFINITY
    }

    pub fn literal(&self) -> String {
        format!("mollifier({})", self.order)
    }
}

impl fmt::Display for Mollifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.literal())
    }
}

fn eval_scale(b: &RateExpr, eps: f64) -> f64 {
    eval_at(b, eps).unwrap_or(f64::NAN)
}

fn check_scale(b: &RateExpr) -> Result<()> {
    let nf = normalize(b)?;
    let growing = nf.growth().is_growing() && nf.eventual_sign() == core::cmp::Ordering::Greater;
    if !growing || limit_of(&Net::symbolic(b.clone())) != Limit::PlusInf {
        return Err(Error::Precondition(format!("{b} is not a positive infinite net")));
    }
    Ok(())
}

/// ρ_ε(x) = b_ε·ρ(b_ε·x).
pub fn model_delta_net(b: &RateExpr, rho: &Mollifier) -> Result<SmoothFamily> {
    check_scale(b)?;
    Ok(SmoothFamily::kernel(rho.profile.clone(), b.clone(), b.clone(), 0.0))
}

/// One term of a compactly supported distribution on the line.
#[derive(Clone, Debug, PartialEq)]
pub enum DistTerm {
    /// weight·∂^order δ_at.
    PointMass { order: u32, at: f64, weight: f64 },
    /// weight·∂^order f with f smooth and supported in `support`.
    Density {
        order: u32,
        f: SmoothProfile,
        support: Interval,
        weight: f64,
    },
}

impl DistTerm {
    pub fn support(&self) -> Interval {
        match self {
            DistTerm::PointMass { at, .. } => (*at, *at),
            DistTerm::Density { support, .. } => *support,
        }
    }

    pub fn literal(&self) -> String {
        match self {
            DistTerm::PointMass { order: 0, at, weight } => weighted(*weight, format!("delta({at})")),
            DistTerm::PointMass { order, at, weight } => weighted(*weight, format!("dd({order},{at})")),
            DistTerm::Density {
                order: 0,
                f,
                support,
                weight,
            } => weighted(*weight, format!("density({f}, [{}, {}])", support.0, support.1)),
            DistTerm::Density {
                order,
                f,
                support,
                weight,
            } => weighted(
                *weight,
                format!("ddensity({order}, {f}, [{}, {}])", support.0, support.1),
            ),
        }
    }
}

fn weighted(w: f64, s: String) -> String {
    if w == 1.0 {
        s
    } else {
        format!("{w}*{s}")
    }
}

/// A finite sum of derived point masses and derived smooth densities.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CompactDistribution {
    terms: Vec<DistTerm>,
}

impl CompactDistribution {
    pub fn delta(at: f64) -> CompactDistribution {
        CompactDistribution::derived_delta(0, at)
    }

    /// ∂^order δ_at.
    pub fn derived_delta(order: u32, at: f64) -> CompactDistribution {
        CompactDistribution {
            terms: vec![DistTerm::PointMass { order, at, weight: 1.0 }],
        }
    }

    pub fn density(f: SmoothProfile, support: Interval) -> Result<CompactDistribution> {
        CompactDistribution::derived_density(0, f, support)
    }

    /// ∂^order f. The support must be a proper interval containing the
    /// support of f when f declares one.
    pub fn derived_density(order: u32, f: SmoothProfile, support: Interval) -> Result<CompactDistribution> {
        if !(support.0 < support.1) || !support.0.is_finite() || !support.1.is_finite() {
            return Err(Error::Argument(format!(
                "[{}, {}] is not a compact interval",
                support.0, support.1
            )));
        }
        if let Some(s) = f.support() {
            if s.0 < support.0 - 1e-12 || s.1 > support.1 + 1e-12 {
                return Err(Error::Argument(format!(
                    "{f} is supported in [{}, {}], outside [{}, {}]",
                    s.0, s.1, support.0, support.1
                )));
            }
        } else {
            return Err(Error::Argument(format!("{f} has no compact support")));
        }
        Ok(CompactDistribution {
            terms: vec![DistTerm::Density {
                order,
                f,
                support,
                weight: 1.0,
            }],
        })
    }

    pub fn from_terms(terms: Vec<DistTerm>) -> CompactDistribution {
        CompactDistribution { terms }
    }

    pub fn terms(&self) -> &[DistTerm] {
        &self.terms
    }

    pub fn plus(mut self, other: CompactDistribution) -> CompactDistribution {
        self.terms.extend(other.terms);
        self
    }

    pub fn scaled(mut self, w: f64) -> CompactDistribution {
        for t in &mut self.terms {
            match t {
                DistTerm::PointMass { weight, .. } | DistTerm::Density { weight, .. } => *weight *= w,
            }
        }
        self
    }

    /// Supports of the individual terms.
    pub fn supports(&self) -> Vec<Interval> {
        self.terms.iter().map(|t| t.support()).collect()
    }

    /// ⟨w, φ⟩ in closed form.
    pub fn pair(&self, phi: &SmoothProfile) -> Result<f64> {
        let mut acc = 0.0;
        for t in &self.terms {
            acc += match t {
                DistTerm::PointMass { order, at, weight } => {
                    weight * sign(*order) * phi.deriv_n(*order).eval(*at)
                }
                DistTerm::Density {
                    order,
                    f,
                    support,
                    weight,
                } => {
                    let d = phi.deriv_n(*order);
                    let g = |y: f64| f.eval(y) * d.eval(y);
                    weight * sign(*order) * integrate_with(&g, support.0, support.1, &tight())?.value
                }
            };
        }
        Ok(acc)
    }

    pub fn literal(&self) -> String {
        let parts: Vec<String> = self.terms.iter().map(|t| t.literal()).collect();
        format!("dist[{}]", parts.join(", "))
    }
}

impl fmt::Display for CompactDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.literal())
    }
}

fn lit(offset: usize, message: impl Into<String>) -> LiteralError {
    LiteralError {
        offset,
        message: message.into(),
    }
}

/// Top-level comma-separated pieces of `s` with their byte offsets.
fn split_args(s: &str) -> Vec<(usize, &str)> {
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

fn trimmed(off: usize, s: &str) -> (usize, &str) {
    let lead = s.len() - s.trim_start().len();
    (off + lead, s.trim())
}

fn num_at(off: usize, s: &str) -> core::result::Result<f64, LiteralError> {
    let (o, t) = trimmed(off, s);
    t.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| lit(o, format!("expected a number, found '{t}'")))
}

fn order_at(off: usize, s: &str) -> core::result::Result<u32, LiteralError> {
    let (o, t) = trimmed(off, s);
    t.parse::<u32>()
        .ok()
        .filter(|&k| k <= 16)
        .ok_or_else(|| lit(o, format!("expected a derivative order in 0..=16, found '{t}'")))
}

fn interval_at(off: usize, s: &str) -> core::result::Result<Interval, LiteralError> {
    let (o, t) = trimmed(off, s);
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| lit(o, "expected an interval [a, b]"))?;
    let parts = split_args(inner);
    if parts.len() != 2 {
        return Err(lit(o, "an interval needs two endpoints"));
    }
    Ok((num_at(o + 1 + parts[0].0, parts[0].1)?, num_at(o + 1 + parts[1].0, parts[1].1)?))
}

fn term_at(off: usize, s: &str) -> core::result::Result<CompactDistribution, LiteralError> {
    let (o, t) = trimmed(off, s);
    let open = t.find('(').ok_or_else(|| lit(o, "expected delta, dd, density or ddensity"))?;
    let head = &t[..open];
    let (weight, name, name_off) = match head.rfind('*') {
        Some(star) => (num_at(o, &head[..star])?, head[star + 1..].trim(), o + star + 1),
        None => (1.0, head.trim(), o),
    };
    if !t.ends_with(')') {
        return Err(lit(o + t.len(), "expected ')'"));
    }
    let body_off = o + open + 1;
    let args = split_args(&t[open + 1..t.len() - 1]);
    let arity = |n: usize| -> core::result::Result<(), LiteralError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(lit(name_off, format!("{name} takes {n} argument(s), found {}", args.len())))
        }
    };
    let profile = |i: usize| -> core::result::Result<SmoothProfile, LiteralError> {
        let (po, ps) = (body_off + args[i].0, args[i].1);
        parse_profile(ps).map_err(|e| lit(po + e.offset, e.message))
    };
    let density = |order: u32, f: SmoothProfile, sup: Interval| {
        CompactDistribution::derived_density(order, f, sup).map_err(|e| lit(name_off, format!("{e}")))
    };
    let d = match name {
        "delta" => {
            arity(1)?;
            CompactDistribution::delta(num_at(body_off + args[0].0, args[0].1)?)
        }
        "dd" => {
            arity(2)?;
            CompactDistribution::derived_delta(
                order_at(body_off + args[0].0, args[0].1)?,
                num_at(body_off + args[1].0, args[1].1)?,
            )
        }
        "density" => {
            arity(2)?;
            density(0, profile(0)?, interval_at(body_off + args[1].0, args[1].1)?)?
        }
        "ddensity" => {
            arity(3)?;
            density(
                order_at(body_off + args[0].0, args[0].1)?,
                profile(1)?,
                interval_at(body_off + args[2].0, args[2].1)?,
            )?
        }
        other => return Err(lit(name_off, format!("unknown distribution term '{other}'"))),
    };
    Ok(d.scaled(weight))
}

/// Parses `dist[t1, t2, ...]` or a single term, where a term is
/// `w*delta(x)`, `w*dd(k, x)`, `w*density(f, [a, b])` or
/// `w*ddensity(k, f, [a, b])` with an optional weight prefix.
pub fn parse_distribution(text: &str) -> core::result::Result<CompactDistribution, LiteralError> {
    let (o, t) = trimmed(0, text);
    if let Some(rest) = t.strip_prefix("dist[") {
        let body = rest
            .strip_suffix(']')
            .ok_or_else(|| lit(o + t.len(), "expected ']'"))?;
        let mut acc = CompactDistribution::default();
        for (po, piece) in split_args(body) {
            acc = acc.plus(term_at(o + 5 + po, piece)?);
        }
        if acc.terms.is_empty() {
            return Err(lit(o, "empty distribution"));
        }
        Ok(acc)
    } else {
        term_at(o, t)
    }
}

fn sign(order: u32) -> f64 {
    if order % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Exact derivative orders provided by density convolutions.
pub const DENSITY_DERIVS: u32 = 8;

fn term_family(t: &DistTerm, b: &RateExpr, rho: &Mollifier) -> SmoothFamily {
    match t {
        DistTerm::PointMass { order, at, weight } => {
            let out = if *order == 0 {
                b.clone()
            } else {
                RateExpr::pow(b.clone(), Q::from_integer(1 + *order as i64))
            };
            SmoothFamily::kernel(rho.profile.deriv_n(*order).scaled(*weight), b.clone(), out, *at)
        }
        DistTerm::Density {
            order,
            f,
            support,
            weight,
        } => {
            let derivs: Vec<SmoothProfile> = (0..=DENSITY_DERIVS).map(|k| f.deriv_n(order + k)).collect();
            let kernel = rho.profile.clone();
            let (s0, s1, w) = (support.0, support.1, *weight);
            let b = b.clone();
            SmoothFamily::black_box(
                format!("{} * rho_eps", t.literal()),
                DENSITY_DERIVS,
                DENSITY_DERIVS,
                move |k, eps, x| {
                    let be = eval_scale(&b, eps);
                    let g = &derivs[k as usize];
                    let lo = (be * (x - s1)).max(-GAUSS_TAIL);
                    let hi = (be * (x - s0)).min(GAUSS_TAIL);
                    if !(lo < hi) {
                        return 0.0;
                    }
                    let h = |t: f64| g.eval(x - t / be) * kernel.eval(t);
                    integrate(&h, lo, hi).map_or(f64::NAN, |r| w * r.value)
                },
            )
        }
    }
}

/// The mollifier embedding w ↦ [(w∗ρ_ε)|Ω] into G(AG(b), AG(b), Ω).
pub fn embed(w: &CompactDistribution, b: &RateExpr, rho: &Mollifier, domain: Interval) -> Result<GenFunction> {
    check_scale(b)?;
    for t in w.terms() {
        let s = t.support();
        if !(domain.0 < s.0 && s.1 < domain.1) {
            return Err(Error::Argument(format!(
                "support [{}, {}] of {} is not compact in ({}, {})",
                s.0,
                s.1,
                t.literal(),
                domain.0,
                domain.1
            )));
        }
    }
    let spec = AlgebraSpec::diagonal(Gauge::powers_nat(b.clone())?);
    let mut parts: Vec<SmoothFamily> = w.terms().iter().map(|t| term_family(t, b, rho)).collect();
    let family = match parts.len() {
        0 => SmoothFamily::zero(),
        1 => parts.pop().expect("one part"),
        _ => SmoothFamily::Sum(parts),
    };
    GenFunction::with_override(family, spec, domain)
}

/// Derivatives g, g', …, g^{(M+1)} used by the Taylor remainder.
struct Taylor {
    d: Vec<SmoothProfile>,
}

impl Taylor {
    fn new(g: &SmoothProfile, order: u32) -> Taylor {
        let mut d = Vec::with_capacity(order as usize + 2);
        let mut cur = g.clone();
        for _ in 0..=order + 1 {
            let next = cur.deriv();
            d.push(cur);
            cur = next;
        }
        Taylor { d }
    }

    fn order(&self) -> usize {
        self.d.len() - 2
    }

    fn vanishes(&self) -> bool {
        self.d[self.order() + 1].is_zero()
    }

    /// g(x+h) minus its Taylor polynomial of degree M at x.
    fn remainder(&self, x: f64, h: f64) -> f64 {
        let m = self.order();
        if math::abs(h) > DIRECT_STEP {
            let mut acc = self.d[0].eval(x + h);
            let mut p = 1.0;
            for (j, dj) in self.d.iter().take(m + 1).enumerate() {
                if j > 0 {
                    p *= h / j as f64;
                }
                acc -= dj.eval(x) * p;
            }
            return acc;
        }
        let top = &self.d[m + 1];
        let f = |s: f64| math::powi(1.0 - s, m as i32) * top.eval(x + s * h);
        let mut fact = 1.0;
        for j in 1..=m {
            fact *= j as f64;
        }
        math::powi(h, m as i32 + 1) / fact * kronrod15(&f, 0.0, 1.0).0
    }

    /// ∫ρ(t)·R(x, t/b) dt for an even ρ, folded onto t ≥ 0.
    fn smoothed(&self, rho: &SmoothProfile, x: f64, b: f64) -> f64 {
        if self.vanishes() {
            return 0.0;
        }
        let f = |t: f64| {
            let h = t / b;
            rho.eval(t) * (self.remainder(x, h) + self.remainder(x, -h))
        };
        integrate_panels(&f, 0.0, REMAINDER_TAIL, REMAINDER_PANELS)
    }
}

fn sample_points(k: Interval, n: usize) -> Vec<f64> {
    if n <= 1 || k.0 == k.1 {
        return vec![0.5 * (k.0 + k.1)];
    }
    (0..n).map(|i| k.0 + (k.1 - k.0) * i as f64 / (n - 1) as f64).collect()
}

/// A decay table (b_ε, value) with its fitted order.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    /// (ε, b_ε, value).
    pub points: Vec<(f64, f64, f64)>,
    /// -slope of log value against log b over the fitted prefix.
    pub order: Option<f64>,
    pub fitted: usize,
    /// The values stopped decreasing before the end of the grid.
    pub noise_flag: bool,
    /// All values are exactly zero.
    pub vanishes: bool,
    pub truncation: String,
}

impl DecayReport {
    fn fit(points: Vec<(f64, f64, f64)>, truncation: String) -> DecayReport {
        let vanishes = points.iter().all(|p| p.2 == 0.0);
        let mut n = 0;
        for (i, p) in points.iter().enumerate() {
            if !(p.2 > 0.0 && p.2.is_finite()) {
                break;
            }
            if i > 0 && p.2 >= points[i - 1].2 {
                break;
            }
            n = i + 1;
        }
        let xs: Vec<f64> = points[..n].iter().map(|p| math::ln(p.1)).collect();
        let ys: Vec<f64> = points[..n].iter().map(|p| math::ln(p.2)).collect();
        DecayReport {
            order: math::ls_slope(&xs, &ys).map(|s| -s),
            fitted: n,
            noise_flag: !vanishes && n < points.len(),
            vanishes,
            points,
            truncation,
        }
    }

    pub fn max_value(&self) -> f64 {
        self.points.iter().fold(0.0, |m, p| m.max(math::abs(p.2)))
    }
}

fn grid_statement(grid: &GridConfig, extra: &str) -> String {
    format!(
        "verified for {extra}, grid eps0={} r={} n={}",
        grid.eps0, grid.ratio, grid.count
    )
}

/// sup_K |f∗ρ_ε − f| on the residual grid, with its decay order in b.
pub fn taylor_residual_slope(f: &SmoothProfile, b: &RateExpr, rho: &Mollifier, k: Interval) -> Result<DecayReport> {
    taylor_residual_slope_with(f, b, rho, k, &residual_grid(), 41)
}

pub fn taylor_residual_slope_with(
    f: &SmoothProfile,
    b: &RateExpr,
    rho: &Mollifier,
    k: Interval,
    grid: &GridConfig,
    x_points: usize,
) -> Result<DecayReport> {
    check_scale(b)?;
    if !(k.0 <= k.1) {
        return Err(Error::Argument(format!("empty interval [{}, {}]", k.0, k.1)));
    }
    let taylor = Taylor::new(f, rho.order);
    let xs = sample_points(k, x_points);
    let mut points = Vec::new();
    for eps in grid.points() {
        let be = eval_scale(b, eps);
        let r = xs
            .iter()
            .map(|&x| math::abs(taylor.smoothed(&rho.profile, x, be)))
            .fold(0.0, f64::max);
        points.push((eps, be, r));
    }
    let extra = format!(
        "K = [{}, {}] ({x_points} points), moment order M = {}",
        k.0, k.1, rho.order
    );
    Ok(DecayReport::fit(points, grid_statement(grid, &extra)))
}

/// The family f∗ρ_ε − f, whose derivatives are the smoothed Taylor
/// remainders of the derivatives of f.
pub fn embedding_defect(f: &SmoothProfile, b: &RateExpr, rho: &Mollifier, domain: Interval) -> Result<GenFunction> {
    check_scale(b)?;
    let derivs: Vec<Taylor> = (0..=DENSITY_DERIVS)
        .map(|k| Taylor::new(&f.deriv_n(k), rho.order))
        .collect();
    let kernel = rho.profile.clone();
    let b2 = b.clone();
    let family = SmoothFamily::black_box(
        format!("{f} * rho_eps - {f}"),
        DENSITY_DERIVS,
        DENSITY_DERIVS,
        move |k, eps, x| derivs[k as usize].smoothed(&kernel, x, eval_scale(&b2, eps)),
    );
    let spec = AlgebraSpec::diagonal(Gauge::powers_nat(b.clone())?);
    GenFunction::with_override(family, spec, domain)
}

/// One kernel φ_m = p_m·bump of a strict δ-net.
#[derive(Clone, Debug, PartialEq)]
pub struct StrictKernel {
    pub m: u32,
    pub profile: SmoothProfile,
    /// max over α ≤ m of sup |∂^α φ_m|.
    pub bound: f64,
    pub integral: f64,
    /// ∫φ_m x^k for k = 1..=m.
    pub moments: Vec<f64>,
    pub l1: f64,
    pub condition: f64,
    /// ∫|φ_m| ≤ 1 + 1/m (m ≥ 1).
    pub l1_target_met: bool,
}

/// The kernel chosen for one ε.
#[derive(Clone, Debug, PartialEq)]
pub struct StrictRow {
    pub eps: f64,
    pub b: f64,
    /// `None` when even φ_0 violates sup|φ_0| ≤ b_ε.
    pub m: Option<u32>,
    /// The selection stopped at the cap rather than at M_{m+1} > b_ε.
    pub capped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrictDeltaNet {
    pub requested_cap: u32,
    pub cap: u32,
    /// Kernels φ_0..=φ_{cap+1}; the last one only fixes the upper bound.
    pub kernels: Vec<StrictKernel>,
    pub rows: Vec<StrictRow>,
    pub notes: Vec<String>,
    pub truncation: String,
}

impl StrictDeltaNet {
    pub fn kernel(&self, m: u32) -> Option<&StrictKernel> {
        self.kernels.get(m as usize)
    }

    /// ψ_ε, when defined.
    pub fn psi(&self, eps: f64, b: &RateExpr) -> Option<&StrictKernel> {
        let be = eval_scale(b, eps);
        select(&self.kernels, self.cap, be).0.and_then(|m| self.kernel(m))
    }
}

fn bump_moment(k: u32) -> Result<f64> {
    let bump = SmoothProfile::bump();
    let f = |x: f64| math::powi(x, k as i32) * bump.eval(x);
    Ok(integrate_with(&f, -1.0, 1.0, &tight())?.value)
}

fn strict_kernel(m: u32, bump_moments: &[f64]) -> Result<StrictKernel> {
    let n = (m / 2 + 1) as usize;
    let mut a = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, bump_moments[2 * (i + j)]);
        }
    }
    let mut rhs = vec![0.0; n];
    rhs[0] = 1.0;
    let (x, condition) = solve(&a, &rhs)?;
    if condition > MAX_CONDITION {
        return Err(Error::Numeric(format!(
            "bump moment system at m = {m} is ill-conditioned (condition {condition:.3e})"
        )));
    }
    let mut p = vec![0.0; 2 * (n - 1) + 1];
    for (j, v) in x.iter().enumerate() {
        p[2 * j] = *v;
    }
    let profile = SmoothProfile::poly_bump(p);
    let mut bound = 0.0f64;
    let mut d = profile.clone();
    for _ in 0..=m {
        bound = bound.max(d.sup_abs(-1.0, 1.0));
        d = d.deriv();
    }
    let moment = |k: u32| -> Result<f64> {
        let f = |t: f64| math::powi(t, k as i32) * profile.eval(t);
        Ok(integrate_with(&f, -1.0, 1.0, &tight())?.value)
    };
    let integral = moment(0)?;
    let moments = (1..=m).map(moment).collect::<Result<Vec<f64>>>()?;
    let l1 = integrate_with(&|t: f64| math::abs(profile.eval(t)), -1.0, 1.0, &tight())?.value;
    Ok(StrictKernel {
        m,
        profile,
        bound,
        integral,
        moments,
        l1,
        condition,
        l1_target_met: m == 0 || l1 <= 1.0 + 1.0 / m as f64,
    })
}

/// m_ε: the largest m ≤ cap with M_j ≤ b for every j ≤ m.
fn select(kernels: &[StrictKernel], cap: u32, b: f64) -> (Option<u32>, bool) {
    let mut m = None;
    for k in kernels.iter().take(cap as usize + 1) {
        if k.bound <= b {
            m = Some(k.m);
        } else {
            return (m, false);
        }
    }
    let next_ok = kernels.get(cap as usize + 1).map_or(true, |k| k.bound <= b);
    (m, m.is_some() && next_ok)
}

/// ψ_ε = φ_{m_ε} with M_{m_ε} ≤ b_ε < M_{m_ε+1}.
pub fn strict_delta_net(b: &RateExpr, m_cap: u32) -> Result<StrictDeltaNet> {
    strict_delta_net_with(b, m_cap, &residual_grid())
}

pub fn strict_delta_net_with(b: &RateExpr, m_cap: u32, grid: &GridConfig) -> Result<StrictDeltaNet> {
    check_scale(b)?;
    if m_cap > MAX_STRICT_ORDER {
        return Err(Error::Argument(format!(
            "cap {m_cap} exceeds the supported maximum {MAX_STRICT_ORDER}"
        )));
    }
    let bump_moments = (0..=2 * m_cap + 4)
        .map(bump_moment)
        .collect::<Result<Vec<f64>>>()?;
    let mut kernels = Vec::new();
    let mut notes = Vec::new();
    let mut cap = m_cap;
    for m in 0..=m_cap + 1 {
        match strict_kernel(m, &bump_moments) {
            Ok(k) => kernels.push(k),
            Err(e) => {
                notes.push(format!("order {m} unavailable: {e}"));
                if m == 0 {
                    return Err(e);
                }
                cap = cap.min(m - 1);
                break;
            }
        }
    }
    if cap < m_cap {
        notes.push(format!("cap lowered from {m_cap} to {cap}"));
    }
    for k in &kernels {
        if !k.l1_target_met {
            notes.push(format!(
                "m = {}: measured L1 norm {:.6} exceeds 1 + 1/m",
                k.m, k.l1
            ));
        }
    }
    let rows = grid
        .points()
        .into_iter()
        .map(|eps| {
            let be = eval_scale(b, eps);
            let (m, capped) = select(&kernels, cap, be);
            StrictRow { eps, b: be, m, capped }
        })
        .collect();
    Ok(StrictDeltaNet {
        requested_cap: m_cap,
        cap,
        kernels,
        rows,
        notes,
        truncation: grid_statement(grid, &format!("m <= {cap}")),
    })
}

/// i_b = i_c, decided on the δ value at 0: [b_ε ρ(0)] = [c_ε ρ(0)].
pub fn compare_embeddings(b: &Net, c: &Net, rho: &Mollifier) -> Result<Verdict> {
    let r0 = rho.value_at_zero();
    if r0 == 0.0 {
        return Err(Error::Precondition("the mollifier vanishes at 0".into()));
    }
    let be = b
        .exact_expr()
        .ok_or_else(|| Error::Capability("the first net has no exact expression".into()))?;
    let ce = c
        .exact_expr()
        .ok_or_else(|| Error::Capability("the second net has no exact expression".into()))?;
    check_scale(&be)?;
    check_scale(&ce)?;
    let gb = Gauge::powers_nat(be.clone())?;
    let gc = Gauge::powers_nat(ce.clone())?;
    if !crate::gauges::equivalent_gauges(&gb, &gc)?.holds() {
        return Err(Error::Precondition(format!(
            "{be} and {ce} do not generate the same gauge"
        )));
    }
    let spec = AlgebraSpec::diagonal(gb.clone());
    let exact = gn_eq(
        &GenNumber::new(b.clone(), spec.clone())?,
        &GenNumber::new(c.clone(), spec)?,
    )?;
    let (b1, c1) = (b.clone(), c.clone());
    let diff = Net::callable(move |eps| {
        let x = b1.value(eps).unwrap_or(f64::NAN);
        let y = c1.value(eps).unwrap_or(f64::NAN);
        math::abs(x - y) * r0
    });
    let numeric = is_negligible_num(&diff, &gb)?;
    let agree = exact.status == numeric.status;
    Ok(exact
        .with_evidence("rho(0)", r0)
        .with_evidence("numeric", numeric.status.name())
        .with_evidence("numeric detail", numeric.detail.clone())
        .with_evidence("agreement", if agree { "yes" } else { "no" }))
}

/// Smooth plateau: 1 on [-q, q], 0 outside (-p, p).
pub fn plateau(p: f64, q: f64) -> impl Fn(f64) -> f64 {
    let h = |u: f64| if u > 0.0 { math::exp(-1.0 / u) } else { 0.0 };
    move |s: f64| {
        let u = (p - math::abs(s)) / (p - q);
        let a = h(u);
        let d = a + h(1.0 - u);
        if d == 0.0 {
            0.0
        } else {
            a / d
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LmRow {
    pub m: u32,
    pub l_m: f64,
    /// min over the grid of c_ε(m).
    pub c_min: f64,
    pub bound_holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NecessityReport {
    pub rows: Vec<LmRow>,
    pub positive_decreasing: bool,
    /// R_M(Z) ⊆ R_M(AG(b)).
    pub generator: Verdict,
    pub escaper: Option<RateExpr>,
    /// b^{-m} = O(z^{-1}) for each m, against the escaper.
    pub per_m: Vec<(u32, Verdict)>,
    pub consistent: bool,
    pub statement: String,
    pub truncation: String,
}

fn growth_escapes(z: &RateExpr, ag: &Gauge) -> bool {
    normalize(z).map_or(false, |nf| ag.member_dominating(&nf.growth()).is_none())
}

/// Checks the ingredients that force b to generate Z when two model
/// embeddings must agree: the L_m lower bounds and the symbolic generator
/// test against an escaping member of Z.
#[allow(clippy::too_many_arguments)]
pub fn principal_necessity_certificate(
    b: &RateExpr,
    z_gauge: &Gauge,
    m_range: &[u32],
    rho: &Mollifier,
    p: f64,
    q: f64,
    escaper: Option<RateExpr>,
    grid: &GridConfig,
) -> Result<NecessityReport> {
    check_scale(b)?;
    if !(0.0 < q && q < p.min(1.0)) {
        return Err(Error::Argument(format!("need 0 < q < min(p, 1), got p = {p}, q = {q}")));
    }
    if rho.positivity_radius() <= p {
        return Err(Error::Argument(format!(
            "the mollifier is not positive on (-{p}, {p}): first zero at {:.6}",
            rho.positivity_radius()
        )));
    }
    let psi = plateau(p, q);
    let mut rows = Vec::new();
    for &m in m_range {
        let l_m = rho.partial_moment(q, 2 * m)?;
        let mut c_min = f64::INFINITY;
        for eps in grid.points() {
            let be = eval_scale(b, eps);
            let f = |s: f64| math::powi(s * be, 2 * m as i32) * psi(be * s);
            let g = |t: f64| f(-t / be) * rho.eval(t);
            let c = integrate_with(&g, -p, p, &tight())?.value;
            c_min = c_min.min(c);
        }
        rows.push(LmRow {
            m,
            l_m,
            c_min,
            bound_holds: c_min >= l_m * (1.0 - 1e-12),
        });
    }
    let positive_decreasing = rows.iter().all(|r| r.l_m > 0.0)
        && rows.windows(2).all(|w| w[1].m <= w[0].m || w[1].l_m < w[0].l_m);
    let ag = Gauge::powers_nat(b.clone())?;
    let generator = ideal_compatible(z_gauge, &ag)?;
    let escaper = escaper.or_else(|| {
        z_gauge
            .members(12)
            .into_iter()
            .find(|z| growth_escapes(z, &ag))
    });
    let mut per_m = Vec::new();
    if let Some(z) = &escaper {
        let zinv = Net::symbolic(RateExpr::pow(z.clone(), Q::from_integer(-1)));
        for &m in m_range {
            let bm = Net::symbolic(RateExpr::pow(b.clone(), Q::from_integer(-(m as i64))));
            per_m.push((m, big_o(&bm, &zinv)?));
        }
    }
    let consistent = generator.holds();
    let statement = if consistent {
        "embedding agreement consistent".into()
    } else if generator.fails() {
        "agreement impossible".into()
    } else {
        "generator test inconclusive".into()
    };
    let ms: Vec<String> = m_range.iter().map(|m| format!("{m}")).collect();
    Ok(NecessityReport {
        rows,
        positive_decreasing,
        generator,
        escaper,
        per_m,
        consistent,
        statement,
        truncation: grid_statement(grid, &format!("m in {{{}}}, p = {p}, q = {q}", ms.join(", "))),
    })
}

/// |∫(w∗ρ_ε)φ − ⟨w, φ⟩| on the residual grid, with its decay order.
pub fn delta_pairing(w: &CompactDistribution, phi: &SmoothProfile, b: &RateExpr, rho: &Mollifier) -> Result<DecayReport> {
    delta_pairing_with(w, phi, b, rho, &residual_grid())
}

pub fn delta_pairing_with(
    w: &CompactDistribution,
    phi: &SmoothProfile,
    b: &RateExpr,
    rho: &Mollifier,
    grid: &GridConfig,
) -> Result<DecayReport> {
    check_scale(b)?;
    if phi.support().is_none() {
        return Err(Error::Argument(format!("{phi} is not compactly supported")));
    }
    let exact = w.pair(phi)?;
    let mut points = Vec::new();
    for eps in grid.points() {
        let be = eval_scale(b, eps);
        let mut err = 0.0;
        for t in w.terms() {
            err += match t {
                DistTerm::PointMass { order, at, weight } => {
                    let tay = Taylor::new(&phi.deriv_n(*order), rho.order);
                    weight * sign(*order) * tay.smoothed(&rho.profile, *at, be)
                }
                DistTerm::Density {
                    order,
                    f,
                    support,
                    weight,
                } => {
                    let tay = Taylor::new(&phi.deriv_n(*order), rho.order);
                    let g = |y: f64| f.eval(y) * tay.smoothed(&rho.profile, y, be);
                    weight * sign(*order) * integrate_panels(&g, support.0, support.1, 8)
                }
            };
        }
        points.push((eps, be, math::abs(err)));
    }
    let mut r = DecayReport::fit(
        points,
        grid_statement(grid, &format!("moment order M = {}, exact pairing {exact}", rho.order)),
    );
    r.truncation.push_str(&format!(", pairing {exact:.12e}"));
    Ok(r)
}

/// ∫(w∗ρ_ε)(x)φ(x)dx by direct quadrature of the embedded family.
pub fn smoothed_pairing(u: &GenFunction, phi: &SmoothProfile, eps: f64) -> Result<f64> {
    let (a, b) = phi
        .support()
        .ok_or_else(|| Error::Argument(format!("{phi} is not compactly supported")))?;
    let fam = u.family();
    let g = |x: f64| fam.eval(eps, x) * phi.eval(x);
    let pieces = 400;
    let h = (b - a) / pieces as f64;
    let cfg = QuadConfig {
        abs_tol: 1e-10 / pieces as f64,
        ..QuadConfig::default()
    };
    let mut acc = 0.0;
    for i in 0..pieces {
        acc += integrate_with(&g, a + h * i as f64, a + h * (i + 1) as f64, &cfg)?.value;
    }
    Ok(acc)
}

/// Holds when the pairing residual decays at least like b^{-order}.
pub fn decay_verdict(r: &DecayReport, order: f64) -> Verdict {
    if r.vanishes {
        return Verdict::numeric(Status::Holds, 0.95)
            .with_detail("residual vanishes identically")
            .with_evidence("truncation", &r.truncation);
    }
    let status = match r.order {
        Some(o) if r.fitted >= 4 && o >= order => Status::Holds,
        Some(_) if r.fitted >= 4 => Status::Fails,
        _ => Status::Inconclusive,
    };
    let mut v = Verdict::numeric(status, 0.9)
        .with_evidence("fitted order", r.order.map_or("none".into(), |o| format!("{o:.4}")))
        .with_evidence("fitted points", r.fitted)
        .with_evidence("truncation", &r.truncation);
    if r.noise_flag {
        v = v.with_evidence("noise", "values stopped decreasing before the end of the grid");
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen_functions::{is_negligible_fn, support_estimate, FnBudget, SupOptions};
    use crate::rate_dsl::parse;

    fn e(s: &str) -> RateExpr {
        parse(s).unwrap()
    }

    #[test]
    fn order_zero_is_the_normalised_gaussian() {
        let r = build_mollifier(0).unwrap();
        assert!((r.value_at_zero() - 1.0 / math::sqrt(math::PI)).abs() < 1e-15);
        assert!((r.integral() - 1.0).abs() < 1e-12);
        assert!((r.l1_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_two_and_four_match_hand_solved_systems() {
        let m0 = gaussian_moment(0);
        let m2 = gaussian_moment(2);
        let m4 = gaussian_moment(4);
        let det = m0 * m4 - m2 * m2;
        let (c0, c2) = (m4 / det, -m2 / det);
        let r = build_mollifier(2).unwrap();
        assert!((r.coeffs()[0] - c0).abs() < 1e-14 && (r.coeffs()[2] - c2).abs() < 1e-14);
        let r4 = build_mollifier(4).unwrap();
        let want = [15.0 / 8.0, 0.0, -2.5, 0.0, 0.5];
        let got = r4.scaled_rational().unwrap();
        for (g, w) in got.iter().zip(want) {
            assert!((crate::rate_dsl::q_to_f64(*g) - w).abs() < 1e-15);
        }
        assert!(r4.moments().iter().all(|m| m.abs() < 1e-10));
        assert!((r4.positivity_radius() - 0.958_572).abs() < 1e-5);
    }

    #[test]
    fn all_supported_orders_build() {
        for m in 0..=MAX_MOMENT_ORDER {
            let r = build_mollifier(m).unwrap();
            assert!((r.integral() - 1.0).abs() < 1e-10, "{m}");
        }
        assert!(build_mollifier(13).is_err());
    }

    #[test]
    fn model_delta_net_shape_and_precondition() {
        let rho = build_mollifier(4).unwrap();
        let d = model_delta_net(&e("eps^-1"), &rho).unwrap();
        let eps = 0.01;
        assert!((d.eval(eps, 0.003) - 100.0 * rho.eval(0.3)).abs() < 1e-12);
        let mass = integrate(&|x| d.eval(eps, x), -0.3, 0.3).unwrap().value;
        assert!((mass - 1.0).abs() < 1e-9);
        assert!(model_delta_net(&e("eps"), &rho).is_err());
        assert!(model_delta_net(&e("2"), &rho).is_err());
    }

    #[test]
    fn residual_orders() {
        let rho = build_mollifier(4).unwrap();
        let b = e("eps^-1");
        for f in [SmoothProfile::Sin, SmoothProfile::gauss()] {
            let r = taylor_residual_slope(&f, &b, &rho, (-1.0, 1.0)).unwrap();
            assert!(r.order.unwrap() >= 4.5, "{f}: {:?}", r.order);
        }
        let p = SmoothProfile::poly(vec![1.0, -2.0, 0.5, 3.0, 1.5]);
        let r = taylor_residual_slope(&p, &b, &rho, (-1.0, 1.0)).unwrap();
        assert!(r.vanishes && r.max_value() < 1e-12);
        let rho2 = build_mollifier(2).unwrap();
        let r = taylor_residual_slope(&SmoothProfile::Sin, &b, &rho2, (-1.0, 1.0)).unwrap();
        assert!(r.order.unwrap() >= 2.7);
    }

    #[test]
    fn residual_matches_direct_convolution() {
        let rho = build_mollifier(2).unwrap();
        let tay = Taylor::new(&SmoothProfile::Cos, 2);
        let (x, b) = (0.3, 4.0);
        let direct = integrate_with(
            &|t: f64| (math::cos(x - t / b) - math::cos(x)) * rho.eval(t),
            -GAUSS_TAIL,
            GAUSS_TAIL,
            &tight(),
        )
        .unwrap()
        .value;
        assert!((tay.smoothed(rho.profile(), x, b) - direct).abs() < 1e-13);
    }

    #[test]
    fn point_mass_embedding_value_at_the_atom() {
        let rho = build_mollifier(4).unwrap();
        let u = embed(&CompactDistribution::delta(0.0), &e("eps^-1"), &rho, (-1.0, 1.0)).unwrap();
        assert!((u.family().eval(0.01, 0.0) - 100.0 * rho.value_at_zero()).abs() < 1e-10);
        assert!(u.moderateness().holds());
    }

    #[test]
    fn embedding_is_linear() {
        let rho = build_mollifier(2).unwrap();
        let b = e("eps^-1");
        let w1 = CompactDistribution::delta(0.1);
        let w2 = CompactDistribution::density(SmoothProfile::bump_on(-0.5, 0.0), (-0.5, 0.0)).unwrap();
        let u1 = embed(&w1, &b, &rho, (-1.0, 1.0)).unwrap();
        let u2 = embed(&w2, &b, &rho, (-1.0, 1.0)).unwrap();
        let u = embed(&w1.clone().plus(w2.clone()), &b, &rho, (-1.0, 1.0)).unwrap();
        for &eps in &[0.1, 0.03] {
            for i in 0..21 {
                let x = -0.9 + 0.09 * i as f64;
                let s = u1.family().eval(eps, x) + u2.family().eval(eps, x);
                assert!((u.family().eval(eps, x) - s).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn defect_is_negligible_up_to_the_moment_order() {
        let rho = build_mollifier(4).unwrap();
        let u = embedding_defect(&SmoothProfile::Sin, &e("eps^-1"), &rho, (-2.0, 2.0)).unwrap();
        let budget = FnBudget::for_domain((-2.0, 2.0))
            .with_kset(vec![(-1.0, 1.0)])
            .with_alpha_max(1)
            .with_m_max(4);
        let budget = FnBudget {
            sup: SupOptions {
                grid: residual_grid(),
                x_points: 11,
            },
            ..budget
        };
        let v = is_negligible_fn(&u, &budget).unwrap();
        assert!(v.holds(), "{v:?}");
    }

    #[test]
    fn supports_are_preserved() {
        let rho = build_mollifier(4).unwrap();
        let b = e("eps^-1");
        let u = embed(&CompactDistribution::delta(0.5), &b, &rho, (0.0, 1.0)).unwrap();
        let s = support_estimate(&u, 0.05, None).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].0 >= 0.45 - 1e-9 && s[0].1 <= 0.55 + 1e-9 && s[0].0 <= 0.5 && s[0].1 >= 0.5);
    }

    #[test]
    fn comparison_examples() {
        let rho = build_mollifier(4).unwrap();
        let n = |s: &str| Net::parse(s).unwrap();
        let v = compare_embeddings(&n("eps^-1"), &n("2*eps^-1"), &rho).unwrap();
        assert!(v.fails() && v.evidence("agreement") == Some("yes"));
        let v = compare_embeddings(&n("eps^-1"), &n("eps^-1 + exp(-1 * eps^-1)"), &rho).unwrap();
        assert!(v.holds() && v.evidence("agreement") == Some("yes"), "{v:?}");
        let v = compare_embeddings(&n("eps^-1"), &n("eps^-1"), &rho).unwrap();
        assert!(v.holds());
        assert!(compare_embeddings(&n("eps^-1"), &n("log(eps^-1)"), &rho).is_err());
    }

    #[test]
    fn necessity_certificate() {
        let rho = build_mollifier(4).unwrap();
        let b = e("eps^-1");
        let ag = Gauge::powers_nat(b.clone()).unwrap();
        let grid = residual_grid();
        let r = principal_necessity_certificate(&b, &ag, &[1, 2, 3, 4], &rho, 0.9, 0.5, None, &grid).unwrap();
        assert!(r.positive_decreasing && r.consistent && r.escaper.is_none());
        assert!(r.rows.iter().all(|row| row.bound_holds));
        let z = crate::gauges::exp_gauge(&Gauge::special());
        let r = principal_necessity_certificate(&b, &z, &[1, 2, 3, 4], &rho, 0.9, 0.5, Some(e("exp(eps^-2)")), &grid)
            .unwrap();
        assert!(!r.consistent && r.statement == "agreement impossible");
        assert!(r.per_m.iter().all(|(_, v)| v.fails()));
        assert!(principal_necessity_certificate(&b, &ag, &[1], &rho, 0.99, 0.5, None, &grid).is_err());
        assert!(principal_necessity_certificate(&b, &ag, &[1], &rho, 0.9, 0.95, None, &grid).is_err());
    }

    #[test]
    fn strict_net_properties() {
        let b = e("eps^-1");
        let net = strict_delta_net(&b, 8).unwrap();
        for k in &net.kernels {
            assert_eq!(k.profile.support(), Some((-1.0, 1.0)));
            assert!((k.integral - 1.0).abs() < 1e-8, "{}", k.m);
            assert!(k.moments.iter().all(|v| v.abs() < 1e-8), "{}: {:?}", k.m, k.moments);
        }
        for row in &net.rows {
            let m = row.m.unwrap();
            assert!(net.kernels[m as usize].bound <= row.b);
            assert!(row.capped || net.kernels[m as usize + 1].bound > row.b);
        }
    }

    #[test]
    fn pairings() {
        let rho = build_mollifier(4).unwrap();
        let b = e("eps^-1");
        let w = CompactDistribution::delta(0.0);
        let profiles = [
            SmoothProfile::bump(),
            SmoothProfile::product(SmoothProfile::Cos, SmoothProfile::bump()),
            SmoothProfile::bump_on(-0.7, 0.9),
        ];
        for phi in &profiles {
            let r = delta_pairing(&w, phi, &b, &rho).unwrap();
            assert!(r.order.unwrap() >= 4.5, "{phi}: {:?}", r.order);
        }
        let phi = SmoothProfile::bump_on(-0.7, 0.9);
        let dd = CompactDistribution::derived_delta(1, 0.0);
        assert!((dd.pair(&phi).unwrap() + phi.deriv().eval(0.0)).abs() < 1e-15);
        let u = embed(&dd, &b, &rho, (-1.0, 1.0)).unwrap();
        let got = smoothed_pairing(&u, &phi, 0.01).unwrap();
        assert!((got + phi.deriv().eval(0.0)).abs() < 1e-6);
        let dens = CompactDistribution::density(SmoothProfile::bump_on(0.2, 0.4), (0.2, 0.4)).unwrap();
        let r = delta_pairing(&dens, &phi, &b, &rho).unwrap();
        assert!(r.order.unwrap() >= 4.5);
    }

    #[test]
    fn distribution_literals() {
        let w = CompactDistribution::delta(0.5)
            .plus(CompactDistribution::derived_delta(2, -0.25).scaled(3.0))
            .plus(CompactDistribution::density(SmoothProfile::bump_on(0.2, 0.4), (0.2, 0.4)).unwrap());
        assert_eq!(parse_distribution(&w.literal()).unwrap(), w);
        assert_eq!(parse_distribution(" delta(0.5) ").unwrap(), CompactDistribution::delta(0.5));
        let e = parse_distribution("dist[delta(0.5), density(sin, [0, 1])]").unwrap_err();
        assert!(e.message.contains("compact support"), "{e}");
        let e = parse_distribution("delta(0.5, 1)").unwrap_err();
        assert_eq!(e.offset, 0);
        let e = parse_distribution("density(bump_on(0.2, 0.4), [0.2 0.4])").unwrap_err();
        assert!(e.offset >= 27, "{e}");
    }
}
