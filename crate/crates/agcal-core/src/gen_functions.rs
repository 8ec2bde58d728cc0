//! Nets of smooth functions on an interval and the generalized functions
//! they represent.

use crate::gauges::{is_moderate_with, is_negligible_num_with, principal_generator, AlgebraSpec, Gauge};
use crate::gen_numbers::{CompactPoint, GenNumber};
use crate::index_core::{big_o_with, GridConfig, Net, NetRepr, Status, Verdict};
use crate::math;
use crate::profiles::SmoothProfile;
use crate::rate_dsl::{approx_q, eval_at, exact_q, normalize, RateExpr, Q};
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// `(order, ε, x) ↦ ∂^order u_ε(x)`.
pub type EvalFn = Arc<dyn Fn(u32, f64, f64) -> f64 + Send + Sync>;

/// Closed interval [lo, hi].
pub type Interval = (f64, f64);

/// An ε-indexed family of smooth functions of one variable.
#[derive(Clone)]
pub enum SmoothFamily {
    /// Σ coef_i(ε)·profile_i(x).
    SeparableSum(Vec<(RateExpr, SmoothProfile)>),
    /// scale_out(ε)·kernel(scale_in(ε)·(x - shift)).
    ScaledKernel {
        kernel: SmoothProfile,
        scale_in: RateExpr,
        scale_out: RateExpr,
        shift: f64,
    },
    /// Opaque evaluation. Orders up to `exact_orders` come from `eval`
    /// itself; higher orders up to `max_deriv` use central differences.
    BlackBox {
        eval: EvalFn,
        max_deriv: u32,
        exact_orders: u32,
        label: String,
    },
    /// Finite sum of families.
    Sum(Vec<SmoothFamily>),
}

impl fmt::Debug for SmoothFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SmoothFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothFamily::SeparableSum(terms) => {
                let parts: Vec<String> = terms.iter().map(|(c, p)| format!("({c}, {p})")).collect();
                write!(f, "sep[{}]", parts.join(", "))
            }
            SmoothFamily::ScaledKernel {
                kernel,
                scale_in,
                scale_out,
                shift,
            } => write!(f, "kernel({kernel}, {scale_in}, {scale_out}, {shift})"),
            SmoothFamily::BlackBox { label, max_deriv, .. } => write!(f, "blackbox({label}; order <= {max_deriv})"),
            SmoothFamily::Sum(v) => {
                let parts: Vec<String> = v.iter().map(|p| format!("{p}")).collect();
                write!(f, "sum[{}]", parts.join(", "))
            }
        }
    }
}

fn coef_value(e: &RateExpr, eps: f64) -> f64 {
    match eval_at(e, eps) {
        Ok(v) => v,
        Err(crate::rate_dsl::EvalError::Overflow) => f64::INFINITY,
        Err(_) => f64::NAN,
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut b = 1.0;
    for j in 0..k {
        b = b * (n - j) as f64 / (j + 1) as f64;
    }
    b
}

impl SmoothFamily {
    pub fn separable(terms: Vec<(RateExpr, SmoothProfile)>) -> SmoothFamily {
        SmoothFamily::SeparableSum(terms)
    }

    /// The ε-independent family x ↦ f(x).
    pub fn constant_profile(f: SmoothProfile) -> SmoothFamily {
        SmoothFamily::SeparableSum(vec![(RateExpr::num(1), f)])
    }

    pub fn zero() -> SmoothFamily {
        SmoothFamily::SeparableSum(Vec::new())
    }

    pub fn kernel(kernel: SmoothProfile, scale_in: RateExpr, scale_out: RateExpr, shift: f64) -> SmoothFamily {
        SmoothFamily::ScaledKernel {
            kernel,
            scale_in,
            scale_out,
            shift,
        }
    }

    pub fn black_box(
        label: impl Into<String>,
        max_deriv: u32,
        exact_orders: u32,
        eval: impl Fn(u32, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> SmoothFamily {
        SmoothFamily::BlackBox {
            eval: Arc::new(eval),
            max_deriv,
            exact_orders: exact_orders.min(max_deriv),
            label: label.into(),
        }
    }

    /// Highest derivative order available, `None` when unlimited.
    pub fn max_deriv(&self) -> Option<u32> {
        match self {
            SmoothFamily::BlackBox { max_deriv, .. } => Some(*max_deriv),
            SmoothFamily::Sum(v) => v.iter().filter_map(|f| f.max_deriv()).min(),
            _ => None,
        }
    }

    fn exact_orders(&self) -> u32 {
        match self {
            SmoothFamily::BlackBox { exact_orders, .. } => *exact_orders,
            SmoothFamily::Sum(v) => v.iter().map(|f| f.exact_orders()).min().unwrap_or(u32::MAX),
            _ => u32::MAX,
        }
    }

    pub fn is_black_box(&self) -> bool {
        match self {
            SmoothFamily::BlackBox { .. } => true,
            SmoothFamily::Sum(v) => v.iter().any(|f| f.is_black_box()),
            _ => false,
        }
    }

    /// ∂^k u_ε(x). `width` sets the finite-difference step for opaque
    /// families and is ignored otherwise.
    pub fn eval_deriv(&self, k: u32, eps: f64, x: f64, width: f64) -> f64 {
        match self {
            SmoothFamily::SeparableSum(terms) => terms
                .iter()
                .map(|(c, p)| {
                    let d = p.deriv_n(k).eval(x);
                    if d == 0.0 {
                        0.0
                    } else {
                        coef_value(c, eps) * d
                    }
                })
                .sum(),
            SmoothFamily::ScaledKernel {
                kernel,
                scale_in,
                scale_out,
                shift,
            } => {
                let a = coef_value(scale_in, eps);
                let kd = kernel.deriv_n(k).eval(a * (x - shift));
                if kd == 0.0 {
                    return 0.0;
                }
                coef_value(scale_out, eps) * math::powi(a, k as i32) * kd
            }
            SmoothFamily::BlackBox {
                eval, exact_orders, ..
            } => {
                if k <= *exact_orders {
                    return eval(k, eps, x);
                }
                let n = k - exact_orders;
                let h = width.max(1e-12) * math::powf(10.0, -4.0 / n as f64);
                let mut acc = 0.0;
                for j in 0..=n {
                    let off = (n as f64 / 2.0 - j as f64) * h;
                    let sgn = if j % 2 == 0 { 1.0 } else { -1.0 };
                    acc += sgn * binomial(n, j) * eval(*exact_orders, eps, x + off);
                }
                acc / math::powi(h, n as i32)
            }
            SmoothFamily::Sum(v) => v.iter().map(|f| f.eval_deriv(k, eps, x, width)).sum(),
        }
    }

    pub fn eval(&self, eps: f64, x: f64) -> f64 {
        self.eval_deriv(0, eps, x, 1.0)
    }

    /// ∂_x of the family, staying in the same form.
    pub fn deriv(&self) -> Result<SmoothFamily> {
        Ok(match self {
            SmoothFamily::SeparableSum(terms) => SmoothFamily::SeparableSum(
                terms
                    .iter()
                    .map(|(c, p)| (c.clone(), p.deriv()))
                    .filter(|(_, p)| !p.is_zero())
                    .collect(),
            ),
            SmoothFamily::ScaledKernel {
                kernel,
                scale_in,
                scale_out,
                shift,
            } => SmoothFamily::ScaledKernel {
                kernel: kernel.deriv(),
                scale_in: scale_in.clone(),
                scale_out: RateExpr::mul(scale_out.clone(), scale_in.clone()),
                shift: *shift,
            },
            SmoothFamily::BlackBox {
                eval,
                max_deriv,
                exact_orders,
                label,
            } => {
                if *max_deriv == 0 {
                    return Err(Error::Capability(format!("{label} has no derivative left")));
                }
                let inner = eval.clone();
                let ex = *exact_orders;
                if ex == 0 {
                    return Err(Error::Capability(format!(
                        "{label} only supports finite-difference derivatives of its values"
                    )));
                }
                SmoothFamily::BlackBox {
                    eval: Arc::new(move |k, e, x| inner(k + 1, e, x)),
                    max_deriv: max_deriv - 1,
                    exact_orders: ex - 1,
                    label: format!("d/dx {label}"),
                }
            }
            SmoothFamily::Sum(v) => SmoothFamily::Sum(v.iter().map(|f| f.deriv()).collect::<Result<_>>()?),
        })
    }

    pub fn neg(&self) -> SmoothFamily {
        match self {
            SmoothFamily::SeparableSum(terms) => SmoothFamily::SeparableSum(
                terms
                    .iter()
                    .map(|(c, p)| (RateExpr::neg(c.clone()), p.clone()))
                    .collect(),
            ),
            SmoothFamily::ScaledKernel {
                kernel,
                scale_in,
                scale_out,
                shift,
            } => SmoothFamily::ScaledKernel {
                kernel: kernel.clone(),
                scale_in: scale_in.clone(),
                scale_out: RateExpr::neg(scale_out.clone()),
                shift: *shift,
            },
            SmoothFamily::BlackBox {
                eval,
                max_deriv,
                exact_orders,
                label,
            } => {
                let inner = eval.clone();
                SmoothFamily::BlackBox {
                    eval: Arc::new(move |k, e, x| -inner(k, e, x)),
                    max_deriv: *max_deriv,
                    exact_orders: *exact_orders,
                    label: format!("-{label}"),
                }
            }
            SmoothFamily::Sum(v) => SmoothFamily::Sum(v.iter().map(|f| f.neg()).collect()),
        }
    }

    pub fn add(&self, other: &SmoothFamily) -> SmoothFamily {
        match (self, other) {
            (SmoothFamily::SeparableSum(a), SmoothFamily::SeparableSum(b)) => {
                SmoothFamily::SeparableSum(a.iter().chain(b).cloned().collect())
            }
            _ => {
                let mut parts = Vec::new();
                for f in [self, other] {
                    match f {
                        SmoothFamily::Sum(v) => parts.extend(v.iter().cloned()),
                        g => parts.push(g.clone()),
                    }
                }
                SmoothFamily::Sum(parts)
            }
        }
    }

    pub fn mul(&self, other: &SmoothFamily) -> SmoothFamily {
        if let (SmoothFamily::SeparableSum(a), SmoothFamily::SeparableSum(b)) = (self, other) {
            let mut terms = Vec::new();
            for (c1, p1) in a {
                for (c2, p2) in b {
                    terms.push((
                        RateExpr::mul(c1.clone(), c2.clone()),
                        SmoothProfile::product(p1.clone(), p2.clone()),
                    ));
                }
            }
            return SmoothFamily::SeparableSum(terms);
        }
        let (u, v) = (self.clone(), other.clone());
        let max_deriv = match (u.max_deriv(), v.max_deriv()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => u32::MAX,
        };
        let exact = u.exact_orders().min(v.exact_orders()).min(max_deriv);
        let label = format!("({u}) * ({v})");
        SmoothFamily::black_box(label, max_deriv, exact, move |k, e, x| {
            (0..=k)
                .map(|j| binomial(k, j) * u.eval_deriv(j, e, x, 1.0) * v.eval_deriv(k - j, e, x, 1.0))
                .sum()
        })
    }
}

/// Sampling knobs for suprema of opaque families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupOptions {
    pub grid: GridConfig,
    pub x_points: usize,
}

impl Default for SupOptions {
    fn default() -> Self {
        SupOptions {
            grid: GridConfig::default(),
            x_points: 400,
        }
    }
}

/// A non-negative real constant as a rational that does not undershoot it
/// by more than rounding.
fn const_q(c: f64) -> Result<Q> {
    if !c.is_finite() {
        return Err(Error::Numeric(format!("supremum {c} is not finite")));
    }
    if c <= 1e-9 {
        return Ok(Q::new(1, 1_000_000_000));
    }
    if c >= 1e12 {
        if c > 9e18 {
            return Err(Error::Numeric(format!("supremum {c:e} does not fit a rational constant")));
        }
        return Ok(Q::from_integer(math::ceil(c) as i64));
    }
    if let Some(q) = exact_q(c) {
        return Ok(q);
    }
    approx_q(c, 1_000_000).ok_or_else(|| Error::Numeric(format!("cannot represent {c}")))
}

fn scaled_const(factor: RateExpr, c: f64) -> Result<RateExpr> {
    let q = const_q(c)?;
    Ok(if q == Q::from_integer(1) {
        factor
    } else {
        RateExpr::mul(factor, RateExpr::Num(q))
    })
}

fn sum_exprs(parts: Vec<RateExpr>) -> RateExpr {
    let mut it = parts.into_iter();
    match it.next() {
        None => RateExpr::num(0),
        Some(first) => it.fold(first, RateExpr::add),
    }
}

/// Samples (ε, sup_K |∂^α u_ε|) on the grid, stopping at the first
/// non-finite value. Returns the samples and the first ε that overflowed.
pub fn sup_samples(u: &SmoothFamily, k: Interval, alpha: u32, opts: &SupOptions) -> (Vec<(f64, f64)>, Option<f64>) {
    let n = opts.x_points.max(2);
    let width = k.1 - k.0;
    let xs: Vec<f64> = (0..n).map(|i| k.0 + width * i as f64 / (n - 1) as f64).collect();
    let mut out = Vec::new();
    for e in opts.grid.points() {
        let mut m = 0.0f64;
        let mut bad = false;
        for &x in &xs {
            let v = math::abs(u.eval_deriv(alpha, e, x, width));
            if !v.is_finite() {
                bad = true;
                break;
            }
            m = m.max(v);
        }
        if bad {
            return (out, Some(e));
        }
        out.push((e, m));
    }
    (out, None)
}

fn sampled_sup(u: &SmoothFamily, k: Interval, alpha: u32, opts: &SupOptions) -> Result<Net> {
    let (pts, cut) = sup_samples(u, k, alpha, opts);
    if pts.len() < 8 {
        return Err(Error::Numeric(format!(
            "grid truncated to {} points by overflow at eps = {:e}",
            pts.len(),
            cut.unwrap_or(f64::NAN)
        )));
    }
    Net::sampled(pts)
}

/// Net ε ↦ sup_{x∈K} |∂^α u_ε(x)|.
pub fn sup_norm_net(u: &SmoothFamily, k: Interval, alpha: u32) -> Result<Net> {
    sup_norm_net_with(u, k, alpha, &SupOptions::default())
}

pub fn sup_norm_net_with(u: &SmoothFamily, k: Interval, alpha: u32, opts: &SupOptions) -> Result<Net> {
    if !(k.0 <= k.1) {
        return Err(Error::Argument(format!("empty interval [{}, {}]", k.0, k.1)));
    }
    match u {
        SmoothFamily::SeparableSum(terms) => {
            let mut parts = Vec::new();
            for (c, p) in terms {
                let s = p.deriv_n(alpha).sup_abs(k.0, k.1);
                if s == 0.0 {
                    continue;
                }
                parts.push(scaled_const(RateExpr::abs(c.clone()), s)?);
            }
            Ok(Net::symbolic(sum_exprs(parts)))
        }
        SmoothFamily::ScaledKernel {
            kernel,
            scale_in,
            scale_out,
            shift,
        } => kernel_sup(u, kernel, scale_in, scale_out, *shift, k, alpha, opts),
        SmoothFamily::BlackBox { max_deriv, label, .. } => {
            if alpha > *max_deriv {
                return Err(Error::Capability(format!(
                    "{label} provides derivatives up to order {max_deriv}, asked for {alpha}"
                )));
            }
            sampled_sup(u, k, alpha, opts)
        }
        SmoothFamily::Sum(v) => {
            if let Some(m) = u.max_deriv() {
                if alpha > m {
                    return Err(Error::Capability(format!(
                        "sum provides derivatives up to order {m}, asked for {alpha}"
                    )));
                }
            }
            let mut acc: Option<Net> = None;
            for f in v {
                let s = sup_norm_net_with(f, k, alpha, opts)?;
                acc = Some(match acc {
                    None => s,
                    Some(a) => a.add(&s)?,
                });
            }
            Ok(acc.unwrap_or_else(|| Net::constant(0)))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn kernel_sup(
    u: &SmoothFamily,
    kernel: &SmoothProfile,
    scale_in: &RateExpr,
    scale_out: &RateExpr,
    shift: f64,
    k: Interval,
    alpha: u32,
    opts: &SupOptions,
) -> Result<Net> {
    let ka = kernel.deriv_n(alpha);
    if ka.is_zero() {
        return Ok(Net::constant(0));
    }
    let abs_in = RateExpr::abs(scale_in.clone());
    let factor = if alpha == 0 {
        RateExpr::abs(scale_out.clone())
    } else {
        RateExpr::mul(
            RateExpr::abs(scale_out.clone()),
            RateExpr::pow(abs_in.clone(), Q::from_integer(alpha as i64)),
        )
    };
    let nf = match normalize(scale_in) {
        Ok(nf) => nf,
        Err(_) => return sampled_sup(u, k, alpha, opts),
    };
    let constant_in = match nf.to_expr() {
        RateExpr::Num(c) => Some(crate::rate_dsl::q_to_f64(c)),
        _ => None,
    };
    if let Some(c) = constant_in {
        let (a, b) = (c * (k.0 - shift), c * (k.1 - shift));
        let s = ka.sup_abs(a.min(b), a.max(b));
        if s == 0.0 {
            return Ok(Net::constant(0));
        }
        return Ok(Net::symbolic(scaled_const(factor, s)?));
    }
    let growing = nf.growth().is_growing();
    if *kernel == SmoothProfile::Exp && growing {
        let toward = if nf.eventual_sign() == Ordering::Greater {
            k.1 - shift
        } else {
            k.0 - shift
        };
        let Some(d) = exact_q(toward).or_else(|| approx_q(toward, 1_000_000)) else {
            return sampled_sup(u, k, alpha, opts);
        };
        let e = RateExpr::exp(RateExpr::mul(scale_in.clone(), RateExpr::Num(d)));
        return Ok(Net::symbolic(RateExpr::mul(factor, e)));
    }
    if !growing {
        return sampled_sup(u, k, alpha, opts);
    }
    if let SmoothProfile::Poly(c) = &ka {
        let r = math::abs(k.0 - shift).max(math::abs(k.1 - shift));
        let mut parts = Vec::new();
        for (j, &cj) in c.iter().enumerate() {
            if cj == 0.0 {
                continue;
            }
            let w = math::abs(cj) * math::powi(r, j as i32);
            if w == 0.0 {
                continue;
            }
            let base = if j == 0 {
                factor.clone()
            } else {
                RateExpr::mul(factor.clone(), RateExpr::pow(abs_in.clone(), Q::from_integer(j as i64)))
            };
            parts.push(scaled_const(base, w)?);
        }
        return Ok(Net::symbolic(sum_exprs(parts)));
    }
    if ka.bounded_window().is_none() {
        return sampled_sup(u, k, alpha, opts);
    }
    if k.0 <= shift && shift <= k.1 {
        let s = ka.global_sup_abs().unwrap_or(0.0);
        if s == 0.0 {
            return Ok(Net::constant(0));
        }
        return Ok(Net::symbolic(scaled_const(factor, s)?));
    }
    let d = if shift < k.0 { k.0 - shift } else { shift - k.1 };
    if ka.support().is_some() {
        return Ok(Net::constant(0));
    }
    if let SmoothProfile::PolyGauss(c) = &ka {
        let Some(dq) = approx_q(d * (1.0 - 1e-9), 1_000_000).filter(|q| *q > Q::from_integer(0)) else {
            return sampled_sup(u, k, alpha, opts);
        };
        let y = RateExpr::mul(abs_in.clone(), RateExpr::Num(dq));
        let mut parts = Vec::new();
        for (j, &cj) in c.iter().enumerate() {
            if cj == 0.0 {
                continue;
            }
            let base = if j == 0 {
                RateExpr::num(1)
            } else {
                RateExpr::pow(y.clone(), Q::from_integer(j as i64))
            };
            parts.push(scaled_const(base, math::abs(cj))?);
        }
        let gauss = RateExpr::exp(RateExpr::mul(
            RateExpr::num(-1),
            RateExpr::pow(y, Q::from_integer(2)),
        ));
        return Ok(Net::symbolic(RateExpr::mul(
            factor,
            RateExpr::mul(sum_exprs(parts), gauss),
        )));
    }
    sampled_sup(u, k, alpha, opts)
}

/// Test budget for the quantifiers over compact sets and derivative orders.
#[derive(Clone, Debug, PartialEq)]
pub struct FnBudget {
    pub kset: Vec<Interval>,
    pub alpha_max: u32,
    pub m_max: u32,
    pub sup: SupOptions,
}

impl FnBudget {
    pub fn for_domain(domain: Interval) -> FnBudget {
        FnBudget {
            kset: vec![default_compact(domain)],
            alpha_max: 4,
            m_max: 8,
            sup: SupOptions::default(),
        }
    }

    pub fn with_kset(mut self, kset: Vec<Interval>) -> FnBudget {
        self.kset = kset;
        self
    }
    pub fn with_alpha_max(mut self, a: u32) -> FnBudget {
        self.alpha_max = a;
        self
    }
    pub fn with_m_max(mut self, m: u32) -> FnBudget {
        self.m_max = m;
        self
    }

    /// The "verified up to" statement attached to every verdict.
    pub fn truncation(&self, alpha_max: u32, with_m: bool) -> String {
        let ks: Vec<String> = self.kset.iter().map(|k| format!("[{}, {}]", k.0, k.1)).collect();
        let g = self.sup.grid;
        let mut s = format!(
            "verified for K in {{{}}}, alpha <= {alpha_max}, grid eps0={} r={} n={}",
            ks.join(", "),
            g.eps0,
            g.ratio,
            g.count
        );
        if with_m {
            s.push_str(&format!(", m <= {}", self.m_max));
        }
        s
    }
}

/// [-1, 1] when it fits in Ω, otherwise a translate or a shrunken copy.
pub fn default_compact(domain: Interval) -> Interval {
    let (a, b) = domain;
    if a < -1.0 && b > 1.0 {
        return (-1.0, 1.0);
    }
    if b - a > 2.5 {
        let c = if a.is_finite() { a + 1.25 } else { b - 1.25 };
        return (c - 1.0, c + 1.0);
    }
    let l = b - a;
    (a + 0.1 * l, b - 0.1 * l)
}

/// Sample count per compact set for the construction-time moderateness
/// screen of opaque families.
pub const SCREEN_X_POINTS: usize = 41;

/// A representative of G(B, Z, Ω) with its cached moderateness verdict.
#[derive(Clone, Debug)]
pub struct GenFunction {
    family: SmoothFamily,
    spec: AlgebraSpec,
    domain: Interval,
    moderate: Verdict,
}

impl GenFunction {
    /// Rejects families whose moderateness is not established.
    pub fn new(family: SmoothFamily, spec: AlgebraSpec, domain: Interval) -> Result<GenFunction> {
        let u = GenFunction::assemble(family, spec, domain)?;
        match u.moderate.status {
            Status::Holds => Ok(u),
            s => Err(Error::Precondition(format!(
                "family is not shown moderate in {} ({}); use GenFunction::with_override to accept",
                u.spec.b,
                s.name()
            ))),
        }
    }

    /// Accepts an Inconclusive moderateness verdict; still rejects Fails.
    pub fn with_override(family: SmoothFamily, spec: AlgebraSpec, domain: Interval) -> Result<GenFunction> {
        let u = GenFunction::assemble(family, spec, domain)?;
        if u.moderate.fails() {
            return Err(Error::Precondition(format!("family is not moderate in {}", u.spec.b)));
        }
        Ok(u)
    }

    /// σ(f): the constant embedding of a smooth function.
    pub fn from_profile(f: SmoothProfile, spec: AlgebraSpec, domain: Interval) -> Result<GenFunction> {
        GenFunction::new(SmoothFamily::constant_profile(f), spec, domain)
    }

    fn assemble(family: SmoothFamily, spec: AlgebraSpec, domain: Interval) -> Result<GenFunction> {
        if !(domain.0 < domain.1) {
            return Err(Error::Argument(format!("empty domain ({}, {})", domain.0, domain.1)));
        }
        let mut budget = FnBudget::for_domain(domain);
        if family.is_black_box() {
            budget.sup.x_points = SCREEN_X_POINTS;
        }
        let moderate = is_moderate_family(&family, &spec.b, &budget)?;
        Ok(GenFunction {
            family,
            spec,
            domain,
            moderate,
        })
    }

    pub fn family(&self) -> &SmoothFamily {
        &self.family
    }
    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }
    pub fn domain(&self) -> Interval {
        self.domain
    }
    pub fn moderateness(&self) -> &Verdict {
        &self.moderate
    }
    pub fn budget(&self) -> FnBudget {
        FnBudget::for_domain(self.domain)
    }
}

fn check_compacts(kset: &[Interval], domain: Interval) -> Result<()> {
    for k in kset {
        if !(k.0 <= k.1) || k.0 < domain.0 || k.1 > domain.1 {
            return Err(Error::Argument(format!(
                "[{}, {}] is not a compact subset of ({}, {})",
                k.0, k.1, domain.0, domain.1
            )));
        }
    }
    Ok(())
}

/// Moderateness of a bare family against a gauge.
pub fn is_moderate_family(u: &SmoothFamily, g: &Gauge, budget: &FnBudget) -> Result<Verdict> {
    let amax = u.max_deriv().map_or(budget.alpha_max, |m| m.min(budget.alpha_max));
    let mut parts = Vec::new();
    for &k in &budget.kset {
        for alpha in 0..=amax {
            let v = match sup_norm_net_with(u, k, alpha, &budget.sup) {
                Ok(net) => is_moderate_with(&net.with_index(g.index().clone()), g, &budget.sup.grid)?,
                Err(Error::Numeric(m)) => Verdict::numeric(Status::Inconclusive, 0.0).with_detail(m),
                Err(e) => return Err(e),
            };
            let v = if u.is_black_box() && v.mode == crate::index_core::Mode::Exact {
                let c = v.confidence.unwrap_or(1.0);
                v.as_numeric(c)
            } else {
                v
            };
            let failed = !v.holds();
            parts.push(
                v.with_evidence("K", format!("[{}, {}]", k.0, k.1))
                    .with_evidence("alpha", alpha),
            );
            if failed && parts.last().map_or(false, |p| p.fails()) {
                break;
            }
        }
    }
    let first_bad = parts.iter().position(|p| !p.holds());
    let evidence = first_bad.map(|i| parts[i].evidence.clone());
    let mut out = Verdict::all(parts).with_evidence("truncation", budget.truncation(amax, false));
    if let Some(ev) = evidence {
        for (key, val) in ev {
            out = out.with_evidence(key, val);
        }
    }
    Ok(out)
}

/// u ∈ E_M(B, Ω) on the given budget.
pub fn is_moderate_fn(u: &GenFunction, budget: &FnBudget) -> Result<Verdict> {
    check_compacts(&budget.kset, u.domain)?;
    is_moderate_family(&u.family, &u.spec.b, budget)
}

/// u ∈ N(Z, Ω) on the given budget.
pub fn is_negligible_fn(u: &GenFunction, budget: &FnBudget) -> Result<Verdict> {
    check_compacts(&budget.kset, u.domain)?;
    is_negligible_family(&u.family, &u.spec.z, budget)
}

pub fn is_negligible_family(u: &SmoothFamily, z: &Gauge, budget: &FnBudget) -> Result<Verdict> {
    let amax = u.max_deriv().map_or(budget.alpha_max, |m| m.min(budget.alpha_max));
    let generator = principal_generator(z).generator;
    let index = z.index().clone();
    let grid = budget.sup.grid;
    let mut parts = Vec::new();
    'outer: for &k in &budget.kset {
        for alpha in 0..=amax {
            let net = match sup_norm_net_with(u, k, alpha, &budget.sup) {
                Ok(n) => n.with_index(index.clone()),
                Err(Error::Numeric(m)) => {
                    parts.push(Verdict::numeric(Status::Inconclusive, 0.0).with_detail(m));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let tag = |v: Verdict| {
                v.with_evidence("K", format!("[{}, {}]", k.0, k.1))
                    .with_evidence("alpha", alpha)
            };
            match &generator {
                Some(b) => {
                    for m in 0..=budget.m_max {
                        let bound = Net::symbolic(RateExpr::pow(b.clone(), Q::from_integer(-(m as i64))))
                            .with_index(index.clone());
                        let v = big_o_with(&net, &bound, &grid)?;
                        if !v.holds() {
                            let fails = v.fails();
                            parts.push(tag(v.with_evidence("m", m)));
                            if fails {
                                break 'outer;
                            }
                            break;
                        }
                        if m == budget.m_max {
                            parts.push(tag(v));
                        }
                    }
                }
                None => {
                    let v = is_negligible_num_with(&net, z, &grid)?;
                    let fails = v.fails();
                    parts.push(tag(v));
                    if fails {
                        break 'outer;
                    }
                }
            }
        }
    }
    let first_bad = parts.iter().position(|p| !p.holds());
    let evidence = first_bad.map(|i| parts[i].evidence.clone());
    let mut out = Verdict::all(parts).with_evidence("truncation", budget.truncation(amax, generator.is_some()));
    if u.is_black_box() && out.mode == crate::index_core::Mode::Exact {
        let c = out.confidence.unwrap_or(1.0);
        out = out.as_numeric(c);
    }
    if let Some(ev) = evidence {
        for (key, val) in ev {
            out = out.with_evidence(key, val);
        }
    }
    Ok(out)
}

fn same_carrier(u: &GenFunction, v: &GenFunction) -> Result<()> {
    if u.spec != v.spec {
        return Err(Error::Argument(format!("algebras differ: {} vs {}", u.spec, v.spec)));
    }
    if u.domain != v.domain {
        return Err(Error::Argument("domains differ".into()));
    }
    Ok(())
}

fn derived(u: &GenFunction, family: SmoothFamily) -> Result<GenFunction> {
    GenFunction::assemble(family, u.spec.clone(), u.domain)
}

pub fn gf_add(u: &GenFunction, v: &GenFunction) -> Result<GenFunction> {
    same_carrier(u, v)?;
    derived(u, u.family.add(&v.family))
}

pub fn gf_neg(u: &GenFunction) -> Result<GenFunction> {
    derived(u, u.family.neg())
}

pub fn gf_sub(u: &GenFunction, v: &GenFunction) -> Result<GenFunction> {
    same_carrier(u, v)?;
    derived(u, u.family.add(&v.family.neg()))
}

pub fn gf_mul(u: &GenFunction, v: &GenFunction) -> Result<GenFunction> {
    same_carrier(u, v)?;
    derived(u, u.family.mul(&v.family))
}

pub fn gf_deriv(u: &GenFunction) -> Result<GenFunction> {
    derived(u, u.family.deriv()?)
}

pub fn gf_restrict(u: &GenFunction, sub: Interval) -> Result<GenFunction> {
    if !(sub.0 < sub.1) || sub.0 < u.domain.0 || sub.1 > u.domain.1 {
        return Err(Error::Argument(format!(
            "({}, {}) is not a subinterval of ({}, {})",
            sub.0, sub.1, u.domain.0, u.domain.1
        )));
    }
    derived(u, u.family.clone()).map(|mut r| {
        r.domain = sub;
        r
    })
}

fn symbolic_value(f: &SmoothFamily, x: &RateExpr) -> Option<RateExpr> {
    match f {
        SmoothFamily::SeparableSum(terms) => {
            let mut parts = Vec::new();
            for (c, p) in terms {
                parts.push(RateExpr::mul(c.clone(), p.to_expr(x)?));
            }
            Some(sum_exprs(parts))
        }
        SmoothFamily::ScaledKernel {
            kernel,
            scale_in,
            scale_out,
            shift,
        } => {
            let s = exact_q(*shift)?;
            let moved = if s == Q::from_integer(0) {
                x.clone()
            } else {
                RateExpr::sub(x.clone(), RateExpr::Num(s))
            };
            let arg = RateExpr::mul(scale_in.clone(), moved);
            Some(RateExpr::mul(scale_out.clone(), kernel.to_expr(&arg)?))
        }
        SmoothFamily::BlackBox { .. } => None,
        SmoothFamily::Sum(v) => Some(sum_exprs(v.iter().map(|g| symbolic_value(g, x)).collect::<Option<_>>()?)),
    }
}

/// u(x) = [u_ε(x_ε)].
pub fn point_value(u: &GenFunction, x: &CompactPoint) -> Result<GenNumber> {
    let (lo, hi) = x.hull();
    if !(lo > u.domain.0 && hi < u.domain.1) {
        return Err(Error::Argument(format!(
            "hull [{lo}, {hi}] is not inside ({}, {})",
            u.domain.0, u.domain.1
        )));
    }
    let index = u.spec.b.index().clone();
    let symbolic = match x.rep().repr() {
        NetRepr::Symbolic(e) => symbolic_value(&u.family, e).filter(|v| normalize(v).is_ok()),
        _ => None,
    };
    let net = match symbolic {
        Some(e) => Net::symbolic(e),
        None => {
            let fam = u.family.clone();
            let xr = x.rep().clone();
            Net::callable(move |e| match xr.value(e) {
                Ok(xe) => fam.eval(e, xe),
                Err(_) => f64::NAN,
            })
        }
    };
    GenNumber::new(net.with_index(index), u.spec.clone())
}

/// Closed intervals outside of which u is negligible at resolution `tol`.
/// `window` bounds the scan when the domain is unbounded.
pub fn support_estimate(u: &GenFunction, tol: f64, window: Option<Interval>) -> Result<Vec<Interval>> {
    support_estimate_with(u, tol, window, &SupOptions { x_points: 41, ..SupOptions::default() })
}

pub fn support_estimate_with(
    u: &GenFunction,
    tol: f64,
    window: Option<Interval>,
    sup: &SupOptions,
) -> Result<Vec<Interval>> {
    if !(tol > 0.0) {
        return Err(Error::Argument("resolution must be positive".into()));
    }
    let (mut lo, mut hi) = u.domain;
    if let Some(w) = window {
        lo = lo.max(w.0);
        hi = hi.min(w.1);
    }
    if !(lo.is_finite() && hi.is_finite()) {
        lo = lo.max(-1.0);
        hi = hi.min(1.0);
    }
    let cells = math::ceil((hi - lo) / tol - 1e-9).max(1.0) as usize;
    let mut out: Vec<Interval> = Vec::new();
    for i in 0..cells {
        let a = lo + tol * i as f64;
        let b = (lo + tol * (i + 1) as f64).min(hi);
        let budget = FnBudget {
            kset: vec![(a, b)],
            alpha_max: 0,
            m_max: 8,
            sup: *sup,
        };
        let v = is_negligible_family(&u.family, &u.spec.z, &budget)?;
        if v.holds() {
            continue;
        }
        match out.last_mut() {
            Some(last) if (last.1 - a).abs() <= 1e-12 => last.1 = b,
            _ => out.push((a, b)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauges::exp_gauge;
    use crate::index_core::Mode;
    use crate::rate_dsl::parse;

    fn e(s: &str) -> RateExpr {
        parse(s).unwrap()
    }
    fn ag() -> AlgebraSpec {
        AlgebraSpec::diagonal(Gauge::powers_nat(e("eps^-1")).unwrap())
    }
    const LINE: Interval = (f64::NEG_INFINITY, f64::INFINITY);

    #[test]
    fn sup_norm_examples() {
        let u = SmoothFamily::separable(vec![(e("eps^-1"), SmoothProfile::Sin)]);
        let n = sup_norm_net(&u, (0.0, 1.0), 0).unwrap();
        let v = n.value(0.01).unwrap();
        assert!((v - 100.0 * math::sin(1.0)).abs() < 1e-9 * v);
        let rho = SmoothProfile::gauss();
        let k = SmoothFamily::kernel(rho.clone(), e("eps^-1"), e("eps^-1"), 0.0);
        let n = sup_norm_net(&k, (-1.0, 1.0), 1).unwrap();
        let want = rho.deriv().global_sup_abs().unwrap();
        let v = n.value(0.01).unwrap();
        assert!((v / 1e4 - want).abs() < 1e-9);
        assert!(matches!(n.repr(), NetRepr::Symbolic(_)));
        let z = sup_norm_net(&SmoothFamily::zero(), (0.0, 1.0), 2).unwrap();
        assert_eq!(z.value(0.3).unwrap(), 0.0);
    }

    #[test]
    fn black_box_capability() {
        let bb = SmoothFamily::black_box("sin", 1, 0, |_, _, x| math::sin(x));
        assert!(matches!(sup_norm_net(&bb, (0.0, 1.0), 2), Err(Error::Capability(_))));
        let n = sup_norm_net(&bb, (0.0, 1.0), 1).unwrap();
        assert!((n.value(0.1).unwrap() - 1.0).abs() < 1e-6);
    }

    fn decaying_exp() -> SmoothFamily {
        SmoothFamily::kernel(SmoothProfile::Exp, e("-1 * eps^-1"), e("1"), 0.0)
    }

    #[test]
    fn exponential_family_needs_the_exponential_gauge() {
        let budget = FnBudget::for_domain(LINE);
        let bs = Gauge::special();
        let v = is_moderate_family(&decaying_exp(), &bs, &budget).unwrap();
        assert!(v.fails());
        let v = is_moderate_family(&decaying_exp(), &exp_gauge(&bs), &budget).unwrap();
        assert!(v.holds());
        let f = GenFunction::from_profile(SmoothProfile::Sin, ag(), LINE).unwrap();
        assert!(f.moderateness().holds());
    }

    #[test]
    fn negligibility_examples() {
        let b = FnBudget::for_domain(LINE);
        let u = GenFunction::new(
            SmoothFamily::separable(vec![(e("exp(-1/eps)"), SmoothProfile::Sin)]),
            ag(),
            LINE,
        )
        .unwrap();
        let v = is_negligible_fn(&u, &b).unwrap();
        assert!(v.holds());
        assert_eq!(v.mode, Mode::Exact);
        let w = GenFunction::new(
            SmoothFamily::separable(vec![(e("eps^5"), SmoothProfile::poly(vec![0.0, 0.0, 1.0]))]),
            ag(),
            LINE,
        )
        .unwrap();
        let v = is_negligible_fn(&w, &b.clone().with_m_max(6)).unwrap();
        assert!(v.fails());
        assert_eq!(v.evidence("m"), Some("6"));
    }

    #[test]
    fn kernel_derivative_rule() {
        let k = SmoothFamily::kernel(SmoothProfile::gauss(), e("eps^-1"), e("eps^-1"), 0.0);
        match k.deriv().unwrap() {
            SmoothFamily::ScaledKernel {
                kernel, scale_out, ..
            } => {
                assert_eq!(kernel, SmoothProfile::gauss().deriv());
                assert_eq!(scale_out, RateExpr::mul(e("eps^-1"), e("eps^-1")));
            }
            _ => panic!("form changed"),
        }
    }

    #[test]
    fn ideal_property_and_restriction() {
        let spec = ag();
        let neg = GenFunction::new(
            SmoothFamily::separable(vec![(e("exp(-1/eps)"), SmoothProfile::Cos)]),
            spec.clone(),
            LINE,
        )
        .unwrap();
        let m = GenFunction::new(
            SmoothFamily::separable(vec![(e("eps^-3"), SmoothProfile::gauss())]),
            spec,
            LINE,
        )
        .unwrap();
        let p = gf_mul(&neg, &m).unwrap();
        assert!(is_negligible_fn(&p, &FnBudget::for_domain(LINE)).unwrap().holds());
        let r = gf_restrict(&m, (0.0, 2.0)).unwrap();
        assert!(r.moderateness().holds());
        assert!(gf_restrict(&r, (-1.0, 1.0)).is_err());
    }

    #[test]
    fn point_values() {
        let spec = ag();
        let sq = GenFunction::from_profile(SmoothProfile::poly(vec![0.0, 0.0, 1.0]), spec.clone(), LINE).unwrap();
        let x = CompactPoint::new(Net::parse("eps").unwrap(), (0.0, 1.0)).unwrap();
        let v = point_value(&sq, &x).unwrap();
        assert_eq!(v.rep().exact_expr().map(|r| normalize(&r).unwrap().to_expr()), Some(e("eps^2")));
        let ebs = AlgebraSpec::diagonal(exp_gauge(&Gauge::special()));
        let u = GenFunction::new(decaying_exp(), ebs, LINE).unwrap();
        let one = CompactPoint::new(Net::constant(1), (0.5, 1.5)).unwrap();
        let pv = point_value(&u, &one).unwrap();
        let neg = crate::gauges::is_negligible_num(pv.rep(), &spec.z).unwrap();
        assert!(neg.holds());
        let id = GenFunction::from_profile(SmoothProfile::poly(vec![0.0, 1.0]), spec.clone(), LINE).unwrap();
        let c = CompactPoint::new(Net::parse("3/4").unwrap(), (0.5, 1.0)).unwrap();
        let pv = point_value(&id, &c).unwrap();
        assert!((pv.rep().value(0.2).unwrap() - 0.75).abs() < 1e-15);
        let narrow = GenFunction::from_profile(SmoothProfile::Sin, spec, (0.0, 0.6)).unwrap();
        assert!(point_value(&narrow, &c).is_err());
    }

    #[test]
    fn support_examples() {
        let spec = ag();
        let dom = (0.0, 1.0);
        let delta = GenFunction::new(
            SmoothFamily::kernel(SmoothProfile::gauss().scaled(1.0 / math::sqrt(math::PI)), e("eps^-1"), e("eps^-1"), 0.5),
            spec.clone(),
            dom,
        )
        .unwrap();
        let s = support_estimate(&delta, 0.05, None).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].0 <= 0.5 && s[0].1 >= 0.5 && s[0].1 - s[0].0 <= 0.1 + 1e-12);
        let zero = GenFunction::new(SmoothFamily::zero(), spec.clone(), dom).unwrap();
        assert!(support_estimate(&zero, 0.05, None).unwrap().is_empty());
        let one = GenFunction::from_profile(SmoothProfile::constant(1.0), spec, dom).unwrap();
        let s = support_estimate(&one, 0.05, None).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].0.abs() < 1e-12 && (s[0].1 - 1.0).abs() < 1e-12);
    }
}
