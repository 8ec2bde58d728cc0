//! Closed-form smooth profiles of one real variable with analytic
//! derivatives of every order.

use crate::gauges::LiteralError;
use crate::math;
use crate::rate_dsl::{exact_q, RateExpr, Q};
use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A smooth function ℝ → ℝ.
///
/// `PolyGauss(p)` is p(x)·e^{-x²}. `PolyBump { num, pow }` is
/// num(x)·(1-x²)^{-pow}·e^{-1/(1-x²)} on (-1,1) and zero elsewhere.
/// `Affine { amp, inner, scale, shift }` is amp·inner(scale·(x - shift)).
#[derive(Clone, Debug, PartialEq)]
pub enum SmoothProfile {
    Poly(Vec<f64>),
    Sin,
    Cos,
    Exp,
    PolyGauss(Vec<f64>),
    PolyBump { num: Vec<f64>, pow: u32 },
    Affine {
        amp: f64,
        inner: Box<SmoothProfile>,
        scale: f64,
        shift: f64,
    },
    Sum(Vec<SmoothProfile>),
    Product(Box<SmoothProfile>, Box<SmoothProfile>),
}

pub(crate) mod poly {
    use alloc::vec::Vec;

    pub fn eval(c: &[f64], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
    }

    pub fn deriv(c: &[f64]) -> Vec<f64> {
        c.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).collect()
    }

    pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|k| a.get(k).copied().unwrap_or(0.0) + b.get(k).copied().unwrap_or(0.0))
            .collect()
    }

    pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = alloc::vec![0.0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    pub fn trim(mut a: Vec<f64>) -> Vec<f64> {
        while a.last() == Some(&0.0) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &[f64]) -> usize {
        a.iter().rposition(|&v| v != 0.0).unwrap_or(0)
    }
}

impl SmoothProfile {
    pub fn poly(coeffs: Vec<f64>) -> Self {
        SmoothProfile::Poly(poly::trim(coeffs))
    }
    pub fn constant(c: f64) -> Self {
        SmoothProfile::poly(vec![c])
    }
    pub fn gauss() -> Self {
        SmoothProfile::PolyGauss(vec![1.0])
    }
    pub fn bump() -> Self {
        SmoothProfile::PolyBump {
            num: vec![1.0],
            pow: 0,
        }
    }
    pub fn poly_gauss(p: Vec<f64>) -> Self {
        SmoothProfile::PolyGauss(poly::trim(p))
    }
    pub fn poly_bump(p: Vec<f64>) -> Self {
        SmoothProfile::PolyBump {
            num: poly::trim(p),
            pow: 0,
        }
    }

    /// amp·inner(scale·(x - shift)), flattening nested affine maps.
    pub fn affine(amp: f64, inner: SmoothProfile, scale: f64, shift: f64) -> Self {
        match inner {
            SmoothProfile::Affine {
                amp: a2,
                inner: i2,
                scale: s2,
                shift: c2,
            } => SmoothProfile::Affine {
                amp: amp * a2,
                inner: i2,
                scale: scale * s2,
                shift: shift + c2 / scale,
            },
            other if amp == 1.0 && scale == 1.0 && shift == 0.0 => other,
            other => SmoothProfile::Affine {
                amp,
                inner: Box::new(other),
                scale,
                shift,
            },
        }
    }

    pub fn scaled(self, amp: f64) -> Self {
        SmoothProfile::affine(amp, self, 1.0, 0.0)
    }

    /// The standard bump moved and stretched onto (a, b).
    pub fn bump_on(a: f64, b: f64) -> Self {
        SmoothProfile::affine(1.0, SmoothProfile::bump(), 2.0 / (b - a), 0.5 * (a + b))
    }

    pub fn product(a: SmoothProfile, b: SmoothProfile) -> Self {
        SmoothProfile::Product(Box::new(a), Box::new(b))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SmoothProfile::Poly(c) | SmoothProfile::PolyGauss(c) => c.iter().all(|&v| v == 0.0),
            SmoothProfile::PolyBump { num, .. } => num.iter().all(|&v| v == 0.0),
            SmoothProfile::Affine { amp, inner, .. } => *amp == 0.0 || inner.is_zero(),
            SmoothProfile::Sum(v) => v.iter().all(|p| p.is_zero()),
            SmoothProfile::Product(a, b) => a.is_zero() || b.is_zero(),
            _ => false,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SmoothProfile::Poly(c) => poly::eval(c, x),
            SmoothProfile::Sin => math::sin(x),
            SmoothProfile::Cos => math::cos(x),
            SmoothProfile::Exp => math::exp(x),
            SmoothProfile::PolyGauss(c) => {
                let g = math::exp(-x * x);
                if g == 0.0 {
                    0.0
                } else {
                    poly::eval(c, x) * g
                }
            }
            SmoothProfile::PolyBump { num, pow } => {
                if !(math::abs(x) < 1.0) {
                    return 0.0;
                }
                let d = 1.0 - x * x;
                let w = math::exp(-1.0 / d - *pow as f64 * math::ln(d));
                if w == 0.0 {
                    0.0
                } else {
                    poly::eval(num, x) * w
                }
            }
            SmoothProfile::Affine {
                amp,
                inner,
                scale,
                shift,
            } => amp * inner.eval(scale * (x - shift)),
            SmoothProfile::Sum(v) => v.iter().map(|p| p.eval(x)).sum(),
            SmoothProfile::Product(a, b) => {
                let u = a.eval(x);
                if u == 0.0 {
                    0.0
                } else {
                    u * b.eval(x)
                }
            }
        }
    }

    pub fn deriv(&self) -> SmoothProfile {
        match self {
            SmoothProfile::Poly(c) => SmoothProfile::poly(poly::deriv(c)),
            SmoothProfile::Sin => SmoothProfile::Cos,
            SmoothProfile::Cos => SmoothProfile::Sin.scaled(-1.0),
            SmoothProfile::Exp => SmoothProfile::Exp,
            SmoothProfile::PolyGauss(c) => {
                let p = poly::add(&poly::deriv(c), &poly::mul(&[0.0, -2.0], c));
                SmoothProfile::poly_gauss(p)
            }
            SmoothProfile::PolyBump { num, pow } => {
                let d = [1.0, 0.0, -1.0];
                let k = *pow as f64;
                let t1 = poly::mul(&poly::deriv(num), &poly::mul(&d, &d));
                let t2 = poly::mul(&poly::mul(&[0.0, 2.0 * k], num), &d);
                let t3 = poly::mul(&[0.0, -2.0], num);
                SmoothProfile::PolyBump {
                    num: poly::trim(poly::add(&poly::add(&t1, &t2), &t3)),
                    pow: pow + 2,
                }
            }
            SmoothProfile::Affine {
                amp,
                inner,
                scale,
                shift,
            } => SmoothProfile::affine(amp * scale, inner.deriv(), *scale, *shift),
            SmoothProfile::Sum(v) => SmoothProfile::Sum(v.iter().map(|p| p.deriv()).collect()),
            SmoothProfile::Product(a, b) => SmoothProfile::Sum(vec![
                SmoothProfile::product(a.deriv(), (**b).clone()),
                SmoothProfile::product((**a).clone(), b.deriv()),
            ]),
        }
    }

    /// The n-th derivative. Products use the Leibniz rule directly.
    pub fn deriv_n(&self, n: u32) -> SmoothProfile {
        match self {
            SmoothProfile::Product(a, b) if n > 1 => {
                let mut da = vec![(**a).clone()];
                let mut db = vec![(**b).clone()];
                for k in 0..n as usize {
                    da.push(da[k].deriv());
                    db.push(db[k].deriv());
                }
                let mut terms = Vec::new();
                let mut binom = 1.0;
                for j in 0..=n as usize {
                    let t = SmoothProfile::product(da[j].clone(), db[n as usize - j].clone());
                    terms.push(t.scaled(binom));
                    binom = binom * (n as usize - j) as f64 / (j + 1) as f64;
                }
                SmoothProfile::Sum(terms)
            }
            SmoothProfile::Sum(v) => SmoothProfile::Sum(v.iter().map(|p| p.deriv_n(n)).collect()),
            _ => {
                let mut p = self.clone();
                for _ in 0..n {
                    p = p.deriv();
                }
                p
            }
        }
    }

    /// Closed interval outside which the profile vanishes identically.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            SmoothProfile::PolyBump { .. } => Some((-1.0, 1.0)),
            SmoothProfile::Affine {
                inner,
                scale,
                shift,
                ..
            } => {
                if *scale == 0.0 {
                    return None;
                }
                let (a, b) = inner.support()?;
                let (u, v) = (shift + a / scale, shift + b / scale);
                Some((u.min(v), u.max(v)))
            }
            SmoothProfile::Sum(v) => {
                let mut out: Option<(f64, f64)> = None;
                for p in v {
                    if p.is_zero() {
                        continue;
                    }
                    let s = p.support()?;
                    out = Some(out.map_or(s, |o| (o.0.min(s.0), o.1.max(s.1))));
                }
                out.or(Some((0.0, 0.0)))
            }
            SmoothProfile::Product(a, b) => match (a.support(), b.support()) {
                (Some(x), Some(y)) => Some((x.0.max(y.0), x.1.min(y.1))),
                (Some(x), None) | (None, Some(x)) => Some(x),
                _ => None,
            },
            _ => None,
        }
    }

    /// A window that carries the global supremum of |f|, or `None` when f
    /// is unbounded on ℝ.
    pub fn bounded_window(&self) -> Option<(f64, f64)> {
        match self {
            SmoothProfile::Poly(c) => {
                if poly::degree(c) == 0 {
                    Some((-1.0, 1.0))
                } else {
                    None
                }
            }
            SmoothProfile::Sin | SmoothProfile::Cos => Some((0.0, 2.0 * math::PI)),
            SmoothProfile::Exp => None,
            SmoothProfile::PolyGauss(c) => {
                let w = 7.0 + poly::degree(c) as f64;
                Some((-w, w))
            }
            SmoothProfile::PolyBump { .. } => Some((-1.0, 1.0)),
            SmoothProfile::Affine {
                inner,
                scale,
                shift,
                ..
            } => {
                if *scale == 0.0 {
                    return Some((-1.0, 1.0));
                }
                let (a, b) = inner.bounded_window()?;
                let (u, v) = (shift + a / scale, shift + b / scale);
                Some((u.min(v), u.max(v)))
            }
            SmoothProfile::Sum(v) => {
                let mut out: Option<(f64, f64)> = None;
                for p in v {
                    let s = p.bounded_window()?;
                    out = Some(out.map_or(s, |o| (o.0.min(s.0), o.1.max(s.1))));
                }
                out.or(Some((-1.0, 1.0)))
            }
            SmoothProfile::Product(a, b) => {
                if let Some(s) = self.support() {
                    return Some(s);
                }
                let dominated = |g: &SmoothProfile, other: &SmoothProfile| {
                    g.is_gaussian_decay() && !other.has_exp()
                };
                if dominated(a, b) || dominated(b, a) {
                    let (x, y) = (a.bounded_window(), b.bounded_window());
                    match (x, y) {
                        (Some(x), Some(y)) => Some((x.0.min(y.0), x.1.max(y.1))),
                        (Some(x), None) | (None, Some(x)) => Some((x.0 - 2.0, x.1 + 2.0)),
                        _ => None,
                    }
                } else {
                    match (a.bounded_window(), b.bounded_window()) {
                        (Some(x), Some(y)) => Some((x.0.min(y.0), x.1.max(y.1))),
                        _ => None,
                    }
                }
            }
        }
    }

    fn is_gaussian_decay(&self) -> bool {
        match self {
            SmoothProfile::PolyGauss(_) => true,
            SmoothProfile::Affine { inner, scale, .. } => *scale != 0.0 && inner.is_gaussian_decay(),
            _ => false,
        }
    }

    fn has_exp(&self) -> bool {
        match self {
            SmoothProfile::Exp => true,
            SmoothProfile::Affine { inner, .. } => inner.has_exp(),
            SmoothProfile::Sum(v) => v.iter().any(|p| p.has_exp()),
            SmoothProfile::Product(a, b) => a.has_exp() || b.has_exp(),
            _ => false,
        }
    }

    /// max_{x∈[lo,hi]} |f(x)|, by dense sampling and golden-section refinement.
    pub fn sup_abs(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return math::abs(self.eval(lo));
        }
        let n = 800usize;
        let h = (hi - lo) / n as f64;
        let mut best = 0.0f64;
        let mut at = 0usize;
        for k in 0..=n {
            let v = math::abs(self.eval(lo + h * k as f64));
            if v > best {
                best = v;
                at = k;
            }
        }
        let mut a = lo + h * at.saturating_sub(1) as f64;
        let mut b = (lo + h * (at + 1) as f64).min(hi);
        let g = 0.618_033_988_749_894_9;
        let f = |x: f64| math::abs(self.eval(x));
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..60 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = f(d);
            }
        }
        best.max(fc).max(fd)
    }

    /// Global supremum of |f| on ℝ, `None` when f is unbounded.
    pub fn global_sup_abs(&self) -> Option<f64> {
        let (a, b) = self.bounded_window()?;
        Some(self.sup_abs(a, b))
    }

    /// The profile composed with a rate expression, when it stays inside
    /// the symbolic fragment.
    pub fn to_expr(&self, arg: &RateExpr) -> Option<RateExpr> {
        match self {
            SmoothProfile::Poly(c) => poly_expr(c, arg),
            SmoothProfile::Exp => Some(RateExpr::exp(arg.clone())),
            SmoothProfile::PolyGauss(c) => {
                let p = poly_expr(c, arg)?;
                let sq = RateExpr::pow(arg.clone(), Q::from_integer(2));
                Some(RateExpr::mul(p, RateExpr::exp(RateExpr::mul(RateExpr::num(-1), sq))))
            }
            SmoothProfile::Affine {
                amp,
                inner,
                scale,
                shift,
            } => {
                let (a, s, c) = (exact_q(*amp)?, exact_q(*scale)?, exact_q(*shift)?);
                let moved = if c == Q::from_integer(0) {
                    arg.clone()
                } else {
                    RateExpr::sub(arg.clone(), RateExpr::Num(c))
                };
                let scaled = if s == Q::from_integer(1) {
                    moved
                } else {
                    RateExpr::mul(RateExpr::Num(s), moved)
                };
                let e = inner.to_expr(&scaled)?;
                Some(if a == Q::from_integer(1) {
                    e
                } else {
                    RateExpr::mul(RateExpr::Num(a), e)
                })
            }
            SmoothProfile::Sum(v) => {
                let mut it = v.iter();
                let mut acc = it.next()?.to_expr(arg)?;
                for p in it {
                    acc = RateExpr::add(acc, p.to_expr(arg)?);
                }
                Some(acc)
            }
            SmoothProfile::Product(a, b) => Some(RateExpr::mul(a.to_expr(arg)?, b.to_expr(arg)?)),
            _ => None,
        }
    }

    /// Scenario literal.
    pub fn literal(&self) -> String {
        match self {
            SmoothProfile::Poly(c) => format!("poly{}", list(c)),
            SmoothProfile::Sin => "sin".into(),
            SmoothProfile::Cos => "cos".into(),
            SmoothProfile::Exp => "exp".into(),
            SmoothProfile::PolyGauss(c) if c.len() == 1 && c[0] == 1.0 => "gauss".into(),
            SmoothProfile::PolyGauss(c) => format!("polygauss{}", list(c)),
            SmoothProfile::PolyBump { num, pow: 0 } if num.len() == 1 && num[0] == 1.0 => "bump".into(),
            SmoothProfile::PolyBump { num, pow } => format!("polybump{}/{pow}", list(num)),
            SmoothProfile::Affine {
                amp,
                inner,
                scale,
                shift,
            } => format!("affine({amp}, {}, {scale}, {shift})", inner.literal()),
            SmoothProfile::Sum(v) => {
                let parts: Vec<String> = v.iter().map(|p| p.literal()).collect();
                format!("sum({})", parts.join(", "))
            }
            SmoothProfile::Product(a, b) => format!("prod({}, {})", a.literal(), b.literal()),
        }
    }
}

fn list(c: &[f64]) -> String {
    let parts: Vec<String> = c.iter().map(|v| format!("{v}")).collect();
    format!("[{}]", parts.join(","))
}

fn poly_expr(c: &[f64], arg: &RateExpr) -> Option<RateExpr> {
    let mut acc: Option<RateExpr> = None;
    for (k, &v) in c.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let q = RateExpr::Num(exact_q(v)?);
        let t = match k {
            0 => q,
            1 => RateExpr::mul(q, arg.clone()),
            _ => RateExpr::mul(q, RateExpr::pow(arg.clone(), Q::from_integer(k as i64))),
        };
        acc = Some(match acc {
            None => t,
            Some(a) => RateExpr::add(a, t),
        });
    }
    Some(acc.unwrap_or_else(|| RateExpr::num(0)))
}

impl fmt::Display for SmoothProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literal())
    }
}

/// Parses the literals printed by [`SmoothProfile::literal`], plus
/// `bump_on(a, b)` and `const(c)`.
pub fn parse_profile(text: &str) -> core::result::Result<SmoothProfile, LiteralError> {
    let mut p = LitParser { s: text.as_bytes(), pos: 0 };
    let out = p.profile()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input after profile"));
    }
    Ok(out)
}

struct LitParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl LitParser<'_> {
    fn err(&self, m: impl Into<String>) -> LiteralError {
        LiteralError {
            offset: self.pos,
            message: m.into(),
        }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> core::result::Result<(), LiteralError> {
        self.ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn ident(&mut self) -> &str {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        core::str::from_utf8(&self.s[start..self.pos]).unwrap_or("")
    }

    fn number(&mut self) -> core::result::Result<f64, LiteralError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && matches!(self.s[self.pos], b'0'..=b'9' | b'.' | b'-' | b'+' | b'e' | b'E') {
            self.pos += 1;
        }
        let t = core::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or(LiteralError {
            offset: start,
            message: format!("expected a number, found '{t}'"),
        })
    }

    fn list(&mut self) -> core::result::Result<Vec<f64>, LiteralError> {
        self.eat(b'[')?;
        let mut out = Vec::new();
        if self.peek() == Some(b']') {
            return Err(self.err("empty coefficient list"));
        }
        loop {
            out.push(self.number()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b']') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.err("expected ',' or ']'")),
            }
        }
    }

    fn profile(&mut self) -> core::result::Result<SmoothProfile, LiteralError> {
        let start = {
            self.ws();
            self.pos
        };
        let name = String::from(self.ident());
        let out = match name.as_str() {
            "sin" => SmoothProfile::Sin,
            "cos" => SmoothProfile::Cos,
            "exp" => SmoothProfile::Exp,
            "gauss" => SmoothProfile::gauss(),
            "bump" => SmoothProfile::bump(),
            "poly" => SmoothProfile::poly(self.list()?),
            "polygauss" => SmoothProfile::poly_gauss(self.list()?),
            "polybump" => {
                let num = poly::trim(self.list()?);
                self.eat(b'/')?;
                let p = self.number()?;
                if p < 0.0 || libm::trunc(p) != p || p > 64.0 {
                    return Err(self.err("bump power must be a small natural number"));
                }
                SmoothProfile::PolyBump { num, pow: p as u32 }
            }
            "const" => {
                self.eat(b'(')?;
                let c = self.number()?;
                self.eat(b')')?;
                SmoothProfile::constant(c)
            }
            "bump_on" => {
                self.eat(b'(')?;
                let a = self.number()?;
                self.eat(b',')?;
                let b = self.number()?;
                self.eat(b')')?;
                if !(a < b) {
                    return Err(LiteralError {
                        offset: start,
                        message: "bump_on needs a < b".into(),
                    });
                }
                SmoothProfile::bump_on(a, b)
            }
            "affine" => {
                self.eat(b'(')?;
                let amp = self.number()?;
                self.eat(b',')?;
                let inner = self.profile()?;
                self.eat(b',')?;
                let scale = self.number()?;
                self.eat(b',')?;
                let shift = self.number()?;
                self.eat(b')')?;
                SmoothProfile::affine(amp, inner, scale, shift)
            }
            "sum" => {
                self.eat(b'(')?;
                let mut parts = vec![self.profile()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    parts.push(self.profile()?);
                }
                self.eat(b')')?;
                SmoothProfile::Sum(parts)
            }
            "prod" => {
                self.eat(b'(')?;
                let a = self.profile()?;
                self.eat(b',')?;
                let b = self.profile()?;
                self.eat(b')')?;
                SmoothProfile::product(a, b)
            }
            "" => return Err(self.err("expected a profile name")),
            other => {
                return Err(LiteralError {
                    offset: start,
                    message: format!("unknown profile '{other}'"),
                })
            }
        };
        Ok(out)
    }
}
