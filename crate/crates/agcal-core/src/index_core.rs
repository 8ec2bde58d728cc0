//! Index sets, nets, verdicts, and the "for ε small enough" logic.
//!
//! Symbolic nets are decided exactly by the rate-expression oracle. Sampled
//! and callable nets fall back to a deterministic geometric grid.

use crate::math;
use crate::rate_dsl::{
    compare_o, eval_at, normalize, EvalError, RateError, RateExpr, RateNormalForm,
};
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Directed index sets with their filter of "small" indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexSet {
    /// I = (0,1] with base sets (0, ε₀].
    HalfOpenUnit,
    /// ℕ with the cofinite filter; index value ε stands for n = 1/ε.
    NaturalsFrechet,
    /// (0,1] read through a positive infinitesimal scale ρ.
    Composed(RateExpr),
}

impl IndexSet {
    /// Builds a composed index set after checking that the scale is a
    /// positive infinitesimal.
    pub fn composed(scale: RateExpr) -> Result<IndexSet> {
        crate::rate_dsl::compose(&RateExpr::Eps, &scale)?;
        Ok(IndexSet::Composed(scale))
    }

    pub fn name(&self) -> String {
        match self {
            IndexSet::HalfOpenUnit => "(0,1]".into(),
            IndexSet::NaturalsFrechet => "N".into(),
            IndexSet::Composed(s) => format!("(0,1] via {s}"),
        }
    }

    /// Snaps a raw index value to an admissible one.
    pub fn snap(&self, eps: f64) -> f64 {
        match self {
            IndexSet::NaturalsFrechet => 1.0 / math::round(1.0 / eps).max(1.0),
            _ => eps,
        }
    }

    /// The numeric grid for this index set, strictly decreasing.
    pub fn grid(&self, cfg: &GridConfig) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::with_capacity(cfg.count);
        for e in cfg.points() {
            let s = self.snap(e);
            if out.last().map_or(true, |&l| s < l) {
                out.push(s);
            }
        }
        out
    }
}

/// Geometric grid ε_j = eps0 · ratio^j, j < count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridConfig {
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            eps0: 0.1,
            ratio: 0.7,
            count: 40,
        }
    }
}

impl GridConfig {
    pub fn new(eps0: f64, ratio: f64, count: usize) -> Result<GridConfig> {
        if !(eps0 > 0.0 && eps0 <= 1.0) || !(ratio > 0.0 && ratio < 1.0) || count < 2 {
            return Err(Error::Argument(format!(
                "grid needs 0 < eps0 <= 1, 0 < ratio < 1, count >= 2 (got {eps0}, {ratio}, {count})"
            )));
        }
        Ok(GridConfig { eps0, ratio, count })
    }

    pub fn points(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.count);
        let mut e = self.eps0;
        for _ in 0..self.count {
            v.push(e);
            e *= self.ratio;
        }
        v
    }

    /// Number of trailing points used when fitting constants.
    pub fn tail_len(&self) -> usize {
        25.min(self.count)
    }
}

pub type NetFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// How the values of a net are given.
#[derive(Clone)]
pub enum NetRepr {
    Symbolic(RateExpr),
    /// (ε, value) pairs with ε strictly decreasing.
    Sampled(Vec<(f64, f64)>),
    Callable(NetFn),
}

impl fmt::Debug for NetRepr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetRepr::Symbolic(e) => write!(f, "Symbolic({e})"),
            NetRepr::Sampled(p) => write!(f, "Sampled({} points)", p.len()),
            NetRepr::Callable(_) => f.write_str("Callable"),
        }
    }
}

/// A real-valued net on an index set.
///
/// A composed index set reinterprets symbolic representations through its
/// scale; sampled and callable values are taken as already given on the
/// composed index.
#[derive(Clone, Debug)]
pub struct Net {
    repr: NetRepr,
    index: IndexSet,
}

#[derive(Clone, Copy)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
        }
    }
    fn expr(self, a: RateExpr, b: RateExpr) -> RateExpr {
        match self {
            BinOp::Add => RateExpr::add(a, b),
            BinOp::Sub => RateExpr::sub(a, b),
            BinOp::Mul => RateExpr::mul(a, b),
            BinOp::Div => RateExpr::div(a, b),
        }
    }
}

impl Net {
    pub fn symbolic(e: RateExpr) -> Net {
        Net {
            repr: NetRepr::Symbolic(e),
            index: IndexSet::HalfOpenUnit,
        }
    }

    pub fn parse(text: &str) -> Result<Net> {
        Ok(Net::symbolic(crate::rate_dsl::parse(text)?))
    }

    pub fn constant(c: i64) -> Net {
        Net::symbolic(RateExpr::num(c))
    }

    pub fn sampled(points: Vec<(f64, f64)>) -> Result<Net> {
        if points.len() < 8 {
            return Err(Error::Argument(format!(
                "sampled nets need at least 8 points, got {}",
                points.len()
            )));
        }
        for w in points.windows(2) {
            if !(w[1].0 < w[0].0) {
                return Err(Error::Argument(
                    "sampled grid must be strictly decreasing in eps".into(),
                ));
            }
        }
        if points.iter().any(|p| !(p.0 > 0.0) || !p.1.is_finite()) {
            return Err(Error::Argument(
                "sampled points need positive eps and finite values".into(),
            ));
        }
        Ok(Net {
            repr: NetRepr::Sampled(points),
            index: IndexSet::HalfOpenUnit,
        })
    }

    /// Samples `f` on the default grid.
    pub fn sample_fn(f: impl Fn(f64) -> f64, cfg: &GridConfig) -> Result<Net> {
        Net::sampled(cfg.points().into_iter().map(|e| (e, f(e))).collect())
    }

    pub fn callable(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Net {
        Net {
            repr: NetRepr::Callable(Arc::new(f)),
            index: IndexSet::HalfOpenUnit,
        }
    }

    pub fn with_index(mut self, index: IndexSet) -> Net {
        self.index = index;
        self
    }

    pub fn repr(&self) -> &NetRepr {
        &self.repr
    }
    pub fn index(&self) -> &IndexSet {
        &self.index
    }

    /// The expression that the exact oracle should see, if any.
    pub fn exact_expr(&self) -> Option<RateExpr> {
        match (&self.repr, &self.index) {
            (NetRepr::Symbolic(e), IndexSet::Composed(s)) => {
                Some(RateExpr::comp(e.clone(), s.clone()))
            }
            (NetRepr::Symbolic(e), _) => Some(e.clone()),
            _ => None,
        }
    }

    /// Normal form when the net is symbolic and inside the fragment.
    pub fn normal_form(&self) -> Option<core::result::Result<RateNormalForm, RateError>> {
        self.exact_expr().map(|e| normalize(&e))
    }

    fn exact_nf(&self) -> Option<RateNormalForm> {
        self.normal_form().and_then(|r| r.ok())
    }

    /// Value at index ε.
    pub fn value(&self, eps: f64) -> core::result::Result<f64, EvalError> {
        match &self.repr {
            NetRepr::Symbolic(_) => eval_at(&self.exact_expr().unwrap(), eps),
            NetRepr::Sampled(pts) => pts
                .iter()
                .find(|(e, _)| math::abs(e - eps) <= 1e-12 * eps)
                .map(|p| p.1)
                .ok_or_else(|| EvalError::Domain(format!("no sample at eps = {eps}"))),
            NetRepr::Callable(f) => {
                if !(eps > 0.0 && eps <= 1.0) {
                    return Err(EvalError::Argument(format!("eps = {eps} is outside (0, 1]")));
                }
                let v = f(eps);
                if v.is_finite() {
                    Ok(v)
                } else if v.is_nan() {
                    Err(EvalError::Domain("callable returned NaN".into()))
                } else {
                    Err(EvalError::Overflow)
                }
            }
        }
    }

    /// Index values at which numeric procedures evaluate this net.
    pub fn eval_points(&self, cfg: &GridConfig) -> Vec<f64> {
        match &self.repr {
            NetRepr::Sampled(p) => p.iter().map(|x| x.0).collect(),
            _ => self.index.grid(cfg),
        }
    }

    fn combine(&self, other: &Net, op: BinOp) -> Result<Net> {
        if self.index != other.index {
            return Err(Error::Argument("nets live on different index sets".into()));
        }
        let index = self.index.clone();
        match (&self.repr, &other.repr) {
            (NetRepr::Symbolic(a), NetRepr::Symbolic(b)) => Ok(Net {
                repr: NetRepr::Symbolic(op.expr(a.clone(), b.clone())),
                index,
            }),
            (NetRepr::Sampled(pts), _) | (_, NetRepr::Sampled(pts)) => {
                let mut out = Vec::new();
                for (e, _) in pts {
                    if let (Ok(a), Ok(b)) = (self.value(*e), other.value(*e)) {
                        let v = op.apply(a, b);
                        if v.is_finite() {
                            out.push((*e, v));
                        }
                    }
                }
                Net::sampled(out).map(|n| n.with_index(index))
            }
            _ => {
                let a = self.clone();
                let b = other.clone();
                Ok(Net::callable(move |e| match (a.value(e), b.value(e)) {
                    (Ok(x), Ok(y)) => op.apply(x, y),
                    (Err(EvalError::Overflow), _) | (_, Err(EvalError::Overflow)) => f64::INFINITY,
                    _ => f64::NAN,
                })
                .with_index(index))
            }
        }
    }

    pub fn add(&self, o: &Net) -> Result<Net> {
        self.combine(o, BinOp::Add)
    }
    pub fn sub(&self, o: &Net) -> Result<Net> {
        self.combine(o, BinOp::Sub)
    }
    pub fn mul(&self, o: &Net) -> Result<Net> {
        self.combine(o, BinOp::Mul)
    }
    pub fn div(&self, o: &Net) -> Result<Net> {
        self.combine(o, BinOp::Div)
    }
    pub fn neg(&self) -> Net {
        self.scale(-1)
    }
    pub fn scale(&self, c: i64) -> Net {
        self.mul(&Net::constant(c).with_index(self.index.clone()))
            .expect("same index set")
    }
}

/// Outcome of a decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

/// Whether a verdict is a proof in the fragment or a numeric fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Numeric,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Holds => "Holds",
            Status::Fails => "Fails",
            Status::Inconclusive => "Inconclusive",
        }
    }
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "Exact",
            Mode::Numeric => "Numeric",
        }
    }
}

/// Data behind "|x_ε| ≤ H·|y_ε| for ε ≤ ε₀".
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness {
    pub h: Option<f64>,
    pub eps0: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub mode: Mode,
    pub witness: Option<Witness>,
    /// Decreasing index values along which the claim breaks.
    pub counterexample: Option<Vec<f64>>,
    /// Present for numeric verdicts, in [0, 1].
    pub confidence: Option<f64>,
    pub detail: String,
    /// Named supporting objects such as witness members or escaping nets.
    pub evidence: Vec<(String, String)>,
}

impl Verdict {
    pub fn exact(status: Status) -> Verdict {
        Verdict {
            status,
            mode: Mode::Exact,
            witness: None,
            counterexample: None,
            confidence: None,
            detail: String::new(),
            evidence: Vec::new(),
        }
    }
    pub fn numeric(status: Status, confidence: f64) -> Verdict {
        Verdict {
            status,
            mode: Mode::Numeric,
            witness: None,
            counterexample: None,
            confidence: Some(confidence.clamp(0.0, 1.0)),
            detail: String::new(),
            evidence: Vec::new(),
        }
    }
    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }
    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }
    pub fn with_detail(mut self, d: impl Into<String>) -> Verdict {
        self.detail = d.into();
        self
    }
    pub fn with_evidence(mut self, key: impl Into<String>, value: impl fmt::Display) -> Verdict {
        self.evidence.push((key.into(), format!("{value}")));
        self
    }
    pub fn evidence(&self, key: &str) -> Option<&str> {
        self.evidence
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
    pub fn with_witness(mut self, w: Witness) -> Verdict {
        self.witness = Some(w);
        self
    }
    pub fn with_counterexample(mut self, c: Vec<f64>) -> Verdict {
        self.counterexample = Some(c);
        self
    }
    /// Degrades the verdict to numeric mode, keeping its status.
    pub fn as_numeric(mut self, confidence: f64) -> Verdict {
        if self.mode == Mode::Exact {
            self.mode = Mode::Numeric;
            self.confidence = Some(confidence.clamp(0.0, 1.0));
        }
        self
    }

    /// Conjunction. A failure wins, then inconclusiveness; the weaker mode
    /// and the smaller confidence are kept.
    pub fn and(self, other: Verdict) -> Verdict {
        let status = match (self.status, other.status) {
            (Status::Fails, _) | (_, Status::Fails) => Status::Fails,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Holds,
        };
        let mode = if self.mode == Mode::Numeric || other.mode == Mode::Numeric {
            Mode::Numeric
        } else {
            Mode::Exact
        };
        let confidence = match (self.confidence, other.confidence) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let lead = if self.status == status { self } else { other };
        Verdict {
            status,
            mode,
            confidence,
            ..lead
        }
    }

    pub fn all(items: impl IntoIterator<Item = Verdict>) -> Verdict {
        items
            .into_iter()
            .fold(Verdict::exact(Status::Holds), |acc, v| acc.and(v))
    }

    /// Logical negation of the claim; witnesses are dropped.
    pub fn negate(self) -> Verdict {
        let status = match self.status {
            Status::Holds => Status::Fails,
            Status::Fails => Status::Holds,
            Status::Inconclusive => Status::Inconclusive,
        };
        Verdict {
            status,
            witness: None,
            counterexample: None,
            ..self
        }
    }
}

/// Limit classification as ε → 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Limit {
    Finite(f64),
    PlusInf,
    MinusInf,
    /// |f| → ∞ while the sign keeps changing.
    UnsignedInf,
    None,
}

fn same_index(x: &Net, y: &Net) -> Result<()> {
    if x.index != y.index {
        Err(Error::Argument("nets live on different index sets".into()))
    } else {
        Ok(())
    }
}

/// Candidate ε₀ values for witnesses, largest first.
fn eps0_candidates(index: &IndexSet) -> Vec<f64> {
    let mut v = Vec::new();
    let mut e = 1.0;
    for _ in 0..24 {
        let s = index.snap(e);
        if v.last().map_or(true, |&l| s < l) {
            v.push(s);
        }
        e *= 0.5;
    }
    v
}

fn witness_samples(index: &IndexSet, eps0: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut e = eps0;
    for _ in 0..400 {
        let s = index.snap(e);
        if v.last().map_or(true, |&l| s < l) {
            v.push(s);
        }
        e *= 0.93;
    }
    v
}

/// Largest sampled ε₀ and constant H with |x| ≤ H·|y| below ε₀. Points
/// where either value leaves the double range are left to the oracle.
fn ratio_witness(x: &Net, y: &Net, limit_ratio: f64) -> Option<Witness> {
    'cand: for eps0 in eps0_candidates(&x.index) {
        let mut h = limit_ratio;
        for e in witness_samples(&x.index, eps0) {
            let (a, b) = match (x.value(e), y.value(e)) {
                (Ok(a), Ok(b)) => (math::abs(a), math::abs(b)),
                (Err(EvalError::Overflow), _) | (_, Err(EvalError::Overflow)) => continue,
                _ => continue 'cand,
            };
            if a == 0.0 {
                continue;
            }
            if b == 0.0 {
                continue 'cand;
            }
            h = h.max(a / b);
        }
        return Some(Witness { h: Some(h), eps0 });
    }
    None
}

/// Tail of evaluable grid points, used as a counterexample sequence.
fn tail_points(x: &Net, y: &Net, cfg: &GridConfig) -> Vec<f64> {
    let pts: Vec<f64> = x
        .eval_points(cfg)
        .into_iter()
        .filter(|&e| x.value(e).is_ok() && y.value(e).is_ok())
        .collect();
    let start = pts.len().saturating_sub(10);
    pts[start..].to_vec()
}

/// First big-O: x = O(y) as ε → 0.
pub fn big_o(x: &Net, y: &Net) -> Result<Verdict> {
    big_o_with(x, y, &GridConfig::default())
}

pub fn big_o_with(x: &Net, y: &Net, cfg: &GridConfig) -> Result<Verdict> {
    same_index(x, y)?;
    if let (Some(nx), Some(ny)) = (x.exact_nf(), y.exact_nf()) {
        let rel = compare_o(&nx, &ny);
        if rel.x_is_o_of_y() {
            let lim = if rel == crate::rate_dsl::OrderRelation::Both && !nx.is_zero() {
                crate::rate_dsl::q_to_f64(nx.constant()) / crate::rate_dsl::q_to_f64(ny.constant())
            } else {
                0.0
            };
            let mut v = Verdict::exact(Status::Holds).with_detail(format!("oracle: {}", rel.name()));
            if nx.is_zero() {
                v = v.with_witness(Witness {
                    h: Some(1.0),
                    eps0: 1.0,
                });
            } else if let Some(w) = ratio_witness(x, y, lim) {
                v = v.with_witness(w);
            }
            return Ok(v);
        }
        return Ok(Verdict::exact(Status::Fails)
            .with_detail(format!("oracle: {}", rel.name()))
            .with_counterexample(tail_points(x, y, cfg)));
    }
    Ok(numeric_big_o(x, y, cfg))
}

/// Ratios |x|/|y| on the grid, truncated at the first overflow.
fn grid_ratios(x: &Net, y: &Net, cfg: &GridConfig) -> Vec<(f64, f64)> {
    let mut pts = x.eval_points(cfg);
    if let NetRepr::Sampled(p) = &y.repr {
        if !matches!(x.repr, NetRepr::Sampled(_)) {
            pts = p.iter().map(|q| q.0).collect();
        }
    }
    let mut out = Vec::new();
    for e in pts {
        match (x.value(e), y.value(e)) {
            (Ok(a), Ok(b)) => {
                let (a, b) = (math::abs(a), math::abs(b));
                let r = if b == 0.0 {
                    if a == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    a / b
                };
                out.push((e, r));
            }
            (Err(EvalError::Overflow), _) | (_, Err(EvalError::Overflow)) => break,
            _ => continue,
        }
    }
    out
}

/// Longest suffix along which `vals` strictly increases with increments
/// that do not decay geometrically. Returns its length.
fn divergent_run(vals: &[f64]) -> usize {
    let n = vals.len();
    if n < 2 {
        return n;
    }
    let mut len = 1;
    let mut prev_inc: Option<f64> = None;
    for k in (1..n).rev() {
        let inc = vals[k] - vals[k - 1];
        if !(inc > 0.0) {
            break;
        }
        if let Some(p) = prev_inc {
            if p < 0.9 * inc {
                break;
            }
        }
        prev_inc = Some(inc);
        len += 1;
    }
    len
}

fn numeric_big_o(x: &Net, y: &Net, cfg: &GridConfig) -> Verdict {
    let data = grid_ratios(x, y, cfg);
    if data.len() < 10 {
        return Verdict::numeric(Status::Inconclusive, 0.0)
            .with_detail(format!("only {} usable grid points", data.len()));
    }
    let tail_n = cfg.tail_len().min(data.len());
    let tail = &data[data.len() - tail_n..];
    let last10 = &data[data.len() - 10..];
    if last10.iter().all(|p| p.1.is_infinite()) {
        return Verdict::numeric(Status::Fails, 0.9)
            .with_detail("|y| vanishes while |x| does not")
            .with_counterexample(last10.iter().map(|p| p.0).collect());
    }
    if tail.iter().any(|p| p.1.is_infinite()) {
        return Verdict::numeric(Status::Inconclusive, 0.2)
            .with_detail("|y| vanishes at some tail points");
    }
    let ratios: Vec<f64> = tail.iter().map(|p| p.1).collect();
    let run = divergent_run(&ratios);
    if run >= 10 {
        let seq = tail[tail.len() - run..].iter().map(|p| p.0).collect();
        let conf = (run as f64 / tail_n as f64).min(1.0);
        return Verdict::numeric(Status::Fails, conf)
            .with_detail(format!("ratio increases without decay over {run} tail points"))
            .with_counterexample(seq);
    }
    let logs: Vec<(f64, f64)> = last10
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|p| (math::ln(1.0 / p.0), math::ln(p.1)))
        .collect();
    let slope = if logs.len() >= 3 {
        let xs: Vec<f64> = logs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = logs.iter().map(|p| p.1).collect();
        math::ls_slope(&xs, &ys).unwrap_or(0.0)
    } else {
        0.0
    };
    let mut hmax = ratios.iter().cloned().fold(0.0, f64::max);
    let n = ratios.len();
    if n >= 3 {
        let d1 = ratios[n - 1] - ratios[n - 2];
        let d0 = ratios[n - 2] - ratios[n - 3];
        if d1 > 0.0 && d0 > 0.0 && d1 < d0 {
            let rho = d1 / d0;
            hmax = hmax.max(ratios[n - 1] + d1 * rho / (1.0 - rho));
        }
    }
    let size = tail_n as f64 / 25.0;
    if slope <= 0.05 {
        let conf = size.min(1.0) * (1.0 - 0.5 * (slope.max(0.0) / 0.05));
        Verdict::numeric(Status::Holds, conf)
            .with_detail(format!("fitted log-slope {slope:.3e}"))
            .with_witness(Witness {
                h: Some(1.05 * hmax),
                eps0: tail[0].0,
            })
    } else {
        Verdict::numeric(Status::Inconclusive, 0.5)
            .with_detail(format!("ratio trend unclear, log-slope {slope:.3e}"))
    }
}

/// i >_I j: i_ε > j_ε for all small ε.
pub fn order_gt(i: &Net, j: &Net) -> Result<Verdict> {
    order_gt_with(i, j, &GridConfig::default())
}

pub fn order_gt_with(i: &Net, j: &Net, cfg: &GridConfig) -> Result<Verdict> {
    same_index(i, j)?;
    if let (Some(ei), Some(ej)) = (i.exact_expr(), j.exact_expr()) {
        if let Ok(d) = normalize(&RateExpr::sub(ei, ej)) {
            if d.eventual_sign() == Ordering::Greater {
                let diff = i.sub(j)?;
                let pred: PredFn = Arc::new(move |e| diff.value(e).map_or(false, |v| v > 0.0));
                let mut v = Verdict::exact(Status::Holds).with_detail(format!("leading term of difference: {d}"));
                if let Ok(ev) = eventually(i.index(), &Predicate::Closure(pred), 160) {
                    if let Some(w) = ev.witness {
                        v = v.with_witness(w);
                    }
                }
                return Ok(v);
            }
            return Ok(Verdict::exact(Status::Fails).with_detail(if d.is_zero() {
                String::from("difference is identically zero")
            } else {
                format!("leading term of difference: {d}")
            }));
        }
    }
    let pts = i.eval_points(cfg);
    let mut diffs: Vec<(f64, f64)> = Vec::new();
    for e in pts {
        match (i.value(e), j.value(e)) {
            (Ok(a), Ok(b)) => diffs.push((e, a - b)),
            (Err(EvalError::Overflow), _) | (_, Err(EvalError::Overflow)) => break,
            _ => {}
        }
    }
    if diffs.len() < 10 {
        return Ok(Verdict::numeric(Status::Inconclusive, 0.0).with_detail("too few grid points"));
    }
    let tail_n = cfg.tail_len().min(diffs.len());
    let tail = &diffs[diffs.len() - tail_n..];
    let last10 = &diffs[diffs.len() - 10..];
    let pos = tail.iter().filter(|p| p.1 > 0.0).count();
    if last10.iter().all(|p| p.1 > 0.0) {
        Ok(Verdict::numeric(Status::Holds, pos as f64 / tail_n as f64)
            .with_witness(Witness {
                h: None,
                eps0: last10[0].0,
            }))
    } else if last10.iter().all(|p| p.1 <= 0.0) {
        Ok(Verdict::numeric(Status::Fails, 1.0 - pos as f64 / tail_n as f64)
            .with_counterexample(last10.iter().map(|p| p.0).collect()))
    } else {
        Ok(Verdict::numeric(Status::Inconclusive, 0.5).with_detail("sign of the difference oscillates"))
    }
}

/// lim_{ε→0} f.
pub fn limit_of(f: &Net) -> Limit {
    limit_of_detailed(f, &GridConfig::default()).0
}

pub fn limit_of_detailed(f: &Net, cfg: &GridConfig) -> (Limit, Mode) {
    if let Some(nf) = f.exact_nf() {
        let lim = match nf.lead() {
            None => Limit::Finite(0.0),
            Some(t) => match t.growth.cmp_growth(&crate::rate_dsl::Growth::one()) {
                Ordering::Greater => {
                    if nf.eventual_sign() == Ordering::Greater {
                        Limit::PlusInf
                    } else {
                        Limit::MinusInf
                    }
                }
                Ordering::Equal => Limit::Finite(crate::rate_dsl::q_to_f64(t.coef)),
                Ordering::Less => Limit::Finite(0.0),
            },
        };
        return (lim, Mode::Exact);
    }
    let mut vals: Vec<f64> = Vec::new();
    let mut overflowed = false;
    for e in f.eval_points(cfg) {
        match f.value(e) {
            Ok(v) => vals.push(v),
            Err(EvalError::Overflow) => {
                overflowed = true;
                break;
            }
            Err(_) => {}
        }
    }
    if vals.len() < 10 {
        return (Limit::None, Mode::Numeric);
    }
    let n = vals.len();
    let last10 = &vals[n - 10..];
    let mags: Vec<f64> = last10.iter().map(|v| math::ln(math::abs(*v).max(1e-300))).collect();
    let grows = divergent_run(&mags) >= 10 || (overflowed && mags.windows(2).all(|w| w[1] >= w[0]));
    if grows {
        let lim = if last10.iter().all(|v| *v > 0.0) {
            Limit::PlusInf
        } else if last10.iter().all(|v| *v < 0.0) {
            Limit::MinusInf
        } else {
            Limit::UnsignedInf
        };
        return (lim, Mode::Numeric);
    }
    let incs: Vec<f64> = last10.windows(2).map(|w| math::abs(w[1] - w[0])).collect();
    let scale = 1.0 + math::abs(last10[9]);
    let shrinking = incs.windows(2).all(|w| w[1] <= w[0] * 0.999 || w[1] <= 1e-14 * scale);
    if shrinking && incs[incs.len() - 1] <= 1e-2 * scale {
        let d1 = last10[9] - last10[8];
        let d0 = last10[8] - last10[7];
        let mut est = last10[9];
        if d0 != 0.0 && (d1 / d0) > 0.0 && (d1 / d0) < 1.0 {
            let rho = d1 / d0;
            est += d1 * rho / (1.0 - rho);
        }
        return (Limit::Finite(est), Mode::Numeric);
    }
    (Limit::None, Mode::Numeric)
}

pub type PredFn = Arc<dyn Fn(f64) -> bool + Send + Sync>;

/// A predicate on index values.
#[derive(Clone)]
pub enum Predicate {
    Closure(PredFn),
    /// left(ε) > right(ε), decided by the exact oracle when possible.
    Gt(RateExpr, RateExpr),
}

impl Predicate {
    pub fn closure(f: impl Fn(f64) -> bool + Send + Sync + 'static) -> Predicate {
        Predicate::Closure(Arc::new(f))
    }
}

fn sample_points(index: &IndexSet, budget: usize) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    match index {
        IndexSet::NaturalsFrechet => {
            for n in 1..=budget {
                out.push(1.0 / n as f64);
            }
        }
        _ => {
            for j in 0..budget {
                out.push(math::powf(2.0, -(j as f64) / 4.0));
            }
        }
    }
    out
}

/// "For ε sufficiently small": sampled evaluation of `predicate`.
pub fn eventually(index: &IndexSet, predicate: &Predicate, budget: usize) -> Result<Verdict> {
    if budget == 0 {
        return Err(Error::Argument("budget must be positive".into()));
    }
    let f: PredFn = match predicate {
        Predicate::Closure(f) => f.clone(),
        Predicate::Gt(a, b) => {
            let na = Net::symbolic(a.clone()).with_index(index.clone());
            let nb = Net::symbolic(b.clone()).with_index(index.clone());
            return order_gt(&na, &nb);
        }
    };
    let pts = sample_points(index, budget);
    let vals: Vec<bool> = pts.iter().map(|&e| f(e)).collect();
    let n = pts.len();
    let quarter = n - n / 4;
    let false_idx: Vec<usize> = (0..n).filter(|&k| !vals[k]).collect();
    let late: Vec<usize> = false_idx.iter().copied().filter(|&k| k >= quarter).collect();
    let conf = |k: usize| 1.0 - (k as f64 / n as f64) * 0.5;
    match false_idx.last() {
        None => Ok(Verdict::numeric(Status::Holds, 1.0).with_witness(Witness {
            h: None,
            eps0: pts[0],
        })),
        Some(_) if late.len() >= 2 => {
            let half = n / 2;
            let seq = false_idx.iter().filter(|&&k| k >= half).map(|&k| pts[k]).collect();
            Ok(Verdict::numeric(Status::Fails, late.len() as f64 / (n - quarter) as f64)
                .with_counterexample(seq))
        }
        Some(_) if late.len() == 1 => Ok(Verdict::numeric(Status::Inconclusive, 0.5)
            .with_detail("isolated failure near the end of the sample")),
        Some(&last) => {
            let mut bad = pts[last];
            let mut good = if last + 1 < n { pts[last + 1] } else { 0.0 };
            if !matches!(index, IndexSet::NaturalsFrechet) {
                for _ in 0..60 {
                    let mid = 0.5 * (bad + good);
                    if mid <= good || mid >= bad {
                        break;
                    }
                    if f(mid) {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
            }
            Ok(Verdict::numeric(Status::Holds, conf(last)).with_witness(Witness {
                h: None,
                eps0: bad,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn net(s: &str) -> Net {
        Net::parse(s).unwrap()
    }

    #[test]
    fn eventually_examples() {
        let u = IndexSet::HalfOpenUnit;
        let v = eventually(&u, &Predicate::closure(|e| e < 0.5), 200).unwrap();
        assert!(v.holds());
        assert_eq!(v.witness.unwrap().eps0, 0.5);
        let v = eventually(&u, &Predicate::closure(|e| libm::sin(1.0 / e) > 0.0), 200).unwrap();
        assert!(v.fails());
        let seq = v.counterexample.unwrap();
        assert!(seq.len() >= 2 && seq.windows(2).all(|w| w[1] < w[0]));
        let v = eventually(&u, &Predicate::closure(|_| true), 200).unwrap();
        assert!(v.holds());
        assert_eq!(v.witness.unwrap().eps0, 1.0);
        assert!(eventually(&u, &Predicate::closure(|_| true), 0).is_err());
    }

    #[test]
    fn big_o_examples() {
        let v = big_o(&net("eps^-2"), &net("eps^-3")).unwrap();
        assert!(v.holds());
        assert_eq!(v.mode, Mode::Exact);
        let w = v.witness.unwrap();
        assert_eq!(w.h, Some(1.0));
        assert_eq!(w.eps0, 1.0);
        let v = big_o(&net("exp(1/eps)"), &net("eps^-9")).unwrap();
        assert!(v.fails());
        assert_eq!(v.mode, Mode::Exact);
        let cfg = GridConfig::default();
        let s = Net::sample_fn(|e| 3.0 / e + libm::pow(e, -0.5), &cfg).unwrap();
        let v = big_o(&s, &net("eps^-1")).unwrap();
        assert!(v.holds());
        assert_eq!(v.mode, Mode::Numeric);
        let h = v.witness.unwrap().h.unwrap();
        assert!(h > 3.0 && h < 4.5, "{h}");
    }

    #[test]
    fn numeric_fails_on_divergent_ratio() {
        let x = Net::callable(|e| libm::log(1.0 / e) / e);
        let v = big_o(&x, &net("eps^-1")).unwrap();
        assert!(v.fails(), "{v:?}");
        assert!(v.confidence.is_some());
    }

    #[test]
    fn order_examples() {
        assert!(order_gt(&net("eps^-1"), &net("7")).unwrap().holds());
        assert!(order_gt(&net("eps^-1"), &net("eps^-1")).unwrap().fails());
        let osc = Net::callable(|e| 1.0 / e + libm::sin(1.0 / e) * libm::pow(e, -0.5));
        let v = order_gt(&osc, &net("eps^-1")).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
    }

    #[test]
    fn limit_examples() {
        assert_eq!(limit_of(&net("eps^2 + 3")), Limit::Finite(3.0));
        assert_eq!(limit_of(&net("exp(1/eps)")), Limit::PlusInf);
        let alt = Net::callable(|e| {
            let k = libm::floor(1.0 / e) as i64;
            if k % 2 == 0 {
                1.0 / e
            } else {
                -1.0 / e
            }
        });
        assert_eq!(limit_of(&alt), Limit::UnsignedInf);
        match limit_of(&Net::callable(|e| 2.0 + e)) {
            Limit::Finite(v) => assert!((v - 2.0).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mismatched_index_sets_are_rejected() {
        let a = net("eps").with_index(IndexSet::NaturalsFrechet);
        assert!(big_o(&a, &net("eps")).is_err());
    }

    #[test]
    fn composed_index_reinterprets_symbolic_nets() {
        let idx = IndexSet::composed(RateExpr::eps_pow(crate::rate_dsl::Q::from_integer(2))).unwrap();
        let x = net("eps^-1").with_index(idx.clone());
        let y = net("eps^-2").with_index(idx);
        assert!(big_o(&x, &y).unwrap().holds());
        assert!((x.value(0.1).unwrap() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn sampled_nets_are_validated() {
        assert!(Net::sampled(vec![(0.1, 1.0); 3]).is_err());
        let pts: Vec<(f64, f64)> = (0..8).map(|k| (1.0 / (k + 1) as f64, 1.0)).collect();
        assert!(Net::sampled(pts).is_ok());
    }
}
