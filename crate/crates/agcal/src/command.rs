//! Scenario commands: validation of parameters and execution against the
//! engine.

use crate::laws::{run_suite, Suite};
use crate::scenario::{Entry, RawCommand, ScenarioError};
use agcal_core::embedding::{
    build_mollifier, compare_embeddings, decay_verdict, delta_pairing_with, embed, embedding_defect,
    parse_distribution, principal_necessity_certificate, residual_grid, strict_delta_net_with,
    taylor_residual_slope_with, CompactDistribution, DecayReport,
};
use agcal_core::gauges::{
    algebra_order, check_axioms, equivalent_gauges, exp_gauge, is_moderate_with, is_negligible_num_with,
    parse_gauge, principal_generator, AlgebraSpec, Gauge, AXIOM_NAMES,
};
use agcal_core::gen_functions::{
    is_moderate_family, is_negligible_fn, support_estimate, FnBudget, Interval, SupOptions,
};
use agcal_core::gen_numbers::GenNumber;
use agcal_core::index_core::{big_o_with, GridConfig, Net, Status, Verdict};
use agcal_core::ode_gen::{
    minimality_check, solve_linear, t_grid, verify_moderate_exp_b, GenMatrix, OdeProblem,
};
use agcal_core::profiles::{parse_profile, SmoothProfile};
use agcal_core::rate_dsl::{compare_o, normalize, parse, OrderRelation, RateError, RateExpr};
use agcal_core::Error;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Compare,
    Laws,
    GaugeCheck,
    Principal,
    Moderate,
    Negligible,
    Embed,
    StrictDelta,
    CompareEmbeddings,
    Necessity,
    Ode,
    Minimality,
}

impl Kind {
    pub const ALL: [Kind; 12] = [
        Kind::Compare,
        Kind::Laws,
        Kind::GaugeCheck,
        Kind::Principal,
        Kind::Moderate,
        Kind::Negligible,
        Kind::Embed,
        Kind::StrictDelta,
        Kind::CompareEmbeddings,
        Kind::Necessity,
        Kind::Ode,
        Kind::Minimality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Compare => "compare",
            Kind::Laws => "laws",
            Kind::GaugeCheck => "gauge-check",
            Kind::Principal => "principal",
            Kind::Moderate => "moderate",
            Kind::Negligible => "negligible",
            Kind::Embed => "embed",
            Kind::StrictDelta => "strict-delta",
            Kind::CompareEmbeddings => "compare-embeddings",
            Kind::Necessity => "necessity",
            Kind::Ode => "ode",
            Kind::Minimality => "minimality",
        }
    }

    pub fn from_name(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Kind::Compare => &["x", "y", "grid"],
            Kind::Laws => &["suite", "cases", "seed"],
            Kind::GaugeCheck => &["gauge", "equivalent", "below"],
            Kind::Principal => &["gauge", "generator"],
            Kind::Moderate | Kind::Negligible => &["net", "gauge", "grid"],
            Kind::Embed => &[
                "check", "distribution", "profile", "test", "b", "order", "domain", "k", "resolution", "min-slope",
                "grid",
            ],
            Kind::StrictDelta => &["b", "cap", "grid"],
            Kind::CompareEmbeddings => &["b", "c", "order"],
            Kind::Necessity => &["b", "z", "m", "p", "q", "order", "escaper", "grid"],
            Kind::Ode => &[
                "matrix", "initial", "t0", "gauge", "solution", "negligible", "domain", "eps-count", "t-range",
                "t-count", "kset", "alpha-max", "grid",
            ],
            Kind::Minimality => &["b", "bprime", "probes", "failing-probe"],
        }
    }
}

/// What a command is expected to produce.
#[derive(Clone, Debug, PartialEq)]
pub enum Expect {
    Status(Status),
    Relation(OrderRelation),
    Error,
}

impl Expect {
    pub fn label(&self) -> &'static str {
        match self {
            Expect::Status(s) => s.name(),
            Expect::Relation(r) => r.name(),
            Expect::Error => "error",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbedCheck {
    Support,
    Residual,
    Pairing,
    Defect,
}

#[derive(Clone, Debug)]
pub enum Command {
    Compare {
        x: RateExpr,
        y: RateExpr,
    },
    Laws {
        suite: Suite,
        cases: usize,
        seed: u64,
    },
    GaugeCheck {
        gauge: Gauge,
        equivalent: Vec<Gauge>,
        below: Option<Gauge>,
    },
    Principal {
        gauge: Gauge,
        /// `Some(None)` expects no generator.
        generator: Option<Option<RateExpr>>,
    },
    Moderate {
        net: RateExpr,
        gauge: Gauge,
    },
    Negligible {
        net: RateExpr,
        gauge: Gauge,
    },
    Embed {
        check: EmbedCheck,
        distribution: Option<CompactDistribution>,
        profile: Option<SmoothProfile>,
        test: Option<SmoothProfile>,
        b: RateExpr,
        order: u32,
        domain: Interval,
        k: Interval,
        resolution: f64,
        min_slope: f64,
    },
    StrictDelta {
        b: RateExpr,
        cap: u32,
    },
    CompareEmbeddings {
        b: RateExpr,
        c: RateExpr,
        order: u32,
    },
    Necessity {
        b: RateExpr,
        z: Gauge,
        m: Vec<u32>,
        p: f64,
        q: f64,
        order: u32,
        escaper: Option<RateExpr>,
    },
    Ode(Box<OdeSpec>),
    Minimality {
        b: Gauge,
        bprime: Gauge,
        probes: usize,
        failing_probe: Option<RateExpr>,
    },
}

#[derive(Clone, Debug)]
pub struct OdeSpec {
    pub matrix: Vec<Vec<RateExpr>>,
    pub initial: Vec<RateExpr>,
    pub t0: f64,
    pub gauge: Gauge,
    pub solution: Gauge,
    pub negligible: Gauge,
    pub domain: Interval,
    pub eps_count: usize,
    pub t_range: Interval,
    pub t_count: usize,
    pub kset: Vec<Interval>,
    pub alpha_max: u32,
}

/// Validated command plus its expectation and per-command grid override.
#[derive(Clone, Debug)]
pub struct Validated {
    pub kind: Kind,
    pub command: Command,
    pub expect: Expect,
    pub grid: Option<GridConfig>,
}

// ---------------------------------------------------------------------------
// Literal helpers

fn rate_err(e: &Entry, base: usize, err: RateError) -> ScenarioError {
    match err {
        RateError::Syntax { pos, .. } => e.error_at(base + pos, err.to_string()),
        other => e.error_at(base, other.to_string()),
    }
}

fn expr_in(e: &Entry, base: usize, text: &str) -> Result<RateExpr, ScenarioError> {
    parse(text).map_err(|err| rate_err(e, base, err))
}

fn expr(e: &Entry) -> Result<RateExpr, ScenarioError> {
    expr_in(e, 0, &e.value)
}

fn gauge_in(e: &Entry, base: usize, text: &str) -> Result<Gauge, ScenarioError> {
    parse_gauge(text).map_err(|err| e.error_at(base + err.offset, err.message))
}

fn gauge(e: &Entry) -> Result<Gauge, ScenarioError> {
    gauge_in(e, 0, &e.value)
}

fn profile(e: &Entry) -> Result<SmoothProfile, ScenarioError> {
    parse_profile(&e.value).map_err(|err| e.error_at(err.offset, err.message))
}

fn distribution(e: &Entry) -> Result<CompactDistribution, ScenarioError> {
    parse_distribution(&e.value).map_err(|err| e.error_at(err.offset, err.message))
}

fn number<T: std::str::FromStr>(e: &Entry, what: &str) -> Result<T, ScenarioError> {
    e.value
        .parse::<T>()
        .map_err(|_| e.error(format!("'{}' is not {what}", e.value)))
}

fn real(e: &Entry) -> Result<f64, ScenarioError> {
    let v: f64 = number(e, "a number")?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(e.error("value must be finite"))
    }
}

/// Top-level comma separated pieces with offsets relative to `text`.
fn split_top(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &text[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &text[start..]));
    out.into_iter()
        .map(|(o, s)| {
            let lead = s.len() - s.trim_start().len();
            (o + lead, s.trim())
        })
        .collect()
}

/// Items of a bracketed list `[a, b, ...]` located at `base` in the value.
fn bracket_items<'a>(e: &Entry, base: usize, text: &'a str) -> Result<Vec<(usize, &'a str)>, ScenarioError> {
    let t = text.trim();
    let lead = text.len() - text.trim_start().len();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| e.error_at(base + lead, "expected a bracketed list"))?;
    if inner.trim().is_empty() {
        return Err(e.error_at(base + lead, "empty list"));
    }
    Ok(split_top(inner)
        .into_iter()
        .map(|(o, s)| (base + lead + 1 + o, s))
        .collect())
}

fn interval_in(e: &Entry, base: usize, text: &str) -> Result<Interval, ScenarioError> {
    let items = bracket_items(e, base, text)?;
    if items.len() != 2 {
        return Err(e.error_at(base, "an interval needs two endpoints"));
    }
    let mut v = [0.0; 2];
    for (k, (o, s)) in items.iter().enumerate() {
        v[k] = s
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| e.error_at(*o, format!("'{s}' is not a number")))?;
    }
    if !(v[0] <= v[1]) {
        return Err(e.error_at(base, "interval endpoints are reversed"));
    }
    Ok((v[0], v[1]))
}

fn interval(e: &Entry) -> Result<Interval, ScenarioError> {
    interval_in(e, 0, &e.value)
}

fn interval_list(e: &Entry) -> Result<Vec<Interval>, ScenarioError> {
    bracket_items(e, 0, &e.value)?
        .into_iter()
        .map(|(o, s)| interval_in(e, o, s))
        .collect()
}

fn expr_list_in(e: &Entry, base: usize, text: &str) -> Result<Vec<RateExpr>, ScenarioError> {
    bracket_items(e, base, text)?
        .into_iter()
        .map(|(o, s)| expr_in(e, o, s))
        .collect()
}

/// `1..4`, or a comma separated list of naturals.
fn orders(e: &Entry) -> Result<Vec<u32>, ScenarioError> {
    if let Some((a, b)) = e.value.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| e.error("bad range start"))?;
        let b: u32 = b.trim().parse().map_err(|_| e.error("bad range end"))?;
        if a > b {
            return Err(e.error("empty range"));
        }
        return Ok((a..=b).collect());
    }
    split_top(&e.value)
        .into_iter()
        .map(|(o, s)| s.parse::<u32>().map_err(|_| e.error_at(o, format!("'{s}' is not a natural"))))
        .collect()
}

struct Params<'a> {
    raw: &'a RawCommand,
}

impl<'a> Params<'a> {
    fn opt(&self, key: &str) -> Option<&'a Entry> {
        self.raw.get(key)
    }

    fn req(&self, key: &str) -> Result<&'a Entry, ScenarioError> {
        self.raw
            .get(key)
            .ok_or_else(|| self.raw.head.error(format!("missing required parameter '{key}'")))
    }

    fn expr_or(&self, key: &str, default: &str) -> Result<RateExpr, ScenarioError> {
        match self.opt(key) {
            Some(e) => expr(e),
            None => Ok(parse(default).expect("default expression")),
        }
    }

    fn real_or(&self, key: &str, default: f64) -> Result<f64, ScenarioError> {
        self.opt(key).map_or(Ok(default), real)
    }

    fn u32_or(&self, key: &str, default: u32, max: u32) -> Result<u32, ScenarioError> {
        match self.opt(key) {
            Some(e) => {
                let v: u32 = number(e, "a natural number")?;
                if v > max {
                    Err(e.error(format!("must be at most {max}")))
                } else {
                    Ok(v)
                }
            }
            None => Ok(default),
        }
    }

    fn interval_or(&self, key: &str, default: Interval) -> Result<Interval, ScenarioError> {
        self.opt(key).map_or(Ok(default), interval)
    }
}

fn parse_expect(kind: Kind, e: &Entry) -> Result<Expect, ScenarioError> {
    match e.value.as_str() {
        "Holds" => Ok(Expect::Status(Status::Holds)),
        "Fails" => Ok(Expect::Status(Status::Fails)),
        "Inconclusive" => Ok(Expect::Status(Status::Inconclusive)),
        "error" => Ok(Expect::Error),
        "XbigOofY" if kind == Kind::Compare => Ok(Expect::Relation(OrderRelation::XbigOofY)),
        "YbigOofX" if kind == Kind::Compare => Ok(Expect::Relation(OrderRelation::YbigOofX)),
        "Both" if kind == Kind::Compare => Ok(Expect::Relation(OrderRelation::Both)),
        "Neither" if kind == Kind::Compare => Ok(Expect::Relation(OrderRelation::Neither)),
        other => Err(e.error(format!("unknown expectation '{other}'"))),
    }
}

impl Command {
    /// Checks the parameter set of a command block and parses every literal.
    pub fn validate(kind: Kind, raw: &RawCommand) -> Result<Validated, ScenarioError> {
        for p in &raw.params {
            if !(p.key == "id" || p.key == "expect" || kind.keys().contains(&p.key.as_str())) {
                return Err(ScenarioError {
                    line: p.line,
                    column: p.key_col,
                    message: format!("'{}' is not a parameter of {}", p.key, kind.name()),
                });
            }
        }
        let p = Params { raw };
        let expect = match p.opt("expect") {
            Some(e) => parse_expect(kind, e)?,
            None => Expect::Status(Status::Holds),
        };
        let grid = match p.opt("grid") {
            Some(e) => Some(crate::scenario::parse_grid(&e.value).map_err(|(o, m)| e.error_at(o, m))?),
            None => None,
        };
        let command = match kind {
            Kind::Compare => Command::Compare {
                x: expr(p.req("x")?)?,
                y: expr(p.req("y")?)?,
            },
            Kind::Laws => {
                let e = p.req("suite")?;
                let suite = Suite::from_name(&e.value).ok_or_else(|| {
                    e.error(format!(
                        "unknown suite, expected one of {}",
                        Suite::ALL.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ")
                    ))
                })?;
                let cases = match p.opt("cases") {
                    Some(e) => number(e, "a count")?,
                    None => 200,
                };
                let seed = match p.opt("seed") {
                    Some(e) => number(e, "a seed")?,
                    None => 1,
                };
                Command::Laws { suite, cases, seed }
            }
            Kind::GaugeCheck => {
                let equivalent = match p.opt("equivalent") {
                    Some(e) => split_top(&e.value)
                        .into_iter()
                        .map(|(o, s)| gauge_in(e, o, s))
                        .collect::<Result<Vec<_>, _>>()?,
                    None => Vec::new(),
                };
                Command::GaugeCheck {
                    gauge: gauge(p.req("gauge")?)?,
                    equivalent,
                    below: p.opt("below").map(gauge).transpose()?,
                }
            }
            Kind::Principal => Command::Principal {
                gauge: gauge(p.req("gauge")?)?,
                generator: match p.opt("generator") {
                    Some(e) if e.value == "absent" => Some(None),
                    Some(e) => Some(Some(expr(e)?)),
                    None => None,
                },
            },
            Kind::Moderate => Command::Moderate {
                net: expr(p.req("net")?)?,
                gauge: gauge(p.req("gauge")?)?,
            },
            Kind::Negligible => Command::Negligible {
                net: expr(p.req("net")?)?,
                gauge: gauge(p.req("gauge")?)?,
            },
            Kind::Embed => validate_embed(&p)?,
            Kind::StrictDelta => Command::StrictDelta {
                b: p.expr_or("b", "eps^-1")?,
                cap: p.u32_or("cap", 8, 8)?,
            },
            Kind::CompareEmbeddings => Command::CompareEmbeddings {
                b: expr(p.req("b")?)?,
                c: expr(p.req("c")?)?,
                order: p.u32_or("order", 4, 12)?,
            },
            Kind::Necessity => Command::Necessity {
                b: expr(p.req("b")?)?,
                z: gauge(p.req("z")?)?,
                m: p.opt("m").map_or(Ok(vec![1, 2, 3, 4]), orders)?,
                p: p.real_or("p", 0.9)?,
                q: p.real_or("q", 0.5)?,
                order: p.u32_or("order", 4, 12)?,
                escaper: p.opt("escaper").map(expr).transpose()?,
            },
            Kind::Ode => validate_ode(&p)?,
            Kind::Minimality => Command::Minimality {
                b: gauge(p.req("b")?)?,
                bprime: gauge(p.req("bprime")?)?,
                probes: p.u32_or("probes", 3, 24)? as usize,
                failing_probe: p.opt("failing-probe").map(expr).transpose()?,
            },
        };
        Ok(Validated {
            kind,
            command,
            expect,
            grid,
        })
    }
}

fn validate_embed(p: &Params) -> Result<Command, ScenarioError> {
    let ce = p.req("check")?;
    let check = match ce.value.as_str() {
        "support" => EmbedCheck::Support,
        "residual" => EmbedCheck::Residual,
        "pairing" => EmbedCheck::Pairing,
        "defect" => EmbedCheck::Defect,
        _ => return Err(ce.error("expected support, residual, pairing or defect")),
    };
    let distribution = p.opt("distribution").map(distribution).transpose()?;
    let prof = p.opt("profile").map(profile).transpose()?;
    let test = p.opt("test").map(profile).transpose()?;
    let need = |ok: bool, key: &str| {
        if ok {
            Ok(())
        } else {
            Err(ce.error(format!("check '{}' needs '{key}'", ce.value)))
        }
    };
    match check {
        EmbedCheck::Support => need(distribution.is_some(), "distribution")?,
        EmbedCheck::Residual | EmbedCheck::Defect => need(prof.is_some(), "profile")?,
        EmbedCheck::Pairing => {
            need(distribution.is_some(), "distribution")?;
            need(test.is_some(), "test")?;
        }
    }
    let order = p.u32_or("order", 4, 12)?;
    Ok(Command::Embed {
        check,
        distribution,
        profile: prof,
        test,
        b: p.expr_or("b", "eps^-1")?,
        order,
        domain: p.interval_or("domain", (-1.0, 1.0))?,
        k: p.interval_or("k", (-1.0, 1.0))?,
        resolution: p.real_or("resolution", 0.05)?,
        min_slope: p.real_or("min-slope", order as f64 + 0.5)?,
    })
}

fn validate_ode(p: &Params) -> Result<Command, ScenarioError> {
    let me = p.req("matrix")?;
    let matrix = bracket_items(me, 0, &me.value)?
        .into_iter()
        .map(|(o, s)| expr_list_in(me, o, s))
        .collect::<Result<Vec<_>, _>>()?;
    let d = matrix.len();
    if matrix.iter().any(|r| r.len() != d) {
        return Err(me.error("matrix must be square"));
    }
    let ie = p.req("initial")?;
    let initial = expr_list_in(ie, 0, &ie.value)?;
    if initial.len() != d {
        return Err(ie.error(format!("expected {d} initial values")));
    }
    let solution = gauge(p.req("solution")?)?;
    let negligible = match p.opt("negligible") {
        Some(e) => gauge(e)?,
        None => solution.clone(),
    };
    let count = |key: &str, default: usize| -> Result<usize, ScenarioError> {
        match p.opt(key) {
            Some(e) => {
                let n: usize = number(e, "a count")?;
                if (2..=200).contains(&n) {
                    Ok(n)
                } else {
                    Err(e.error("count must be between 2 and 200"))
                }
            }
            None => Ok(default),
        }
    };
    Ok(Command::Ode(Box::new(OdeSpec {
        matrix,
        initial,
        t0: p.real_or("t0", 0.0)?,
        gauge: gauge(p.req("gauge")?)?,
        solution,
        negligible,
        domain: p.interval_or("domain", (-2.0, 2.0))?,
        eps_count: count("eps-count", 20)?,
        t_range: p.interval_or("t-range", (-1.0, 1.0))?,
        t_count: count("t-count", 20)?,
        kset: p.opt("kset").map_or(Ok(vec![(-1.0, 1.0)]), interval_list)?,
        alpha_max: p.u32_or("alpha-max", 1, 8)?,
    })))
}

// ---------------------------------------------------------------------------
// Execution

/// Result of one command, independent of output format.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
    /// Command specific payload, emitted under `data`.
    pub data: Vec<(&'static str, Value)>,
    pub truncation: Option<String>,
    pub grid: Option<GridConfig>,
    pub relation: Option<OrderRelation>,
    /// Secondary expectations such as an expected generator.
    pub checks: Vec<(String, bool)>,
}

impl Outcome {
    fn of(v: Verdict) -> Outcome {
        let truncation = v.evidence("truncation").map(str::to_string);
        Outcome {
            verdict: Some(v),
            truncation,
            ..Outcome::default()
        }
    }

    fn with(mut self, key: &'static str, v: Value) -> Outcome {
        self.data.push((key, v));
        self
    }

    fn grid(mut self, g: GridConfig) -> Outcome {
        self.grid = Some(g);
        self
    }

    /// The observed label compared with the expectation.
    pub fn observed(&self, expect: &Expect) -> &'static str {
        match (&self.verdict, expect) {
            (None, _) => "error",
            (Some(_), Expect::Relation(_)) => self.relation.map_or("Inconclusive", |r| r.name()),
            (Some(v), _) => v.status.name(),
        }
    }

    pub fn matches(&self, expect: &Expect) -> bool {
        self.observed(expect) == expect.label() && self.checks.iter().all(|(_, ok)| *ok)
    }
}

/// A float as JSON; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn intervals(v: &[Interval]) -> Value {
    Value::Array(v.iter().map(|i| json!([num(i.0), num(i.1)])).collect())
}

fn decay_table(r: &DecayReport) -> Value {
    Value::Array(r.points.iter().map(|p| json!([num(p.0), num(p.1), num(p.2)])).collect())
}

fn fail(e: Error) -> Outcome {
    Outcome {
        error: Some(e.to_string()),
        ..Outcome::default()
    }
}

impl Validated {
    /// Grid used when neither the command, the scenario nor the caller sets one.
    pub fn default_grid(&self) -> GridConfig {
        match self.command {
            Command::Embed { check, .. } if check != EmbedCheck::Support => residual_grid(),
            Command::Ode(ref spec) => GridConfig {
                count: spec.eps_count,
                ..GridConfig::default()
            },
            _ => GridConfig::default(),
        }
    }

    /// Runs the command. Engine errors are captured in the outcome.
    pub fn execute(&self, grid: &GridConfig) -> Outcome {
        self.run(grid).unwrap_or_else(fail)
    }

    fn run(&self, grid: &GridConfig) -> agcal_core::Result<Outcome> {
        match &self.command {
            Command::Compare { x, y } => {
                let (nx, ny) = (Net::symbolic(x.clone()), Net::symbolic(y.clone()));
                let fwd = big_o_with(&nx, &ny, grid)?;
                let back = big_o_with(&ny, &nx, grid)?;
                let relation = match (normalize(x), normalize(y)) {
                    (Ok(a), Ok(b)) => Some(compare_o(&a, &b)),
                    _ => match (fwd.status, back.status) {
                        (Status::Holds, Status::Holds) => Some(OrderRelation::Both),
                        (Status::Holds, Status::Fails) => Some(OrderRelation::XbigOofY),
                        (Status::Fails, Status::Holds) => Some(OrderRelation::YbigOofX),
                        (Status::Fails, Status::Fails) => Some(OrderRelation::Neither),
                        _ => None,
                    },
                };
                let mut o = Outcome::of(fwd)
                    .with("x", json!(x.to_canonical()))
                    .with("y", json!(y.to_canonical()))
                    .with("relation", relation.map_or(Value::Null, |r| json!(r.name())))
                    .with("y_big_o_of_x", json!(back.status.name()))
                    .grid(*grid);
                o.relation = relation;
                Ok(o)
            }
            Command::Laws { suite, cases, seed } => {
                let r = run_suite(*suite, *cases, *seed);
                let status = if r.failures == 0 { Status::Holds } else { Status::Fails };
                let v = match suite {
                    Suite::MatrixBound => Verdict::numeric(status, 0.99).with_evidence(
                        "truncation",
                        format!("{cases} random matrices, d <= 4, entries in [-2, 2], t on [-3, 3] with step 0.5"),
                    ),
                    _ => Verdict::exact(status),
                };
                let counters: serde_json::Map<String, Value> =
                    r.counters.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
                Ok(Outcome::of(v.with_detail(format!("{} law instances checked", r.checks)))
                    .with("suite", json!(suite.name()))
                    .with("cases", json!(r.cases))
                    .with("seed", json!(r.seed))
                    .with("checks", json!(r.checks))
                    .with("failures", json!(r.failures))
                    .with("first_failure", r.first_failure.map_or(Value::Null, |s| json!(s)))
                    .with("counters", Value::Object(counters)))
            }
            Command::GaugeCheck {
                gauge,
                equivalent,
                below,
            } => {
                let rep = check_axioms(gauge);
                let mut axioms = serde_json::Map::new();
                for (name, v) in AXIOM_NAMES.iter().zip(&rep.verdicts) {
                    axioms.insert((*name).to_string(), verdict_json(v));
                }
                let mut v = Verdict::all(rep.verdicts.iter().cloned());
                if let Some(i) = rep.first_failure() {
                    v = v.with_evidence("first failing axiom", AXIOM_NAMES[i]);
                }
                let mut eqs = Vec::new();
                for other in equivalent {
                    let e = equivalent_gauges(gauge, other)?;
                    eqs.push(json!({"gauge": other.literal(), "status": e.status.name()}));
                    v = v.and(e);
                }
                let mut o = Vec::new();
                if let Some(big) = below {
                    let ord = algebra_order(&AlgebraSpec::diagonal(gauge.clone()), &AlgebraSpec::diagonal(big.clone()))?;
                    o.push(json!({"below": big.literal(), "status": ord.status.name()}));
                    v = v.and(ord);
                }
                Ok(Outcome::of(v)
                    .with("gauge", json!(gauge.literal()))
                    .with("axioms", Value::Object(axioms))
                    .with("equivalences", Value::Array(eqs))
                    .with("algebra_order", Value::Array(o)))
            }
            Command::Principal { gauge, generator } => {
                let pr = principal_generator(gauge);
                let mut o = Outcome::of(pr.verdict.clone())
                    .with("gauge", json!(gauge.literal()))
                    .with(
                        "generator",
                        pr.generator.as_ref().map_or(json!("absent"), |g| json!(g.to_canonical())),
                    );
                if let Some(c) = &pr.certificate {
                    o = o.with(
                        "certificate",
                        json!({
                            "candidate": c.candidate,
                            "candidate_inner": c.candidate_inner.to_canonical(),
                            "escaper": c.escaper.to_canonical(),
                        }),
                    );
                }
                if let Some(want) = generator {
                    let got = pr.generator.as_ref().map(|g| g.to_canonical());
                    let want_s = want.as_ref().map(|g| g.to_canonical());
                    o.checks.push((
                        format!("generator {}", want_s.clone().unwrap_or_else(|| "absent".into())),
                        got == want_s,
                    ));
                }
                Ok(o)
            }
            Command::Moderate { net, gauge } => {
                let v = is_moderate_with(&Net::symbolic(net.clone()), gauge, grid)?;
                Ok(Outcome::of(v)
                    .with("net", json!(net.to_canonical()))
                    .with("gauge", json!(gauge.literal()))
                    .grid(*grid))
            }
            Command::Negligible { net, gauge } => {
                let v = is_negligible_num_with(&Net::symbolic(net.clone()), gauge, grid)?;
                Ok(Outcome::of(v)
                    .with("net", json!(net.to_canonical()))
                    .with("gauge", json!(gauge.literal()))
                    .grid(*grid))
            }
            Command::Embed { .. } => self.run_embed(grid),
            Command::StrictDelta { b, cap } => run_strict(b, *cap, grid),
            Command::CompareEmbeddings { b, c, order } => {
                let rho = build_mollifier(*order)?;
                let v = compare_embeddings(&Net::symbolic(b.clone()), &Net::symbolic(c.clone()), &rho)?;
                Ok(Outcome::of(v)
                    .with("b", json!(b.to_canonical()))
                    .with("c", json!(c.to_canonical()))
                    .with("mollifier", json!(rho.literal())))
            }
            Command::Necessity {
                b,
                z,
                m,
                p,
                q,
                order,
                escaper,
            } => {
                let rho = build_mollifier(*order)?;
                let r = principal_necessity_certificate(b, z, m, &rho, *p, *q, escaper.clone(), grid)?;
                let exact_ok = if r.generator.holds() {
                    r.consistent
                } else {
                    !r.consistent && r.per_m.iter().all(|(_, v)| v.fails())
                };
                let status = if r.positive_decreasing && exact_ok {
                    Status::Holds
                } else {
                    Status::Fails
                };
                let rows: Vec<Value> = r
                    .rows
                    .iter()
                    .map(|row| json!({"m": row.m, "l_m": num(row.l_m), "c_min": num(row.c_min), "bound_holds": row.bound_holds}))
                    .collect();
                let per_m: Vec<Value> = r
                    .per_m
                    .iter()
                    .map(|(m, v)| json!({"m": m, "b^-m = O(1/z)": v.status.name()}))
                    .collect();
                let v = Verdict::numeric(status, 0.95)
                    .with_detail(r.statement.clone())
                    .with_evidence("truncation", &r.truncation);
                Ok(Outcome::of(v)
                    .with("rows", Value::Array(rows))
                    .with("positive_decreasing", json!(r.positive_decreasing))
                    .with("generator_test", json!(r.generator.status.name()))
                    .with("escaper", r.escaper.as_ref().map_or(Value::Null, |e| json!(e.to_canonical())))
                    .with("per_m", Value::Array(per_m))
                    .with("statement", json!(r.statement))
                    .grid(*grid))
            }
            Command::Ode(spec) => run_ode(spec, grid),
            Command::Minimality {
                b,
                bprime,
                probes,
                failing_probe,
            } => {
                let m = minimality_check(b, bprime, *probes)?;
                let eb = exp_gauge(b);
                let ord = algebra_order(&AlgebraSpec::diagonal(eb.clone()), &AlgebraSpec::diagonal(bprime.clone()))?;
                let failing = m.evidence("failing probes").map(str::to_string);
                let mut o = Outcome::of(m.clone().and(ord.clone()))
                    .with("minimality", verdict_json(&m))
                    .with("algebra_order", json!({"smaller": eb.literal(), "larger": bprime.literal(), "status": ord.status.name()}))
                    .with("failing_probes", failing.clone().map_or(Value::Null, |f| json!(f)));
                o.truncation = m.evidence("truncation").map(str::to_string);
                if let Some(want) = failing_probe {
                    let w = want.to_canonical();
                    let hit = failing.as_deref().is_some_and(|f| f.split(", ").any(|p| p == w));
                    o.checks.push((format!("failing probe {w}"), hit));
                }
                Ok(o)
            }
        }
    }

    fn run_embed(&self, grid: &GridConfig) -> agcal_core::Result<Outcome> {
        let Command::Embed {
            check,
            distribution,
            profile,
            test,
            b,
            order,
            domain,
            k,
            resolution,
            min_slope,
        } = &self.command
        else {
            unreachable!("embed dispatch")
        };
        let rho = build_mollifier(*order)?;
        let base = |o: Outcome| {
            o.with("b", json!(b.to_canonical()))
                .with("mollifier", json!(rho.literal()))
        };
        match check {
            EmbedCheck::Support => {
                let w = distribution.as_ref().expect("validated");
                let u = embed(w, b, &rho, *domain)?;
                let est = support_estimate(&u, *resolution, None)?;
                let want = w.supports();
                let mut merged: Vec<Interval> = Vec::new();
                let mut sorted = want.clone();
                sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
                for s in sorted {
                    match merged.last_mut() {
                        Some(last) if s.0 <= last.1 + 2.0 * resolution => last.1 = last.1.max(s.1),
                        _ => merged.push(s),
                    }
                }
                let agree = est.len() == merged.len()
                    && est
                        .iter()
                        .zip(&merged)
                        .all(|(e, s)| (e.0 - s.0).abs() <= resolution + 1e-12 && (e.1 - s.1).abs() <= resolution + 1e-12);
                let status = if agree { Status::Holds } else { Status::Fails };
                let v = Verdict::numeric(status, 0.9).with_detail("estimated support against supp(w)");
                Ok(base(Outcome::of(v))
                    .with("distribution", json!(w.literal()))
                    .with("estimated_support", intervals(&est))
                    .with("expected_support", intervals(&merged))
                    .with("resolution", num(*resolution)))
            }
            EmbedCheck::Residual => {
                let f = profile.as_ref().expect("validated");
                let g = *grid;
                let r = taylor_residual_slope_with(f, b, &rho, *k, &g, 41)?;
                let max = r.max_value();
                let v = if r.vanishes || max < 1e-10 {
                    Verdict::numeric(Status::Holds, 0.95)
                        .with_detail("residual below 1e-10 on the whole grid")
                        .with_evidence("truncation", &r.truncation)
                } else {
                    decay_verdict(&r, *min_slope)
                };
                Ok(base(Outcome::of(v))
                    .with("profile", json!(f.literal()))
                    .with("table", decay_table(&r))
                    .with("slope", r.order.map_or(Value::Null, num))
                    .with("min_slope", num(*min_slope))
                    .with("fitted", json!(r.fitted))
                    .with("noise_flag", json!(r.noise_flag))
                    .with("max_residual", num(max))
                    .grid(g))
            }
            EmbedCheck::Pairing => {
                let w = distribution.as_ref().expect("validated");
                let phi = test.as_ref().expect("validated");
                let g = *grid;
                let r = delta_pairing_with(w, phi, b, &rho, &g)?;
                let v = decay_verdict(&r, *min_slope);
                Ok(base(Outcome::of(v))
                    .with("distribution", json!(w.literal()))
                    .with("test", json!(phi.literal()))
                    .with("table", decay_table(&r))
                    .with("slope", r.order.map_or(Value::Null, num))
                    .with("min_slope", num(*min_slope))
                    .with("fitted", json!(r.fitted))
                    .with("noise_flag", json!(r.noise_flag))
                    .grid(g))
            }
            EmbedCheck::Defect => {
                let f = profile.as_ref().expect("validated");
                let g = *grid;
                let u = embedding_defect(f, b, &rho, *domain)?;
                let budget = FnBudget::for_domain(*domain)
                    .with_kset(vec![*k])
                    .with_alpha_max(1)
                    .with_m_max(*order);
                let budget = FnBudget {
                    sup: SupOptions { grid: g, x_points: 11 },
                    ..budget
                };
                let v = is_negligible_fn(&u, &budget)?;
                Ok(base(Outcome::of(v)).with("profile", json!(f.literal())).grid(g))
            }
        }
    }
}

fn run_strict(b: &RateExpr, cap: u32, grid: &GridConfig) -> agcal_core::Result<Outcome> {
    let net = strict_delta_net_with(b, cap, grid)?;
    let mut failures: Vec<String> = Vec::new();
    let kernels: Vec<Value> = net
        .kernels
        .iter()
        .map(|k| {
            json!({
                "m": k.m,
                "support": k.profile.support().map_or(Value::Null, |s| json!([num(s.0), num(s.1)])),
                "bound": num(k.bound),
                "integral_error": num((k.integral - 1.0).abs()),
                "max_moment": num(k.moments.iter().fold(0.0f64, |a, v| a.max(v.abs()))),
                "l1": num(k.l1),
                "l1_target_met": k.l1_target_met,
            })
        })
        .collect();
    let mut rows = Vec::new();
    for row in &net.rows {
        let Some(m) = row.m else {
            failures.push(format!("no admissible kernel at eps = {}", row.eps));
            rows.push(json!({"eps": num(row.eps), "b": num(row.b), "m": Value::Null}));
            continue;
        };
        let k = &net.kernels[m as usize];
        if k.profile.support() != Some((-1.0, 1.0)) {
            failures.push(format!("(i) support of phi_{m}"));
        }
        if (k.integral - 1.0).abs() > 1e-8 {
            failures.push(format!("(ii) integral of phi_{m}"));
        }
        let next_ok = row.capped || net.kernels.get(m as usize + 1).is_some_and(|n| n.bound > row.b);
        if !(k.bound <= row.b && next_ok) {
            failures.push(format!("(iii) selection at eps = {}", row.eps));
        }
        if k.moments.iter().take(m as usize).any(|v| v.abs() > 1e-8) {
            failures.push(format!("(iv) moments of phi_{m}"));
        }
        rows.push(json!({"eps": num(row.eps), "b": num(row.b), "m": m, "capped": row.capped, "l1": num(k.l1)}));
    }
    failures.dedup();
    let status = if failures.is_empty() { Status::Holds } else { Status::Fails };
    let mut v = Verdict::numeric(status, 0.95)
        .with_detail("properties (i) to (iv) checked; the L1 mass is reported per eps")
        .with_evidence("truncation", &net.truncation);
    if let Some(f) = failures.first() {
        v = v.with_evidence("first failure", f);
    }
    Ok(Outcome::of(v)
        .with("b", json!(b.to_canonical()))
        .with("requested_cap", json!(net.requested_cap))
        .with("cap", json!(net.cap))
        .with("kernels", Value::Array(kernels))
        .with("rows", Value::Array(rows))
        .with("notes", json!(net.notes))
        .grid(*grid))
}

fn run_ode(spec: &OdeSpec, grid: &GridConfig) -> agcal_core::Result<Outcome> {
    let alg = AlgebraSpec::new(spec.solution.clone(), spec.negligible.clone())?;
    let entries = spec
        .matrix
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| GenNumber::new(Net::symbolic(e.clone()), alg.clone()))
                .collect::<agcal_core::Result<Vec<_>>>()
        })
        .collect::<agcal_core::Result<Vec<_>>>()?;
    let a = GenMatrix::new(entries, spec.gauge.clone())?;
    let c = spec
        .initial
        .iter()
        .map(|e| GenNumber::new(Net::symbolic(e.clone()), alg.clone()))
        .collect::<agcal_core::Result<Vec<_>>>()?;
    let p = OdeProblem::new(a, c, spec.t0, spec.gauge.clone(), alg, spec.domain)?;
    let eg = grid.points();
    let tg = t_grid(spec.t_range.0, spec.t_range.1, spec.t_count);
    let sol = solve_linear(&p, &eg, &tg)?;
    let d = p.dim();
    let mut worst_rel = 0.0f64;
    let mut table = Vec::with_capacity(sol.table.len());
    for row in &sol.table {
        let mut cells = vec![num(row.eps), num(row.t)];
        cells.extend(row.x.iter().map(|v| num(*v)));
        if d == 1 {
            let a0 = p.matrix().at(row.eps)?.get(0, 0);
            let c0 = p.initial_at(row.eps)?[0];
            let closed = c0 * (-(a0) * (row.t - spec.t0)).exp();
            if closed.is_finite() {
                let rel = (row.x[0] - closed).abs() / closed.abs().max(f64::MIN_POSITIVE);
                worst_rel = worst_rel.max(rel);
                cells.push(num(closed));
                cells.push(num(rel));
            }
        }
        table.push(Value::Array(cells));
    }
    let moderate = verify_moderate_exp_b(&sol, &spec.gauge, &spec.kset, spec.alpha_max)?;
    let budget = FnBudget::for_domain(spec.domain)
        .with_kset(spec.kset.clone())
        .with_alpha_max(spec.alpha_max);
    let mut in_b = Vec::new();
    for f in &sol.components {
        in_b.push(is_moderate_family(f, &spec.gauge, &budget)?);
    }
    let in_b = Verdict::all(in_b);
    let mut v = sol.certificate.clone().and(moderate.clone());
    if d == 1 {
        let closed_ok = if worst_rel <= 1e-9 { Status::Holds } else { Status::Fails };
        v = v.and(Verdict::numeric(closed_ok, 0.99));
    }
    let v = v
        .with_detail("bound certificate, moderateness in the exponential gauge and the closed form")
        .with_evidence("truncation", moderate.evidence("truncation").unwrap_or(""));
    let ev = |k: &str| moderate.evidence(k).map_or(Value::Null, |s| json!(s));
    let mut columns = vec!["eps".to_string(), "t".to_string()];
    columns.extend((1..=d).map(|i| format!("x{i}")));
    if d == 1 {
        columns.push("closed_form".into());
        columns.push("relative_error".into());
    }
    Ok(Outcome::of(v)
        .with("columns", json!(columns))
        .with("table", Value::Array(table))
        .with("truncated_eps", Value::Array(sol.truncated.iter().map(|e| num(*e)).collect()))
        .with("max_relative_error", if d == 1 { num(worst_rel) } else { Value::Null })
        .with("bound_certificate", verdict_json(&sol.certificate))
        .with("exp_gauge", json!(exp_gauge(&spec.gauge).literal()))
        .with("moderate_in_exp_gauge", json!(moderate.status.name()))
        .with("moderate_in_coefficient_gauge", json!(in_b.status.name()))
        .with("corrected_envelope_violations", ev("corrected envelope violations"))
        .with("coarse_envelope_violations", ev("coarse envelope violations"))
        .with("envelope_samples", ev("envelope samples"))
        .grid(*grid))
}

/// A verdict as JSON with its evidence keys made unique.
pub fn verdict_json(v: &Verdict) -> Value {
    let mut ev = serde_json::Map::new();
    for (k, val) in &v.evidence {
        let mut key = k.clone();
        let mut n = 2;
        while ev.contains_key(&key) {
            key = format!("{k} #{n}");
            n += 1;
        }
        ev.insert(key, json!(val));
    }
    json!({
        "status": v.status.name(),
        "mode": v.mode.name(),
        "confidence": v.confidence.map_or(Value::Null, num),
        "witness": v.witness.map_or(Value::Null, |w| json!({"h": w.h.map_or(Value::Null, num), "eps0": num(w.eps0)})),
        "counterexample": v.counterexample.as_ref().map_or(Value::Null, |c| Value::Array(c.iter().map(|x| num(*x)).collect())),
        "detail": v.detail,
        "evidence": Value::Object(ev),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_raw;

    fn raw(body: &str) -> RawCommand {
        parse_raw(body).unwrap().1.remove(0)
    }

    #[test]
    fn kind_names_round_trip() {
        for k in Kind::ALL {
            assert_eq!(Kind::from_name(k.name()), Some(k));
        }
        assert_eq!(Kind::from_name("frobnicate"), None);
    }

    #[test]
    fn list_splitting_respects_nesting() {
        let parts = split_top("[[1, 2], [3, 4]], x");
        assert_eq!(parts, vec![(0, "[[1, 2], [3, 4]]"), (18, "x")]);
        let r = raw("command: ode\n  matrix: [[eps^-1, 0], [0, 1]]\n");
        let items = bracket_items(&r.params[0], 0, &r.params[0].value).unwrap();
        assert_eq!(items[1], (14, "[0, 1]"));
    }

    #[test]
    fn literal_errors_point_into_the_value() {
        let r = raw("command: compare\n  x: eps^-2 + )\n  y: 1\n");
        let e = Command::validate(Kind::Compare, &r).unwrap_err();
        assert_eq!((e.line, e.column), (2, 15));
        let r = raw("command: ode\n  matrix: [[1, 2], [3]]\n  initial: [1, 1]\n  gauge: powers(eps^-1)\n  solution: powers(eps^-1)\n");
        assert!(Command::validate(Kind::Ode, &r).unwrap_err().message.contains("square"));
        let r = raw("command: necessity\n  b: eps^-1\n  z: powers(eps^-1)\n  m: 4..1\n");
        assert!(Command::validate(Kind::Necessity, &r).is_err());
    }

    #[test]
    fn relation_expectations_only_for_compare() {
        let r = raw("command: moderate\n  net: 1\n  gauge: powers(eps^-1)\n  expect: Both\n");
        assert!(Command::validate(Kind::Moderate, &r).is_err());
        let r = raw("command: compare\n  x: 1\n  y: eps\n  expect: YbigOofX\n");
        let v = Command::validate(Kind::Compare, &r).unwrap();
        assert_eq!(v.expect, Expect::Relation(OrderRelation::YbigOofX));
    }

    #[test]
    fn non_finite_numbers_become_strings() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(f64::NEG_INFINITY), json!("-inf"));
        assert_eq!(num(f64::NAN), json!("nan"));
        assert_eq!(num(0.5), json!(0.5));
    }

    #[test]
    fn repeated_evidence_keys_are_kept() {
        let v = Verdict::exact(Status::Holds).with_evidence("k", 1).with_evidence("k", 2);
        let j = verdict_json(&v);
        assert_eq!(j["evidence"]["k"], "1");
        assert_eq!(j["evidence"]["k #2"], "2");
    }
}
