//! Seeded randomized law suites over the symbolic fragment.

use agcal_core::index_core::{big_o, limit_of, order_gt, Limit, Net};
use agcal_core::linalg::{expm, Matrix};
use agcal_core::ode_gen::entry_bound;
use agcal_core::rate_dsl::{compare_o, normalize, parse, OrderRelation};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    BigO,
    Order,
    Limit,
    MatrixBound,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::BigO, Suite::Order, Suite::Limit, Suite::MatrixBound];

    pub fn name(self) -> &'static str {
        match self {
            Suite::BigO => "big-o",
            Suite::Order => "order",
            Suite::Limit => "limit",
            Suite::MatrixBound => "matrix-bound",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub seed: u64,
    /// Individual law instances evaluated.
    pub checks: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    /// Named counters specific to the suite.
    pub counters: Vec<(String, usize)>,
}

impl SuiteReport {
    fn new(suite: Suite, cases: usize, seed: u64) -> SuiteReport {
        SuiteReport {
            suite,
            cases,
            seed,
            checks: 0,
            failures: 0,
            first_failure: None,
            counters: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn bump(&mut self, name: &str) {
        match self.counters.iter_mut().find(|(k, _)| k == name) {
            Some((_, v)) => *v += 1,
            None => self.counters.push((name.to_string(), 1)),
        }
    }
}

pub fn run_suite(suite: Suite, cases: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = SuiteReport::new(suite, cases, seed);
    for _ in 0..cases {
        match suite {
            Suite::BigO => big_o_case(&mut rng, &mut r),
            Suite::Order => order_case(&mut rng, &mut r),
            Suite::Limit => limit_case(&mut rng, &mut r),
            Suite::MatrixBound => matrix_case(&mut rng, &mut r),
        }
    }
    if suite == Suite::MatrixBound {
        zero_matrix_case(&mut r);
    }
    r
}

/// A positive net of the fragment: c·ε^a·log(1/ε)^j·exp(h·ε^-m)·exp@2(1/ε)^k
/// with the last three factors optional.
pub fn random_positive(rng: &mut impl Rng) -> String {
    let mut s = format!(
        "{}/{} * eps^({}/{})",
        rng.gen_range(1..10),
        rng.gen_range(1..5),
        rng.gen_range(-6..=6),
        rng.gen_range(1..=3)
    );
    if rng.gen_bool(0.5) {
        let j = [-2, -1, 1, 2][rng.gen_range(0..4)];
        s.push_str(&format!(" * log(1/eps)^({j})"));
    }
    if rng.gen_bool(0.25) {
        s.push_str(&format!(" * exp({} * eps^(-{}))", rng.gen_range(1..4), rng.gen_range(1..3)));
    }
    if rng.gen_bool(0.1) {
        let k = [-1, 1, 2][rng.gen_range(0..3)];
        s.push_str(&format!(" * exp@2(1/eps)^({k})"));
    }
    s
}

/// A positive net that is O(1).
pub fn random_bounded(rng: &mut impl Rng) -> String {
    let mut s = format!(
        "{}/{} * eps^({}/{})",
        rng.gen_range(1..10),
        rng.gen_range(1..5),
        rng.gen_range(0..=4),
        rng.gen_range(1..=3)
    );
    if rng.gen_bool(0.3) {
        s.push_str(&format!(" * log(1/eps)^(-{})", rng.gen_range(1..3)));
    }
    s
}

fn nonzero_rational(rng: &mut impl Rng) -> String {
    let n = loop {
        let n = rng.gen_range(-9..=9);
        if n != 0 {
            break n;
        }
    };
    format!("({}/{})", n, rng.gen_range(1..5))
}

/// x = O(y) decided by the exact oracle; `None` outside the fragment.
fn rel(x: &str, y: &str) -> Option<OrderRelation> {
    let nx = normalize(&parse(x).ok()?).ok()?;
    let ny = normalize(&parse(y).ok()?).ok()?;
    Some(compare_o(&nx, &ny))
}

fn is_o(x: &str, y: &str) -> bool {
    rel(x, y).is_some_and(|r| r.x_is_o_of_y())
}

fn big_o_case(rng: &mut ChaCha8Rng, r: &mut SuiteReport) {
    let x = random_positive(rng);
    let y = random_positive(rng);
    let z = random_positive(rng);
    let (w1, w2, w3) = (random_bounded(rng), random_bounded(rng), random_bounded(rng));
    let a = format!("({x}) * ({w1})");
    let b = format!("({y}) * ({w2})");
    // (i)
    r.check(rel(&x, &x) == Some(OrderRelation::Both), || format!("(i) {x}"));
    // (ii) on the random triple and on a forced chain
    if is_o(&x, &y) && is_o(&y, &z) {
        r.bump("transitivity premises");
        r.check(is_o(&x, &z), || format!("(ii) {x} | {y} | {z}"));
    }
    let zz = format!("({y}) * ({z}) + ({y})");
    r.check(is_o(&a, &x) && is_o(&x, &format!("({x}) + ({y})")), || format!("(ii) chain {x}"));
    r.check(is_o(&b, &zz) || !is_o(&y, &zz), || format!("(ii) {b} | {y} | {zz}"));
    // (iii) both inclusions
    let xy = format!("({x}) * ({y})");
    r.check(is_o(&format!("({a}) * ({b})"), &xy), || format!("(iii) {a} * {b}"));
    let yw = format!("({y}) * ({w3})");
    r.check(is_o(&yw, &y) && is_o(&format!("({x}) * ({yw})"), &xy), || format!("(iii) split {x} {y}"));
    // (iv)
    let sum_abs = format!("abs({x}) + abs({y})");
    r.check(is_o(&format!("({a}) + ({b})"), &sum_abs), || format!("(iv) {a} + {b}"));
    r.check(is_o(&format!("abs({x})"), &x) && is_o(&format!("abs({y})"), &y), || format!("(iv) abs {x} {y}"));
    // (v)
    r.check(is_o(&format!("({x}) * ({b})"), &xy), || format!("(v) {x} * {b}"));
    // (vi)
    let a2 = format!("({x}) * ({w2})");
    r.check(is_o(&format!("({a}) + ({a2})"), &x), || format!("(vi) {a} + {a2}"));
    // (vii), x and y are positive
    r.check(
        is_o(&format!("({x}) + ({b})"), &format!("({x}) + ({y})")),
        || format!("(vii) {x} + {b}"),
    );
    // (viii)
    let k = nonzero_rational(rng);
    r.check(rel(&format!("{k} * ({x})"), &x) == Some(OrderRelation::Both), || format!("(viii) {k} {x}"));
    // (ix), k may be zero
    let k0 = if rng.gen_bool(0.2) { "0".to_string() } else { nonzero_rational(rng) };
    r.check(is_o(&format!("{k0} * ({a})"), &x), || format!("(ix) {k0} {a}"));
}

fn net(s: &str) -> Option<Net> {
    Net::parse(s).ok()
}

fn gt(i: &str, j: &str) -> Option<bool> {
    order_gt(&net(i)?, &net(j)?).ok().map(|v| v.holds())
}

fn order_case(rng: &mut ChaCha8Rng, r: &mut SuiteReport) {
    let i = random_positive(rng);
    let j = random_positive(rng);
    let k = random_positive(rng);
    let z = random_positive(rng);
    // (i)
    r.check(gt(&i, &i) == Some(false), || format!("irreflexive {i}"));
    // (ii) forced chain and random triple
    let lo = k.clone();
    let mid = format!("({lo}) + ({j})");
    let hi = format!("({mid}) + ({z})");
    r.check(
        gt(&hi, &mid) == Some(true) && gt(&mid, &lo) == Some(true) && gt(&hi, &lo) == Some(true),
        || format!("transitive chain {lo} | {j} | {z}"),
    );
    if gt(&i, &j) == Some(true) && gt(&j, &k) == Some(true) {
        r.bump("transitivity premises");
        r.check(gt(&i, &k) == Some(true), || format!("transitive {i} | {j} | {k}"));
    }
    // (iii)
    let (small, big) = if gt(&k, &j) == Some(true) { (j.clone(), k.clone()) } else { (k.clone(), format!("({k}) + ({j})")) };
    r.check(
        gt(&format!("({i}) * ({big})"), &format!("({i}) * ({small})")) == Some(true),
        || format!("product {i} | {big} | {small}"),
    );
    // (iv)
    let i2 = format!("({j}) + ({i})");
    let k2 = format!("({z}) + ({k})");
    r.check(
        gt(&format!("({i2}) + ({k2})"), &format!("({j}) + ({z})")) == Some(true),
        || format!("sum {i2} | {k2}"),
    );
    // (v) with j ≥ 0
    if gt(&i, &j) == Some(true) {
        let v = big_o(&net(&j).expect("fragment"), &net(&i).expect("fragment"));
        r.check(v.is_ok_and(|v| v.holds()), || format!("order implies big-O {j} | {i}"));
    }
}

/// A net with a known finite limit: c + s with s infinitesimal.
/// A net with a finite rational limit, the limit value and its literal.
fn random_finite(rng: &mut ChaCha8Rng) -> (String, f64, String) {
    let n = rng.gen_range(-6..=6);
    let d = rng.gen_range(1..5);
    let c = n as f64 / d as f64;
    let sign = if rng.gen_bool(0.5) { "" } else { "-1 * " };
    let s = match rng.gen_range(0..3) {
        0 => format!("{}/{} * eps^({}/{})", rng.gen_range(1..10), rng.gen_range(1..5), rng.gen_range(1..=6), rng.gen_range(1..=3)),
        1 => format!("log(1/eps)^(-{})", rng.gen_range(1..3)),
        _ => format!("exp(-{} * eps^-1)", rng.gen_range(1..4)),
    };
    (format!("({n}/{d}) + {sign}{s}"), c, format!("{n}/{d}"))
}

fn limit_is(s: &str, want: f64) -> bool {
    match net(s).map(|n| limit_of(&n)) {
        Some(Limit::Finite(v)) => (v - want).abs() <= 1e-12 * (1.0 + want.abs()),
        _ => false,
    }
}

fn limit_case(rng: &mut ChaCha8Rng, r: &mut SuiteReport) {
    let (f, lf, lit) = random_finite(rng);
    let (g, lg, _) = random_finite(rng);
    r.check(limit_is(&f, lf), || format!("limit of {f}"));
    r.check(limit_is(&format!("({f}) + ({g})"), lf + lg), || format!("sum {f} | {g}"));
    r.check(limit_is(&format!("({f}) * ({g})"), lf * lg), || format!("product {f} | {g}"));
    let c = rng.gen_range(-20..=20);
    r.check(limit_is(&format!("{c}"), c as f64), || format!("constant {c}"));
    if lg != 0.0 {
        r.bump("quotients");
        r.check(limit_is(&format!("({f}) / ({g})"), lf / lg), || format!("quotient {f} | {g}"));
    }
    let a = rng.gen_range(1..=4);
    let lo = format!("({lit}) - eps^{a}");
    let hi = format!("({lit}) + eps^{a}");
    let sign = if rng.gen_bool(0.5) { "+" } else { "-" };
    let h = format!("({lit}) {sign} 1/2 * eps^{}", a + 1);
    if gt(&h, &lo) == Some(true) && gt(&hi, &h) == Some(true) {
        r.bump("squeeze premises");
        r.check(limit_is(&h, lf), || format!("squeeze {h}"));
    } else {
        r.check(false, || format!("squeeze premises {lo} < {h} < {hi}"));
    }
    if lf > 0.0 {
        r.bump("positive limits");
        r.check(gt(&f, "0") == Some(true), || format!("positive limit {f}"));
    }
}

fn matrix_case(rng: &mut ChaCha8Rng, r: &mut SuiteReport) {
    let d = rng.gen_range(1..=4);
    let rows: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(-2.0..=2.0)).collect()).collect();
    let a = Matrix::from_rows(&rows).expect("square");
    let big = a.max_abs() >= 1.0;
    if big {
        r.bump("matrices with M >= 1");
    }
    for step in 0..=12 {
        let t = -3.0 + 0.5 * step as f64;
        let Ok(e) = expm(&a.scale(t)) else {
            r.check(false, || format!("expm failed for d = {d} at t = {t}"));
            continue;
        };
        let (coarse, corrected) = entry_bound(&a, t);
        let worst = e.max_abs();
        r.check(worst <= corrected * (1.0 + 1e-9), || {
            format!("corrected bound {corrected} < {worst} (d = {d}, t = {t})")
        });
        if big {
            r.check(worst <= coarse * (1.0 + 1e-9), || format!("coarse bound {coarse} < {worst} (d = {d}, t = {t})"));
        } else if worst > coarse * (1.0 + 1e-9) {
            r.bump("coarse bound violations with M < 1");
        }
    }
}

fn zero_matrix_case(r: &mut SuiteReport) {
    let z = Matrix::zeros(2);
    let e = expm(&z).expect("finite");
    let (coarse, corrected) = entry_bound(&z, 1.0);
    let flagged = e.max_abs() == 1.0 && coarse == 0.0 && corrected == 1.0;
    r.check(flagged, || "zero matrix counterexample not reproduced".into());
    if flagged {
        r.bump("coarse bound counterexample (A = 0) flagged");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_stay_in_the_fragment() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_positive(&mut rng);
            let b = random_bounded(&mut rng);
            assert!(normalize(&parse(&p).unwrap()).is_ok(), "{p}");
            assert!(is_o(&b, "1"), "{b}");
        }
    }

    #[test]
    fn suites_are_deterministic_and_clean() {
        for s in Suite::ALL {
            let a = run_suite(s, 20, 3);
            let b = run_suite(s, 20, 3);
            assert_eq!(a, b);
            assert_eq!(a.failures, 0, "{}: {:?}", s.name(), a.first_failure);
        }
    }
}
