//! Linear homogeneous systems x' + A·x = 0 with generalized constant
//! coefficients.

use crate::gauges::{exp_gauge, ideal_compatible, is_negligible_num, AlgebraSpec, Gauge};
use crate::gen_functions::{
    is_moderate_family, sup_samples, FnBudget, GenFunction, Interval, SmoothFamily, SupOptions,
};
use crate::gen_numbers::{is_bounded_by, GenNumber};
use crate::index_core::{GridConfig, Net, Status, Verdict};
use crate::linalg::{expm_with, Matrix};
use crate::math;
use crate::profiles::SmoothProfile;
use crate::rate_dsl::{approx_q, exact_q, RateExpr, Q};
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

/// Exact time-derivative orders supplied by solution families.
pub const SOLUTION_DERIVS: u32 = 8;

/// A square matrix of generalized numbers, certified bounded by a gauge.
#[derive(Clone, Debug)]
pub struct GenMatrix {
    entries: Vec<Vec<GenNumber>>,
    bounded_by: Gauge,
}

impl GenMatrix {
    pub fn new(entries: Vec<Vec<GenNumber>>, bounded_by: Gauge) -> Result<GenMatrix> {
        let d = entries.len();
        if d == 0 || entries.iter().any(|r| r.len() != d) {
            return Err(Error::Argument("coefficient matrix must be square and non-empty".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                let v = is_bounded_by(a, &bounded_by)?;
                if !v.holds() {
                    return Err(Error::Precondition(format!(
                        "entry ({i}, {j}) = {a} is not bounded by {bounded_by} ({})",
                        v.status.name()
                    )));
                }
            }
        }
        Ok(GenMatrix { entries, bounded_by })
    }

    /// Entries given as expression literals, all read in `spec`.
    pub fn parse(rows: &[Vec<&str>], spec: &AlgebraSpec, bounded_by: Gauge) -> Result<GenMatrix> {
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|s| GenNumber::parse(s, spec.clone())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        GenMatrix::new(entries, bounded_by)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &GenNumber {
        &self.entries[i][j]
    }

    pub fn bounded_by(&self) -> &Gauge {
        &self.bounded_by
    }

    /// A_ε.
    pub fn at(&self, eps: f64) -> Result<Matrix> {
        let rows = self
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|a| {
                        a.rep()
                            .value(eps)
                            .map_err(|e| Error::Numeric(format!("entry {a} at eps = {eps}: {e:?}")))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(&rows)
    }

    fn exprs(&self) -> Option<Vec<Vec<RateExpr>>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|a| a.rep().exact_expr()).collect())
            .collect()
    }
}

/// x' + A·x = 0, x(t0) = c.
#[derive(Clone, Debug)]
pub struct OdeProblem {
    a: GenMatrix,
    c: Vec<GenNumber>,
    t0: f64,
    b: Gauge,
    spec: AlgebraSpec,
    domain: Interval,
}

impl OdeProblem {
    /// Certifies that c is bounded by B and that R_M(e^B) ⊆ R_M(B') ⊆ R_M(Z').
    pub fn new(
        a: GenMatrix,
        c: Vec<GenNumber>,
        t0: f64,
        b: Gauge,
        spec: AlgebraSpec,
        domain: Interval,
    ) -> Result<OdeProblem> {
        if c.len() != a.dim() {
            return Err(Error::Argument(format!(
                "initial vector has {} components, matrix has dimension {}",
                c.len(),
                a.dim()
            )));
        }
        if !(domain.0 < t0 && t0 < domain.1) {
            return Err(Error::Argument(format!(
                "t0 = {t0} is not inside ({}, {})",
                domain.0, domain.1
            )));
        }
        for (i, ci) in c.iter().enumerate() {
            let v = is_bounded_by(ci, &b)?;
            if !v.holds() {
                return Err(Error::Precondition(format!(
                    "initial component {i} = {ci} is not bounded by {b}"
                )));
            }
        }
        let eb = exp_gauge(&b);
        if !ideal_compatible(&eb, &spec.b)?.holds() {
            return Err(Error::Precondition(format!("R_M({eb}) is not contained in R_M({})", spec.b)));
        }
        if !ideal_compatible(&spec.b, &spec.z)?.holds() {
            return Err(Error::Precondition(format!(
                "R_M({}) is not contained in R_M({})",
                spec.b, spec.z
            )));
        }
        Ok(OdeProblem {
            a,
            c,
            t0,
            b,
            spec,
            domain,
        })
    }

    pub fn matrix(&self) -> &GenMatrix {
        &self.a
    }
    pub fn initial(&self) -> &[GenNumber] {
        &self.c
    }
    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn coefficient_gauge(&self) -> &Gauge {
        &self.b
    }
    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }
    pub fn domain(&self) -> Interval {
        self.domain
    }
    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn initial_at(&self, eps: f64) -> Result<Vec<f64>> {
        self.c
            .iter()
            .map(|ci| {
                ci.rep()
                    .value(eps)
                    .map_err(|e| Error::Numeric(format!("initial value {ci} at eps = {eps}: {e:?}")))
            })
            .collect()
    }
}

/// (coarse bound M·e^{dM|t|}, corrected bound 1 + (e^{dM|t|} − 1)/d) for
/// the entries of e^{-tA}, with M = max |a_ij|.
pub fn entry_bound(a: &Matrix, t: f64) -> (f64, f64) {
    let d = a.dim() as f64;
    let m = a.max_abs();
    let e = math::exp(d * m * math::abs(t));
    (m * e, 1.0 + (e - 1.0) / d)
}

/// e^{-(t - t0)A}·c.
fn propagate(a: &Matrix, c: &[f64], t: f64, t0: f64, extra: u32) -> Result<Vec<f64>> {
    let e = expm_with(&a.scale(-(t - t0)), extra)?;
    let x = e.apply(c);
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::Numeric(format!("solution overflows at t = {t}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SolveOptions {
    /// Squarings beyond the minimum in the matrix exponential.
    pub extra_squarings: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveRow {
    pub eps: f64,
    pub t: f64,
    pub x: Vec<f64>,
}

/// Per-ε solutions on a grid, their families, and the bound certificate.
#[derive(Clone, Debug)]
pub struct OdeSolution {
    pub components: Vec<SmoothFamily>,
    pub table: Vec<SolveRow>,
    /// Grid values of ε dropped because the solution overflows there.
    pub truncated: Vec<f64>,
    /// Measured grid sup against the corrected analytic bound.
    pub certificate: Verdict,
    problem: OdeProblem,
}

impl OdeSolution {
    pub fn problem(&self) -> &OdeProblem {
        &self.problem
    }

    /// The components as generalized functions of t in the solution algebra.
    pub fn gen_functions(&self) -> Result<Vec<GenFunction>> {
        self.components
            .iter()
            .map(|f| GenFunction::with_override(f.clone(), self.problem.spec.clone(), self.problem.domain))
            .collect()
    }
}

fn solution_family(p: &OdeProblem, i: usize, opts: SolveOptions) -> SmoothFamily {
    let a = p.a.clone();
    let c = p.c.clone();
    let t0 = p.t0;
    let extra = opts.extra_squarings;
    SmoothFamily::black_box(
        format!("x_{}", i + 1),
        SOLUTION_DERIVS,
        SOLUTION_DERIVS,
        move |k, eps, t| {
            let value = || -> Result<f64> {
                let ae = a.at(eps)?;
                let ce = c
                    .iter()
                    .map(|ci| ci.rep().value(eps).map_err(|e| Error::Numeric(format!("{e:?}"))))
                    .collect::<Result<Vec<f64>>>()?;
                let mut x = propagate(&ae, &ce, t, t0, extra)?;
                let minus = ae.scale(-1.0);
                for _ in 0..k {
                    x = minus.apply(&x);
                }
                Ok(x[i])
            };
            value().unwrap_or(f64::NAN)
        },
    )
}

/// x_ε(t) = e^{-(t - t0)A_ε}·c_ε on an (ε, t) grid.
pub fn solve_linear(p: &OdeProblem, eps_grid: &[f64], t_grid: &[f64]) -> Result<OdeSolution> {
    solve_linear_with(p, eps_grid, t_grid, SolveOptions::default())
}

pub fn solve_linear_with(p: &OdeProblem, eps_grid: &[f64], t_grid: &[f64], opts: SolveOptions) -> Result<OdeSolution> {
    let mut table = Vec::new();
    let mut truncated = Vec::new();
    let mut violations = 0usize;
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for &eps in eps_grid {
        let ae = p.a.at(eps)?;
        let ce = p.initial_at(eps)?;
        let cnorm: f64 = ce.iter().map(|v| math::abs(*v)).sum();
        let mut rows = Vec::with_capacity(t_grid.len());
        let mut ok = true;
        for &t in t_grid {
            match propagate(&ae, &ce, t, p.t0, opts.extra_squarings) {
                Ok(x) => rows.push(SolveRow { eps, t, x }),
                Err(Error::Numeric(_)) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !ok {
            truncated.push(eps);
            continue;
        }
        for r in &rows {
            let bound = entry_bound(&ae, r.t - p.t0).1 * cnorm;
            for v in &r.x {
                checked += 1;
                let excess = math::abs(*v) - bound * (1.0 + 1e-12);
                if excess > 0.0 {
                    violations += 1;
                    worst = worst.max(excess);
                }
            }
        }
        table.extend(rows);
    }
    let status = if violations == 0 { Status::Holds } else { Status::Fails };
    let certificate = Verdict::numeric(status, 0.95)
        .with_detail("grid values against (1 + (e^{dM|t - t0|} - 1)/d)·sum|c_j|")
        .with_evidence("checked", checked)
        .with_evidence("violations", violations)
        .with_evidence("worst excess", worst)
        .with_evidence("truncated eps", truncated.len());
    let components = (0..p.dim()).map(|i| solution_family(p, i, opts)).collect();
    Ok(OdeSolution {
        components,
        table,
        truncated,
        certificate,
        problem: p.clone(),
    })
}

/// Moderateness of the solution in e^B, together with the check that the
/// analytic envelopes dominate the measured sup on each compact set.
pub fn verify_moderate_exp_b(sol: &OdeSolution, b: &Gauge, kset: &[Interval], alpha_max: u32) -> Result<Verdict> {
    let p = &sol.problem;
    let g = exp_gauge(b);
    let budget = FnBudget::for_domain(p.domain)
        .with_kset(kset.to_vec())
        .with_alpha_max(alpha_max);
    let mut parts = Vec::new();
    for f in &sol.components {
        parts.push(is_moderate_family(f, &g, &budget)?);
    }
    let moderate = Verdict::all(parts);
    let opts = SupOptions {
        grid: budget.sup.grid,
        x_points: 41,
    };
    let (mut coarse_bad, mut corrected_bad, mut checked) = (0usize, 0usize, 0usize);
    for &k in kset {
        let r = math::abs(k.0 - p.t0).max(math::abs(k.1 - p.t0));
        for f in &sol.components {
            let (pts, _) = sup_samples(f, k, 0, &opts);
            for (eps, s) in pts {
                let ae = p.a.at(eps)?;
                let cn: f64 = p.initial_at(eps)?.iter().map(|v| math::abs(*v)).sum();
                let (coarse, corrected) = entry_bound(&ae, r);
                checked += 1;
                if s > coarse * cn * (1.0 + 1e-12) {
                    coarse_bad += 1;
                }
                if s > corrected * cn * (1.0 + 1e-12) {
                    corrected_bad += 1;
                }
            }
        }
    }
    let envelope = if corrected_bad == 0 {
        Verdict::numeric(Status::Holds, 0.95)
    } else {
        Verdict::numeric(Status::Fails, 0.95)
    };
    let truncation = budget.truncation(alpha_max, false);
    Ok(moderate
        .and(envelope)
        .with_evidence("envelope samples", checked)
        .with_evidence("corrected envelope violations", corrected_bad)
        .with_evidence("coarse envelope violations", coarse_bad)
        .with_evidence("gauge", &g)
        .with_evidence("truncation", truncation))
}

fn to_q(x: f64) -> Option<Q> {
    exact_q(x).or_else(|| approx_q(x, 1_000_000))
}

fn sum_abs(items: &[RateExpr]) -> RateExpr {
    items
        .iter()
        .map(|e| RateExpr::abs(e.clone()))
        .reduce(RateExpr::add)
        .unwrap_or_else(|| RateExpr::num(0))
}

/// Frobenius norm √(Σ a_ij²) as an expression.
fn frobenius_expr(a: &[Vec<RateExpr>]) -> RateExpr {
    let sq: Vec<RateExpr> = a
        .iter()
        .flatten()
        .map(|e| RateExpr::pow(e.clone(), Q::from_integer(2)))
        .collect();
    match sq.into_iter().reduce(RateExpr::add) {
        Some(s) => RateExpr::pow(s, Q::new(1, 2)),
        None => RateExpr::num(0),
    }
}

/// sup_K|x_ε| ≤ e^{R|A_ε|}|v_ε| + R·e^{R|A_ε|}·sup_K|n_ε| with |·| the
/// Frobenius norm and R = sup|K − t0|. Holds when this bound is
/// Z'-negligible.
pub fn uniqueness_residual(p: &OdeProblem, k: Interval, n_sup: &[Net], v: &[Net]) -> Result<Verdict> {
    let r = math::abs(k.0 - p.t0).max(math::abs(k.1 - p.t0));
    let z = &p.spec.z;
    let neg = |nets: &[Net]| -> Result<Verdict> {
        let mut parts = Vec::new();
        for x in nets {
            parts.push(is_negligible_num(x, z)?);
        }
        Ok(Verdict::all(parts))
    };
    let v_neg = neg(v)?;
    let n_neg = neg(n_sup)?;
    let exprs = (
        p.a.exprs(),
        v.iter().map(|x| x.exact_expr()).collect::<Option<Vec<_>>>(),
        n_sup.iter().map(|x| x.exact_expr()).collect::<Option<Vec<_>>>(),
        to_q(r),
    );
    let bound_net = if let (Some(a), Some(ve), Some(ne), Some(rq)) = exprs {
        let growth = RateExpr::exp(RateExpr::mul(RateExpr::Num(rq), frobenius_expr(&a)));
        let mut bound = RateExpr::mul(growth.clone(), sum_abs(&ve));
        if !ne.is_empty() {
            bound = RateExpr::add(
                bound,
                RateExpr::mul(RateExpr::mul(RateExpr::Num(rq), growth), sum_abs(&ne)),
            );
        }
        Net::symbolic(bound).with_index(z.index().clone())
    } else {
        let a = p.a.clone();
        let (v, n) = (v.to_vec(), n_sup.to_vec());
        Net::callable(move |eps| {
            let Ok(ae) = a.at(eps) else { return f64::NAN };
            let g = math::exp(r * ae.frobenius());
            let vs: f64 = v.iter().map(|x| math::abs(x.value(eps).unwrap_or(f64::NAN))).sum();
            let ns: f64 = n.iter().map(|x| math::abs(x.value(eps).unwrap_or(f64::NAN))).sum();
            g * vs + r * g * ns
        })
        .with_index(z.index().clone())
    };
    let verdict = is_negligible_num(&bound_net, z)?;
    let statement = if verdict.holds() {
        "uniqueness bound is negligible"
    } else {
        "uniqueness not certified for this perturbation"
    };
    Ok(verdict
        .with_evidence("norm", "Frobenius")
        .with_evidence("R", r)
        .with_evidence("v negligible", v_neg.status.name())
        .with_evidence("n negligible", n_neg.status.name())
        .with_evidence("statement", statement))
}

/// The perturbation (n, v) of a candidate: n = sup_K |x' + A x| and v = x(t0).
pub fn candidate_perturbation(candidate: &[SmoothFamily], p: &OdeProblem, k: Interval) -> (Vec<Net>, Vec<Net>) {
    let cand: Arc<Vec<SmoothFamily>> = Arc::new(candidate.to_vec());
    let a = p.a.clone();
    let t0 = p.t0;
    let width = k.1 - k.0;
    let mut n = Vec::new();
    let mut v = Vec::new();
    for i in 0..candidate.len() {
        let (c1, a1) = (cand.clone(), a.clone());
        n.push(Net::callable(move |eps| {
            let Ok(ae) = a1.at(eps) else { return f64::NAN };
            let mut s = 0.0f64;
            for j in 0..=40 {
                let t = k.0 + width * j as f64 / 40.0;
                let x: Vec<f64> = c1.iter().map(|f| f.eval(eps, t)).collect();
                let ax = ae.apply(&x);
                let d = c1[i].eval_deriv(1, eps, t, width.max(1e-3));
                s = s.max(math::abs(d + ax[i]));
            }
            s
        }));
        let c2 = cand.clone();
        v.push(Net::callable(move |eps| c2[i].eval(eps, t0)));
    }
    (n, v)
}

/// For `probes` members b of B, checks that t ↦ e^{b_ε t} is moderate in
/// B' on K = [−1, 1].
pub fn minimality_check(b: &Gauge, bprime: &Gauge, probes: usize) -> Result<Verdict> {
    let budget = FnBudget::for_domain((-2.0, 2.0))
        .with_kset(vec![(-1.0, 1.0)])
        .with_alpha_max(1);
    let mut parts = Vec::new();
    let mut failing: Vec<String> = Vec::new();
    let members = b.members(probes);
    for m in &members {
        let fam = SmoothFamily::kernel(SmoothProfile::Exp, m.clone(), RateExpr::num(1), 0.0);
        let v = is_moderate_family(&fam, bprime, &budget)?;
        if v.fails() {
            failing.push(format!("{m}"));
        }
        parts.push(v.with_evidence("probe", m));
    }
    let probed: Vec<String> = members.iter().map(|m| format!("{m}")).collect();
    let mut out = Verdict::all(parts)
        .with_evidence("probes", probed.join(", "))
        .with_evidence("truncation", budget.truncation(1, false));
    if !failing.is_empty() {
        out = out.with_evidence("failing probes", failing.join(", "));
    }
    Ok(out)
}

/// The ε grid 0.1·0.7^j, j < n.
pub fn eps_grid(n: usize) -> Vec<f64> {
    GridConfig {
        eps0: 0.1,
        ratio: 0.7,
        count: n,
    }
    .points()
}

/// n equally spaced points of [lo, hi].
pub fn t_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauges::algebra_order;
    use crate::rate_dsl::parse;

    fn e(s: &str) -> RateExpr {
        parse(s).unwrap()
    }

    fn scalar_problem(a: &str, c: &str) -> OdeProblem {
        let bs = Gauge::special();
        let spec = AlgebraSpec::diagonal(exp_gauge(&bs));
        let a = GenMatrix::parse(&[vec![a]], &spec, bs.clone()).unwrap();
        let c = vec![GenNumber::parse(c, spec.clone()).unwrap()];
        OdeProblem::new(a, c, 0.0, bs, spec, (-2.0, 2.0)).unwrap()
    }

    #[test]
    fn decaying_exponential_matches_closed_form() {
        let p = scalar_problem("eps^-1", "1");
        let sol = solve_linear(&p, &eps_grid(20), &t_grid(-1.0, 1.0, 20)).unwrap();
        assert!(!sol.table.is_empty());
        for r in &sol.table {
            let want = math::exp(-r.t / r.eps);
            assert!((r.x[0] - want).abs() <= 1e-9 * want, "{} {}", r.eps, r.t);
        }
        assert!(sol.certificate.holds());
        let budget = FnBudget::for_domain((-2.0, 2.0)).with_kset(vec![(-1.0, 1.0)]).with_alpha_max(1);
        let bs = Gauge::special();
        assert!(is_moderate_family(&sol.components[0], &bs, &budget).unwrap().fails());
        assert!(is_moderate_family(&sol.components[0], &exp_gauge(&bs), &budget).unwrap().holds());
        let v = verify_moderate_exp_b(&sol, &bs, &[(-1.0, 1.0)], 1).unwrap();
        assert!(v.holds(), "{v:?}");
    }

    #[test]
    fn zero_matrix_gives_constant_solution() {
        let p = scalar_problem("0", "3");
        let sol = solve_linear(&p, &eps_grid(5), &t_grid(-1.0, 1.0, 5)).unwrap();
        assert!(sol.table.iter().all(|r| r.x[0] == 3.0));
        let v = verify_moderate_exp_b(&sol, &Gauge::special(), &[(-1.0, 1.0)], 1).unwrap();
        assert!(v.holds());
        assert_eq!(v.evidence("coarse envelope violations"), v.evidence("envelope samples"));
        assert_eq!(v.evidence("corrected envelope violations"), Some("0"));
    }

    #[test]
    fn rotation_system() {
        let bs = Gauge::special();
        let spec = AlgebraSpec::diagonal(exp_gauge(&bs));
        let a = GenMatrix::parse(&[vec!["0", "eps^-1"], vec!["-1*eps^-1", "0"]], &spec, bs.clone()).unwrap();
        let c = vec![
            GenNumber::parse("1", spec.clone()).unwrap(),
            GenNumber::parse("0", spec.clone()).unwrap(),
        ];
        let p = OdeProblem::new(a, c, 0.0, bs, spec, (-2.0, 2.0)).unwrap();
        let sol = solve_linear(&p, &eps_grid(6), &t_grid(-1.0, 1.0, 9)).unwrap();
        for r in &sol.table {
            let w = r.t / r.eps;
            assert!((r.x[0] - math::cos(w)).abs() < 1e-10);
            assert!((r.x[1] - math::sin(w)).abs() < 1e-10);
        }
    }

    #[test]
    fn residual_and_scaling_independence() {
        let p = scalar_problem("eps^-1", "1");
        let eg = eps_grid(8);
        let tg = t_grid(-1.0, 1.0, 11);
        let s1 = solve_linear(&p, &eg, &tg).unwrap();
        let s2 = solve_linear_with(&p, &eg, &tg, SolveOptions { extra_squarings: 3 }).unwrap();
        for (a, b) in s1.table.iter().zip(&s2.table) {
            assert!((a.x[0] - b.x[0]).abs() <= 1e-11 * a.x[0].abs());
        }
        let f = &s1.components[0];
        for &eps in &eg {
            for &t in &tg {
                let x = f.eval(eps, t);
                let d = f.eval_deriv(1, eps, t, 1.0);
                assert!((d + x / eps).abs() / (1.0 + x.abs()) <= 1e-7);
                let h = 1e-6 * eps;
                let fd = (f.eval(eps, t + h) - f.eval(eps, t - h)) / (2.0 * h);
                assert!((fd - d).abs() <= 1e-5 * (1.0 + d.abs()));
            }
        }
    }

    #[test]
    fn entry_bounds() {
        let r = Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let (coarse, corrected) = entry_bound(&r, 1.0);
        assert!((coarse - math::exp(2.0)).abs() < 1e-12);
        assert!(corrected >= 1.0);
        let z = Matrix::zeros(3);
        assert_eq!(entry_bound(&z, 2.0), (0.0, 1.0));
        let s = Matrix::from_rows(&[vec![2.0]]).unwrap();
        assert!((entry_bound(&s, 0.5).0 - 2.0 * math::exp(1.0)).abs() < 1e-12);
    }

    #[test]
    fn uniqueness_examples() {
        let p = scalar_problem("eps^-1", "1");
        let k = (-1.0, 1.0);
        let zero = Net::parse("0").unwrap();
        let v = uniqueness_residual(&p, k, &[zero.clone()], &[zero.clone()]).unwrap();
        assert!(v.holds());
        let tiny = Net::parse("exp(-1 * exp(eps^-1))").unwrap();
        let v = uniqueness_residual(&p, k, &[zero.clone()], &[tiny]).unwrap();
        assert!(v.holds(), "{v:?}");
        let small = Net::parse("eps^10").unwrap();
        let v = uniqueness_residual(&p, k, &[zero.clone()], &[small]).unwrap();
        assert!(v.fails());
        let cand = vec![SmoothFamily::zero()];
        let (n, v0) = candidate_perturbation(&cand, &p, k);
        assert_eq!(n[0].value(0.01).unwrap(), 0.0);
        assert_eq!(v0[0].value(0.01).unwrap(), 0.0);
    }

    #[test]
    fn minimality_examples() {
        let bs = Gauge::special();
        let ebs = exp_gauge(&bs);
        assert!(minimality_check(&bs, &ebs, 3).unwrap().holds());
        assert!(minimality_check(&bs, &bs, 3).unwrap().fails());
        let ag = Gauge::powers_nat(e("exp(eps^-1)")).unwrap();
        let v = minimality_check(&bs, &ag, 3).unwrap();
        assert!(v.fails());
        assert!(v.evidence("failing probes").unwrap().contains("eps^-2"));
        let d = AlgebraSpec::diagonal(ebs.clone());
        assert!(algebra_order(&d, &d).unwrap().holds());
        let big = exp_gauge(&Gauge::finite_exp());
        assert!(algebra_order(&d, &AlgebraSpec::diagonal(big)).unwrap().holds());
    }
}
