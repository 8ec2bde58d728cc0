//! Adaptive Gauss–Kronrod quadrature (7-point Gauss, 15-point Kronrod).

use crate::{math, Error, Result};
use alloc::collections::BinaryHeap;
use alloc::format;
use core::cmp::Ordering;

/// Default absolute tolerance of [`integrate`].
pub const ABS_TOL: f64 = 1e-10;

/// Half-width beyond which a Gaussian factor e^{-t²} is dropped.
pub const GAUSS_TAIL: f64 = 26.0;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: ABS_TOL,
            rel_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

impl QuadConfig {
    /// Relative accuracy target, used where the integral itself is tiny.
    pub fn relative(rel_tol: f64) -> QuadConfig {
        QuadConfig {
            abs_tol: 0.0,
            rel_tol,
            max_intervals: 4000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// One 15-point Kronrod pass with its embedded Gauss estimate.
/// Returns (value, error estimate).
pub fn kronrod15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let s = f(c - h * x) + f(c + h * x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, math::abs((k - g) * h))
}

/// Composite 15-point Kronrod rule on `panels` equal pieces of [a, b].
pub fn integrate_panels(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| kronrod15(f, a + h * i as f64, a + h * (i + 1) as f64).0)
        .sum()
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error
            .total_cmp(&o.error)
            .then_with(|| o.a.total_cmp(&self.a))
    }
}

/// ∫_a^b f with the default absolute tolerance.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<QuadResult> {
    integrate_with(f, a, b, &QuadConfig::default())
}

/// Globally adaptive integration: the piece with the largest error
/// estimate is bisected until the total estimate meets the target.
pub fn integrate_with(f: &dyn Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Argument("integration bounds must be finite".into()));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if b < a {
        let r = integrate_with(f, b, a, cfg)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    let (v, e) = kronrod15(f, a, b);
    let mut evals = 15;
    let mut total = v;
    let mut err = e;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let target = |t: f64| cfg.abs_tol.max(cfg.rel_tol * math::abs(t));
    while err > target(total) {
        if !total.is_finite() {
            return Err(Error::Numeric("integrand is not finite".into()));
        }
        if heap.len() >= cfg.max_intervals {
            return Err(Error::Numeric(format!(
                "quadrature did not converge: achieved {err:.3e}, wanted {:.3e}",
                target(total)
            )));
        }
        let p = heap.pop().expect("non-empty");
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) {
            heap.push(Piece { error: 0.0, ..p });
            err = heap.iter().map(|q| q.error).sum();
            if err <= target(total) {
                break;
            }
            return Err(Error::Numeric(format!(
                "quadrature hit floating resolution at {m}: achieved {err:.3e}"
            )));
        }
        let (v1, e1) = kronrod15(f, p.a, m);
        let (v2, e2) = kronrod15(f, m, p.b);
        evals += 30;
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        heap.push(Piece { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Piece { a: m, b: p.b, value: v2, error: e2 });
        if err <= target(total) {
            total = heap.iter().map(|q| q.value).sum();
            err = heap.iter().map(|q| q.error).sum();
        }
    }
    Ok(QuadResult {
        value: total,
        error: err,
        evaluations: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_gaussian() {
        let r = integrate(&|x| x * x, 0.0, 3.0).unwrap();
        assert!((r.value - 9.0).abs() < 1e-12);
        let g = integrate(&|x| math::exp(-x * x), -GAUSS_TAIL, GAUSS_TAIL).unwrap();
        assert!((g.value - math::sqrt(math::PI)).abs() < 1e-12);
        let s = integrate(&math::sin, 3.0, 0.0).unwrap();
        assert!((s.value + (1.0 - math::cos(3.0))).abs() < 1e-12);
    }

    #[test]
    fn relative_mode_resolves_tiny_integrals() {
        let r = integrate_with(&|x| 1e-30 * math::exp(x), 0.0, 1.0, &QuadConfig::relative(1e-12)).unwrap();
        assert!((r.value / (1e-30 * (math::exp(1.0) - 1.0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bump_is_integrated_accurately() {
        let bump = |x: f64| if x.abs() < 1.0 { math::exp(-1.0 / (1.0 - x * x)) } else { 0.0 };
        let r = integrate(&bump, -1.0, 1.0).unwrap();
        assert!((r.value - 0.443_993_816_168_079_4).abs() < 1e-10);
    }
}
