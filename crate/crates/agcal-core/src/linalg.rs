//! Small dense real matrices: products, norms, linear solves and the
//! matrix exponential.

use crate::{math, Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Matrix {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Argument("matrix rows must form a square".into()));
        }
        Ok(Matrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * o.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect()
    }

    /// max |a_ij|.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(math::abs(*v)))
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| math::abs(self.data[i * n + j])).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        math::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// e^A by scaling and squaring with a degree-18 Taylor polynomial, scaled
/// so that ‖A‖₁/2^s ≤ 1/2. `extra` adds squarings beyond the minimum.
pub fn expm_with(a: &Matrix, extra: u32) -> Result<Matrix> {
    let norm = a.norm_1();
    if !norm.is_finite() {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let mut s = 0u32;
    while norm / math::powi(2.0, s as i32) > 0.5 {
        s += 1;
    }
    s += extra;
    let x = a.scale(1.0 / math::powi(2.0, s as i32));
    let n = a.dim();
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for k in 1..=18 {
        term = term.mul(&x).scale(1.0 / k as f64);
        sum = sum.add(&term);
    }
    for _ in 0..s {
        sum = sum.mul(&sum);
        if !sum.is_finite() {
            return Err(Error::Numeric(format!("matrix exponential overflows (norm {norm:e})")));
        }
    }
    Ok(sum)
}

pub fn expm(a: &Matrix) -> Result<Matrix> {
    expm_with(a, 0)
}

/// Solves A x = b by Gaussian elimination with partial pivoting. Also
/// returns the 1-norm condition estimate ‖A‖₁‖A⁻¹‖₁.
pub fn solve(a: &Matrix, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::Argument("right-hand side has the wrong length".into()));
    }
    let inv = inverse(a)?;
    let cond = a.norm_1() * inv.norm_1();
    let mut x = inv.apply(b);
    let r: Vec<f64> = a.apply(&x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
    let dx = inv.apply(&r);
    for (xi, d) in x.iter_mut().zip(dx) {
        *xi += d;
    }
    Ok((x, cond))
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.dim();
    let mut m = a.clone();
    let mut inv = Matrix::identity(n);
    let scale = a.max_abs();
    if scale == 0.0 {
        return Err(Error::Numeric("matrix is singular".into()));
    }
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| math::abs(m.get(i, c)).total_cmp(&math::abs(m.get(j, c))))
            .expect("non-empty");
        if math::abs(m.get(p, c)) <= 1e-14 * scale {
            return Err(Error::Numeric(format!("matrix is singular at column {c}")));
        }
        if p != c {
            for j in 0..n {
                let (u, v) = (m.get(c, j), m.get(p, j));
                m.set(c, j, v);
                m.set(p, j, u);
                let (u, v) = (inv.get(c, j), inv.get(p, j));
                inv.set(c, j, v);
                inv.set(p, j, u);
            }
        }
        let d = m.get(c, c);
        for j in 0..n {
            m.set(c, j, m.get(c, j) / d);
            inv.set(c, j, inv.get(c, j) / d);
        }
        for i in 0..n {
            if i == c {
                continue;
            }
            let f = m.get(i, c);
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                m.set(i, j, m.get(i, j) - f * m.get(c, j));
                inv.set(i, j, inv.get(i, j) - f * inv.get(c, j));
            }
        }
    }
    Ok(inv)
}
