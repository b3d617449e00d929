//! LU factorization with partial pivoting.

use num_complex::Complex64;

use super::ComplexDenseMatrix;
use crate::{Error, Result};

/// `P A = L U` with unit lower triangular `L`, stored compactly.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    n: usize,
    lu: Vec<Complex64>,
    /// `perm[i]` is the row of `A` that ended up in row `i`.
    perm: Vec<usize>,
    singular: bool,
}

impl LuDecomposition {
    pub fn new(a: &ComplexDenseMatrix) -> Result<Self> {
        let n = a.require_square()?;
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for k in 0..n {
            let (mut best, mut best_abs) = (k, -1.0);
            for i in k..n {
                let v = lu[i * n + k].norm();
                if v > best_abs {
                    best = i;
                    best_abs = v;
                }
            }
            if best_abs == 0.0 {
                singular = true;
                continue;
            }
            if best != k {
                for j in 0..n {
                    lu.swap(k * n + j, best * n + j);
                }
                perm.swap(k, best);
            }
            let inv = Complex64::new(1.0, 0.0) / lu[k * n + k];
            let (upper, lower) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n + k + 1..(k + 1) * n];
            for i in 0..n - k - 1 {
                let row = &mut lower[i * n..(i + 1) * n];
                let l = row[k] * inv;
                row[k] = l;
                if l != Complex64::new(0.0, 0.0) {
                    for (x, &p) in row[k + 1..].iter_mut().zip(pivot_row) {
                        *x -= l * p;
                    }
                }
            }
        }
        Ok(Self { n, lu, perm, singular })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// True when an exactly zero pivot was met.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// `log |det A|`, or negative infinity for an exactly singular matrix.
    pub fn log_abs_det(&self) -> f64 {
        if self.singular {
            return f64::NEG_INFINITY;
        }
        (0..self.n).map(|i| self.lu[i * self.n + i].norm().ln()).sum()
    }

    fn check(&self, len: usize) -> Result<()> {
        if self.singular {
            return Err(Error::InvalidParameter("singular matrix".into()));
        }
        if len != self.n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {len} for dimension {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(b.len())?;
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: Complex64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: Complex64 = row.iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        Ok(x)
    }

    /// Solves `A^* x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(b.len())?;
        let n = self.n;
        // A^* = U^* L^* P, solved column-oriented to keep row-major access.
        let mut w = b.to_vec();
        for i in 0..n {
            w[i] /= self.lu[i * n + i].conj();
            let wi = w[i];
            for (x, a) in w[i + 1..].iter_mut().zip(&self.lu[i * n + i + 1..(i + 1) * n]) {
                *x -= a.conj() * wi;
            }
        }
        for i in (0..n).rev() {
            let wi = w[i];
            for (x, a) in w[..i].iter_mut().zip(&self.lu[i * n..i * n + i]) {
                *x -= a.conj() * wi;
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<ComplexDenseMatrix> {
        let n = self.n;
        let mut inv = ComplexDenseMatrix::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}
