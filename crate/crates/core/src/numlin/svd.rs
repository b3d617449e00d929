//! Singular values.
//!
//! The default path reduces to a real bidiagonal by Householder reflections
//! (Golub-Kahan) and diagonalizes the associated zero-diagonal tridiagonal
//! of twice the size, whose eigenvalues are the singular values with both
//! signs. A one-sided Jacobi implementation shares no code with it and is
//! kept as an independent reference.

use num_complex::Complex64;

use super::eigen::householder;
use super::hermitian::tridiagonal_eigenvalues;
use super::ComplexDenseMatrix;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Ascending singular values, `min(rows, cols)` of them.
pub fn singular_values(a: &ComplexDenseMatrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let (d, e) = if a.rows() >= a.cols() {
        bidiagonalize(a.rows(), a.cols(), a.as_slice().to_vec())
    } else {
        let t = a.adjoint();
        bidiagonalize(t.rows(), t.cols(), t.into_vec())
    };
    let p = d.len();
    if p == 0 {
        return Ok(Vec::new());
    }
    let mut diag = vec![0.0; 2 * p];
    let mut off = vec![0.0; 2 * p];
    for k in 0..p {
        off[2 * k] = d[k];
        if k + 1 < p {
            off[2 * k + 1] = e[k];
        }
    }
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    let mut sv: Vec<f64> = diag[p..].iter().map(|x| x.abs()).collect();
    sv.sort_by(f64::total_cmp);
    Ok(sv)
}

/// Householder bidiagonalization of a row-major `m x n` matrix, `m >= n`.
/// Returns the real diagonal and superdiagonal.
fn bidiagonalize(m: usize, n: usize, mut a: Vec<Complex64>) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![ZERO; m.max(n)];
    let mut w = vec![ZERO; n];
    for k in 0..n {
        // Left reflector zeroes column k below the diagonal.
        let len = m - k;
        for i in 1..len {
            v[i] = a[(k + i) * n + k];
        }
        let (beta, tau) = householder(a[k * n + k], &mut v[1..len]);
        v[0] = Complex64::new(1.0, 0.0);
        d[k] = beta.re;
        a[k * n + k] = beta;
        for i in 1..len {
            a[(k + i) * n + k] = ZERO;
        }
        if tau != ZERO && k + 1 < n {
            let wl = &mut w[k + 1..n];
            wl.iter_mut().for_each(|x| *x = ZERO);
            for i in 0..len {
                let cv = v[i].conj();
                let row = &a[(k + i) * n + k + 1..(k + i + 1) * n];
                for (acc, &x) in wl.iter_mut().zip(row) {
                    *acc += cv * x;
                }
            }
            let ct = tau.conj();
            for i in 0..len {
                let f = ct * v[i];
                let row = &mut a[(k + i) * n + k + 1..(k + i + 1) * n];
                for (x, &acc) in row.iter_mut().zip(wl.iter()) {
                    *x -= f * acc;
                }
            }
        }

        // Right reflector zeroes row k beyond the superdiagonal.
        if k + 1 < n {
            let len = n - k - 1;
            let alpha = a[k * n + k + 1].conj();
            for j in 1..len {
                v[j] = a[k * n + k + 1 + j].conj();
            }
            let (beta, tau) = householder(alpha, &mut v[1..len]);
            v[0] = Complex64::new(1.0, 0.0);
            e[k] = beta.re;
            a[k * n + k + 1] = beta;
            for j in 1..len {
                a[k * n + k + 1 + j] = ZERO;
            }
            if tau != ZERO {
                let vs = &v[..len];
                for r in k + 1..m {
                    let row = &mut a[r * n + k + 1..(r + 1) * n];
                    let s: Complex64 = row.iter().zip(vs).map(|(&x, &y)| x * y).sum();
                    let f = tau * s;
                    for (x, &y) in row.iter_mut().zip(vs) {
                        *x -= f * y.conj();
                    }
                }
            }
        }
    }
    (d, e)
}

/// Ascending singular values by one-sided (Hestenes) Jacobi rotations.
///
/// Slower than [`singular_values`] but algorithmically unrelated, so the two
/// can check each other.
pub fn singular_values_jacobi(a: &ComplexDenseMatrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    // Rows of `t` are the columns of `a` or of `a^T`, whichever are fewer.
    let t = if a.rows() >= a.cols() { a.transpose() } else { a.clone() };
    let ncols = t.rows();
    let len = t.cols();
    let mut cols = t.into_vec();
    const MAX_SWEEPS: usize = 80;
    let tol = f64::EPSILON * (len.max(1) as f64).sqrt();
    for sweep in 0..=MAX_SWEEPS {
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                algorithm: "one-sided Jacobi SVD",
                iterations: sweep,
            });
        }
        let mut rotated = false;
        for p in 0..ncols {
            for q in p + 1..ncols {
                let (head, tail) = cols.split_at_mut(q * len);
                let cp = &mut head[p * len..(p + 1) * len];
                let cq = &mut tail[..len];
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for (x, y) in cp.iter().zip(cq.iter()) {
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let tt = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + tt * tt).sqrt();
                let s = c * tt;
                let pc = phase.conj();
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let yq = *y * pc;
                    let nx = c * *x - s * yq;
                    let ny = s * *x + c * yq;
                    *x = nx;
                    *y = ny * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..ncols)
        .map(|j| cols[j * len..(j + 1) * len].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(f64::total_cmp);
    Ok(sv)
}
