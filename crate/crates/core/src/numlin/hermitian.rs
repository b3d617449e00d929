//! Eigenvalues of Hermitian matrices and of real symmetric tridiagonals.

use super::eigen::hessenberg_reduce;
use super::ComplexDenseMatrix;
use crate::{Error, Result};

/// Relative tolerance for accepting a matrix as Hermitian.
const HERMITIAN_TOL: f64 = 1e-12;

/// Ascending eigenvalues of a Hermitian matrix.
///
/// A unitary Hessenberg reduction of a Hermitian matrix is tridiagonal; its
/// complex off-diagonal is replaced by its modulus (a diagonal unitary
/// similarity) and the real tridiagonal is diagonalized by implicit QL.
pub fn hermitian_eigenvalues(a: &ComplexDenseMatrix) -> Result<Vec<f64>> {
    let n = a.require_square()?;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    if a.hermitian_residual() > HERMITIAN_TOL * scale {
        return Err(Error::InvalidParameter("matrix is not Hermitian".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.as_slice().to_vec();
    hessenberg_reduce(&mut h, n, None);
    let mut d: Vec<f64> = (0..n).map(|i| h[i * n + i].re).collect();
    let mut e: Vec<f64> = (0..n)
        .map(|i| if i + 1 < n { h[(i + 1) * n + i].norm() } else { 0.0 })
        .collect();
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    Ok(d)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples `i` and `i + 1`; the last entry is
/// ignored). On return `d` holds the eigenvalues in ascending order.
pub fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if e.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "tridiagonal: {} diagonal entries but {} off-diagonal slots",
            n,
            e.len()
        )));
    }
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let max_iter = 30 * n.max(10);
    let mut total = 0usize;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * 0.5 * dd || e[m] == 0.0 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total += 1;
            if total > max_iter {
                return Err(Error::NoConvergence {
                    algorithm: "tridiagonal QL",
                    iterations: total,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(())
}
