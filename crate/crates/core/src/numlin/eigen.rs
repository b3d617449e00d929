//! Eigenvalues of dense complex matrices.
//!
//! Pipeline: diagonal balancing by powers of two, Householder reduction to
//! upper Hessenberg form, then single-shift complex QR iteration with
//! Wilkinson shifts (exceptional shifts every 10 stalled sweeps) and
//! deflation when `|h[k][k-1]| <= u * (|h[k-1][k-1]| + |h[k][k]|)` with `u`
//! the unit roundoff.

use num_complex::Complex64;

use super::ComplexDenseMatrix;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest dimension accepted by [`eigenvalues`].
pub const MAX_EIGEN_DIM: usize = 4096;

const UNIT_ROUNDOFF: f64 = f64::EPSILON * 0.5;
const SAFE_MIN: f64 = f64::MIN_POSITIVE;

/// Eigenvalues of a square matrix, repeated according to algebraic
/// multiplicity. The order is the order in which the QR iteration deflated
/// them and carries no meaning.
pub fn eigenvalues(a: &ComplexDenseMatrix) -> Result<Vec<Complex64>> {
    let n = a.require_square()?;
    if n > MAX_EIGEN_DIM {
        return Err(Error::SizeLimit(format!(
            "eigenvalue problem of dimension {n} exceeds {MAX_EIGEN_DIM}"
        )));
    }
    if !a.is_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let mut h = a.as_slice().to_vec();
    balance(&mut h, n);
    hessenberg_reduce(&mut h, n, None);
    hessenberg_qr(&mut h, n, false, None)
}

/// Complex Schur decomposition `A = Q T Q^*` with `T` upper triangular.
///
/// Unlike [`eigenvalues`] no balancing is applied, so `Q` is exactly unitary
/// (up to roundoff).
#[derive(Debug, Clone)]
pub struct SchurDecomposition {
    pub t: ComplexDenseMatrix,
    pub q: ComplexDenseMatrix,
}

impl SchurDecomposition {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.rows()).map(|i| self.t[(i, i)]).collect()
    }

    /// `||A - Q T Q^*||_F / ||A||_F`.
    pub fn relative_backward_error(&self, a: &ComplexDenseMatrix) -> f64 {
        let recon = self
            .q
            .matmul(&self.t)
            .and_then(|qt| qt.matmul(&self.q.adjoint()))
            .expect("shapes agree by construction");
        let err = a.sub(&recon).expect("same shape").frobenius_norm();
        let scale = a.frobenius_norm();
        if scale == 0.0 {
            err
        } else {
            err / scale
        }
    }
}

pub fn schur(a: &ComplexDenseMatrix) -> Result<SchurDecomposition> {
    let n = a.require_square()?;
    if n > MAX_EIGEN_DIM {
        return Err(Error::SizeLimit(format!(
            "Schur decomposition of dimension {n} exceeds {MAX_EIGEN_DIM}"
        )));
    }
    let mut h = a.as_slice().to_vec();
    let mut q = ComplexDenseMatrix::identity(n).into_vec();
    hessenberg_reduce(&mut h, n, Some(&mut q));
    hessenberg_qr(&mut h, n, true, Some(&mut q))?;
    // Entries below the diagonal may hold stale values from deflated blocks.
    for i in 0..n {
        for j in 0..i {
            h[i * n + j] = ZERO;
        }
    }
    Ok(SchurDecomposition {
        t: ComplexDenseMatrix::from_row_major(n, n, h)?,
        q: ComplexDenseMatrix::from_row_major(n, n, q)?,
    })
}

#[inline]
fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable.
fn balance(h: &mut [Complex64], n: usize) {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = RADIX * RADIX;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(h[j * n + i]);
                    r += abs1(h[i * n + j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX_SQ;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    h[i * n + j] *= inv;
                    h[j * n + i] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Elementary reflector `H = I - tau v v^*` with `v[0] = 1` such that
/// `H^* [alpha; x] = [beta; 0]`. Overwrites `x` with `v[1..]` and returns
/// `(beta, tau)`.
pub(crate) fn householder(alpha: Complex64, x: &mut [Complex64]) -> (Complex64, Complex64) {
    let xnorm_sq: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    if xnorm_sq == 0.0 && alpha.im == 0.0 {
        return (alpha, ZERO);
    }
    let norm = (alpha.norm_sqr() + xnorm_sq).sqrt();
    let beta = if alpha.re >= 0.0 { -norm } else { norm };
    let tau = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
    let scale = Complex64::new(1.0, 0.0) / (alpha - beta);
    for z in x.iter_mut() {
        *z *= scale;
    }
    (Complex64::new(beta, 0.0), tau)
}

/// In-place reduction to upper Hessenberg form by unitary similarity.
/// If `q` is given it is right-multiplied by the accumulated reflectors.
pub(crate) fn hessenberg_reduce(h: &mut [Complex64], n: usize, mut q: Option<&mut [Complex64]>) {
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let alpha = h[(k + 1) * n + k];
        for i in 1..len {
            v[i] = h[(k + 1 + i) * n + k];
        }
        let (beta, tau) = householder(alpha, &mut v[1..len]);
        v[0] = Complex64::new(1.0, 0.0);
        h[(k + 1) * n + k] = beta;
        for i in 1..len {
            h[(k + 1 + i) * n + k] = ZERO;
        }
        if tau == ZERO {
            continue;
        }
        let vs = &v[..len];

        // Left: rows k+1.., columns k+1.. get (I - conj(tau) v v^*).
        let wl = &mut w[..n - k - 1];
        wl.iter_mut().for_each(|x| *x = ZERO);
        for (i, &vi) in vs.iter().enumerate() {
            let row = &h[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            let cv = vi.conj();
            for (acc, &a) in wl.iter_mut().zip(row) {
                *acc += cv * a;
            }
        }
        let ct = tau.conj();
        for (i, &vi) in vs.iter().enumerate() {
            let f = ct * vi;
            let row = &mut h[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            for (a, &acc) in row.iter_mut().zip(wl.iter()) {
                *a -= f * acc;
            }
        }

        // Right: all rows, columns k+1.. get (I - tau v v^*).
        for r in 0..n {
            let row = &mut h[r * n + k + 1..(r + 1) * n];
            let s: Complex64 = row.iter().zip(vs).map(|(&a, &b)| a * b).sum();
            let f = tau * s;
            for (a, &b) in row.iter_mut().zip(vs) {
                *a -= f * b.conj();
            }
        }
        if let Some(q) = q.as_deref_mut() {
            for r in 0..n {
                let row = &mut q[r * n + k + 1..(r + 1) * n];
                let s: Complex64 = row.iter().zip(vs).map(|(&a, &b)| a * b).sum();
                let f = tau * s;
                for (a, &b) in row.iter_mut().zip(vs) {
                    *a -= f * b.conj();
                }
            }
        }
    }
}

/// Single-shift QR on an upper Hessenberg matrix. With `want_t` the full
/// triangular factor is maintained (needed when `z` accumulates Schur
/// vectors); otherwise only the active window is updated.
fn hessenberg_qr(
    h: &mut [Complex64],
    n: usize,
    want_t: bool,
    mut z: Option<&mut [Complex64]>,
) -> Result<Vec<Complex64>> {
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let max_sweeps = 30 * n.max(10);
    let mut sweeps = 0usize;
    let small = SAFE_MIN * (n as f64 / UNIT_ROUNDOFF);

    let mut i = n - 1;
    loop {
        let mut its = 0usize;
        let l = loop {
            // Look for a negligible subdiagonal entry in the active block.
            let mut k = i;
            while k > 0 {
                let sub = h[k * n + k - 1].norm();
                if sub <= small {
                    break;
                }
                let mut tst = h[(k - 1) * n + k - 1].norm() + h[k * n + k].norm();
                if tst == 0.0 {
                    if k >= 2 {
                        tst += h[(k - 1) * n + k - 2].norm();
                    }
                    if k + 1 < n {
                        tst += h[(k + 1) * n + k].norm();
                    }
                }
                if sub <= UNIT_ROUNDOFF * tst {
                    break;
                }
                k -= 1;
            }
            if k > 0 {
                h[k * n + k - 1] = ZERO;
            }
            if k >= i {
                break k;
            }

            if sweeps >= max_sweeps {
                return Err(Error::NoConvergence {
                    algorithm: "Hessenberg QR",
                    iterations: sweeps,
                });
            }
            sweeps += 1;
            its += 1;

            let shift = if its % 30 == 10 {
                h[k * n + k] + 0.75 * h[(k + 1) * n + k].re.abs()
            } else if its % 30 == 20 {
                h[i * n + i] + 0.75 * h[i * n + i - 1].re.abs()
            } else {
                wilkinson_shift(
                    h[(i - 1) * n + i - 1],
                    h[(i - 1) * n + i],
                    h[i * n + i - 1],
                    h[i * n + i],
                )
            };
            qr_sweep(h, n, k, i, shift, want_t, z.as_deref_mut());
        };

        debug_assert_eq!(l, i);
        eig[i] = h[i * n + i];
        if i == 0 {
            break;
        }
        i -= 1;
    }
    Ok(eig)
}

/// Eigenvalue of the trailing 2x2 block `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let u = b.sqrt() * c.sqrt();
    let s = abs1(u);
    if s == 0.0 {
        return d;
    }
    let x = 0.5 * (a - d);
    let sx = abs1(x);
    let s = s.max(sx);
    let xs = x / s;
    let us = u / s;
    let mut y = s * (xs * xs + us * us).sqrt();
    if sx > 0.0 {
        let xd = x / sx;
        if xd.re * y.re + xd.im * y.im < 0.0 {
            y = -y;
        }
    }
    let denom = x + y;
    if denom == ZERO {
        return d;
    }
    d - u * (u / denom)
}

#[allow(clippy::too_many_arguments)]
fn qr_sweep(
    h: &mut [Complex64],
    n: usize,
    l: usize,
    i: usize,
    shift: Complex64,
    want_t: bool,
    mut z: Option<&mut [Complex64]>,
) {
    let (row_lo, col_hi) = if want_t { (0, n - 1) } else { (l, i) };
    let mut v0 = h[l * n + l] - shift;
    let mut v1 = h[(l + 1) * n + l];
    for k in l..i {
        if k > l {
            v0 = h[k * n + k - 1];
            v1 = h[(k + 1) * n + k - 1];
        }
        let mut x = [v1];
        let (beta, tau) = householder(v0, &mut x);
        let v2 = x[0];
        if k > l {
            h[k * n + k - 1] = beta;
            h[(k + 1) * n + k - 1] = ZERO;
        }
        if tau == ZERO {
            continue;
        }
        let ct = tau.conj();
        let cv2 = v2.conj();
        for j in k..=col_hi {
            let a = h[k * n + j];
            let b = h[(k + 1) * n + j];
            let s = ct * (a + cv2 * b);
            h[k * n + j] = a - s;
            h[(k + 1) * n + j] = b - s * v2;
        }
        for r in row_lo..=(k + 2).min(i) {
            let a = h[r * n + k];
            let b = h[r * n + k + 1];
            let s = tau * (a + b * v2);
            h[r * n + k] = a - s;
            h[r * n + k + 1] = b - s * cv2;
        }
        if let Some(z) = z.as_deref_mut() {
            for r in 0..n {
                let a = z[r * n + k];
                let b = z[r * n + k + 1];
                let s = tau * (a + b * v2);
                z[r * n + k] = a - s;
                z[r * n + k + 1] = b - s * cv2;
            }
        }
    }
}
