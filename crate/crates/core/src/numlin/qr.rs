//! Householder QR factorization.

use num_complex::Complex64;

use super::eigen::householder;
use super::ComplexDenseMatrix;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `A = Q R` for `rows >= cols`, with `Q` of size `rows x rows` unitary and
/// `R` of size `rows x cols` upper triangular.
#[derive(Debug, Clone)]
pub struct QrDecomposition {
    pub q: ComplexDenseMatrix,
    pub r: ComplexDenseMatrix,
}

pub fn qr(a: &ComplexDenseMatrix) -> Result<QrDecomposition> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::DimensionMismatch(format!(
            "QR needs rows >= cols, got {m}x{n}"
        )));
    }
    let mut r = a.as_slice().to_vec();
    let mut reflectors: Vec<(usize, Vec<Complex64>, Complex64)> = Vec::with_capacity(n);
    let mut w = vec![ZERO; n];
    for k in 0..n {
        let len = m - k;
        let mut v = vec![ZERO; len];
        for i in 1..len {
            v[i] = r[(k + i) * n + k];
        }
        let (beta, tau) = householder(r[k * n + k], &mut v[1..]);
        v[0] = Complex64::new(1.0, 0.0);
        r[k * n + k] = beta;
        for i in 1..len {
            r[(k + i) * n + k] = ZERO;
        }
        if tau == ZERO {
            continue;
        }
        let wl = &mut w[k + 1..n];
        wl.iter_mut().for_each(|x| *x = ZERO);
        for (i, vi) in v.iter().enumerate() {
            let cv = vi.conj();
            for (acc, &x) in wl.iter_mut().zip(&r[(k + i) * n + k + 1..(k + i + 1) * n]) {
                *acc += cv * x;
            }
        }
        let ct = tau.conj();
        for (i, &vi) in v.iter().enumerate() {
            let f = ct * vi;
            for (x, &acc) in r[(k + i) * n + k + 1..(k + i + 1) * n].iter_mut().zip(wl.iter()) {
                *x -= f * acc;
            }
        }
        reflectors.push((k, v, tau));
    }

    // Q = H_0 H_1 ... H_{n-1}, accumulated right to left on the identity.
    let mut q = ComplexDenseMatrix::identity(m).into_vec();
    let mut wq = vec![ZERO; m];
    for (k, v, tau) in reflectors.iter().rev() {
        let k = *k;
        let wl = &mut wq[k..m];
        wl.iter_mut().for_each(|x| *x = ZERO);
        for (i, vi) in v.iter().enumerate() {
            let cv = vi.conj();
            for (acc, &x) in wl.iter_mut().zip(&q[(k + i) * m + k..(k + i + 1) * m]) {
                *acc += cv * x;
            }
        }
        for (i, &vi) in v.iter().enumerate() {
            let f = *tau * vi;
            for (x, &acc) in q[(k + i) * m + k..(k + i + 1) * m].iter_mut().zip(wl.iter()) {
                *x -= f * acc;
            }
        }
    }
    Ok(QrDecomposition {
        q: ComplexDenseMatrix::from_row_major(m, m, q)?,
        r: ComplexDenseMatrix::from_row_major(m, n, r)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_tall_and_square() {
        let mut state = 11u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(3);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for (m, n) in [(1, 1), (4, 4), (9, 5), (20, 20)] {
            let a = ComplexDenseMatrix::from_fn(m, n, |_, _| Complex64::new(next(), next()));
            let QrDecomposition { q, r } = qr(&a).unwrap();
            assert!(q.unitarity_residual() < 1e-13);
            let back = q.matmul(&r).unwrap().sub(&a).unwrap();
            assert!(back.max_abs() < 1e-13, "{m}x{n}");
            for i in 0..m {
                for j in 0..i.min(n) {
                    assert_eq!(r[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn wide_rejected() {
        assert!(qr(&ComplexDenseMatrix::zeros(2, 3)).is_err());
    }
}
