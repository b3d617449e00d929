//! Taylor expansion of the Hermitized Stieltjes transform under a
//! single-entry perturbation.
//!
//! With `A = W(z) - i eta`, `R = A^{-1}` and the entry perturbation
//! `W -> W + delta V` (`V = E_pq + E_qp`, `delta = t / sqrt(n)`),
//! `s_t = (1/D) tr (A + delta V)^{-1} = s_0 + sum_j n^{-j/2} c_j t^j` with
//! `c_j = (-1)^j tr(R (V R)^j) / D`. Because `R V = B S` with `B = R[:, (p, q)]`
//! and `S = (e_q, e_p)^T`, every trace collapses to a 2x2 product.

use num_complex::Complex64;

use crate::linearize::{build_linearization, hermitized_linearization, LinearizationScale};
use crate::numlin::{qr, smallest_singular_value, ComplexDenseMatrix, LuDecomposition};
use crate::{Error, Result};

/// Series terms beyond this `|delta| ||R||` are not trusted.
pub const MAX_EXPANSION_RATIO: f64 = 0.5;

pub const TAYLOR_ORDER: usize = 4;

/// Entry `(row, col)` of the block holding factor `factor` in the
/// normalized linearization; `t / sqrt(n)` is added to that block entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapEntry {
    pub factor: usize,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapExpansion {
    pub s0: Complex64,
    /// `c_1 .. c_4`.
    pub coefficients: [Complex64; TAYLOR_ORDER],
    /// `||R||` from the smallest singular value of `Y(z)`.
    pub resolvent_norm: f64,
    /// The requested `t` would push `|delta| ||R||` past
    /// [`MAX_EXPANSION_RATIO`]; no residuals were computed.
    pub flagged: bool,
    pub t_values: Vec<f64>,
    /// `s_t` by direct recomputation of the perturbed resolvent.
    pub direct: Vec<Complex64>,
    /// `|s_t - s_0 - sum_{j<=4} n^{-j/2} c_j t^j|`.
    pub residuals: Vec<f64>,
}

type C2 = [[Complex64; 2]; 2];

fn mul2(a: &C2, b: &C2) -> C2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn perturbed_trace(w: &ComplexDenseMatrix, zeta: Complex64, p: usize, q: usize, delta: f64) -> Result<Complex64> {
    let mut a = w.shift_diagonal(-zeta)?;
    a[(p, q)] += delta;
    a[(q, p)] += delta;
    Ok(LuDecomposition::new(&a)?.inverse()?.trace() / w.rows() as f64)
}

/// Exact Taylor coefficients, direct perturbed values and residuals at the
/// given `t`, for the normalized linearization at `z` and `zeta = i eta`.
pub fn stieltjes_swap_residual(
    factors: &[ComplexDenseMatrix],
    z: Complex64,
    eta: f64,
    t_values: &[f64],
    entry: SwapEntry,
) -> Result<SwapExpansion> {
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
    }
    let m = factors.len();
    let n = factors.first().map_or(0, |f| f.rows());
    if entry.factor >= m || entry.row >= n || entry.col >= n {
        return Err(Error::InvalidParameter(format!("entry {entry:?} outside {m} factors of size {n}")));
    }
    let scale = LinearizationScale::Normalized;
    let w = hermitized_linearization(factors, z, scale)?;
    let dim = w.rows();
    let zeta = Complex64::new(0.0, eta);
    let sigma = smallest_singular_value(&build_linearization(factors, z, scale)?)?;
    let resolvent_norm = 1.0 / (sigma * sigma + eta * eta).sqrt();

    let p = entry.factor * n + entry.row;
    let q = m * n + ((entry.factor + 1) % m) * n + entry.col;
    let r = LuDecomposition::new(&w.shift_diagonal(-zeta)?)?.inverse()?;
    let s0 = r.trace() / dim as f64;
    // (R^2)_{ab} for a, b in {p, q}.
    let r2 = |a: usize, b: usize| -> Complex64 { (0..dim).map(|k| r[(a, k)] * r[(k, b)]).sum() };
    let sb: C2 = [[r[(q, p)], r[(q, q)]], [r[(p, p)], r[(p, q)]]];
    let srb: C2 = [[r2(q, p), r2(q, q)], [r2(p, p), r2(p, q)]];
    let mut coefficients = [Complex64::new(0.0, 0.0); TAYLOR_ORDER];
    let mut acc = srb;
    for (j, cj) in coefficients.iter_mut().enumerate() {
        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
        *cj = sign * (acc[0][0] + acc[1][1]) / dim as f64;
        acc = mul2(&sb, &acc);
    }

    let sqrt_n = (n as f64).sqrt();
    let t_max = t_values.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    let flagged = t_max / sqrt_n * resolvent_norm > MAX_EXPANSION_RATIO;
    let mut direct = Vec::new();
    let mut residuals = Vec::new();
    if !flagged {
        for &t in t_values {
            let st = perturbed_trace(&w, zeta, p, q, t / sqrt_n)?;
            let series: Complex64 = coefficients
                .iter()
                .enumerate()
                .map(|(j, &c)| c * (t / sqrt_n).powi(j as i32 + 1))
                .sum();
            direct.push(st);
            residuals.push((st - s0 - series).norm());
        }
    }
    Ok(SwapExpansion {
        s0,
        coefficients,
        resolvent_norm,
        flagged,
        t_values: t_values.to_vec(),
        direct,
        residuals,
    })
}

/// Least-squares fit of `s_t - s_0 = sum_{j=1}^{degree} n^{-j/2} c_j t^j`,
/// returning `c_1 .. c_degree`.
pub fn fit_taylor_coefficients(
    t_values: &[f64],
    increments: &[Complex64],
    n: usize,
    degree: usize,
) -> Result<Vec<Complex64>> {
    if t_values.len() != increments.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} t values for {} increments",
            t_values.len(),
            increments.len()
        )));
    }
    if degree == 0 || t_values.len() < degree {
        return Err(Error::InvalidParameter(format!(
            "need at least {degree} samples for a degree-{degree} fit"
        )));
    }
    let sqrt_n = (n as f64).sqrt();
    // Columns scaled to unit max so the fit is well conditioned.
    let col_scale: Vec<f64> = (1..=degree)
        .map(|j| t_values.iter().fold(0.0f64, |a, &t| a.max((t / sqrt_n).abs().powi(j as i32))))
        .collect();
    if col_scale.iter().any(|&s| s == 0.0) {
        return Err(Error::InvalidParameter("all t values are zero".into()));
    }
    let a = ComplexDenseMatrix::from_fn(t_values.len(), degree, |i, j| {
        Complex64::new((t_values[i] / sqrt_n).powi(j as i32 + 1) / col_scale[j], 0.0)
    });
    let f = qr(&a)?;
    let qtb = f.q.adjoint_mul_vec(increments);
    let mut x = vec![Complex64::new(0.0, 0.0); degree];
    for i in (0..degree).rev() {
        let mut v = qtb[i];
        for j in i + 1..degree {
            v -= f.r[(i, j)] * x[j];
        }
        x[i] = v / f.r[(i, i)];
    }
    Ok(x.iter().zip(&col_scale).map(|(v, s)| v / *s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_iid_matrix, AtomDistribution, SeedStream};
    use crate::numlin::hermitize;

    fn factors(n: usize, m: usize, seed: u64) -> Vec<ComplexDenseMatrix> {
        let mut rng = SeedStream::new(seed, 0);
        (0..m).map(|_| sample_iid_matrix(n, AtomDistribution::ComplexGaussian, &mut rng)).collect()
    }

    const ENTRY: SwapEntry = SwapEntry { factor: 1, row: 3, col: 5 };

    #[test]
    fn coefficients_match_dense_series() {
        let x = factors(6, 2, 1);
        let z = Complex64::new(0.3, 0.2);
        let e = stieltjes_swap_residual(&x, z, 0.5, &[0.0], ENTRY).unwrap();
        let w = hermitize(&build_linearization(&x, z, LinearizationScale::Normalized).unwrap()).unwrap();
        let dim = w.rows();
        let r = LuDecomposition::new(&w.shift_diagonal(Complex64::new(0.0, -0.5)).unwrap()).unwrap().inverse().unwrap();
        let (p, q) = (6 + 3, 12 + 0 + 5);
        let mut v = ComplexDenseMatrix::zeros(dim, dim);
        v[(p, q)] = Complex64::new(1.0, 0.0);
        v[(q, p)] = Complex64::new(1.0, 0.0);
        let mut term = r.clone();
        for j in 0..TAYLOR_ORDER {
            term = term.matmul(&v).unwrap().matmul(&r).unwrap();
            let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
            let want = term.trace() * sign / dim as f64;
            assert!((e.coefficients[j] - want).norm() < 1e-12 * want.norm().max(1e-3), "j={j}");
        }
        assert_eq!(e.residuals, vec![0.0]);
        assert!((e.s0 - r.trace() / dim as f64).norm() < 1e-15);
    }

    #[test]
    fn fifth_order_scaling() {
        for &eta in &[0.1, 1.0] {
            let x = factors(64, 2, 7);
            let n = 64f64;
            let z = Complex64::new(0.4, -0.1);
            let probe = stieltjes_swap_residual(&x, z, eta, &[], ENTRY).unwrap();
            // delta ||R|| = 0.25 at the larger t.
            let t0 = 0.25 * n.sqrt() / probe.resolvent_norm;
            let e = stieltjes_swap_residual(&x, z, eta, &[t0, t0 / 2.0], ENTRY).unwrap();
            assert!(!e.flagged);
            let ratio = e.residuals[0] / e.residuals[1];
            assert!((16.0..=64.0).contains(&ratio), "eta={eta}: ratio {ratio}, residuals {:?}", e.residuals);
        }
    }

    #[test]
    fn flags_large_perturbations() {
        let x = factors(8, 2, 3);
        let e = stieltjes_swap_residual(&x, Complex64::new(0.0, 0.0), 0.01, &[10.0], ENTRY).unwrap();
        assert!(e.flagged && e.residuals.is_empty());
        assert!(stieltjes_swap_residual(&x, Complex64::new(0.0, 0.0), 0.0, &[1.0], ENTRY).is_err());
        let bad = SwapEntry { factor: 2, row: 0, col: 0 };
        assert!(stieltjes_swap_residual(&x, Complex64::new(0.0, 0.0), 1.0, &[1.0], bad).is_err());
    }

    #[test]
    fn fitted_coefficients_are_stable() {
        let x = factors(16, 2, 5);
        let n = 16;
        let eta = 1.0;
        let t_max = 0.2 * (n as f64).sqrt();
        let fit = |points: usize| {
            let ts: Vec<f64> = (1..=points).map(|i| t_max * i as f64 / points as f64).collect();
            let e = stieltjes_swap_residual(&x, Complex64::new(0.2, 0.1), eta, &ts, ENTRY).unwrap();
            let inc: Vec<Complex64> = e.direct.iter().map(|s| s - e.s0).collect();
            (fit_taylor_coefficients(&ts, &inc, n, 6).unwrap(), e.coefficients)
        };
        let (coarse, exact) = fit(12);
        let (fine, _) = fit(24);
        for j in 0..2 {
            let rel = (coarse[j] - fine[j]).norm() / fine[j].norm();
            assert!(rel < 0.01, "c_{} moved by {rel}", j + 1);
            assert!((fine[j] - exact[j]).norm() < 0.01 * exact[j].norm());
        }
    }

    #[test]
    fn fit_validation() {
        assert!(fit_taylor_coefficients(&[1.0], &[], 4, 1).is_err());
        assert!(fit_taylor_coefficients(&[1.0], &[Complex64::new(1.0, 0.0)], 4, 2).is_err());
        assert!(fit_taylor_coefficients(&[0.0, 0.0], &[Complex64::new(0.0, 0.0); 2], 4, 1).is_err());
        // Exact cubic in delta = t / 2.
        let ts = [0.5, 1.0, 1.5, 2.0, 3.0];
        let inc: Vec<Complex64> = ts
            .iter()
            .map(|t| {
                let d = t / 2.0;
                Complex64::new(2.0 * d - d * d * d, 0.5 * d * d)
            })
            .collect();
        let c = fit_taylor_coefficients(&ts, &inc, 4, 3).unwrap();
        let want = [Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.5), Complex64::new(-1.0, 0.0)];
        for (g, w) in c.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12);
        }
    }
}
