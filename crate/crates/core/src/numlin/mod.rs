//! Dense complex linear algebra.
//!
//! Everything here is implemented directly on [`ComplexDenseMatrix`]; no
//! external LAPACK is involved.

mod eigen;
mod hermitian;
mod lu;
mod matrix;
mod qr;
mod svd;

use num_complex::Complex64;

pub use eigen::{eigenvalues, schur, SchurDecomposition, MAX_EIGEN_DIM};
pub use hermitian::{hermitian_eigenvalues, tridiagonal_eigenvalues};
pub use lu::LuDecomposition;
pub use matrix::ComplexDenseMatrix;
pub use qr::{qr, QrDecomposition};
pub use svd::{singular_values, singular_values_jacobi};

use crate::{Error, Result};

/// Eigenvalues of one matrix, tagged with where they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    eigenvalues: Vec<Complex64>,
    source_dim: usize,
    seed: Option<u64>,
    description: String,
}

impl SpectrumSample {
    pub fn new(
        eigenvalues: Vec<Complex64>,
        source_dim: usize,
        seed: Option<u64>,
        description: impl Into<String>,
    ) -> Result<Self> {
        if eigenvalues.len() != source_dim {
            return Err(Error::Inconsistent(format!(
                "{} eigenvalues for a matrix of dimension {source_dim}",
                eigenvalues.len()
            )));
        }
        Ok(Self {
            eigenvalues,
            source_dim,
            seed,
            description: description.into(),
        })
    }

    pub fn from_matrix(
        a: &ComplexDenseMatrix,
        seed: Option<u64>,
        description: impl Into<String>,
    ) -> Result<Self> {
        let eig = eigenvalues(a)?;
        Self::new(eig, a.rows(), seed, description)
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// How [`smallest_singular_value_with`] computes `sigma_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmallestSvMethod {
    /// Full SVD up to [`AUTO_FULL_SVD_MAX_DIM`], inverse iteration above.
    #[default]
    Auto,
    FullSvd,
    /// Inverse iteration on `A^* A` through an LU factorization of `A`;
    /// falls back to the full SVD if it stagnates.
    InverseIteration,
}

pub const AUTO_FULL_SVD_MAX_DIM: usize = 512;

pub fn smallest_singular_value(a: &ComplexDenseMatrix) -> Result<f64> {
    smallest_singular_value_with(a, SmallestSvMethod::Auto)
}

pub fn smallest_singular_value_with(a: &ComplexDenseMatrix, method: SmallestSvMethod) -> Result<f64> {
    let n = a.require_square()?;
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix has no singular values".into()));
    }
    let use_svd = match method {
        SmallestSvMethod::FullSvd => true,
        SmallestSvMethod::InverseIteration => false,
        SmallestSvMethod::Auto => n <= AUTO_FULL_SVD_MAX_DIM,
    };
    if !use_svd {
        if let Some(s) = inverse_iteration(a)? {
            return Ok(s);
        }
    }
    Ok(singular_values(a)?[0])
}

/// Deterministic, non-degenerate starting vector.
fn start_vector(n: usize) -> Vec<Complex64> {
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let a = (state >> 11) as f64 / (1u64 << 53) as f64;
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let b = (state >> 11) as f64 / (1u64 << 53) as f64;
            Complex64::new(a - 0.5, b - 0.5)
        })
        .collect();
    normalize(&mut v);
    v
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let s = norm2(v);
    if s > 0.0 {
        v.iter_mut().for_each(|z| *z /= s);
    }
    s
}

/// `None` means stagnation; the caller then falls back to the full SVD.
fn inverse_iteration(a: &ComplexDenseMatrix) -> Result<Option<f64>> {
    const MAX_ITER: usize = 500;
    const TOL: f64 = 1e-13;
    let lu = LuDecomposition::new(a)?;
    if lu.is_singular() {
        return Ok(None);
    }
    let mut x = start_vector(a.rows());
    let mut prev = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let y = lu.solve_adjoint(&x)?;
        let ny = norm2(&y);
        if !ny.is_finite() || ny == 0.0 {
            return Ok(None);
        }
        // Rayleigh quotient of (A^*A)^{-1}: an upper bound on sigma_1 that
        // decreases monotonically.
        let sigma = 1.0 / ny;
        if (prev - sigma).abs() <= TOL * sigma {
            return Ok(Some(sigma));
        }
        prev = sigma;
        x = lu.solve(&y)?;
        if normalize(&mut x) == 0.0 {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Largest singular value by power iteration on `A^* A`, stopped when the
/// extrapolated error drops below relative `1e-10`; full SVD if it does not
/// settle.
pub fn operator_norm(a: &ComplexDenseMatrix) -> Result<f64> {
    const MAX_ITER: usize = 5000;
    const TOL: f64 = 1e-10;
    if a.rows() == 0 || a.cols() == 0 || a.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let mut x = start_vector(a.cols());
    let mut prev = 0.0;
    let mut prev_change = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let y = a.mul_vec(&x);
        let sigma = norm2(&y);
        let change = (sigma - prev).abs();
        let ratio = change / prev_change;
        let err_est = if ratio < 1.0 {
            change * ratio / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        if change <= TOL * sigma && err_est <= TOL * sigma {
            return Ok(sigma);
        }
        prev = sigma;
        prev_change = change;
        x = a.adjoint_mul_vec(&y);
        if normalize(&mut x) == 0.0 {
            return Ok(sigma);
        }
    }
    let sv = singular_values(a)?;
    Ok(*sv.last().expect("non-empty matrix"))
}

/// `[[0, b], [b^*, 0]]`.
pub fn hermitize(b: &ComplexDenseMatrix) -> Result<ComplexDenseMatrix> {
    let d = b.require_square()?;
    let mut w = ComplexDenseMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let v = b[(i, j)];
            w[(i, d + j)] = v;
            w[(d + j, i)] = v.conj();
        }
    }
    Ok(w)
}

/// Spectrum of a Hermitian matrix kept around for repeated resolvent traces.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    eigenvalues: Vec<f64>,
}

impl HermitianSpectrum {
    pub fn new(w: &ComplexDenseMatrix) -> Result<Self> {
        Ok(Self {
            eigenvalues: hermitian_eigenvalues(w)?,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `(1/normalization) tr (W - zeta)^{-1}` for `Im zeta > 0`.
    pub fn stieltjes(&self, zeta: Complex64, normalization: f64) -> Result<Complex64> {
        if !(zeta.im > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Stieltjes transform needs Im(zeta) > 0, got {zeta}"
            )));
        }
        if !(normalization > 0.0) {
            return Err(Error::InvalidParameter("normalization must be positive".into()));
        }
        let s: Complex64 = self
            .eigenvalues
            .iter()
            .map(|&l| Complex64::new(1.0, 0.0) / (l - zeta))
            .sum();
        Ok(s / normalization)
    }
}

/// `(1/normalization) tr (W - zeta)^{-1}`; the divisor is explicit because
/// the natural choice depends on the caller's scaling.
pub fn stieltjes_transform(
    w: &ComplexDenseMatrix,
    zeta: Complex64,
    normalization: f64,
) -> Result<Complex64> {
    if !(zeta.im > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Stieltjes transform needs Im(zeta) > 0, got {zeta}"
        )));
    }
    HermitianSpectrum::new(w)?.stieltjes(zeta, normalization)
}

/// Threshold below which `log_abs_det` reports a singular matrix.
pub const SINGULAR_SIGMA: f64 = 1e-300;

/// `log |det a|` as the sum of log singular values; negative infinity when
/// the smallest singular value is below [`SINGULAR_SIGMA`].
pub fn log_abs_det(a: &ComplexDenseMatrix) -> Result<f64> {
    a.require_square()?;
    let sv = singular_values(a)?;
    if sv.first().is_some_and(|&s| s < SINGULAR_SIGMA) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(sv.iter().map(|s| s.ln()).sum())
}

/// `log |det a|` from an LU factorization; cheaper than [`log_abs_det`].
pub fn log_abs_det_lu(a: &ComplexDenseMatrix) -> Result<f64> {
    Ok(LuDecomposition::new(a)?.log_abs_det())
}

/// Worst pairwise distance after matching two multisets of eigenvalues.
///
/// Pairs are committed greedily in order of increasing distance; ties are
/// broken by modulus, then argument, of the first point. Returns infinity if
/// the sizes differ. Quadratic memory; meant for test-sized spectra.
pub fn match_spectra(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let n = a.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| {
        p.0.total_cmp(&q.0)
            .then(a[p.1].norm().total_cmp(&a[q.1].norm()))
            .then(a[p.1].arg().total_cmp(&a[q.1].arg()))
            .then(p.2.cmp(&q.2))
    });
    let mut used_a = vec![false; n];
    let mut used_b = vec![false; n];
    let mut worst = 0.0f64;
    let mut matched = 0;
    for (d, i, j) in pairs {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        worst = worst.max(d);
        matched += 1;
        if matched == n {
            break;
        }
    }
    worst
}

/// [`match_spectra`] divided by the spectral radius of `b` (or 1 if that is
/// zero).
pub fn match_spectra_relative(a: &[Complex64], b: &[Complex64]) -> f64 {
    let radius = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = if radius > 0.0 { radius } else { 1.0 };
    match_spectra(a, b) / scale
}
