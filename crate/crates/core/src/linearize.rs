//! Block linearization of a product of `M` square matrices.
//!
//! `Y(z)` is the `Mn x Mn` matrix with `-z` on the diagonal, factor `i` in
//! block `(i, i+1)` and the last factor in block `(M-1, 0)`. `Y^M` is block
//! diagonal with the cyclic products of the factors on its diagonal, so the
//! spectrum of `Y = Y(0)` consists of all `M`-th roots of the eigenvalues of
//! `X_1 ... X_M`.

use num_complex::Complex64;

use crate::numlin::{eigenvalues, hermitize, ComplexDenseMatrix, SpectrumSample};
use crate::{Error, Result};

/// Whether the blocks of `Y` are the factors themselves or `n^{-1/2}` times
/// them. The former puts the spectrum of interest at `|z| ~ sqrt(n)`, the
/// latter at `|z| ~ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearizationScale {
    Raw,
    Normalized,
}

impl LinearizationScale {
    pub fn name(self) -> &'static str {
        match self {
            Self::Raw => "raw",
            Self::Normalized => "normalized",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "raw" => Ok(Self::Raw),
            "normalized" => Ok(Self::Normalized),
            _ => Err(Error::InvalidParameter(format!("unknown linearization scale '{name}'"))),
        }
    }

    fn factor(self, n: usize) -> f64 {
        match self {
            Self::Raw => 1.0,
            Self::Normalized => 1.0 / (n as f64).sqrt(),
        }
    }
}

fn common_dim(factors: &[ComplexDenseMatrix]) -> Result<usize> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidParameter("need at least one factor".into()))?;
    let n = first.require_square()?;
    for (i, f) in factors.iter().enumerate() {
        if f.rows() != n || f.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "factor {i} is {}x{}, expected {n}x{n}",
                f.rows(),
                f.cols()
            )));
        }
    }
    Ok(n)
}

pub fn build_linearization(
    factors: &[ComplexDenseMatrix],
    z: Complex64,
    scale: LinearizationScale,
) -> Result<ComplexDenseMatrix> {
    let n = common_dim(factors)?;
    let m = factors.len();
    let s = scale.factor(n);
    let mut y = ComplexDenseMatrix::zeros(m * n, m * n);
    for (i, f) in factors.iter().enumerate() {
        let col = ((i + 1) % m) * n;
        for r in 0..n {
            for c in 0..n {
                y[(i * n + r, col + c)] += f[(r, c)] * s;
            }
        }
    }
    for k in 0..m * n {
        y[(k, k)] -= z;
    }
    Ok(y)
}

pub fn hermitized_linearization(
    factors: &[ComplexDenseMatrix],
    z: Complex64,
    scale: LinearizationScale,
) -> Result<ComplexDenseMatrix> {
    hermitize(&build_linearization(factors, z, scale)?)
}

/// Which computation [`mth_root_process_with`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootRoute {
    /// `Linearization` up to `Mn = ROOT_ROUTE_THRESHOLD`, `ProductRoots` above.
    #[default]
    Auto,
    /// Eigenvalues of `Y` directly.
    Linearization,
    /// Eigenvalues of the `n x n` product with all `M`-th roots appended.
    ProductRoots,
}

pub const ROOT_ROUTE_THRESHOLD: usize = 1024;

impl RootRoute {
    pub fn name(self) -> &'static str {
        match self {
            Self::Auto => "auto",
            Self::Linearization => "linearization",
            Self::ProductRoots => "product-roots",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "auto" => Ok(Self::Auto),
            "linearization" => Ok(Self::Linearization),
            "product-roots" => Ok(Self::ProductRoots),
            _ => Err(Error::InvalidParameter(format!("unknown root route '{name}'"))),
        }
    }
}

/// The `Mn` roots of `det(z^M - Z)` with `Z` the (scaled) product.
pub fn mth_root_process(factors: &[ComplexDenseMatrix], scale: LinearizationScale) -> Result<SpectrumSample> {
    mth_root_process_with(factors, scale, RootRoute::Auto)
}

pub fn mth_root_process_with(
    factors: &[ComplexDenseMatrix],
    scale: LinearizationScale,
    route: RootRoute,
) -> Result<SpectrumSample> {
    let n = common_dim(factors)?;
    let m = factors.len();
    let use_product = match route {
        RootRoute::Linearization => false,
        RootRoute::ProductRoots => true,
        RootRoute::Auto => m * n > ROOT_ROUTE_THRESHOLD,
    };
    let description = format!("root process, M={m}, n={n}, scale={}", scale.name());
    if !use_product {
        let y = build_linearization(factors, Complex64::new(0.0, 0.0), scale)?;
        return SpectrumSample::from_matrix(&y, None, description);
    }
    let product = scaled_product(factors, scale)?;
    let roots = all_mth_roots(&eigenvalues(&product)?, m);
    SpectrumSample::new(roots, m * n, None, description)
}

/// `(s X_1) ... (s X_M)` with `s` from `scale`.
pub fn scaled_product(factors: &[ComplexDenseMatrix], scale: LinearizationScale) -> Result<ComplexDenseMatrix> {
    let n = common_dim(factors)?;
    let s = scale.factor(n);
    let mut acc = factors[0].scale_real(s);
    for f in &factors[1..] {
        acc = acc.matmul(&f.scale_real(s))?;
    }
    Ok(acc)
}

/// All `m` complex `m`-th roots of every value.
pub fn all_mth_roots(values: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(values.len() * m);
    for v in values {
        let r = v.norm().powf(1.0 / m as f64);
        let theta = v.arg();
        for k in 0..m {
            let phi = (theta + 2.0 * std::f64::consts::PI * k as f64) / m as f64;
            out.push(Complex64::from_polar(r, phi));
        }
    }
    out
}

/// Structural self-test of `Y^M`: largest entry outside the diagonal blocks
/// plus largest deviation of diagonal block `i` from `X_i X_{i+1} ... X_{i-1}`.
pub fn power_block_check(factors: &[ComplexDenseMatrix]) -> Result<f64> {
    let n = common_dim(factors)?;
    let m = factors.len();
    let y = build_linearization(factors, Complex64::new(0.0, 0.0), LinearizationScale::Raw)?;
    let mut p = y.clone();
    for _ in 1..m {
        p = p.matmul(&y)?;
    }
    let mut off = 0.0f64;
    for bi in 0..m {
        for bj in 0..m {
            if bi != bj {
                off = off.max(p.submatrix(bi * n, bj * n, n, n).max_abs());
            }
        }
    }
    let mut dev = 0.0f64;
    for i in 0..m {
        let mut cyc = factors[i].clone();
        for k in 1..m {
            cyc = cyc.matmul(&factors[(i + k) % m])?;
        }
        let block = p.submatrix(i * n, i * n, n, n);
        dev = dev.max(block.sub(&cyc)?.max_abs());
    }
    Ok(off + dev)
}
