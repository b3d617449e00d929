//! Two identities linking the product to its linearization: Girko's
//! Hermitization formula and the M-th root rewriting of a linear statistic.

use num_complex::Complex64;

use super::{linear_statistic, LaurentPolynomial, RadialBump};
use crate::linearize::{hermitized_linearization, mth_root_process_with, scaled_product, LinearizationScale, RootRoute};
use crate::numlin::{eigenvalues, ComplexDenseMatrix, LuDecomposition};
use crate::{Error, Result};

pub const MIN_GIRKO_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GirkoCheck {
    /// `sum_j f(iota_j)` over the spectrum of `Y`.
    pub eigen_side: f64,
    /// `(1/4pi) int Delta f(z) log|det W(z)| d^2z` by the midpoint rule.
    pub integral_side: f64,
    /// `|eigen - integral| / (1 + |eigen|)`.
    pub residual: f64,
}

/// Girko's identity for the normalized linearization of `factors` and a
/// radial bump, on a `grid x grid` midpoint rule over `[-r2, r2]^2`. The
/// logarithmic singularities at the eigenvalues are left untreated.
pub fn girko_residual(factors: &[ComplexDenseMatrix], f: &RadialBump, grid: usize) -> Result<GirkoCheck> {
    if grid < MIN_GIRKO_GRID {
        return Err(Error::InvalidParameter(format!(
            "grid resolution {grid} is below the minimum {MIN_GIRKO_GRID}"
        )));
    }
    let scale = LinearizationScale::Normalized;
    let roots = mth_root_process_with(factors, scale, RootRoute::Linearization)?;
    let eigen_side = linear_statistic(roots.eigenvalues(), f);

    let half = f.r2();
    let h = 2.0 * half / grid as f64;
    let mut acc = 0.0;
    for i in 0..grid {
        for j in 0..grid {
            let z = Complex64::new(-half + (i as f64 + 0.5) * h, -half + (j as f64 + 0.5) * h);
            let lap = f.laplacian(z);
            if lap == 0.0 {
                continue;
            }
            let w = hermitized_linearization(factors, z, scale)?;
            let lu = LuDecomposition::new(&w)?;
            if lu.is_singular() {
                // A node exactly on an eigenvalue; the integrand is
                // integrable, so dropping one cell is within the rule's error.
                continue;
            }
            acc += lap * lu.log_abs_det();
        }
    }
    let integral_side = acc * h * h / (4.0 * std::f64::consts::PI);
    Ok(GirkoCheck {
        eigen_side,
        integral_side,
        residual: (eigen_side - integral_side).abs() / (1.0 + eigen_side.abs()),
    })
}

/// `|sum_j f(mu_j) - (1/M) sum_j f(iota_j^M)|` with `mu` the eigenvalues of
/// the normalized product and `iota` those of its linearization, each from
/// its own eigenvalue computation.
pub fn product_vs_root_statistic(factors: &[ComplexDenseMatrix], f: &LaurentPolynomial) -> Result<f64> {
    let scale = LinearizationScale::Normalized;
    let m = factors.len();
    let mu = eigenvalues(&scaled_product(factors, scale)?)?;
    let roots = mth_root_process_with(factors, scale, RootRoute::Linearization)?;
    let lhs = linear_statistic(&mu, f);
    let rhs: f64 = roots.eigenvalues().iter().map(|&z| f.eval(z.powu(m as u32))).sum::<f64>() / m as f64;
    Ok((lhs - rhs).abs())
}
