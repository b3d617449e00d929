//! Test functions, their analytic norms and the predicted limiting variances.

use num_complex::Complex64;

use super::LaurentPolynomial;
use crate::dpp_exact::{limiting_covariance_ginibre, limiting_covariance_trunc, MonomialPair};
use crate::{Error, Result};

/// Relative agreement demanded between the two variance routes.
pub const ROUTE_TOL: f64 = 1e-8;

/// A real function of one complex variable.
pub trait TestFunction {
    fn eval(&self, z: Complex64) -> f64;
}

impl TestFunction for LaurentPolynomial {
    fn eval(&self, z: Complex64) -> f64 {
        LaurentPolynomial::eval(self, z)
    }
}

/// Quintic smootherstep `6x^5 - 15x^4 + 10x^3` and its first two
/// derivatives, clamped to `[0, 1]`.
fn smootherstep(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let x2 = x * x;
    (
        x2 * x * (10.0 - 15.0 * x + 6.0 * x2),
        30.0 * x2 * (1.0 - x) * (1.0 - x),
        60.0 * x * (1.0 - x) * (1.0 - 2.0 * x),
    )
}

/// Radial `C^2` bump: 0 for `|z| <= r1` and `|z| >= r2`, rising to 1 at the
/// midpoint through a quintic smootherstep and falling back symmetrically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBump {
    r1: f64,
    r2: f64,
}

impl RadialBump {
    /// Requires `tau0 < r1 < r2 < 1 - tau0`.
    pub fn new(r1: f64, r2: f64, tau0: f64) -> Result<Self> {
        if !(tau0 >= 0.0 && tau0 < r1 && r1 < r2 && r2 < 1.0 - tau0) {
            return Err(Error::InvalidParameter(format!(
                "bump support [{r1}, {r2}] must sit strictly inside ({tau0}, {})",
                1.0 - tau0
            )));
        }
        Ok(Self { r1, r2 })
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    /// Profile value and its first two radial derivatives at radius `r`.
    pub fn profile(&self, r: f64) -> (f64, f64, f64) {
        let mid = 0.5 * (self.r1 + self.r2);
        let w = mid - self.r1;
        if r < mid {
            let (s, ds, dds) = smootherstep((r - self.r1) / w);
            (s, ds / w, dds / (w * w))
        } else {
            let (s, ds, dds) = smootherstep((self.r2 - r) / w);
            (s, -ds / w, dds / (w * w))
        }
    }

    /// `Delta f = f'' + f'/r` (zero at the origin, which lies outside the
    /// support).
    pub fn laplacian(&self, z: Complex64) -> f64 {
        let r = z.norm();
        if r <= self.r1 || r >= self.r2 {
            return 0.0;
        }
        let (_, d1, d2) = self.profile(r);
        d2 + d1 / r
    }
}

impl TestFunction for RadialBump {
    fn eval(&self, z: Complex64) -> f64 {
        self.profile(z.norm()).0
    }
}

/// `sum_j f(lambda_j)`, uncentered.
pub fn linear_statistic<F: TestFunction + ?Sized>(eigs: &[Complex64], f: &F) -> f64 {
    eigs.iter().map(|&z| f.eval(z)).sum()
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    Ok(())
}

/// `sum_k |k| |f^(k)|^2` for the restriction of `f` to `|z| = R`.
pub fn h_half_norm_sq(f: &LaurentPolynomial, radius: f64) -> Result<f64> {
    check_radius(radius)?;
    Ok(f
        .frequencies()
        .into_iter()
        .filter(|&k| k != 0)
        .map(|k| k.unsigned_abs() as f64 * f.fourier_coefficient(k, radius).norm_sqr())
        .sum())
}

/// `(1/4pi) int_{|z| <= R} |grad f|^2`, from `|grad f|^2 = 4 |d_z f|^2` and
/// `int_{|z|<=R} z^p zbar^q = pi R^{2p+2} / (p+1) [p = q]`.
pub fn gradient_energy(f: &LaurentPolynomial, radius: f64) -> Result<f64> {
    check_radius(radius)?;
    // d_z f = sum a c[a][b] z^{a-1} zbar^b.
    let d: Vec<((u32, u32), Complex64)> = f
        .terms()
        .filter(|&((a, _), _)| a > 0)
        .map(|((a, b), c)| ((a - 1, b), c * f64::from(a)))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for &((a1, b1), c1) in &d {
        for &((a2, b2), c2) in &d {
            if i64::from(a1) - i64::from(b1) == i64::from(a2) - i64::from(b2) {
                let p = a1 + b2;
                total += c1 * c2.conj() * radius.powi(2 * p as i32 + 2) / f64::from(p + 1);
            }
        }
    }
    Ok(total.re)
}

fn check_routes(analytic: f64, covariance: f64, what: &str) -> Result<f64> {
    if (analytic - covariance).abs() > ROUTE_TOL * analytic.abs().max(1.0) {
        return Err(Error::Inconsistent(format!(
            "{what}: analytic route {analytic} vs covariance route {covariance}"
        )));
    }
    Ok(analytic)
}

/// `Var = sum c1 c2 Cov(p1, p2)` over all ordered pairs of terms.
fn covariance_route(f: &LaurentPolynomial, mut cov: impl FnMut(MonomialPair, MonomialPair) -> Result<f64>) -> Result<f64> {
    let terms: Vec<((u32, u32), Complex64)> = f.terms().collect();
    let mut total = Complex64::new(0.0, 0.0);
    for &((a1, b1), c1) in &terms {
        for &((a2, b2), c2) in &terms {
            if a1 + a2 == b1 + b2 && a1 + a2 > 0 {
                total += c1 * c2 * cov(MonomialPair::new(a1, b1), MonomialPair::new(a2, b2))?;
            }
        }
    }
    Ok(total.re)
}

/// Limiting variance of the linear statistic of `f` for Ginibre products
/// (any `M`): `(1/4pi) int_D |grad f|^2 + (1/2) |f|_{H^{1/2}}^2`.
/// Also evaluated as a bilinear sum of limiting monomial covariances; a
/// disagreement is reported as an error.
pub fn predicted_variance_ginibre(f: &LaurentPolynomial) -> Result<f64> {
    let analytic = gradient_energy(f, 1.0)? + 0.5 * h_half_norm_sq(f, 1.0)?;
    let cov = covariance_route(f, |p1, p2| Ok(limiting_covariance_ginibre(p1, p2)))?;
    check_routes(analytic, cov, "Ginibre-product variance")
}

/// Edge radius `(1+tau)^{-M/2}` of the truncated-unitary product law.
pub fn trunc_edge_radius(tau: f64, m: usize) -> f64 {
    (1.0 / (1.0 + tau)).powf(m as f64 / 2.0)
}

/// Whether `tau` lies in the range `(1/2, 1)` where the truncated-unitary
/// CLT is established. Outside it the prediction is still computed.
pub fn tau_in_theorem_range(tau: f64) -> bool {
    tau > 0.5 && tau < 1.0
}

/// Truncated-unitary analogue of [`predicted_variance_ginibre`], at the
/// edge radius `(1+tau)^{-M/2}`.
pub fn predicted_variance_trunc(f: &LaurentPolynomial, tau: f64, m: usize) -> Result<f64> {
    if !(tau > 0.0) || m == 0 {
        return Err(Error::InvalidParameter(format!("need tau > 0 and M >= 1, got tau={tau}, M={m}")));
    }
    let r = trunc_edge_radius(tau, m);
    let analytic = gradient_energy(f, r)? + 0.5 * h_half_norm_sq(f, r)?;
    let cov = covariance_route(f, |p1, p2| limiting_covariance_trunc(p1, p2, tau, m))?;
    check_routes(analytic, cov, "truncated-unitary variance")
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn linear_statistic_examples() {
        let eigs = [c(1.0, 0.0), c(0.0, 1.0)];
        assert_eq!(linear_statistic(&eigs, &LaurentPolynomial::zero()), 0.0);
        assert!((linear_statistic(&eigs, &LaurentPolynomial::abs_sq_power(1)) - 2.0).abs() < 1e-15);
        let diag = [c(0.5, 0.0), c(-2.0, 0.0), c(3.25, 0.0)];
        assert!((linear_statistic(&diag, &LaurentPolynomial::re_power(1)) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn h_half_examples() {
        assert_eq!(h_half_norm_sq(&LaurentPolynomial::constant(3.0), 1.0).unwrap(), 0.0);
        assert_eq!(h_half_norm_sq(&LaurentPolynomial::abs_sq_power(2), 0.7).unwrap(), 0.0);
        // Direct DFT of 1024 circle samples.
        for p in 1..=5u32 {
            let f = LaurentPolynomial::re_power(p);
            let samples: Vec<f64> =
                (0..1024).map(|j| f.eval(Complex64::from_polar(1.0, 2.0 * PI * f64::from(j) / 1024.0))).collect();
            let mut oracle = 0.0;
            for k in -8i64..=8 {
                let fk: Complex64 = samples
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * j as i64) as f64 / 1024.0))
                    .sum::<Complex64>()
                    / 1024.0;
                oracle += k.unsigned_abs() as f64 * fk.norm_sqr();
            }
            let got = h_half_norm_sq(&f, 1.0).unwrap();
            assert!((got - f64::from(p) / 2.0).abs() < 1e-14);
            assert!((got - oracle).abs() < 1e-12);
        }
        assert!(h_half_norm_sq(&LaurentPolynomial::re_power(1), 0.0).is_err());
    }

    #[test]
    fn gradient_energy_examples() {
        assert_eq!(gradient_energy(&LaurentPolynomial::constant(2.0), 1.0).unwrap(), 0.0);
        assert!((gradient_energy(&LaurentPolynomial::re_power(1), 2.0).unwrap() - 1.0).abs() < 1e-14);
        for p in 1..=4u32 {
            let g = gradient_energy(&LaurentPolynomial::re_power(p), 1.0).unwrap();
            assert!((g - f64::from(p) / 4.0).abs() < 1e-14);
        }
    }

    /// Midpoint quadrature of `|grad f|^2 / 4pi` on a polar grid, gradient
    /// by central differences.
    fn grid_gradient_energy(f: &LaurentPolynomial, radius: f64, cells: usize) -> f64 {
        let (hr, ht) = (radius / cells as f64, 2.0 * PI / cells as f64);
        let e = 1e-5;
        let mut acc = 0.0;
        for i in 0..cells {
            let r = (i as f64 + 0.5) * hr;
            for j in 0..cells {
                let z = Complex64::from_polar(r, (j as f64 + 0.5) * ht);
                let fx = (f.eval(z + c(e, 0.0)) - f.eval(z - c(e, 0.0))) / (2.0 * e);
                let fy = (f.eval(z + c(0.0, e)) - f.eval(z - c(0.0, e))) / (2.0 * e);
                acc += (fx * fx + fy * fy) * r * hr * ht;
            }
        }
        acc / (4.0 * PI)
    }

    #[test]
    fn gradient_energy_matches_grid_quadrature() {
        for p in 1..=3u32 {
            let got = grid_gradient_energy(&LaurentPolynomial::re_power(p), 1.0, 2048);
            assert!((got - f64::from(p) / 4.0).abs() < 1e-4, "p={p}: {got}");
        }
        let g = LaurentPolynomial::re_power(1)
            .add(&LaurentPolynomial::symmetric_monomial(2, 1, c(0.3, -0.4)))
            .add(&LaurentPolynomial::abs_sq_power(1));
        let want = gradient_energy(&g, 0.8).unwrap();
        let got = grid_gradient_energy(&g, 0.8, 2048);
        assert!((got - want).abs() < 1e-4, "{got} vs {want}");
    }

    #[test]
    fn variance_examples() {
        assert_eq!(predicted_variance_ginibre(&LaurentPolynomial::constant(1.0)).unwrap(), 0.0);
        assert!((predicted_variance_ginibre(&LaurentPolynomial::re_power(2)).unwrap() - 1.0).abs() < 1e-14);
        assert!((predicted_variance_ginibre(&LaurentPolynomial::re_power(1)).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(predicted_variance_trunc(&LaurentPolynomial::constant(1.0), 0.6, 2).unwrap(), 0.0);
        let v = predicted_variance_trunc(&LaurentPolynomial::re_power(1), 1.0, 1).unwrap();
        assert!((v - 0.25).abs() < 1e-12);
        assert!((trunc_edge_radius(0.6, 2) - 0.625).abs() < 1e-15);
        assert!(tau_in_theorem_range(0.6) && !tau_in_theorem_range(0.3));
        assert!(predicted_variance_trunc(&LaurentPolynomial::re_power(1), 0.3, 2).is_ok());
    }

    #[test]
    fn radial_bump_is_c2() {
        let b = RadialBump::new(0.3, 0.7, 0.1).unwrap();
        assert!(RadialBump::new(0.05, 0.7, 0.1).is_err());
        assert!(RadialBump::new(0.5, 0.4, 0.1).is_err());
        // Profile and derivatives continuous at the joints r1, mid, r2.
        let h = 1e-9;
        for &r in &[0.3, 0.5, 0.7] {
            let (l0, l1, l2) = b.profile(r - h);
            let (r0, r1, r2) = b.profile(r + h);
            assert!((l0 - r0).abs() < 1e-6 && (l1 - r1).abs() < 1e-6 && (l2 - r2).abs() < 1e-5, "r={r}");
        }
        // Derivatives agree with finite differences inside the pieces.
        for &r in &[0.35, 0.45, 0.62] {
            let e = 1e-5;
            let (v0, v1, v2) = b.profile(r);
            let fd1 = (b.profile(r + e).0 - b.profile(r - e).0) / (2.0 * e);
            let fd2 = (b.profile(r + e).0 - 2.0 * v0 + b.profile(r - e).0) / (e * e);
            assert!((fd1 - v1).abs() < 1e-6 && (fd2 - v2).abs() < 1e-3);
        }
        assert!((b.eval(c(0.0, 0.5)) - 1.0).abs() < 1e-15);
        assert_eq!(b.eval(c(0.2, 0.0)), 0.0);
        assert_eq!(b.eval(c(0.0, -0.75)), 0.0);
    }

    fn random_poly(coefs: &[(u32, u32, f64, f64)]) -> LaurentPolynomial {
        coefs.iter().fold(LaurentPolynomial::zero(), |acc, &(a, b, re, im)| {
            acc.add(&LaurentPolynomial::symmetric_monomial(a, b, c(re, im)))
        })
    }

    proptest! {
        #[test]
        fn routes_agree(coefs in proptest::collection::vec((0u32..4, 0u32..4, -1.0f64..1.0, -1.0f64..1.0), 1..6),
                        tau in 0.05f64..1.5, m in 1usize..4) {
            let f = random_poly(&coefs);
            prop_assert!(predicted_variance_ginibre(&f).unwrap() >= -1e-12);
            prop_assert!(predicted_variance_trunc(&f, tau, m).unwrap() >= -1e-12);
        }

        #[test]
        fn h_half_nonnegative_and_radial_zero(coefs in proptest::collection::vec((0u32..4, 0u32..4, -1.0f64..1.0, -1.0f64..1.0), 1..6), r in 0.1f64..2.0) {
            let f = random_poly(&coefs);
            prop_assert!(h_half_norm_sq(&f, r).unwrap() >= 0.0);
            let radial = coefs.iter().fold(LaurentPolynomial::zero(), |acc, &(a, _, re, _)| acc.add(&LaurentPolynomial::abs_sq_power(a).scale(re)));
            prop_assert_eq!(h_half_norm_sq(&radial, r).unwrap(), 0.0);
        }

        #[test]
        fn statistic_is_additive(xs in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 0..10), ys in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 0..10)) {
            let f = LaurentPolynomial::re_power(2).add(&LaurentPolynomial::abs_sq_power(1));
            let a: Vec<Complex64> = xs.iter().map(|&(x, y)| c(x, y)).collect();
            let b: Vec<Complex64> = ys.iter().map(|&(x, y)| c(x, y)).collect();
            let joined: Vec<Complex64> = a.iter().chain(&b).copied().collect();
            let lhs = linear_statistic(&joined, &f);
            let rhs = linear_statistic(&a, &f) + linear_statistic(&b, &f);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }
}
