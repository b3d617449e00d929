//! Real-valued polynomials in `z` and `conj(z)`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerance for the Hermitian symmetry `c[b][a] = conj(c[a][b])`.
const SYMMETRY_TOL: f64 = 1e-12;

/// `f(z) = sum c[a][b] z^a conj(z)^b`, real on the whole plane because the
/// coefficients satisfy `c[b][a] = conj(c[a][b])`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaurentPolynomial {
    terms: BTreeMap<(u32, u32), Complex64>,
}

impl LaurentPolynomial {
    /// Builds from coefficients, summing duplicates and dropping zeros.
    pub fn new(terms: impl IntoIterator<Item = ((u32, u32), Complex64)>) -> Result<Self> {
        let mut map: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
        for (k, c) in terms {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidParameter("non-finite coefficient".into()));
            }
            *map.entry(k).or_default() += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        let scale = map.values().map(|c| c.norm()).fold(1.0, f64::max);
        for (&(a, b), &c) in &map {
            let mirror = map.get(&(b, a)).copied().unwrap_or_default();
            if (mirror - c.conj()).norm() > SYMMETRY_TOL * scale {
                return Err(Error::InvalidParameter(format!(
                    "coefficients of z^{a} zbar^{b} and z^{b} zbar^{a} are not conjugate"
                )));
            }
        }
        Ok(Self { terms: map })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::new([((0, 0), Complex64::new(c, 0.0))]).expect("real constant is symmetric")
    }

    /// `Re z^p`.
    pub fn re_power(p: u32) -> Self {
        if p == 0 {
            return Self::constant(1.0);
        }
        Self::new([((p, 0), Complex64::new(0.5, 0.0)), ((0, p), Complex64::new(0.5, 0.0))])
            .expect("symmetric by construction")
    }

    /// `Im z^p`.
    pub fn im_power(p: u32) -> Self {
        if p == 0 {
            return Self::zero();
        }
        Self::new([((p, 0), Complex64::new(0.0, -0.5)), ((0, p), Complex64::new(0.0, 0.5))])
            .expect("symmetric by construction")
    }

    /// `|z|^{2L}`.
    pub fn abs_sq_power(l: u32) -> Self {
        Self::new([((l, l), Complex64::new(1.0, 0.0))]).expect("diagonal term")
    }

    /// `c z^a conj(z)^b + conj(c) z^b conj(z)^a` (or `2 Re(c) |z|^{2a}` on
    /// the diagonal).
    pub fn symmetric_monomial(a: u32, b: u32, c: Complex64) -> Self {
        if a == b {
            Self::new([((a, a), Complex64::new(2.0 * c.re, 0.0))]).expect("real diagonal")
        } else {
            Self::new([((a, b), c), ((b, a), c.conj())]).expect("symmetric by construction")
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coefficient(&self, a: u32, b: u32) -> Complex64 {
        self.terms.get(&(a, b)).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree `a + b` (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(a, b)| a + b).max().unwrap_or(0)
    }

    /// True when `f` depends on `|z|` only.
    pub fn is_radial(&self) -> bool {
        self.terms.keys().all(|&(a, b)| a == b)
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        // Powers are built incrementally to avoid repeated powu calls.
        let max_a = self.terms.keys().map(|k| k.0).max().unwrap_or(0) as usize;
        let max_b = self.terms.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let mut zp = Vec::with_capacity(max_a + 1);
        let mut zq = Vec::with_capacity(max_b + 1);
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..=max_a {
            zp.push(acc);
            acc *= z;
        }
        let zc = z.conj();
        acc = Complex64::new(1.0, 0.0);
        for _ in 0..=max_b {
            zq.push(acc);
            acc *= zc;
        }
        self.terms
            .iter()
            .map(|(&(a, b), &c)| (c * zp[a as usize] * zq[b as usize]).re)
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.terms.clone();
        for (&k, &c) in &other.terms {
            *out.entry(k).or_default() += c;
        }
        out.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { terms: out }
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&k, &c)| (k, c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
        for (&(a1, b1), &c1) in &self.terms {
            for (&(a2, b2), &c2) in &other.terms {
                *out.entry((a1 + a2, b1 + b2)).or_default() += c1 * c2;
            }
        }
        out.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { terms: out }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(1.0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Fourier coefficient `f^(k) = sum_{a-b=k} c[a][b] R^{a+b}` of
    /// `theta -> f(R e^{i theta})`.
    pub fn fourier_coefficient(&self, k: i64, radius: f64) -> Complex64 {
        self.terms
            .iter()
            .filter(|(&(a, b), _)| i64::from(a) - i64::from(b) == k)
            .map(|(&(a, b), &c)| c * radius.powi((a + b) as i32))
            .sum()
    }

    /// Distinct frequencies `a - b` carried by the terms.
    pub fn frequencies(&self) -> Vec<i64> {
        let mut f: Vec<i64> = self.terms.keys().map(|&(a, b)| i64::from(a) - i64::from(b)).collect();
        f.sort_unstable();
        f.dedup();
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_coefficients() {
        assert!(LaurentPolynomial::new([((1, 0), Complex64::new(1.0, 0.0))]).is_err());
        assert!(LaurentPolynomial::new([((1, 1), Complex64::new(0.0, 1.0))]).is_err());
    }

    #[test]
    fn evaluation() {
        let z = Complex64::new(0.3, -1.2);
        assert!((LaurentPolynomial::re_power(2).eval(z) - (z * z).re).abs() < 1e-15);
        assert!((LaurentPolynomial::im_power(3).eval(z) - z.powu(3).im).abs() < 1e-15);
        assert!((LaurentPolynomial::abs_sq_power(1).eval(z) - z.norm_sqr()).abs() < 1e-15);
        assert_eq!(LaurentPolynomial::zero().eval(z), 0.0);
    }

    #[test]
    fn product_matches_pointwise() {
        let f = LaurentPolynomial::re_power(2).add(&LaurentPolynomial::symmetric_monomial(2, 1, Complex64::new(0.5, 2.0)));
        let g = f.pow(3);
        let z = Complex64::new(-0.7, 0.4);
        assert!((g.eval(z) - f.eval(z).powi(3)).abs() < 1e-13);
        assert_eq!(g.degree(), 9);
        assert!(LaurentPolynomial::abs_sq_power(3).is_radial());
        assert!(!f.is_radial());
    }

    #[test]
    fn fourier_coefficients_of_re_power() {
        let f = LaurentPolynomial::re_power(3);
        assert_eq!(f.frequencies(), vec![-3, 3]);
        assert!((f.fourier_coefficient(3, 2.0) - Complex64::new(4.0, 0.0)).norm() < 1e-15);
        assert_eq!(f.fourier_coefficient(1, 2.0), Complex64::new(0.0, 0.0));
    }
}
