//! Exact finite-n determinantal formulas for products of Ginibre matrices
//! and of truncated Haar unitaries.
//!
//! Both eigenvalue processes are determinantal with a radial weight `w` and
//! orthogonal monomials `z^t / sqrt(h_t)`, `h_t = int |z|^{2t} w`. Every
//! quantity here reduces to ratios `h_{t+a} / h_t`, which are evaluated as
//! direct products of small factors (exact and overflow-free); log-Gamma is
//! used only where an `h_t` itself is requested.

mod cumulants;

pub use cumulants::{
    cumulant, for_each_surjection, monomial_covariance, surjection_count, MAX_CUMULANT_ORDER,
};

use num_complex::Complex64;

use crate::quad::integrate;
use crate::special::{bessel_k0, ln_gamma};
use crate::{Error, Result};

/// Which determinantal process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    /// Eigenvalues of `n^{-M/2} X_1 ... X_M` with complex Ginibre factors.
    GinibreProduct { n: usize, m: usize },
    /// Eigenvalues of a product of `M` truncations of `(n + kappa)`-
    /// dimensional Haar unitaries.
    TruncatedUnitary { n: usize, m: usize, kappa: usize },
}

impl EnsembleKind {
    pub fn ginibre(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter("n and M must be positive".into()));
        }
        Ok(Self::GinibreProduct { n, m })
    }

    pub fn truncated(n: usize, m: usize, kappa: usize) -> Result<Self> {
        if n == 0 || m == 0 || kappa == 0 {
            return Err(Error::InvalidParameter("n, M and kappa must be positive".into()));
        }
        Ok(Self::TruncatedUnitary { n, m, kappa })
    }

    /// Truncated ensemble with `kappa = floor(tau n)`.
    pub fn truncated_tau(n: usize, m: usize, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        Self::truncated(n, m, (tau * n as f64).floor() as usize)
    }

    pub fn n(&self) -> usize {
        match *self {
            Self::GinibreProduct { n, .. } | Self::TruncatedUnitary { n, .. } => n,
        }
    }

    pub fn m(&self) -> usize {
        match *self {
            Self::GinibreProduct { m, .. } | Self::TruncatedUnitary { m, .. } => m,
        }
    }

    /// `h_{t+a} / h_t`.
    pub fn moment_ratio(&self, t: u64, a: u32) -> f64 {
        let mut r = 1.0;
        match *self {
            Self::GinibreProduct { n, .. } => {
                let n = n as f64;
                for i in 1..=u64::from(a) {
                    r *= (t + i) as f64 / n;
                }
            }
            Self::TruncatedUnitary { kappa, .. } => {
                for i in 1..=u64::from(a) {
                    r *= (t + i) as f64 / (t + kappa as u64 + i) as f64;
                }
            }
        }
        r.powi(self.m() as i32)
    }

    /// `log h_t`.
    pub fn log_h(&self, t: u64) -> f64 {
        match *self {
            Self::GinibreProduct { n, m } => ginibre_h(t, n, m),
            Self::TruncatedUnitary { m, kappa, .. } => trunc_h(t, m, kappa),
        }
    }
}

/// `log h_iota` with `h_iota = pi n^{-M iota} Gamma(iota + 1)^M`.
pub fn ginibre_h(iota: u64, n: usize, m: usize) -> f64 {
    let (t, n, m) = (iota as f64, n as f64, m as f64);
    std::f64::consts::PI.ln() - m * t * n.ln() + m * ln_gamma(t + 1.0)
}

/// `log h_t` with `h_t = pi [Gamma(t + 1) / Gamma(t + kappa + 1)]^M`.
pub fn trunc_h(t: u64, m: usize, kappa: usize) -> f64 {
    let t = t as f64;
    std::f64::consts::PI.ln() + m as f64 * (ln_gamma(t + 1.0) - ln_gamma(t + kappa as f64 + 1.0))
}

/// `K_n(z, w) = sum_{iota < n} (z conj(w))^iota / h_iota` (weight not
/// included). Overflows to infinity where the true value exceeds `f64`;
/// [`ginibre_kernel_log`] covers that range.
pub fn ginibre_kernel(z: Complex64, w: Complex64, n: usize, m: usize) -> Complex64 {
    let (log_mag, phase) = ginibre_kernel_log(z, w, n, m);
    phase * log_mag.exp()
}

/// `(log |K_n(z, w)|, K_n / |K_n|)`, summed with a common log-magnitude
/// offset so no term overflows.
pub fn ginibre_kernel_log(z: Complex64, w: Complex64, n: usize, m: usize) -> (f64, Complex64) {
    let x = z * w.conj();
    let r = x.norm();
    if r == 0.0 {
        return (-std::f64::consts::PI.ln(), Complex64::new(1.0, 0.0));
    }
    let (lr, theta) = (r.ln(), x.arg());
    let logs: Vec<f64> = (0..n as u64).map(|i| i as f64 * lr - ginibre_h(i, n, m)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: Complex64 = logs
        .iter()
        .enumerate()
        .map(|(i, &l)| Complex64::from_polar((l - top).exp(), i as f64 * theta))
        .sum();
    (top + s.norm().ln(), s / s.norm())
}

/// Radial weight whose moments are `int |z|^{2t} w = pi Gamma(t+1)^M`
/// (the `n = 1` convention): `exp(-|z|^2)` for `M = 1`, `2 K_0(2|z|)` for
/// `M = 2`. Larger `M` needs a Meijer G-function and is not provided.
pub fn weight_closed_form(z: Complex64, m: usize) -> Result<f64> {
    let r = z.norm();
    match m {
        1 => Ok((-r * r).exp()),
        2 => {
            if r == 0.0 {
                Ok(f64::INFINITY)
            } else {
                Ok(2.0 * bessel_k0(2.0 * r)?)
            }
        }
        _ => Err(Error::Unsupported(format!(
            "closed-form weight only for M <= 2, got M = {m}"
        ))),
    }
}

/// Weight in the variable of the normalized product: `n^M w(n^{M/2} z)`,
/// with moments `h_iota = pi n^{-M iota} Gamma(iota+1)^M`.
pub fn ginibre_weight(z: Complex64, n: usize, m: usize) -> Result<f64> {
    let nf = n as f64;
    Ok(nf.powi(m as i32) * weight_closed_form(z * nf.powf(m as f64 / 2.0), m)?)
}

/// Exponents `z^a conj(z)^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialPair {
    pub a: u32,
    pub b: u32,
}

impl MonomialPair {
    pub fn new(a: u32, b: u32) -> Self {
        Self { a, b }
    }
}

/// Exponent lists `(alpha_j, beta_j)` of the monomials fed to `Phi_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialTuple {
    alphas: Vec<u32>,
    betas: Vec<u32>,
}

impl MonomialTuple {
    pub fn new(alphas: Vec<u32>, betas: Vec<u32>) -> Result<Self> {
        if alphas.len() != betas.len() || alphas.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "tuple needs equal non-empty lengths, got {} and {}",
                alphas.len(),
                betas.len()
            )));
        }
        Ok(Self { alphas, betas })
    }

    pub fn from_pairs(pairs: &[MonomialPair]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| p.a).collect(), pairs.iter().map(|p| p.b).collect())
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn alphas(&self) -> &[u32] {
        &self.alphas
    }

    pub fn betas(&self) -> &[u32] {
        &self.betas
    }

    /// `s = sum alpha_j`.
    pub fn s(&self) -> u32 {
        self.alphas.iter().sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.alphas.iter().sum::<u32>() == self.betas.iter().sum::<u32>()
    }

    /// `eta_j = sum_{i <= j} (beta_i - alpha_i)`.
    pub fn etas(&self) -> Vec<i64> {
        let mut acc = 0i64;
        self.alphas
            .iter()
            .zip(&self.betas)
            .map(|(&a, &b)| {
                acc += i64::from(b) - i64::from(a);
                acc
            })
            .collect()
    }

    pub fn eta_max(&self) -> i64 {
        self.etas().into_iter().max().expect("non-empty")
    }

    pub fn eta_min(&self) -> i64 {
        self.etas().into_iter().min().expect("non-empty")
    }
}

/// `Phi_m(z^{alpha_1} zbar^{beta_1}, ..., z^{alpha_m} zbar^{beta_m})`.
///
/// Rotational invariance forces the orthogonality indices around the cycle
/// to be `q_j = l + eta_j`, leaving one sum over
/// `l in [-eta_min, n - 1 - eta_max]` of `prod_j h_{q_j + alpha_j} / h_{q_j}`.
/// Unbalanced tuples give exactly 0.
pub fn phi_m(tuple: &MonomialTuple, kind: &EnsembleKind) -> f64 {
    if !tuple.is_balanced() {
        return 0.0;
    }
    let etas = tuple.etas();
    let lo = -etas.iter().copied().min().expect("non-empty").min(0);
    let hi = kind.n() as i64 - 1 - etas.iter().copied().max().expect("non-empty").max(0);
    let mut total = 0.0;
    for l in lo..=hi {
        let mut term = 1.0;
        for (&eta, &a) in etas.iter().zip(&tuple.alphas) {
            if a > 0 {
                term *= kind.moment_ratio((l + eta) as u64, a);
            }
        }
        total += term;
    }
    total
}

/// Large-n expansion of `Phi_m` for a balanced Ginibre tuple with `s >= 1`:
/// `n/(Ms+1) - (1 + eta_max) + 1/2 + (1/s) sum_j (alpha_j eta_j + alpha_j(alpha_j+1)/2)`.
pub fn comblemma_asymptotic(tuple: &MonomialTuple, n: usize, m: usize) -> Result<f64> {
    if !tuple.is_balanced() {
        return Err(Error::InvalidParameter("asymptotic form needs a balanced tuple".into()));
    }
    let s = tuple.s();
    if s == 0 {
        return Err(Error::InvalidParameter("asymptotic form needs s >= 1".into()));
    }
    let (s, mf) = (f64::from(s), m as f64);
    let etas = tuple.etas();
    let eta_max = etas.iter().copied().max().expect("non-empty").max(0) as f64;
    let corr: f64 = tuple
        .alphas
        .iter()
        .zip(&etas)
        .map(|(&a, &eta)| {
            let a = f64::from(a);
            a * eta as f64 + a * (a + 1.0) / 2.0
        })
        .sum();
    Ok(n as f64 / (mf * s + 1.0) - (1.0 + eta_max) + 0.5 + corr / s)
}

fn balanced_s(p1: MonomialPair, p2: MonomialPair) -> Option<u32> {
    let s = p1.a + p2.a;
    (s == p1.b + p2.b && s > 0).then_some(s)
}

/// Limiting covariance of the linear statistics of `z^{a1} zbar^{b1}` and
/// `z^{a2} zbar^{b2}` for Ginibre products: `max(0, a1 - b1) + b1 a2 / s`
/// on the balanced diagonal `a1 + a2 = b1 + b2 = s`, else 0.
pub fn limiting_covariance_ginibre(p1: MonomialPair, p2: MonomialPair) -> f64 {
    match balanced_s(p1, p2) {
        Some(s) => f64::from(p1.a.saturating_sub(p1.b)) + f64::from(p1.b * p2.a) / f64::from(s),
        None => 0.0,
    }
}

/// Truncated-unitary limit:
/// `M tau a1 b2 int_0^1 x^{Ms-1} / (x+tau)^{Ms+1} dx + max(0, b1 - a1) (1+tau)^{-Ms}`,
/// the integral by adaptive quadrature.
pub fn limiting_covariance_trunc(p1: MonomialPair, p2: MonomialPair, tau: f64, m: usize) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    let Some(s) = balanced_s(p1, p2) else {
        return Ok(0.0);
    };
    let p = (m as u32 * s) as i32;
    let mut first = 0.0;
    if p1.a * p2.b > 0 {
        let q = integrate(|x| x.powi(p - 1) / (x + tau).powi(p + 1), 0.0, 1.0, 1e-10, 0.0)?;
        first = m as f64 * tau * f64::from(p1.a * p2.b) * q.value;
    }
    let second = f64::from(p1.b.saturating_sub(p1.a)) * (1.0 / (1.0 + tau)).powi(p);
    Ok(first + second)
}

/// Expected normalized statistic `(1/n) E sum |lambda|^{2L}`: the exact
/// finite-n value and its large-n limit.
pub fn expected_monomial(l: u32, kind: &EnsembleKind, tau: Option<f64>) -> Result<(f64, f64)> {
    let n = kind.n();
    let exact = (0..n as u64).map(|t| kind.moment_ratio(t, l)).sum::<f64>() / n as f64;
    let m = kind.m() as f64;
    let limit = match kind {
        EnsembleKind::GinibreProduct { .. } => 1.0 / (m * f64::from(l) + 1.0),
        EnsembleKind::TruncatedUnitary { .. } => {
            let tau = tau.ok_or_else(|| {
                Error::InvalidParameter("truncated-unitary limit needs tau".into())
            })?;
            let p = (kind.m() as u32 * l) as i32;
            integrate(|x| (x / (tau + x)).powi(p), 0.0, 1.0, 1e-12, 0.0)?.value
        }
    };
    Ok((exact, limit))
}

/// Radial CDF `r^{2/M}` of the M-fold circular law. Arguments outside
/// `[0, 1]` are clamped; the flag reports whether that happened.
pub fn circular_law_radial_cdf(r: f64, m: usize) -> (f64, bool) {
    let clamped = r.clamp(0.0, 1.0);
    (clamped.powf(2.0 / m as f64), clamped != r)
}

/// Radial CDF `tau u / (1 - u)`, `u = r^{2/M}`, of the truncated-unitary
/// product law; 1 at and beyond the edge `(1+tau)^{-M/2}`.
pub fn trunc_radial_cdf(r: f64, tau: f64, m: usize) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let edge = (1.0 / (1.0 + tau)).powf(m as f64 / 2.0);
    if r >= edge {
        return 1.0;
    }
    let u = r.powf(2.0 / m as f64);
    (tau * u / (1.0 - u)).min(1.0)
}

/// Bulk scaling limit of the kernel,
/// `(1/pi) (xi1 conj(xi2) / |xi1 xi2|)^{(1-M)/2} exp(-(|xi1|^2 + |xi2|^2)/2 + xi1 conj(xi2))`.
pub fn bulk_limit_kernel(xi1: Complex64, xi2: Complex64, m: usize) -> Result<Complex64> {
    if xi1.norm() == 0.0 || xi2.norm() == 0.0 {
        return Err(Error::InvalidParameter("bulk kernel needs nonzero arguments".into()));
    }
    let x = xi1 * xi2.conj();
    let phase = Complex64::from_polar(1.0, x.arg() * (1.0 - m as f64) / 2.0);
    let expo = Complex64::new(-(xi1.norm_sqr() + xi2.norm_sqr()) / 2.0, 0.0) + x;
    Ok(phase * expo.exp() / std::f64::consts::PI)
}
