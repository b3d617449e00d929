//! Monte Carlo estimators: k-statistics, Chebyshev error bars, KS distances,
//! smoothed correlation functions and small-ball probabilities.

use num_complex::Complex64;

use crate::ensembles::{sample_atom, AtomDistribution, SeedStream};
use crate::numlin::SpectrumSample;
use crate::{Error, Result};

/// Failure probability behind every Chebyshev half-width (95% bars).
pub const CHEBYSHEV_DELTA: f64 = 0.05;

pub const MIN_CUMULANT_REPLICAS: usize = 8;

/// Half-width `se / sqrt(delta)`: by Chebyshev the estimate misses its mean
/// by more than this with probability at most `delta`.
pub fn chebyshev_half_width(std_error: f64, delta: f64) -> f64 {
    std_error / delta.sqrt()
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub half_width: f64,
    pub replicas: usize,
}

impl Estimate {
    pub fn new(value: f64, std_error: f64, replicas: usize) -> Self {
        Self {
            value,
            std_error,
            half_width: chebyshev_half_width(std_error, CHEBYSHEV_DELTA),
            replicas,
        }
    }

    /// Mean and standard error of the mean.
    pub fn from_values(values: &[f64]) -> Self {
        let m = values.len();
        let mean = values.iter().sum::<f64>() / m as f64;
        let se = if m > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
            (var / m as f64).sqrt()
        } else {
            f64::NAN
        };
        Self::new(mean, se, m)
    }

    /// True when `target` lies inside the Chebyshev bar.
    pub fn covers(&self, target: f64) -> bool {
        (self.value - target).abs() <= self.half_width
    }
}

/// Per-replica values of one linear statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticSample {
    values: Vec<f64>,
    function: String,
    ensemble: String,
}

impl StatisticSample {
    pub fn new(values: Vec<f64>, function: impl Into<String>, ensemble: impl Into<String>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("replica {i} has a non-finite statistic")));
        }
        Ok(Self {
            values,
            function: function.into(),
            ensemble: ensemble.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn function(&self) -> &str {
        &self.function
    }

    pub fn ensemble(&self) -> &str {
        &self.ensemble
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Values minus a centering constant (the empirical or the exact mean).
    pub fn centered(&self, center: f64) -> Vec<f64> {
        self.values.iter().map(|v| v - center).collect()
    }
}

/// k-statistics `k_2, k_3, k_4` from the power sums of already centered data.
fn k_stats(m: f64, s1: f64, s2: f64, s3: f64, s4: f64) -> [f64; 3] {
    let k2 = (m * s2 - s1 * s1) / (m * (m - 1.0));
    let k3 = (2.0 * s1.powi(3) - 3.0 * m * s1 * s2 + m * m * s3) / (m * (m - 1.0) * (m - 2.0));
    let k4 = (-6.0 * s1.powi(4) + 12.0 * m * s1 * s1 * s2 - 3.0 * m * (m - 1.0) * s2 * s2
        - 4.0 * m * (m + 1.0) * s1 * s3
        + m * m * (m + 1.0) * s4)
        / (m * (m - 1.0) * (m - 2.0) * (m - 3.0));
    [k2, k3, k4]
}

/// Unbiased k-statistics `k_1..k_{max_k}` (`max_k <= 4`), each with a
/// jackknife standard error and Chebyshev half-width.
pub fn empirical_cumulants(sample: &StatisticSample, max_k: usize) -> Result<Vec<Estimate>> {
    if max_k == 0 || max_k > 4 {
        return Err(Error::InvalidParameter(format!("max_k must be in 1..=4, got {max_k}")));
    }
    let m = sample.len();
    if m < MIN_CUMULANT_REPLICAS {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_CUMULANT_REPLICAS} replicas, got {m}"
        )));
    }
    let mean = sample.mean();
    // k_{>=2} are shift invariant, so work with centered data throughout.
    let x = sample.centered(mean);
    let mut s = [0.0f64; 5];
    for &v in &x {
        let mut p = 1.0;
        for sj in s.iter_mut() {
            *sj += p;
            p *= v;
        }
    }
    let mf = m as f64;
    let full = k_stats(mf, s[1], s[2], s[3], s[4]);
    // Leave-one-out by subtracting each point's powers.
    let mut loo = vec![[0.0f64; 3]; m];
    for (i, &v) in x.iter().enumerate() {
        let (v2, v3, v4) = (v * v, v * v * v, v * v * v * v);
        loo[i] = k_stats(mf - 1.0, s[1] - v, s[2] - v2, s[3] - v3, s[4] - v4);
    }
    let mut out = vec![Estimate::from_values(sample.values())];
    for k in 0..(max_k - 1) {
        let jmean = loo.iter().map(|l| l[k]).sum::<f64>() / mf;
        let var = (mf - 1.0) / mf * loo.iter().map(|l| (l[k] - jmean).powi(2)).sum::<f64>();
        out.push(Estimate::new(full[k], var.sqrt(), m));
    }
    Ok(out)
}

pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("median of an empty sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    Ok(if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) })
}

/// Kolmogorov-Smirnov distance `sup |F_emp - F|` of a sample against a
/// continuous CDF.
pub fn ks_distance(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("KS distance of an empty sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / m - f).max(f - i as f64 / m);
    }
    Ok(d)
}

/// Smooth window `G(w) = c (1 - |w|^2/r0^2)^3` on `|w| < r0`, normalized to
/// unit mass (`c = 4 / (pi r0^2)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpWindow {
    radius: f64,
    amplitude: f64,
}

impl BumpWindow {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("window radius must be positive, got {radius}")));
        }
        Ok(Self {
            radius,
            amplitude: 4.0 / (std::f64::consts::PI * radius * radius),
        })
    }

    /// Same shape with the given total mass (0 gives the zero window).
    pub fn with_mass(radius: f64, mass: f64) -> Result<Self> {
        let mut w = Self::new(radius)?;
        w.amplitude *= mass;
        Ok(w)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn mass(&self) -> f64 {
        self.amplitude * std::f64::consts::PI * self.radius * self.radius / 4.0
    }

    pub fn eval(&self, w: Complex64) -> f64 {
        let u = w.norm_sqr() / (self.radius * self.radius);
        if u >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - u).powi(3)
        }
    }
}

/// Where the root process lives: `|z| / scale` must lie in
/// `[tau0, 1 - tau0]` for every center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkRegion {
    pub scale: f64,
    pub tau0: f64,
}

impl BulkRegion {
    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm() / self.scale;
        r >= self.tau0 && r <= 1.0 - self.tau0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    pub estimate: Estimate,
    /// No point of any replica fell inside the window support.
    pub empty_support: bool,
}

/// Smoothed `k`-point correlation (`k = 1, 2`) of a point process from
/// samples: the replica mean of `sum_i G(zeta_i - z_1)` or of
/// `sum_{i != j} G(zeta_i - z_1) G(zeta_j - z_2)`.
pub fn smoothed_correlation(
    samples: &[SpectrumSample],
    window: &BumpWindow,
    centers: &[Complex64],
    k: usize,
    bulk: BulkRegion,
) -> Result<CorrelationEstimate> {
    if k == 0 || k > 2 {
        return Err(Error::InvalidParameter(format!("correlation order must be 1 or 2, got {k}")));
    }
    if centers.len() != k {
        return Err(Error::DimensionMismatch(format!("{} centers for k = {k}", centers.len())));
    }
    if samples.len() < 2 {
        return Err(Error::InvalidParameter("need at least two replicas".into()));
    }
    if let Some(z) = centers.iter().find(|&&z| !bulk.contains(z)) {
        return Err(Error::InvalidParameter(format!("center {z} lies outside the bulk region")));
    }
    let mut hits = 0usize;
    let values: Vec<f64> = samples
        .iter()
        .map(|s| {
            let g: Vec<Vec<f64>> = centers
                .iter()
                .map(|&c| s.eigenvalues().iter().map(|&z| window.eval(z - c)).collect())
                .collect();
            hits += g[0].iter().filter(|&&v| v != 0.0).count();
            if k == 1 {
                g[0].iter().sum()
            } else {
                let (a, b) = (&g[0], &g[1]);
                let cross: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                a.iter().sum::<f64>() * b.iter().sum::<f64>() - cross
            }
        })
        .collect();
    Ok(CorrelationEstimate {
        estimate: Estimate::from_values(&values),
        empty_support: hits == 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallBallEstimate {
    pub probability: Estimate,
    pub worst_shift: Complex64,
}

/// `max_z P(|<xi, v> - z| < radius)` over the given shifts, `xi` an iid
/// vector of atoms, estimated from `replicas` draws shared by all shifts.
pub fn anticoncentration_check(
    dist: AtomDistribution,
    v: &[Complex64],
    shifts: &[Complex64],
    radius: f64,
    replicas: usize,
    rng: &mut SeedStream,
) -> Result<SmallBallEstimate> {
    let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("v must be a unit vector, |v| = {norm}")));
    }
    if shifts.is_empty() || replicas == 0 {
        return Err(Error::InvalidParameter("need at least one shift and one replica".into()));
    }
    let draws: Vec<Complex64> = (0..replicas)
        .map(|_| v.iter().map(|&vi| sample_atom(dist, rng) * vi).sum())
        .collect();
    let mut best = (f64::NEG_INFINITY, shifts[0]);
    for &z in shifts {
        let p = draws.iter().filter(|&&s| (s - z).norm() < radius).count() as f64 / replicas as f64;
        if p > best.0 {
            best = (p, z);
        }
    }
    let m = replicas as f64;
    let se = (best.0 * (1.0 - best.0) / m).sqrt();
    Ok(SmallBallEstimate {
        probability: Estimate::new(best.0, se, replicas),
        worst_shift: best.1,
    })
}
