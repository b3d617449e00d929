//! Random matrix ensembles: atom distributions, iid matrices, Haar
//! unitaries, truncated-unitary products and normalized iid products.
//!
//! All randomness flows through [`SeedStream`], a ChaCha20 generator keyed
//! by a master seed and selected by a stream index, so every sample is a
//! pure function of `(spec, master_seed, stream_index)`.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::numlin::{qr, ComplexDenseMatrix};
use crate::{Error, Result};

/// Deterministic random stream; distinct `(master_seed, stream_index)`
/// pairs give independent sequences.
#[derive(Debug, Clone)]
pub struct SeedStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha20Rng,
}

impl SeedStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            rng,
        }
    }

    /// Stream for replica `replica` of the sampling role `tag`. Roles keep
    /// paired ensembles of one experiment on disjoint streams.
    pub fn for_replica(master_seed: u64, tag: u32, replica: u32) -> Self {
        Self::new(master_seed, (u64::from(tag) << 32) | u64::from(replica))
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }
}

impl RngCore for SeedStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Law of a single matrix entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomDistribution {
    /// Re and Im independent `N(0, 1/2)`.
    ComplexGaussian,
    RealGaussian,
    /// `+1` or `-1` with probability 1/2 each.
    Rademacher,
    /// Re and Im independent, each on `{-sqrt(3/2), 0, sqrt(3/2)}` with
    /// weights `{1/6, 2/3, 1/6}`; matches the complex Gaussian to four
    /// moments.
    FourMomentComplex,
    /// `{-sqrt 3, 0, sqrt 3}` with weights `{1/6, 2/3, 1/6}`; matches the
    /// real Gaussian to four moments.
    FourMomentReal,
    Zero,
}

const THREE_POINT_WEIGHTS: [f64; 3] = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0];

impl AtomDistribution {
    pub const ALL: [AtomDistribution; 6] = [
        Self::ComplexGaussian,
        Self::RealGaussian,
        Self::Rademacher,
        Self::FourMomentComplex,
        Self::FourMomentReal,
        Self::Zero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ComplexGaussian => "complex-gaussian",
            Self::RealGaussian => "real-gaussian",
            Self::Rademacher => "rademacher",
            Self::FourMomentComplex => "four-moment-complex",
            Self::FourMomentReal => "four-moment-real",
            Self::Zero => "zero",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown atom distribution '{name}'")))
    }

    pub fn is_complex(self) -> bool {
        matches!(self, Self::ComplexGaussian | Self::FourMomentComplex)
    }

    /// Atoms and probabilities of a discrete law, `None` for continuous ones.
    pub fn support(self) -> Option<Vec<(Complex64, f64)>> {
        let three = |a: f64| [-a, 0.0, a];
        match self {
            Self::Zero => Some(vec![(Complex64::new(0.0, 0.0), 1.0)]),
            Self::Rademacher => Some(vec![
                (Complex64::new(-1.0, 0.0), 0.5),
                (Complex64::new(1.0, 0.0), 0.5),
            ]),
            Self::FourMomentReal => Some(
                three(3f64.sqrt())
                    .into_iter()
                    .zip(THREE_POINT_WEIGHTS)
                    .map(|(x, w)| (Complex64::new(x, 0.0), w))
                    .collect(),
            ),
            Self::FourMomentComplex => {
                let pts = three(1.5f64.sqrt());
                let mut out = Vec::with_capacity(9);
                for (x, wx) in pts.iter().zip(THREE_POINT_WEIGHTS) {
                    for (y, wy) in pts.iter().zip(THREE_POINT_WEIGHTS) {
                        out.push((Complex64::new(*x, *y), wx * wy));
                    }
                }
                Some(out)
            }
            Self::ComplexGaussian | Self::RealGaussian => None,
        }
    }

    /// Exact `E[Re(xi)^a Im(xi)^b]`.
    pub fn mixed_moment(self, a: u32, b: u32) -> f64 {
        match self.support() {
            Some(points) => points
                .iter()
                .map(|(z, w)| w * z.re.powi(a as i32) * z.im.powi(b as i32))
                .sum(),
            None => {
                let (var_re, var_im) = match self {
                    Self::ComplexGaussian => (0.5, 0.5),
                    _ => (1.0, 0.0),
                };
                gaussian_moment(a, var_re) * gaussian_moment(b, var_im)
            }
        }
    }

    /// True when all mixed moments of total order `<= order` agree with
    /// `other` to within `tol`.
    pub fn matches_moments(self, other: Self, order: u32, tol: f64) -> bool {
        (0..=order).all(|a| {
            (0..=order - a).all(|b| (self.mixed_moment(a, b) - other.mixed_moment(a, b)).abs() <= tol)
        })
    }
}

/// `E X^k` for `X ~ N(0, var)`; `0^0 = 1` so a degenerate part is handled.
fn gaussian_moment(k: u32, var: f64) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let double_factorial: f64 = (1..k).step_by(2).map(f64::from).product();
    var.powi((k / 2) as i32) * double_factorial
}

fn three_point<R: Rng + ?Sized>(rng: &mut R, a: f64) -> f64 {
    let u: f64 = rng.random();
    if u < THREE_POINT_WEIGHTS[0] {
        -a
    } else if u < THREE_POINT_WEIGHTS[0] + THREE_POINT_WEIGHTS[2] {
        a
    } else {
        0.0
    }
}

pub fn sample_atom(dist: AtomDistribution, rng: &mut SeedStream) -> Complex64 {
    match dist {
        AtomDistribution::Zero => Complex64::new(0.0, 0.0),
        AtomDistribution::RealGaussian => Complex64::new(rng.sample(StandardNormal), 0.0),
        AtomDistribution::ComplexGaussian => {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        }
        AtomDistribution::Rademacher => {
            Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0)
        }
        AtomDistribution::FourMomentReal => Complex64::new(three_point(rng, 3f64.sqrt()), 0.0),
        AtomDistribution::FourMomentComplex => {
            let a = 1.5f64.sqrt();
            let re = three_point(rng, a);
            let im = three_point(rng, a);
            Complex64::new(re, im)
        }
    }
}

pub fn sample_iid_matrix(n: usize, dist: AtomDistribution, rng: &mut SeedStream) -> ComplexDenseMatrix {
    ComplexDenseMatrix::from_fn(n, n, |_, _| sample_atom(dist, rng))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`. Without that correction the
/// law of `Q` depends on the QR sign convention and is not Haar.
pub fn sample_haar_unitary(k_dim: usize, rng: &mut SeedStream) -> ComplexDenseMatrix {
    let g = sample_iid_matrix(k_dim, AtomDistribution::ComplexGaussian, rng);
    let f = qr(&g).expect("square input");
    let mut q = f.q;
    for j in 0..k_dim {
        let r = f.r[(j, j)];
        let nr = r.norm();
        let phase = if nr > 0.0 { r / nr } else { Complex64::new(1.0, 0.0) };
        for i in 0..k_dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Product of `m_factors` independent `n x n` truncations of Haar unitaries
/// of dimension `n + floor(tau n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedUnitarySpec {
    n: usize,
    m_factors: usize,
    tau: f64,
}

impl TruncatedUnitarySpec {
    pub fn new(n: usize, m_factors: usize, tau: f64) -> Result<Self> {
        if n == 0 || m_factors == 0 {
            return Err(Error::InvalidParameter("n and M must be positive".into()));
        }
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidParameter(format!("tau must lie in (0, 1), got {tau}")));
        }
        if (tau * n as f64).floor() < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "floor(tau n) = 0 for tau = {tau}, n = {n}; the unitary would not be larger than n"
            )));
        }
        Ok(Self { n, m_factors, tau })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_factors(&self) -> usize {
        self.m_factors
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `kappa = floor(tau n)`.
    pub fn kappa(&self) -> usize {
        (self.tau * self.n as f64).floor() as usize
    }

    /// Dimension `K = n + kappa` of the unitaries being truncated.
    pub fn k_dim(&self) -> usize {
        self.n + self.kappa()
    }

    /// Radius `(1/(1+tau))^{M/2}` outside which the limiting density is 0.
    pub fn edge_radius(&self) -> f64 {
        (1.0 / (1.0 + self.tau)).powf(self.m_factors as f64 / 2.0)
    }
}

pub fn sample_truncated_factors(spec: &TruncatedUnitarySpec, rng: &mut SeedStream) -> Vec<ComplexDenseMatrix> {
    (0..spec.m_factors)
        .map(|_| sample_haar_unitary(spec.k_dim(), rng).submatrix(0, 0, spec.n, spec.n))
        .collect()
}

pub fn sample_truncated_product(spec: &TruncatedUnitarySpec, rng: &mut SeedStream) -> ComplexDenseMatrix {
    multiply_all(&sample_truncated_factors(spec, rng))
}

fn multiply_all(factors: &[ComplexDenseMatrix]) -> ComplexDenseMatrix {
    let mut it = factors.iter();
    let first = it.next().expect("at least one factor").clone();
    it.fold(first, |acc, f| acc.matmul(f).expect("square factors of equal size"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Raw,
    /// Each factor scaled by `n^{-1/2}`, so the product carries `n^{-M/2}`.
    PerFactor,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Self::Raw => "raw",
            Self::PerFactor => "per-factor",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "raw" => Ok(Self::Raw),
            "per-factor" => Ok(Self::PerFactor),
            _ => Err(Error::InvalidParameter(format!("unknown normalization '{name}'"))),
        }
    }
}

/// Product of `M` independent `n x n` iid matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpec {
    n: usize,
    atoms: Vec<AtomDistribution>,
    normalization: Normalization,
}

impl ProductSpec {
    pub fn new(n: usize, atoms: Vec<AtomDistribution>, normalization: Normalization) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("need at least one factor".into()));
        }
        Ok(Self {
            n,
            atoms,
            normalization,
        })
    }

    /// All `m` factors with the same atom law.
    pub fn iid(n: usize, m: usize, atom: AtomDistribution, normalization: Normalization) -> Result<Self> {
        Self::new(n, vec![atom; m], normalization)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_factors(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[AtomDistribution] {
        &self.atoms
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }
}

/// Raw factors and the product normalized per `spec`.
pub fn sample_product(
    spec: &ProductSpec,
    rng: &mut SeedStream,
) -> (Vec<ComplexDenseMatrix>, ComplexDenseMatrix) {
    let factors: Vec<ComplexDenseMatrix> = spec
        .atoms
        .iter()
        .map(|&a| sample_iid_matrix(spec.n, a, rng))
        .collect();
    let product = match spec.normalization {
        Normalization::Raw => multiply_all(&factors),
        Normalization::PerFactor => {
            let s = 1.0 / (spec.n as f64).sqrt();
            let scaled: Vec<ComplexDenseMatrix> = factors.iter().map(|f| f.scale_real(s)).collect();
            multiply_all(&scaled)
        }
    };
    (factors, product)
}
