//! One module per experiment; [`run`] dispatches on the config.

mod circular_law;
mod clt;
mod cumulants;
mod girko_swap;
mod least_sv;
mod sv_profile;
mod universality;

use std::time::Instant;

use rmtlab_core::dpp_exact::EnsembleKind;
use rmtlab_core::ensembles::{
    sample_product, sample_truncated_product, Normalization, ProductSpec, SeedStream, TruncatedUnitarySpec,
};
use rmtlab_core::numlin::eigenvalues;
use rmtlab_core::Complex64;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::Result;
use crate::record::ExperimentRecord;

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let mut record = match cfg.experiment {
        Experiment::CircularLaw => circular_law::run(cfg)?,
        Experiment::Clt => clt::run(cfg)?,
        Experiment::LeastSv => least_sv::run(cfg)?,
        Experiment::Cumulants => cumulants::run(cfg)?,
        Experiment::Universality => universality::run(cfg)?,
        Experiment::SvProfile => sv_profile::run(cfg)?,
        Experiment::GirkoSwap => girko_swap::run(cfg)?,
    };
    record.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(record)
}

/// Stream tags; every experiment (and every side of a paired one) draws
/// from its own family of streams.
pub(crate) mod tags {
    pub const CIRCULAR: u32 = 1;
    pub const CLT: u32 = 2;
    pub const LEAST_SV: u32 = 3;
    pub const UNIVERSALITY: u32 = 5;
    pub const SV_PROFILE: u32 = 7;
    pub const GIRKO: u32 = 9;
    pub const SWAP: u32 = 10;
}

/// Rejects ensemble parameters up front so that they surface as a config
/// error rather than as failed replicas.
pub(crate) fn check_ensemble(cfg: &ExperimentConfig) -> Result<()> {
    let res = if cfg.is_truncated() {
        TruncatedUnitarySpec::new(cfg.n, cfg.m, cfg.tau).map(|_| ())
    } else {
        ProductSpec::iid(cfg.n, cfg.m, cfg.atom()?, Normalization::PerFactor).map(|_| ())
    };
    res.map_err(|e| crate::error::HarnessError::Config(e.to_string()))
}

/// Eigenvalues of the normalized product for one replica: iid factors with
/// `cfg.atoms`, or truncated Haar unitaries with `cfg.tau`.
pub(crate) fn product_spectrum(cfg: &ExperimentConfig, tag: u32, replica: u32) -> rmtlab_core::Result<Vec<Complex64>> {
    let mut rng = SeedStream::for_replica(cfg.master_seed, tag, replica);
    let product = if cfg.is_truncated() {
        let spec = TruncatedUnitarySpec::new(cfg.n, cfg.m, cfg.tau)?;
        sample_truncated_product(&spec, &mut rng)
    } else {
        let atom = rmtlab_core::ensembles::AtomDistribution::from_name(&cfg.atoms)?;
        let spec = ProductSpec::iid(cfg.n, cfg.m, atom, Normalization::PerFactor)?;
        sample_product(&spec, &mut rng).1
    };
    finite(eigenvalues(&product)?)
}

pub(crate) fn finite(v: Vec<Complex64>) -> rmtlab_core::Result<Vec<Complex64>> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(v)
    } else {
        Err(rmtlab_core::Error::Inconsistent("non-finite eigenvalue".into()))
    }
}

/// The determinantal description of the configured ensemble at size `n`,
/// when the sampled law is exactly that process.
pub(crate) fn exact_kind(cfg: &ExperimentConfig, n: usize) -> Result<Option<EnsembleKind>> {
    if cfg.is_truncated() {
        return Ok(Some(EnsembleKind::truncated_tau(n, cfg.m, cfg.tau)?));
    }
    if cfg.atoms == "complex-gaussian" {
        return Ok(Some(EnsembleKind::ginibre(n, cfg.m)?));
    }
    Ok(None)
}

/// Least-squares slope of `ln y` against `ln x`.
pub(crate) fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
