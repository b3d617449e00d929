//! Intermediate singular values of a single raw iid matrix:
//! `sigma_k >= c0 n^{1/2 - tau}` at `k = ceil(n^{1 - tau})`.

use rmtlab_core::ensembles::{sample_iid_matrix, SeedStream};
use rmtlab_core::numlin::singular_values;
use serde_json::json;

use super::tags;
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::record::{fmt_f64, ExperimentRecord};
use crate::runner::run_replicas;

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    if !(cfg.sv_tau >= 0.0 && cfg.sv_tau < 1.0) {
        return Err(HarnessError::Config(format!("sv_tau must lie in [0, 1), got {}", cfg.sv_tau)));
    }
    let n = cfg.n;
    let nf = n as f64;
    // Ascending order, so sigma_k is entry k - 1.
    let k = (nf.powf(1.0 - cfg.sv_tau).ceil() as usize).clamp(1, n);
    let bound = cfg.sv_c0 * nf.powf(0.5 - cfg.sv_tau);
    let mut record = ExperimentRecord::new(cfg, &["atoms", "replica", "k", "sigma_k", "bound"]);
    let mut fractions = Vec::new();
    for (side, atom) in [cfg.atom()?, cfg.atom_alt()?].into_iter().enumerate() {
        let tag = tags::SV_PROFILE * 10 + side as u32;
        let run = run_replicas(cfg.replicas, cfg.workers, cfg.failure_budget, |r| {
            let mut rng = SeedStream::for_replica(cfg.master_seed, tag, r);
            let x = sample_iid_matrix(n, atom, &mut rng);
            Ok(singular_values(&x)?[k - 1])
        })?;
        record.failed_replicas += run.failures.len();
        let mut passed = 0usize;
        for (r, s) in &run.results {
            passed += usize::from(*s >= bound);
            record.push_row(vec![atom.name().into(), r.to_string(), k.to_string(), fmt_f64(*s), fmt_f64(bound)]);
        }
        let frac = passed as f64 / run.results.len().max(1) as f64;
        let min = run.values().copied().fold(f64::INFINITY, f64::min);
        record.metric(format!("profile_{}", atom.name()), json!({ "pass_fraction": frac, "min_sigma_k": min }));
        record.gate(
            format!("pass_fraction_{}", atom.name()),
            frac >= cfg.sv_pass_fraction,
            frac,
            cfg.sv_pass_fraction,
            format!("share of replicas with sigma_{k} >= {bound}"),
        );
        fractions.push(frac);
    }
    record.metric("k", k);
    record.metric("bound", bound);
    record.gate(
        "same_pass_fraction",
        fractions[0] == fractions[1],
        (fractions[0] - fractions[1]).abs(),
        0.0,
        "paired atom laws give the same pass fraction",
    );
    Ok(record)
}
