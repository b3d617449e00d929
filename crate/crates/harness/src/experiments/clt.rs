//! Linear statistics `N_n[f] = sum_j f(lambda_j)`: variance against the
//! limiting prediction and the third and fourth cumulants against 0.

use rmtlab_core::dpp_exact::expected_monomial;
use rmtlab_core::spectra_stats::{
    empirical_cumulants, linear_statistic, predicted_variance_ginibre, predicted_variance_trunc,
    tau_in_theorem_range, LaurentPolynomial, StatisticSample,
};
use serde_json::json;

use super::{check_ensemble, exact_kind, product_spectrum, tags};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::function::parse_test_function;
use crate::record::{fmt_f64, ExperimentRecord};
use crate::runner::run_replicas;

/// `E N_n[f]` for a rotation-invariant determinantal ensemble: only the
/// `|z|^{2l}` terms survive the angular average.
fn exact_mean(f: &LaurentPolynomial, cfg: &ExperimentConfig) -> Result<Option<f64>> {
    let Some(kind) = exact_kind(cfg, cfg.n)? else {
        return Ok(None);
    };
    let tau = cfg.is_truncated().then_some(cfg.tau);
    let mut mean = 0.0;
    for ((a, b), c) in f.terms() {
        if a == b {
            let per_point = if a == 0 { 1.0 } else { expected_monomial(a, &kind, tau)?.0 };
            mean += c.re * per_point * cfg.n as f64;
        }
    }
    Ok(Some(mean))
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    check_ensemble(cfg)?;
    let f = parse_test_function(&cfg.test_function)?;
    let run = run_replicas(cfg.replicas, cfg.workers, cfg.failure_budget, |r| {
        let eigs = product_spectrum(cfg, tags::CLT, r)?;
        Ok(linear_statistic(&eigs, &f))
    })?;
    let mut record = ExperimentRecord::new(cfg, &["replica", "value"]);
    record.failed_replicas = run.failures.len();
    for (r, v) in &run.results {
        record.push_row(vec![r.to_string(), fmt_f64(*v)]);
    }
    let values: Vec<f64> = run.values().copied().collect();
    let ensemble = if cfg.is_truncated() { "truncated" } else { "ginibre" };
    let sample = StatisticSample::new(values, cfg.test_function.clone(), ensemble)?;
    let cum = empirical_cumulants(&sample, 4).map_err(|e| HarnessError::Config(e.to_string()))?;

    let (predicted, tol) = if cfg.is_truncated() {
        if !tau_in_theorem_range(cfg.tau) {
            record.metric("warning", "tau outside (1/2, 1); prediction computed anyway");
        }
        (predicted_variance_trunc(&f, cfg.tau, cfg.m)?, cfg.variance_tol_trunc)
    } else {
        (predicted_variance_ginibre(&f)?, cfg.variance_tol)
    };
    let var = cum[1];
    record.metric("predicted_variance", predicted);
    record.metric("variance", json!({ "value": var.value, "std_error": var.std_error, "half_width": var.half_width }));
    if predicted == 0.0 {
        let spread = sample.values().iter().fold(0.0f64, |a, v| a.max((v - sample.values()[0]).abs()));
        record.gate("variance", spread == 0.0, spread, 0.0, "zero predicted variance: replicas must coincide");
    } else {
        let rel = (var.value / predicted - 1.0).abs();
        record.metric("variance_ratio", var.value / predicted);
        record.gate("variance", rel <= tol, rel, tol, "|empirical / predicted variance - 1|");
    }
    for (k, est) in [(3, cum[2]), (4, cum[3])] {
        let name = format!("k{k}");
        record.metric(
            name.clone(),
            json!({ "value": est.value, "std_error": est.std_error, "half_width": est.half_width }),
        );
        record.gate(name, est.covers(0.0), est.value.abs(), est.half_width, "Chebyshev error bar covers 0");
    }
    record.metric("mean", json!({ "value": cum[0].value, "std_error": cum[0].std_error }));
    if let Some(m) = exact_mean(&f, cfg)? {
        record.metric("exact_mean", m);
        let centered: Vec<f64> = sample.centered(m);
        let c = centered.iter().sum::<f64>() / centered.len() as f64;
        record.metric("mean_minus_exact", c);
    }
    Ok(record)
}
