//! Pooled eigenvalue radii against the limiting radial CDF, plus the
//! exact finite-n means of `(1/n) sum |lambda|^{2L}` where available.

use rmtlab_core::dpp_exact::{circular_law_radial_cdf, expected_monomial, trunc_radial_cdf};
use rmtlab_core::spectra_stats::{ks_distance, trunc_edge_radius, Estimate};
use serde_json::json;

use super::{check_ensemble, exact_kind, product_spectrum, tags};
use crate::config::{parse_usize_list, ExperimentConfig};
use crate::error::Result;
use crate::record::{fmt_f64, ExperimentRecord};
use crate::runner::run_replicas;

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    check_ensemble(cfg)?;
    let orders: Vec<u32> = parse_usize_list("monomial_orders", &cfg.monomial_orders)?
        .into_iter()
        .map(|l| l as u32)
        .collect();
    let run = run_replicas(cfg.replicas, cfg.workers, cfg.failure_budget, |r| {
        product_spectrum(cfg, tags::CIRCULAR, r)
    })?;

    let mut record = ExperimentRecord::new(cfg, &["replica", "re", "im"]);
    record.failed_replicas = run.failures.len();
    let mut radii = Vec::with_capacity(cfg.replicas * cfg.n);
    for (r, eigs) in &run.results {
        for z in eigs {
            record.push_row(vec![r.to_string(), fmt_f64(z.re), fmt_f64(z.im)]);
            radii.push(z.norm());
        }
    }

    let (edge, ks, threshold) = if cfg.is_truncated() {
        let edge = trunc_edge_radius(cfg.tau, cfg.m);
        let ks = ks_distance(&radii, |r| trunc_radial_cdf(r, cfg.tau, cfg.m))?;
        (edge, ks, cfg.ks_threshold_trunc)
    } else {
        let ks = ks_distance(&radii, |r| circular_law_radial_cdf(r, cfg.m).0)?;
        (1.0, ks, cfg.ks_threshold)
    };
    record.metric("ks_distance", ks);
    record.metric("edge_radius", edge);
    record.metric("pooled_points", radii.len());
    record.gate("ks", ks < threshold, ks, threshold, "pooled radii vs limiting radial CDF");

    // Bins on [0, edge]; the last count is everything beyond the edge.
    let bins = cfg.histogram_bins.max(1);
    let mut counts = vec![0usize; bins + 1];
    for &r in &radii {
        let b = ((r / edge) * bins as f64).floor();
        counts[if b >= bins as f64 { bins } else { b as usize }] += 1;
    }
    let edges: Vec<f64> = (0..=bins).map(|i| edge * i as f64 / bins as f64).collect();
    record.metric("histogram", json!({ "edges": edges, "counts": counts }));

    let kind = exact_kind(cfg, cfg.n)?;
    let n = cfg.n as f64;
    for &l in &orders {
        let per_replica: Vec<f64> = run
            .values()
            .map(|eigs| eigs.iter().map(|z| z.norm_sqr().powi(l as i32)).sum::<f64>() / n)
            .collect();
        let est = Estimate::from_values(&per_replica);
        let key = format!("monomial_mean_L{l}");
        match &kind {
            Some(k) => {
                let tau = cfg.is_truncated().then_some(cfg.tau);
                let (exact, limit) = expected_monomial(l, k, tau)?;
                let dev = (est.value - exact).abs();
                let allowed = cfg.monomial_se_factor * est.std_error;
                record.metric(
                    key.clone(),
                    json!({ "mean": est.value, "std_error": est.std_error, "exact": exact, "limit": limit }),
                );
                record.gate(key, dev <= allowed, dev, allowed, "|mean - exact finite-n value| vs SE multiple");
            }
            None => record.metric(key, json!({ "mean": est.value, "std_error": est.std_error })),
        }
    }
    Ok(record)
}
