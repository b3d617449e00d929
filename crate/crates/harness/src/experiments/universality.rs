//! Paired runs of two atom laws that agree to four moments: smoothed
//! correlation estimates of the root process at bulk centers, and the
//! local-law check at a rescaled bump.

use std::f64::consts::PI;

use rmtlab_core::ensembles::{sample_iid_matrix, AtomDistribution, SeedStream};
use rmtlab_core::linearize::{mth_root_process_with, LinearizationScale};
use rmtlab_core::numlin::{ComplexDenseMatrix, SpectrumSample};
use rmtlab_core::quad::integrate;
use rmtlab_core::spectra_stats::{smoothed_correlation, BulkRegion, BumpWindow, RadialBump, TestFunction};
use rmtlab_core::Complex64;
use serde_json::json;

use super::{finite, tags};
use crate::config::{parse_complex, parse_complex_list, parse_pair, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::record::{fmt_f64, ExperimentRecord};
use crate::runner::{run_replicas, ReplicaRun};

const QUAD_TOL: f64 = 1e-10;

/// `f_{z0}(z) = n^{2d} f(n^d (z - z0))` for a radial bump `f` centered at
/// the origin.
struct Rescaled {
    f: RadialBump,
    z0: Complex64,
    s: f64,
}

impl Rescaled {
    fn eval(&self, z: Complex64) -> f64 {
        self.s * self.s * self.f.eval((z - self.z0) * self.s)
    }

    /// `int f(w) rho(z0 + w / s) d^2 w`, which equals `int f_{z0} rho`.
    fn integrate_against(&self, rho: impl Fn(Complex64) -> f64) -> rmtlab_core::Result<f64> {
        let (r1, r2) = (self.f.r1(), self.f.r2());
        let outer = integrate(
            |r| {
                let fr = self.f.profile(r).0;
                if fr == 0.0 {
                    return 0.0;
                }
                let ring = integrate(
                    |t| rho(self.z0 + Complex64::from_polar(r / self.s, t)),
                    0.0,
                    2.0 * PI,
                    QUAD_TOL,
                    0.0,
                )
                .map(|q| q.value)
                .unwrap_or(f64::NAN);
                fr * r * ring
            },
            r1,
            r2,
            QUAD_TOL,
            0.0,
        )?;
        Ok(outer.value)
    }
}

/// `||Delta f||_1` of the unscaled bump.
fn laplacian_l1(f: &RadialBump) -> rmtlab_core::Result<f64> {
    let q = integrate(
        |r| {
            let (_, d1, d2) = f.profile(r);
            (d2 + d1 / r).abs() * r
        },
        f.r1(),
        f.r2(),
        QUAD_TOL,
        0.0,
    )?;
    Ok(2.0 * PI * q.value)
}

fn sample_side(cfg: &ExperimentConfig, atom: AtomDistribution, tag: u32) -> Result<ReplicaRun<SpectrumSample>> {
    let route = cfg.route()?;
    run_replicas(cfg.replicas, cfg.workers, cfg.failure_budget, |r| {
        let mut rng = SeedStream::for_replica(cfg.master_seed, tag, r);
        let factors: Vec<ComplexDenseMatrix> = (0..cfg.m).map(|_| sample_iid_matrix(cfg.n, atom, &mut rng)).collect();
        let roots = mth_root_process_with(&factors, LinearizationScale::Raw, route)?;
        finite(roots.eigenvalues().to_vec())?;
        Ok(roots)
    })
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    let (a, b) = (cfg.atom()?, cfg.atom_alt()?);
    if !a.matches_moments(b, 4, cfg.moment_tol) {
        return Err(HarnessError::Config(format!(
            "atoms '{}' and '{}' do not match to four moments within {}",
            a.name(),
            b.name(),
            cfg.moment_tol
        )));
    }
    let n = cfg.n as f64;
    let m = cfg.m;
    let mn = (m * cfg.n) as f64;
    let sqrt_n = n.sqrt();
    let centers: Vec<Complex64> = parse_complex_list("centers", &cfg.centers)?.into_iter().map(|c| c * sqrt_n).collect();
    if !matches!(cfg.correlation_order, 1 | 2) {
        return Err(HarnessError::Config("correlation_order must be 1 or 2".into()));
    }
    let bulk = BulkRegion {
        scale: sqrt_n,
        tau0: cfg.tau0,
    };
    if let Some(c) = centers.iter().find(|&&c| !bulk.contains(c)) {
        return Err(HarnessError::Config(format!("center {} lies outside the bulk", c / sqrt_n)));
    }
    let window = BumpWindow::new(cfg.window_radius)?;
    let z0 = parse_complex("local_law_center", &cfg.local_law_center)?;
    let (r1, r2) = parse_pair("local_law_bump", &cfg.local_law_bump)?;
    let bump = RadialBump::new(r1, r2, 0.0)?;
    let local = Rescaled {
        f: bump,
        z0,
        s: n.powf(cfg.local_law_d),
    };
    if !(z0.norm() >= cfg.tau0 && z0.norm() <= 1.0 - cfg.tau0) {
        return Err(HarnessError::Config(format!("local-law center {z0} lies outside the bulk")));
    }

    let sides = [
        (a, sample_side(cfg, a, tags::UNIVERSALITY * 10)?),
        (b, sample_side(cfg, b, tags::UNIVERSALITY * 10 + 1)?),
    ];
    let mut record = ExperimentRecord::new(
        cfg,
        &["side", "replica", "window_sum_1", "window_sum_2", "local_product", "local_root"],
    );
    record.failed_replicas = sides.iter().map(|s| s.1.failures.len()).sum();

    // Reading A: product eigenvalues mu = iota^M / n^{M/2} (each seen M
    // times among the roots) against |z|^{2/M-2} / (M pi). Reading B: the
    // normalized roots iota / sqrt(n) against the uniform density 1/pi.
    let target_product = local.integrate_against(|z| z.norm().powf(2.0 / m as f64 - 2.0) / (m as f64 * PI))?;
    let target_root = local.integrate_against(|_| 1.0 / PI)?;
    let lap = laplacian_l1(&bump)?;
    let bound = cfg.local_law_factor * mn.powf(-1.0 + 2.0 * cfg.local_law_d) * lap;
    let mut worst = [0.0f64; 2];
    let scale_m = n.powf(m as f64 / 2.0);

    for (label, (_, run)) in ["a", "b"].iter().zip(&sides) {
        for (r, sample) in &run.results {
            let roots = sample.eigenvalues();
            let window_sum = |c: Complex64| roots.iter().map(|&z| window.eval(z - c)).sum::<f64>();
            let w1 = window_sum(centers[0]);
            let w2 = centers.get(1).map_or(f64::NAN, |&c| window_sum(c));
            let a_stat = roots.iter().map(|&z| local.eval(z.powu(m as u32) / scale_m)).sum::<f64>() / mn;
            let b_stat = roots.iter().map(|&z| local.eval(z / sqrt_n)).sum::<f64>() / mn;
            worst[0] = worst[0].max((a_stat - target_product).abs());
            worst[1] = worst[1].max((b_stat - target_root).abs());
            record.push_row(vec![
                label.to_string(),
                r.to_string(),
                fmt_f64(w1),
                fmt_f64(w2),
                fmt_f64(a_stat),
                fmt_f64(b_stat),
            ]);
        }
    }

    let samples: Vec<Vec<SpectrumSample>> =
        sides.iter().map(|s| s.1.values().cloned().collect()).collect();
    let intensity = m as f64 / PI * window.mass();
    let mut estimates = Vec::new();
    let center_sets: Vec<Vec<Complex64>> = if cfg.correlation_order == 1 {
        centers.iter().map(|&c| vec![c]).collect()
    } else {
        centers.chunks(2).filter(|c| c.len() == 2).map(|c| c.to_vec()).collect()
    };
    for (ci, cs) in center_sets.iter().enumerate() {
        let ea = smoothed_correlation(&samples[0], &window, cs, cfg.correlation_order, bulk)?.estimate;
        let eb = smoothed_correlation(&samples[1], &window, cs, cfg.correlation_order, bulk)?.estimate;
        let diff = (ea.value - eb.value).abs();
        let sigma = (ea.std_error.powi(2) + eb.std_error.powi(2)).sqrt();
        let allowed = cfg.agreement_sigmas * sigma;
        estimates.push(json!({
            "centers": cs.iter().map(|c| [c.re / sqrt_n, c.im / sqrt_n]).collect::<Vec<_>>(),
            "a": { "value": ea.value, "std_error": ea.std_error },
            "b": { "value": eb.value, "std_error": eb.std_error },
            "difference": diff,
            "combined_std_error": sigma,
        }));
        record.gate(
            format!("k{}_agreement_{ci}", cfg.correlation_order),
            diff <= allowed,
            diff,
            allowed,
            "|estimate_a - estimate_b| vs combined standard error multiple",
        );
    }
    record.metric("correlation_estimates", estimates);
    if cfg.correlation_order == 1 {
        record.metric("limiting_intensity_times_mass", intensity);
    }
    record.metric(
        "local_law",
        json!({
            "d": cfg.local_law_d,
            "bound": bound,
            "laplacian_l1": lap,
            "product_reading": { "target": target_product, "worst_deviation": worst[0] },
            "root_reading": { "target": target_root, "worst_deviation": worst[1] },
        }),
    );
    record.gate("local_law_product_reading", worst[0] <= bound, worst[0], bound, "worst replica deviation, product eigenvalues");
    record.gate("local_law_root_reading", worst[1] <= bound, worst[1], bound, "worst replica deviation, root process");
    Ok(record)
}
