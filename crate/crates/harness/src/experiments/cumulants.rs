//! Exact cumulants of a polynomial linear statistic over an n-grid, the
//! second against its limit, and the rotary-flow sums against their
//! large-n asymptotics.

use rmtlab_core::dpp_exact::{comblemma_asymptotic, cumulant, phi_m, EnsembleKind, MonomialTuple};
use rmtlab_core::spectra_stats::{predicted_variance_ginibre, predicted_variance_trunc};
use serde_json::json;

use super::log_log_slope;
use crate::config::{parse_usize_list, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::function::parse_test_function;
use crate::record::{fmt_f64, ExperimentRecord};

fn kind(cfg: &ExperimentConfig, n: usize) -> Result<EnsembleKind> {
    Ok(if cfg.is_truncated() {
        EnsembleKind::truncated_tau(n, cfg.m, cfg.tau)?
    } else {
        EnsembleKind::ginibre(n, cfg.m)?
    })
}

/// All `(alphas, betas)` with `1 <= len <= max_len` and entries in
/// `0..=max_entry`.
pub(crate) fn all_tuples(max_len: usize, max_entry: u32) -> Vec<MonomialTuple> {
    let mut out = Vec::new();
    let base = max_entry as usize + 1;
    for len in 1..=max_len {
        let total = base.pow(2 * len as u32);
        for code in 0..total {
            let mut c = code;
            let mut digits = Vec::with_capacity(2 * len);
            for _ in 0..2 * len {
                digits.push((c % base) as u32);
                c /= base;
            }
            let (a, b) = digits.split_at(len);
            out.push(MonomialTuple::new(a.to_vec(), b.to_vec()).expect("equal non-empty lists"));
        }
    }
    out
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    let f = parse_test_function(&cfg.test_function)?;
    let grid = parse_usize_list("n_grid", &cfg.n_grid)?;
    let mut record = ExperimentRecord::new(cfg, &["n", "k", "cumulant"]);

    let mut table: Vec<[f64; 3]> = Vec::new();
    for &n in &grid {
        let kd = kind(cfg, n)?;
        let mut row = [0.0; 3];
        for (i, k) in (2..=4).enumerate() {
            row[i] = cumulant(k, &f, &kd)?;
            record.push_row(vec![n.to_string(), k.to_string(), fmt_f64(row[i])]);
        }
        table.push(row);
    }
    record.metric(
        "cumulants",
        grid.iter()
            .zip(&table)
            .map(|(n, r)| json!({ "n": n, "c2": r[0], "c3": r[1], "c4": r[2] }))
            .collect::<Vec<_>>(),
    );

    for (idx, k) in [(1usize, 3usize), (2, 4)] {
        let mags: Vec<f64> = table.iter().map(|r| r[idx].abs()).collect();
        let worst_c = grid.iter().zip(&mags).map(|(&n, &c)| n as f64 * c).fold(0.0, f64::max);
        record.metric(format!("c{k}_max_n_times_abs"), worst_c);
        let nonzero: Vec<(f64, f64)> = grid
            .iter()
            .zip(&mags)
            .filter(|(_, &c)| c > cfg.zero_floor)
            .map(|(&n, &c)| (n as f64, c))
            .collect();
        if nonzero.len() >= 2 {
            let (x, y): (Vec<f64>, Vec<f64>) = nonzero.into_iter().unzip();
            record.metric(format!("c{k}_log_log_slope"), log_log_slope(&x, &y));
        }
        for (i, w) in grid.windows(2).enumerate() {
            if w[1] != 2 * w[0] {
                continue;
            }
            let (a, b) = (mags[i], mags[i + 1]);
            let zeros = a <= cfg.zero_floor && b <= cfg.zero_floor;
            let ok = zeros || b * cfg.decay_factor <= a;
            let ratio = if zeros {
                0.0
            } else if b > 0.0 {
                a / b
            } else {
                f64::MAX
            };
            record.gate(
                format!("c{k}_decay_{}_{}", w[0], w[1]),
                ok,
                ratio,
                cfg.decay_factor,
                "|C_k(n)| / |C_k(2n)|; 0 when both are below zero_floor",
            );
        }
    }

    let c2 = cumulant(2, &f, &kind(cfg, cfg.c2_n)?)?;
    let limit = if cfg.is_truncated() {
        predicted_variance_trunc(&f, cfg.tau, cfg.m)?
    } else {
        predicted_variance_ginibre(&f)?
    };
    let tol = cfg.c2_tol_numerator / cfg.c2_n as f64;
    record.metric("c2_large_n", json!({ "n": cfg.c2_n, "value": c2, "limit": limit }));
    record.gate("c2_limit", (c2 - limit).abs() <= tol, (c2 - limit).abs(), tol, "|C_2 - limiting covariance|");

    if cfg.is_truncated() {
        record.metric("comblemma", "asymptotics are stated for Ginibre products only");
        return Ok(record);
    }
    let ns = parse_usize_list("comblemma_n_grid", &cfg.comblemma_n_grid)?;
    let kinds: Vec<EnsembleKind> = ns.iter().map(|&n| EnsembleKind::ginibre(n, cfg.m)).collect::<std::result::Result<_, _>>()?;
    let mut worst = (0.0f64, String::new());
    let mut balanced = 0usize;
    let mut unbalanced_nonzero = 0usize;
    let tuples = all_tuples(cfg.comblemma_max_len, cfg.comblemma_max_entry);
    for t in &tuples {
        if !t.is_balanced() {
            unbalanced_nonzero += kinds.iter().filter(|k| phi_m(t, k) != 0.0).count();
            continue;
        }
        if t.s() == 0 {
            continue;
        }
        balanced += 1;
        for (&n, k) in ns.iter().zip(&kinds) {
            let c = n as f64 * (phi_m(t, k) - comblemma_asymptotic(t, n, cfg.m)?).abs();
            if !c.is_finite() {
                return Err(HarnessError::Core(rmtlab_core::Error::Inconsistent(format!(
                    "non-finite rotary-flow comparison for {t:?} at n={n}"
                ))));
            }
            if c > worst.0 {
                worst = (c, format!("alphas={:?} betas={:?} n={n}", t.alphas(), t.betas()));
            }
        }
    }
    record.metric(
        "comblemma",
        json!({ "balanced_tuples": balanced, "tuples": tuples.len(), "worst_n_times_error": worst.0, "worst_at": worst.1 }),
    );
    record.gate("comblemma_fitted_c", worst.0 <= cfg.comblemma_c_max, worst.0, cfg.comblemma_c_max, worst.1);
    record.gate(
        "unbalanced_phi_zero",
        unbalanced_nonzero == 0,
        unbalanced_nonzero as f64,
        0.0,
        "unbalanced tuples with a nonzero rotary-flow sum",
    );
    Ok(record)
}
