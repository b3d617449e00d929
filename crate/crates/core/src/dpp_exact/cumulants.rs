//! Cumulants of linear statistics through the Costin-Lebowitz expansion
//! `C_k = sum_m ((-1)^{m-1}/m) sum_{sigma: [k] ->> [m]} Phi_m(g^{|sigma^-1(1)|}, ..., g^{|sigma^-1(m)|})`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{phi_m, EnsembleKind, MonomialPair, MonomialTuple};
use crate::spectra_stats::LaurentPolynomial;
use crate::{Error, Result};

pub const MAX_CUMULANT_ORDER: usize = 6;

/// Calls `visit` with every surjection `[k] ->> [m]`, given as the block
/// index of each element. Assignments that can no longer fill all blocks
/// are pruned.
pub fn for_each_surjection(k: usize, m: usize, mut visit: impl FnMut(&[usize])) {
    if m == 0 || m > k {
        return;
    }
    let mut assign = vec![0usize; k];
    let mut sizes = vec![0usize; m];
    fn rec(
        i: usize,
        empty: usize,
        assign: &mut [usize],
        sizes: &mut [usize],
        visit: &mut dyn FnMut(&[usize]),
    ) {
        let k = assign.len();
        if k - i < empty {
            return;
        }
        if i == k {
            visit(assign);
            return;
        }
        for b in 0..sizes.len() {
            let was_empty = sizes[b] == 0;
            sizes[b] += 1;
            assign[i] = b;
            rec(i + 1, empty - usize::from(was_empty), assign, sizes, visit);
            sizes[b] -= 1;
        }
    }
    rec(0, m, &mut assign, &mut sizes, &mut visit);
}

/// Number of surjections found by [`for_each_surjection`].
pub fn surjection_count(k: usize, m: usize) -> u64 {
    let mut c = 0;
    for_each_surjection(k, m, |_| c += 1);
    c
}

/// `Phi_m(f_1, ..., f_m)` for polynomial arguments, expanded
/// multilinearly. Branches whose exponents can no longer balance are cut.
fn phi_polynomials(fs: &[&LaurentPolynomial], kind: &EnsembleKind) -> f64 {
    let expanded: Vec<Vec<((u32, u32), Complex64)>> = fs.iter().map(|f| f.terms().collect()).collect();
    // Largest imbalance each suffix can still absorb.
    let mut reach = vec![0i64; fs.len() + 1];
    for j in (0..fs.len()).rev() {
        let most = expanded[j]
            .iter()
            .map(|&((a, b), _)| (i64::from(a) - i64::from(b)).abs())
            .max()
            .unwrap_or(0);
        reach[j] = reach[j + 1] + most;
    }
    let mut alphas = Vec::with_capacity(fs.len());
    let mut betas = Vec::with_capacity(fs.len());
    let mut total = Complex64::new(0.0, 0.0);
    #[allow(clippy::too_many_arguments)]
    fn rec(
        j: usize,
        coef: Complex64,
        imbalance: i64,
        expanded: &[Vec<((u32, u32), Complex64)>],
        reach: &[i64],
        alphas: &mut Vec<u32>,
        betas: &mut Vec<u32>,
        kind: &EnsembleKind,
        total: &mut Complex64,
    ) {
        if imbalance.abs() > reach[j] {
            return;
        }
        if j == expanded.len() {
            let t = MonomialTuple::new(alphas.clone(), betas.clone()).expect("equal lengths");
            *total += coef * phi_m(&t, kind);
            return;
        }
        for &((a, b), c) in &expanded[j] {
            alphas.push(a);
            betas.push(b);
            let d = i64::from(a) - i64::from(b);
            rec(j + 1, coef * c, imbalance + d, expanded, reach, alphas, betas, kind, total);
            alphas.pop();
            betas.pop();
        }
    }
    rec(0, Complex64::new(1.0, 0.0), 0, &expanded, &reach, &mut alphas, &mut betas, kind, &mut total);
    total.re
}

/// Exact finite-n cumulant `C_k` of `sum_i f(lambda_i)`, `1 <= k <= 6`.
pub fn cumulant(k: usize, poly: &LaurentPolynomial, kind: &EnsembleKind) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("cumulant order must be at least 1".into()));
    }
    if k > MAX_CUMULANT_ORDER {
        return Err(Error::SizeLimit(format!(
            "cumulant order {k} exceeds {MAX_CUMULANT_ORDER}"
        )));
    }
    let powers: Vec<LaurentPolynomial> = (0..=k as u32).map(|c| poly.pow(c)).collect();
    let mut total = 0.0;
    for m in 1..=k {
        // Phi_m depends on the surjection only through its block sizes.
        let mut tally: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for_each_surjection(k, m, |assign| {
            let mut sizes = vec![0usize; m];
            for &b in assign {
                sizes[b] += 1;
            }
            *tally.entry(sizes).or_default() += 1;
        });
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        let mut inner = 0.0;
        for (sizes, count) in tally {
            let fs: Vec<&LaurentPolynomial> = sizes.iter().map(|&c| &powers[c]).collect();
            inner += count as f64 * phi_polynomials(&fs, kind);
        }
        total += sign / m as f64 * inner;
    }
    Ok(total)
}

/// Exact covariance `E[X_1 X_2] - E X_1 E X_2` of the linear statistics
/// `X_i = sum_j lambda_j^{a_i} conj(lambda_j)^{b_i}`.
pub fn monomial_covariance(p1: MonomialPair, p2: MonomialPair, kind: &EnsembleKind) -> f64 {
    let joint = MonomialTuple::new(vec![p1.a + p2.a], vec![p1.b + p2.b]).expect("length 1");
    let pair = MonomialTuple::new(vec![p1.a, p2.a], vec![p1.b, p2.b]).expect("length 2");
    phi_m(&joint, kind) - phi_m(&pair, kind)
}
