//! Noise thresholds for advantage distillation.
//!
//! Distillation beats the eavesdropper when Bob's post-distillation error
//! decays strictly faster in the block size than Eve's, so a threshold is the
//! `β₀` where the two error exponents coincide. For incoherent attacks this is
//! `β₀ = 2/(2 + (n−1))`, which is also where the isotropic state stops being
//! distillable; for coherent block attacks it rises to
//! `β₀ = 2/(2 + (3−√5)(n−1))`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{eve_error_exponent_fit, AttackKind};
use crate::channel::{isotropic_state, make_params, singlet_fraction};
use crate::distill::bob_error_after_ad;
use crate::error::{Error, Result};
use crate::fit::fit_line;

pub const MIN_TOL: f64 = 1e-4;
pub const MAX_BISECTIONS: usize = 60;

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidParams(format!("n = {n} must be at least 2")))
    } else {
        Ok(())
    }
}

/// `2 / (2 + (n−1))`.
pub fn threshold_incoherent_closed(n: usize) -> f64 {
    2.0 / (2.0 + (n as f64 - 1.0))
}

/// `2 / (2 + (3−√5)(n−1))`.
pub fn threshold_coherent_closed(n: usize) -> f64 {
    2.0 / (2.0 + (3.0 - 5f64.sqrt()) * (n as f64 - 1.0))
}

/// `β₀` at which the isotropic state's singlet fraction falls to `1/n`,
/// located by bisection on the constructed state.
pub fn quantum_distillability_threshold(n: usize) -> Result<f64> {
    check_dim(n)?;
    let target = 1.0 / n as f64;
    let excess = |b: f64| -> Result<f64> {
        Ok(singlet_fraction(&isotropic_state(&make_params(n, b)?))? - target)
    };
    let (mut lo, mut hi) = (1.0 / n as f64, 1.0);
    // singlet fraction is 1/n² at the low end and 1 at the high end
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let root = 0.5 * (lo + hi);
    debug_assert!((root - 2.0 / (n as f64 + 1.0)).abs() < 1e-10);
    Ok(root)
}

/// Outcome of a numeric threshold search.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdSearch {
    pub n: usize,
    pub kind: AttackKind,
    pub n_max: usize,
    pub beta0: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Exponent gap `g(β₀)`: Bob's slope minus Eve's slope, both fitted over the
/// block sizes Eve's fit retained. Positive means Eve's error shrinks faster.
pub fn exponent_gap(n: usize, kind: AttackKind, n_max: usize, beta0: f64) -> Result<f64> {
    let params = make_params(n, beta0)?;
    let eve = eve_error_exponent_fit(&params, kind, n_max)?;
    let xs: Vec<f64> = eve.block_sizes.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = eve
        .block_sizes
        .iter()
        .map(|&k| bob_error_after_ad(&params, k).map(f64::ln))
        .collect::<Result<_>>()?;
    let bob = fit_line(&xs, &ys)?;
    Ok(bob.slope - eve.slope())
}

/// Default bisection bracket inside `(1/n, 1)`.
pub fn default_bracket(n: usize) -> (f64, f64) {
    (1.0 / n as f64 + 0.02, 0.99)
}

/// Bisects the exponent gap for the threshold `β₀`.
pub fn find_threshold(n: usize, kind: AttackKind, n_max: usize, tol: f64) -> Result<ThresholdSearch> {
    find_threshold_in(n, kind, n_max, tol, default_bracket(n))
}

pub fn find_threshold_in(
    n: usize,
    kind: AttackKind,
    n_max: usize,
    tol: f64,
    bracket: (f64, f64),
) -> Result<ThresholdSearch> {
    check_dim(n)?;
    if kind == AttackKind::Coherent && n > 3 {
        return Err(Error::InvalidArgument(format!("numeric coherent thresholds need n ≤ 3, got {n}")));
    }
    if tol.is_nan() || tol < MIN_TOL {
        return Err(Error::InvalidArgument(format!("tol = {tol} below {MIN_TOL}")));
    }
    let mut memo: HashMap<u64, f64> = HashMap::new();
    let mut gap = |b: f64| -> Result<f64> {
        if let Some(&g) = memo.get(&b.to_bits()) {
            return Ok(g);
        }
        let g = exponent_gap(n, kind, n_max, b)?;
        memo.insert(b.to_bits(), g);
        Ok(g)
    };
    let (mut lo, mut hi) = bracket;
    let g_lo = gap(lo)?;
    let g_hi = gap(hi)?;
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::NoSignChange { lo, hi, g_lo, g_hi });
    }
    let mut iterations = 0;
    while hi - lo >= tol && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(ThresholdSearch {
        n,
        kind,
        n_max,
        beta0: 0.5 * (lo + hi),
        bracket,
        iterations,
    })
}

pub fn find_threshold_numeric(n: usize, kind: AttackKind, n_max: usize, tol: f64) -> Result<f64> {
    find_threshold(n, kind, n_max, tol).map(|s| s.beta0)
}

/// Largest block size used for numeric thresholds at dimension `n`.
pub fn figure_block_limit(n: usize, kind: AttackKind) -> Option<usize> {
    match (kind, n) {
        (_, 2) => Some(6),
        (AttackKind::Incoherent, 3) => Some(6),
        (AttackKind::Coherent, 3) => Some(4),
        _ => None,
    }
}

/// One row of the threshold figure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRecord {
    pub n: usize,
    pub beta_inc_closed: f64,
    pub beta_coh_closed: f64,
    pub beta_inc_numeric: Option<f64>,
    pub beta_coh_numeric: Option<f64>,
    pub beta_quantum: f64,
}

pub const FIGURE_TOL: f64 = 1e-4;

fn record(n: usize, include_numeric: bool) -> Result<ThresholdRecord> {
    let numeric = |kind| -> Result<Option<f64>> {
        match figure_block_limit(n, kind) {
            Some(n_max) if include_numeric => find_threshold_numeric(n, kind, n_max, FIGURE_TOL).map(Some),
            _ => Ok(None),
        }
    };
    Ok(ThresholdRecord {
        n,
        beta_inc_closed: threshold_incoherent_closed(n),
        beta_coh_closed: threshold_coherent_closed(n),
        beta_inc_numeric: numeric(AttackKind::Incoherent)?,
        beta_coh_numeric: numeric(AttackKind::Coherent)?,
        beta_quantum: quantum_distillability_threshold(n)?,
    })
}

/// One record per `n` in `n_min..=n_max`, ascending.
pub fn figure_table(n_min: usize, n_max: usize, include_numeric: bool) -> Result<Vec<ThresholdRecord>> {
    check_dim(n_min)?;
    if n_max < n_min {
        return Err(Error::InvalidArgument(format!("n_max = {n_max} below n_min = {n_min}")));
    }
    (n_min..=n_max).into_par_iter().map(|n| record(n, include_numeric)).collect()
}
