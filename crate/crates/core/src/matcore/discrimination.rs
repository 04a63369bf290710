//! Minimum-error state discrimination.

use super::linalg::{hermitian_eigensystem, psd_sqrt_matrix, trace_norm};
use super::matrix::ComplexMatrix;
use super::state::{DensityOperator, PSD_TOL};
use crate::error::{Error, Result};

pub const PRIOR_TOL: f64 = 1e-12;
pub const COMPLETENESS_TOL: f64 = 1e-8;

/// Relative eigenvalue cutoff defining the support of the average state.
const SUPPORT_TOL: f64 = 1e-12;

/// A measurement. Effect `i` reads "guess hypothesis `i`"; when present, a
/// trailing null effect covers the complement of the hypotheses' support.
#[derive(Debug, Clone)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
    has_null: bool,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        Self::build(effects, false)
    }

    fn build(effects: Vec<ComplexMatrix>, has_null: bool) -> Result<Self> {
        let dim = effects.first().map_or(0, |e| e.rows());
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &effects {
            if !e.is_square() {
                return Err(Error::NotSquare(e.rows(), e.cols()));
            }
            if e.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.rows(),
                });
            }
            let min = hermitian_eigensystem(e)?.values.first().copied().unwrap_or(0.0);
            if min < -PSD_TOL {
                return Err(Error::NotPositive(min));
            }
            sum = &sum + e;
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > COMPLETENESS_TOL {
            return Err(Error::IncompletePovm(dev));
        }
        Ok(Self { effects, has_null })
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn has_null(&self) -> bool {
        self.has_null
    }

    pub fn dim(&self) -> usize {
        self.effects.first().map_or(0, |e| e.rows())
    }

    /// `Tr(E_i ρ)` for every effect.
    pub fn outcome_probabilities(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.effects
            .iter()
            .map(|e| e.trace_product(rho).re.max(0.0))
            .collect()
    }
}

fn check_priors(priors: &[f64]) -> Result<()> {
    if priors.is_empty() {
        return Err(Error::InvalidPriors("no hypotheses".into()));
    }
    if priors.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidPriors(format!("{priors:?} outside [0, 1]")));
    }
    let total: f64 = priors.iter().sum();
    if (total - 1.0).abs() > PRIOR_TOL {
        return Err(Error::InvalidPriors(format!("sum {total} != 1")));
    }
    Ok(())
}

fn check_states(priors: &[f64], states: &[DensityOperator]) -> Result<usize> {
    if priors.len() != states.len() {
        return Err(Error::DimensionMismatch {
            expected: priors.len(),
            got: states.len(),
        });
    }
    let dim = states[0].dim();
    if let Some(s) = states.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: s.dim(),
        });
    }
    Ok(dim)
}

/// Minimum error for two hypotheses: `½(1 − ‖p0ρ0 − p1ρ1‖₁)`.
pub fn helstrom_error(p0: f64, rho0: &DensityOperator, p1: f64, rho1: &DensityOperator) -> Result<f64> {
    check_priors(&[p0, p1])?;
    check_states(&[p0, p1], &[rho0.clone(), rho1.clone()])?;
    let diff = &rho0.matrix().scale(p0) - &rho1.matrix().scale(p1);
    let err = 0.5 * (1.0 - trace_norm(&diff)?);
    Ok(err.clamp(0.0, p0.min(p1)))
}

/// The optimal binary measurement: project onto the positive part of `p0ρ0 − p1ρ1`.
/// Zero eigenvalues go to hypothesis 0.
pub fn helstrom_measurement(p0: f64, rho0: &DensityOperator, p1: f64, rho1: &DensityOperator) -> Result<Povm> {
    check_priors(&[p0, p1])?;
    let dim = check_states(&[p0, p1], &[rho0.clone(), rho1.clone()])?;
    let diff = &rho0.matrix().scale(p0) - &rho1.matrix().scale(p1);
    let eig = hermitian_eigensystem(&diff)?;
    let positive = eig.map_spectrum(|l| if l >= 0.0 { 1.0 } else { 0.0 });
    let negative = &ComplexMatrix::identity(dim) - &positive;
    Povm::new(vec![positive, negative])
}

/// Square-root ("pretty good") measurement `E_i = S^{-1/2} p_i ρ_i S^{-1/2}`
/// with `S = Σ p_i ρ_i`, inverted on its support. A null effect is appended
/// when that support is not the whole space.
pub fn square_root_measurement(priors: &[f64], states: &[DensityOperator]) -> Result<Povm> {
    check_priors(priors)?;
    let dim = check_states(priors, states)?;
    let mut avg = ComplexMatrix::zeros(dim, dim);
    for (p, s) in priors.iter().zip(states) {
        avg = &avg + &s.matrix().scale(*p);
    }
    let eig = hermitian_eigensystem(&avg)?;
    let max = eig.values.last().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return Err(Error::ZeroAverageState);
    }
    let cutoff = SUPPORT_TOL * max;
    let inv_sqrt = eig.map_spectrum(|l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 });
    let support = eig.map_spectrum(|l| if l > cutoff { 1.0 } else { 0.0 });

    // E_i = M_i M_i† with M_i = S^{-1/2} √(p_i ρ_i), positive by construction
    let mut effects: Vec<ComplexMatrix> = priors
        .iter()
        .zip(states)
        .map(|(p, s)| {
            let m = &inv_sqrt * &psd_sqrt_matrix(&s.matrix().scale(*p))?;
            Ok((&m * &m.adjoint()).symmetrized())
        })
        .collect::<Result<_>>()?;
    let null = &ComplexMatrix::identity(dim) - &support;
    // congruence by T^{-1/2}, T = Σ E_i + null ≈ I, restores completeness exactly
    let mut total = null.clone();
    for e in &effects {
        total = &total + e;
    }
    let t_inv_sqrt = hermitian_eigensystem(&total)?.map_spectrum(|l| 1.0 / l.sqrt());
    for e in &mut effects {
        *e = (&(&t_inv_sqrt * &*e) * &t_inv_sqrt).symmetrized();
    }
    let has_null = eig.values.iter().any(|&l| l <= cutoff);
    if has_null {
        effects.push((&(&t_inv_sqrt * &null) * &t_inv_sqrt).symmetrized());
    }
    Povm::build(effects, has_null)
}

/// `1 − Σ_i p_i Tr(E_i ρ_i)`, clamped to `[0, 1]`.
pub fn discrimination_error(priors: &[f64], states: &[DensityOperator], povm: &Povm) -> Result<f64> {
    check_priors(priors)?;
    let dim = check_states(priors, states)?;
    if povm.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: povm.dim(),
        });
    }
    if povm.len() < priors.len() {
        return Err(Error::TooFewEffects {
            effects: povm.len(),
            hypotheses: priors.len(),
        });
    }
    let success: f64 = priors
        .iter()
        .zip(states)
        .zip(povm.effects())
        .map(|((p, s), e)| p * e.trace_product(s.matrix()).re)
        .sum();
    Ok((1.0 - success).clamp(0.0, 1.0))
}
