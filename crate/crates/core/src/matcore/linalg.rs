use faer::Side;
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::state::{DensityOperator, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// Eigenvalues at or above this (negative) floor are clipped to zero before
/// taking square roots; anything lower is treated as a corrupted operator.
pub const NEGATIVE_EIGEN_FLOOR: f64 = -1e-6;

/// Eigenvalues at or below this fraction of the largest are round-off and
/// map to zero under square roots.
pub const RANK_TOL: f64 = 1e-14;

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// `V f(Λ) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let dim = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(dim, dim, |i, j| {
            (0..dim)
                .filter(|&k| fv[k] != 0.0)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * fv[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| l)
    }

    pub fn column(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
///
/// The input is symmetrized as `(h + h†)/2` after the hermiticity check, so
/// round-off asymmetry below the tolerance never leaks into the spectrum.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<Eigensystem> {
    if !h.is_square() {
        return Err(Error::NotSquare(h.rows(), h.cols()));
    }
    let scale = h.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let dev = h.hermitian_deviation();
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    let dim = h.rows();
    if dim == 0 {
        return Ok(Eigensystem {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let eig = h
        .symmetrized()
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    let (s, u) = (eig.S(), eig.U());
    let raw: Vec<f64> = (0..dim).map(|k| s[k].re).collect();
    if raw.iter().any(|l| !l.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
    let values = order.iter().map(|&k| raw[k]).collect();
    let vectors = ComplexMatrix::from_fn(dim, dim, |i, j| u[(i, order[j])]);
    Ok(Eigensystem { values, vectors })
}

fn clip(l: f64) -> Result<f64> {
    if l < NEGATIVE_EIGEN_FLOOR {
        Err(Error::NotPositive(l))
    } else {
        Ok(l.max(0.0))
    }
}

/// Square root of a positive semidefinite matrix.
pub fn psd_sqrt_matrix(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigensystem(m)?;
    for &l in &eig.values {
        clip(l)?;
    }
    let cutoff = RANK_TOL * eig.values.last().copied().unwrap_or(0.0).max(0.0);
    Ok(eig.map_spectrum(|l| if l > cutoff { l.sqrt() } else { 0.0 }))
}

pub fn psd_sqrt(rho: &DensityOperator) -> Result<ComplexMatrix> {
    psd_sqrt_matrix(rho.matrix())
}

/// Root fidelity `Tr √(√ρ σ √ρ) = ‖√ρ √σ‖₁`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let product = &psd_sqrt(rho)? * &psd_sqrt(sigma)?;
    Ok(product.singular_values()?.iter().sum::<f64>().clamp(0.0, 1.0))
}

/// Sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.rows(), a.cols()));
    }
    if a.rows() == 0 {
        return Ok(0.0);
    }
    let scale = a.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max);
    if a.hermitian_deviation() <= HERMITIAN_TOL * scale {
        let eig = hermitian_eigensystem(a)?;
        return Ok(eig.values.iter().map(|l| l.abs()).sum());
    }
    Ok(a.singular_values()?.iter().sum())
}

/// Coordinates of each vector in an orthonormal basis of their joint span.
///
/// With the Gram matrix `G = U Λ U†`, the basis `e_k = Σ_i v_i U_ik / √Λ_k`
/// gives `⟨e_k|v_j⟩ = √Λ_k · conj(U_jk)`. Directions with
/// `Λ_k ≤ rel_tol · max Λ` are dropped. Inner products are preserved exactly
/// on the retained span, which is all of it up to `rel_tol`.
pub fn span_coordinates(vectors: &[Vec<Complex64>], rel_tol: f64) -> Result<Vec<Vec<Complex64>>> {
    let count = vectors.len();
    if count == 0 {
        return Ok(vec![]);
    }
    let gram = ComplexMatrix::from_fn(count, count, |i, j| super::matrix::inner(&vectors[i], &vectors[j]));
    let eig = hermitian_eigensystem(&gram)?;
    let max = eig.values.last().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return Err(Error::ZeroAverageState);
    }
    let kept: Vec<usize> = (0..count)
        .filter(|&k| eig.values[k] > rel_tol * max)
        .collect();
    Ok((0..count)
        .map(|j| {
            kept.iter()
                .map(|&k| eig.vectors[(j, k)].conj() * eig.values[k].sqrt())
                .collect()
        })
        .collect())
}
