use num_complex::Complex64;
use rand::Rng;

use super::linalg::hermitian_eigensystem;
use super::matrix::{kron, ComplexMatrix};
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-9;
pub const PSD_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-9;

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateVector {
    amplitudes: Vec<Complex64>,
}

impl PureStateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::NotNormalized(0.0));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::NotNormalized(norm));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Positive, unit-trace Hermitian operator on a tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validates every invariant, including positivity via a full spectrum.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let rho = Self::new_unchecked_spectrum(matrix, dims)?;
        let eig = hermitian_eigensystem(&rho.matrix)?;
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(rho)
    }

    /// Checks shape, hermiticity and trace but trusts the caller on positivity.
    /// Used for operators that are positive by construction (mixtures of projectors).
    pub(crate) fn new_unchecked_spectrum(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare(matrix.rows(), matrix.cols()));
        }
        check_dims(&dims, matrix.rows())?;
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        Ok(Self { matrix, dims })
    }

    pub fn from_pure(psi: &PureStateVector, dims: Vec<usize>) -> Result<Self> {
        Self::new_unchecked_spectrum(psi.projector(), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        Self::new_unchecked_spectrum(ComplexMatrix::identity(dim).scale(1.0 / dim as f64), dims)
    }

    /// Normalized convex combination of pure states given as `(weight, vector)`.
    /// Vectors need not be normalized; each contributes `weight · |v⟩⟨v| / ⟨v|v⟩`.
    pub fn mixture_of_pure(components: &[(f64, &[Complex64])], dims: Vec<usize>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        let mut m = ComplexMatrix::zeros(dim, dim);
        let mut total = 0.0;
        for &(w, v) in components {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            let n2 = norm(v).powi(2);
            if w <= 0.0 || n2 == 0.0 {
                continue;
            }
            let s = w / n2;
            for i in 0..dim {
                for j in 0..dim {
                    m[(i, j)] += v[i] * v[j].conj() * s;
                }
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::ZeroAverageState);
        }
        Self::new_unchecked_spectrum(m.scale(1.0 / total), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            matrix: kron(&self.matrix, &other.matrix),
            dims,
        }
    }

    /// Diagonal entry `⟨i|ρ|i⟩` in the computational product basis.
    pub fn population(&self, index: usize) -> f64 {
        self.matrix[(index, index)].re
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        partial_trace(self, keep)
    }
}

fn check_dims(dims: &[usize], dim: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != dim {
        return Err(Error::InvalidSubsystems {
            dims: dims.to_vec(),
            dim,
        });
    }
    Ok(())
}

/// Reduced operator on the subsystems listed in `keep` (order-insensitive).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let count = rho.dims.len();
    if keep.is_empty() {
        return Err(Error::EmptySelection);
    }
    if let Some(&index) = keep.iter().find(|&&k| k >= count) {
        return Err(Error::SubsystemOutOfRange { index, count });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..count).filter(|i| !kept.contains(i)).collect();

    // stride of each subsystem in the full row-major index
    let mut strides = vec![1usize; count];
    for i in (0..count.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * rho.dims[i + 1];
    }
    let offsets = |subsystems: &[usize]| -> Vec<usize> {
        let total: usize = subsystems.iter().map(|&s| rho.dims[s]).product();
        (0..total)
            .map(|mut idx| {
                let mut off = 0;
                for &s in subsystems.iter().rev() {
                    off += (idx % rho.dims[s]) * strides[s];
                    idx /= rho.dims[s];
                }
                off
            })
            .collect()
    };
    let keep_off = offsets(&kept);
    let trace_off = offsets(&traced);

    let kd = keep_off.len();
    let mut out = ComplexMatrix::zeros(kd, kd);
    for (i, &ri) in keep_off.iter().enumerate() {
        for (j, &cj) in keep_off.iter().enumerate() {
            out[(i, j)] = trace_off
                .iter()
                .map(|&t| rho.matrix[(ri + t, cj + t)])
                .sum();
        }
    }
    let dims = kept.iter().map(|&s| rho.dims[s]).collect();
    Ok(DensityOperator {
        matrix: out.symmetrized(),
        dims,
    })
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    Complex64::new(r * t.cos(), r * t.sin()) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureStateVector {
    let v = (0..dim).map(|_| gaussian_complex(rng)).collect();
    PureStateVector::normalized(v).expect("gaussian vector is nonzero")
}

/// Random density operator of the given rank (induced measure, `G G† / Tr`).
pub fn random_density_operator<R: Rng + ?Sized>(
    dims: &[usize],
    rank: usize,
    rng: &mut R,
) -> DensityOperator {
    let dim: usize = dims.iter().product();
    let g = ComplexMatrix::from_fn(dim, rank.max(1), |_, _| gaussian_complex(rng));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new_unchecked_spectrum(m.scale(1.0 / tr).symmetrized(), dims.to_vec())
        .expect("Wishart matrix is a valid state")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng)).symmetrized()
}
