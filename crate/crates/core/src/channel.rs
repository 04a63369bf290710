//! The unbiased-noise qunit channel.
//!
//! Alice and Bob share the isotropic state `λ|Φ⟩⟨Φ| + (1−λ)I/n²` with
//! `|Φ⟩ = Σ_i |ii⟩/√n`. Measured in matching bases, their symbols agree with
//! probability `β₀ = λ + (1−λ)/n`; each of the `n−1` wrong symbols has
//! probability `q = (1−β₀)/(n−1)`. Eve holds the purification.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{
    hermitian_eigensystem, inner, ComplexMatrix, Complex64, DensityOperator, PureStateVector,
};

/// Tolerance on the `β₀ ∈ [1/n, 1]` bounds, absorbing decimal round-off in inputs.
const BOUND_TOL: f64 = 1e-12;

/// Conditional outcomes with probability at or below this are treated as absent.
pub const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    n: usize,
    beta0: f64,
    lambda: f64,
    q: f64,
}

impl ChannelParams {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Probability that Alice's and Bob's symbols agree.
    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    /// Weight of the maximally entangled component.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Probability of each particular wrong symbol.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// `β₀ = 1/n`: the channel carries no correlation at all.
    pub fn is_pure_noise(&self) -> bool {
        self.lambda == 0.0
    }

    pub fn is_noiseless(&self) -> bool {
        self.q == 0.0
    }
}

pub fn make_params(n: usize, beta0: f64) -> Result<ChannelParams> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n = {n} must be at least 2")));
    }
    let lo = 1.0 / n as f64;
    if !beta0.is_finite() || beta0 < lo - BOUND_TOL || beta0 > 1.0 + BOUND_TOL {
        return Err(Error::InvalidParams(format!(
            "beta0 = {beta0} outside [1/{n}, 1]"
        )));
    }
    let beta0 = beta0.clamp(lo, 1.0);
    let nf = n as f64;
    let lambda = ((beta0 - lo) / (1.0 - lo)).clamp(0.0, 1.0);
    let q = ((1.0 - beta0) / (nf - 1.0)).max(0.0);
    Ok(ChannelParams {
        n,
        beta0,
        lambda,
        q,
    })
}

fn index_ab(n: usize, a: usize, b: usize) -> usize {
    a * n + b
}

pub fn isotropic_state(params: &ChannelParams) -> DensityOperator {
    let n = params.n;
    let dim = n * n;
    let lam = params.lambda;
    let noise = (1.0 - lam) / dim as f64;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            m[(index_ab(n, i, i), index_ab(n, j, j))] += Complex64::new(lam / n as f64, 0.0);
        }
    }
    for d in 0..dim {
        m[(d, d)] += Complex64::new(noise, 0.0);
    }
    DensityOperator::new_unchecked_spectrum(m, vec![n, n]).expect("isotropic state is valid")
}

/// `⟨Φ|ρ|Φ⟩` for a state on two equal-dimension subsystems.
pub fn singlet_fraction(rho: &DensityOperator) -> Result<f64> {
    let dims = rho.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::InvalidSubsystems {
            dims: dims.to_vec(),
            dim: rho.dim(),
        });
    }
    let n = dims[0];
    let m = rho.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += m[(index_ab(n, i, i), index_ab(n, j, j))];
        }
    }
    Ok(acc.re / n as f64)
}

/// Exact outcome distribution of matched-basis rounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointStatistics {
    n: usize,
    table: Vec<f64>,
}

impl JointStatistics {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.table[index_ab(self.n, a, b)]
    }

    /// `Σ_a P(a, a)`.
    pub fn agreement(&self) -> f64 {
        (0..self.n).map(|a| self.get(a, a)).sum()
    }

    pub fn total(&self) -> f64 {
        self.table.iter().sum()
    }
}

pub fn joint_statistics(params: &ChannelParams) -> JointStatistics {
    let n = params.n;
    let nf = n as f64;
    let same = params.beta0 / nf;
    let diff = (1.0 - params.beta0) / (nf * (nf - 1.0));
    let table = (0..n * n)
        .map(|idx| if idx / n == idx % n { same } else { diff })
        .collect();
    JointStatistics { n, table }
}

/// Pure state of Alice, Bob and Eve with subsystem dimensions `[dA, dB, dA·dB]`.
#[derive(Debug, Clone)]
pub struct TripartiteState {
    vector: PureStateVector,
    dims: [usize; 3],
}

impl TripartiteState {
    pub fn vector(&self) -> &PureStateVector {
        &self.vector
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Eve's unnormalized conditional vector `(⟨a|⊗⟨b|⊗I)|Ψ⟩`.
    pub fn eve_branch(&self, a: usize, b: usize) -> Vec<Complex64> {
        let de = self.dims[2];
        let row = index_ab(self.dims[1], a, b);
        self.vector.amplitudes()[row * de..(row + 1) * de].to_vec()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_pure(&self.vector, self.dims.to_vec()).expect("unit vector")
    }

    /// Reduced state on Alice and Bob, computed directly from the amplitudes.
    pub fn reduced_ab(&self) -> DensityOperator {
        let dab = self.dims[0] * self.dims[1];
        let de = self.dims[2];
        let amp = self.vector.amplitudes();
        let m = ComplexMatrix::from_fn(dab, dab, |i, j| {
            inner(&amp[j * de..(j + 1) * de], &amp[i * de..(i + 1) * de])
        });
        DensityOperator::new_unchecked_spectrum(m, vec![self.dims[0], self.dims[1]])
            .expect("reduction of a unit vector")
    }

    pub fn reduced_eve(&self) -> DensityOperator {
        let dab = self.dims[0] * self.dims[1];
        let de = self.dims[2];
        let amp = self.vector.amplitudes();
        let m = ComplexMatrix::from_fn(de, de, |i, j| {
            (0..dab)
                .map(|r| amp[r * de + i] * amp[r * de + j].conj())
                .sum()
        });
        DensityOperator::new_unchecked_spectrum(m, vec![de]).expect("reduction of a unit vector")
    }
}

/// `|Ψ⟩ = Σ_k √λ_k |k⟩_AB |k⟩_E` over the eigenbasis of `ρ_AB`.
pub fn purify(rho_ab: &DensityOperator) -> Result<TripartiteState> {
    let dims = rho_ab.dims();
    if dims.len() != 2 {
        return Err(Error::InvalidSubsystems {
            dims: dims.to_vec(),
            dim: rho_ab.dim(),
        });
    }
    let dab = rho_ab.dim();
    let eig = hermitian_eigensystem(rho_ab.matrix())?;
    if let Some(&min) = eig.values.first() {
        if min < -crate::matcore::PSD_TOL {
            return Err(Error::NotPositive(min));
        }
    }
    let mut amp = vec![Complex64::new(0.0, 0.0); dab * dab];
    for (k, &l) in eig.values.iter().enumerate() {
        let w = l.max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        for r in 0..dab {
            amp[r * dab + k] = eig.vectors[(r, k)] * w;
        }
    }
    Ok(TripartiteState {
        vector: PureStateVector::normalized(amp)?,
        dims: [dims[0], dims[1], dab],
    })
}

/// Eve's state given one matched-basis outcome `(a, b)`.
#[derive(Debug, Clone)]
pub struct ConditionalEntry {
    pub probability: f64,
    pub vector: PureStateVector,
    pub state: DensityOperator,
}

/// Eve's conditional states for every outcome pair. Pairs that cannot occur
/// (probability ≤ [`ZERO_PROBABILITY`]) are absent.
#[derive(Debug, Clone)]
pub struct EveConditional {
    n: usize,
    entries: Vec<Option<ConditionalEntry>>,
}

impl EveConditional {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> Option<&ConditionalEntry> {
        self.entries[index_ab(self.n, a, b)].as_ref()
    }

    /// Zero for absent entries.
    pub fn probability(&self, a: usize, b: usize) -> f64 {
        self.get(a, b).map_or(0.0, |e| e.probability)
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.iter().flatten().map(|e| e.probability).sum()
    }

    pub fn eve_dim(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .next()
            .map_or(0, |e| e.vector.dim())
    }
}

pub fn eve_conditionals(state: &TripartiteState) -> Result<EveConditional> {
    let [da, db, de] = state.dims;
    if da != db {
        return Err(Error::InvalidSubsystems {
            dims: state.dims.to_vec(),
            dim: da * db * de,
        });
    }
    let n = da;
    let mut entries = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let v = state.eve_branch(a, b);
            let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if p <= ZERO_PROBABILITY {
                entries.push(None);
                continue;
            }
            let vector = PureStateVector::normalized(v)?;
            let state = DensityOperator::from_pure(&vector, vec![de])?;
            entries.push(Some(ConditionalEntry {
                probability: p,
                vector,
                state,
            }));
        }
    }
    Ok(EveConditional { n, entries })
}

/// Purification of the isotropic state for `params` and Eve's conditional table.
pub fn channel_conditionals(params: &ChannelParams) -> Result<EveConditional> {
    eve_conditionals(&purify(&isotropic_state(params))?)
}
