//! Eve's attacks on one accepted distillation block.
//!
//! Eve holds the purification of every round. After the block she knows the
//! announcements `m_i` and that Bob accepted, and wants the secret `c`. Given
//! `c`, Alice's symbols are `x_i = m_i + c`; acceptance means Bob's offsets
//! `y_i − x_i` all equal one common `k`, with weight `β₀^N` for `k = 0` and
//! `q^N` for each `k ≠ 0`. Eve's state for hypothesis `c` is therefore
//!
//! ```text
//! ρ_c ∝ β₀^N ⊗_i |e(x_i, x_i)⟩⟨·| + q^N Σ_{k≠0} ⊗_i |e(x_i, x_i + k)⟩⟨·|
//! ```
//!
//! where `|e(a, b)⟩` is her normalized conditional state for outcome `(a, b)`.
//!
//! * Incoherent: she measures each ancilla with the square-root measurement
//!   of the single-round ensemble and combines the outcomes by maximum
//!   likelihood.
//! * Coherent: one collective measurement on all `N` ancillas of the block,
//!   Helstrom for `n = 2` and the square-root measurement otherwise.
//!
//! Every `ρ_c` is a mixture of at most `n` pure product vectors, so the
//! coherent attack is evaluated on the span of those vectors (at most `n²`
//! dimensional) instead of the full `n^(2N)` space. The dense route is kept
//! in [`coherent_attack_error_dense`] as a reference.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::channel::{channel_conditionals, ChannelParams, EveConditional};
use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::matcore::{
    discrimination_error, helstrom_error, kron_vec, span_coordinates, square_root_measurement,
    Complex64, DensityOperator,
};

/// `n^N` limit for enumerating Eve's classical outcome strings.
pub const INCOHERENT_GUARD: u128 = 1_000_000;
/// `n^(2N)` limit on Eve's block Hilbert space.
pub const COHERENT_GUARD: u128 = 1 << 14;
/// Cap on `n^(2N)` for the span-reduced coherent attack, which stores the
/// block vectors but never a block operator.
pub const COHERENT_SPAN_GUARD: u128 = 1 << 20;
/// Errors at or below this are left out of exponent fits.
pub const FIT_FLOOR: f64 = 1e-12;

/// Relative Gram-eigenvalue cutoff when restricting block states to their span.
const SPAN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    Incoherent,
    Coherent,
}

impl AttackKind {
    pub const ALL: [AttackKind; 2] = [AttackKind::Incoherent, AttackKind::Coherent];
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::Incoherent => "incoherent",
            AttackKind::Coherent => "coherent",
        })
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "incoherent" => Ok(AttackKind::Incoherent),
            "coherent" => Ok(AttackKind::Coherent),
            other => Err(Error::InvalidArgument(format!("unknown attack kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackReport {
    pub kind: AttackKind,
    pub n: usize,
    pub beta0: f64,
    pub block_size: usize,
    pub eve_error: f64,
    /// Dimension of the Hilbert space Eve measures at once.
    pub dims_used: u128,
    pub notes: String,
}

/// One acceptance-consistent branch of Eve's round state: Bob's symbol is
/// `x + offset`.
#[derive(Debug, Clone)]
pub struct RoundBranch {
    pub offset: usize,
    /// Relative weight: `β₀` for offset 0, `q` otherwise.
    pub weight: f64,
    pub vector: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct RoundHypothesis {
    pub secret: usize,
    pub prior: f64,
    /// Alice's symbol implied by the secret and the announcement.
    pub symbol: usize,
    pub branches: Vec<RoundBranch>,
    pub state: DensityOperator,
}

impl RoundHypothesis {
    pub fn branch(&self, offset: usize) -> Option<&RoundBranch> {
        self.branches.iter().find(|b| b.offset == offset)
    }
}

#[derive(Debug, Clone)]
pub struct RoundEnsemble {
    pub announced: usize,
    pub hypotheses: Vec<RoundHypothesis>,
    /// `β₀ = 1/n`: every branch has the same weight and acceptance carries
    /// no information for Bob. Eve's states are still well defined
    /// (mutually orthogonal).
    pub degenerate: bool,
}

impl RoundEnsemble {
    pub fn priors(&self) -> Vec<f64> {
        self.hypotheses.iter().map(|h| h.prior).collect()
    }

    pub fn states(&self) -> Vec<DensityOperator> {
        self.hypotheses.iter().map(|h| h.state.clone()).collect()
    }
}

fn round_ensemble(params: &ChannelParams, cond: &EveConditional, announced: usize) -> Result<RoundEnsemble> {
    let n = params.n();
    let eve_dim = cond.eve_dim();
    let mut hypotheses = Vec::with_capacity(n);
    for secret in 0..n {
        let symbol = (announced + secret) % n;
        let branches: Vec<RoundBranch> = (0..n)
            .filter_map(|offset| {
                cond.get(symbol, (symbol + offset) % n).map(|e| RoundBranch {
                    offset,
                    weight: e.probability * n as f64,
                    vector: e.vector.amplitudes().to_vec(),
                })
            })
            .collect();
        let parts: Vec<(f64, &[Complex64])> = branches.iter().map(|b| (b.weight, b.vector.as_slice())).collect();
        let state = DensityOperator::mixture_of_pure(&parts, vec![eve_dim])?;
        hypotheses.push(RoundHypothesis {
            secret,
            prior: 1.0 / n as f64,
            symbol,
            branches,
            state,
        });
    }
    Ok(RoundEnsemble {
        announced,
        hypotheses,
        degenerate: params.is_pure_noise(),
    })
}

/// Eve's single-round states for each candidate secret, given announcement `m`.
pub fn eve_round_states(params: &ChannelParams, announced: usize) -> Result<RoundEnsemble> {
    if announced >= params.n() {
        return Err(Error::InvalidArgument(format!(
            "announcement {announced} outside Z_{}",
            params.n()
        )));
    }
    let cond = channel_conditionals(params)?;
    round_ensemble(params, &cond, announced)
}

/// Mixture of pure product states over `N` ancillas.
#[derive(Debug, Clone)]
pub struct BlockState {
    dims: Vec<usize>,
    /// `(offset, normalized weight, unit vector)`.
    components: Vec<(usize, f64, Vec<Complex64>)>,
}

impl BlockState {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn components(&self) -> &[(usize, f64, Vec<Complex64>)] {
        &self.components
    }

    /// The dense density operator.
    pub fn density(&self) -> Result<DensityOperator> {
        let parts: Vec<(f64, &[Complex64])> = self.components.iter().map(|(_, w, v)| (*w, v.as_slice())).collect();
        DensityOperator::mixture_of_pure(&parts, self.dims.clone())
    }
}

#[derive(Debug, Clone)]
pub struct EveBlockHypothesis {
    pub secret: usize,
    pub prior: f64,
    pub block_state: BlockState,
}

fn check_coherent_guard(n: usize, block_size: usize, limit: u128) -> Result<()> {
    if block_size == 0 {
        return Err(Error::InvalidBlockSize);
    }
    let dim = (n as u128).checked_pow(2 * block_size as u32).unwrap_or(u128::MAX);
    if dim > limit {
        return Err(Error::GuardExceeded {
            guard: "coherent block dimension n^(2N)",
            value: dim,
            limit,
        });
    }
    Ok(())
}

fn check_incoherent_guard(n: usize, block_size: usize) -> Result<()> {
    if block_size == 0 {
        return Err(Error::InvalidBlockSize);
    }
    let count = (n as u128).checked_pow(block_size as u32).unwrap_or(u128::MAX);
    if count > INCOHERENT_GUARD {
        return Err(Error::GuardExceeded {
            guard: "incoherent outcome strings n^N",
            value: count,
            limit: INCOHERENT_GUARD,
        });
    }
    Ok(())
}

/// Checks the dimension guard `attack_error` applies for `kind`.
pub fn check_attack_guard(n: usize, kind: AttackKind, block_size: usize) -> Result<()> {
    match kind {
        AttackKind::Incoherent => check_incoherent_guard(n, block_size),
        AttackKind::Coherent => check_coherent_guard(n, block_size, COHERENT_SPAN_GUARD),
    }
}

/// Block hypotheses for explicit announcements `m_1..m_N`, capped at
/// [`COHERENT_GUARD`] since callers may densify them.
pub fn block_hypotheses(params: &ChannelParams, announcements: &[usize]) -> Result<Vec<EveBlockHypothesis>> {
    block_hypotheses_capped(params, announcements, COHERENT_GUARD)
}

fn block_hypotheses_capped(
    params: &ChannelParams,
    announcements: &[usize],
    limit: u128,
) -> Result<Vec<EveBlockHypothesis>> {
    let n = params.n();
    check_coherent_guard(n, announcements.len(), limit)?;
    if let Some(&m) = announcements.iter().find(|&&m| m >= n) {
        return Err(Error::InvalidArgument(format!("announcement {m} outside Z_{n}")));
    }
    let cond = channel_conditionals(params)?;
    let rounds: Vec<RoundEnsemble> = announcements
        .iter()
        .map(|&m| round_ensemble(params, &cond, m))
        .collect::<Result<_>>()?;
    let eve_dim = cond.eve_dim();

    let mut out = Vec::with_capacity(n);
    for secret in 0..n {
        let mut components = Vec::new();
        for offset in 0..n {
            let branches: Option<Vec<&RoundBranch>> =
                rounds.iter().map(|r| r.hypotheses[secret].branch(offset)).collect();
            let Some(branches) = branches else { continue };
            let weight: f64 = branches.iter().map(|b| b.weight).product();
            let vector = branches[1..]
                .iter()
                .fold(branches[0].vector.clone(), |acc, b| kron_vec(&acc, &b.vector));
            components.push((offset, weight, vector));
        }
        let total: f64 = components.iter().map(|c| c.1).sum();
        components.iter_mut().for_each(|c| c.1 /= total);
        out.push(EveBlockHypothesis {
            secret,
            prior: 1.0 / n as f64,
            block_state: BlockState {
                dims: vec![eve_dim; announcements.len()],
                components,
            },
        });
    }
    Ok(out)
}

/// Block hypotheses with every announcement fixed to 0. Shift covariance of
/// the channel makes the choice immaterial.
pub fn coherent_block_states(params: &ChannelParams, block_size: usize) -> Result<Vec<EveBlockHypothesis>> {
    block_hypotheses(params, &vec![0; block_size])
}

fn min_error(priors: &[f64], states: &[DensityOperator]) -> Result<f64> {
    if states.len() == 2 {
        helstrom_error(priors[0], &states[0], priors[1], &states[1])
    } else {
        let povm = square_root_measurement(priors, states)?;
        discrimination_error(priors, states, &povm)
    }
}

fn max_error(n: usize) -> f64 {
    (n - 1) as f64 / n as f64
}

/// Restricts every hypothesis to the joint span of all component vectors.
fn reduced_block_states(hyps: &[EveBlockHypothesis]) -> Result<Vec<DensityOperator>> {
    let vectors: Vec<Vec<Complex64>> = hyps
        .iter()
        .flat_map(|h| h.block_state.components.iter().map(|c| c.2.clone()))
        .collect();
    let coords = span_coordinates(&vectors, SPAN_TOL)?;
    let dim = coords[0].len();
    let mut next = coords.iter();
    hyps.iter()
        .map(|h| {
            let parts: Vec<(f64, &[Complex64])> = h
                .block_state
                .components
                .iter()
                .map(|c| (c.1, next.next().expect("one coordinate row per component").as_slice()))
                .collect();
            DensityOperator::mixture_of_pure(&parts, vec![dim])
        })
        .collect()
}

fn coherent_error_for(params: &ChannelParams, announcements: &[usize]) -> Result<f64> {
    let hyps = block_hypotheses_capped(params, announcements, COHERENT_SPAN_GUARD)?;
    let priors: Vec<f64> = hyps.iter().map(|h| h.prior).collect();
    let states = reduced_block_states(&hyps)?;
    Ok(min_error(&priors, &states)?.clamp(0.0, max_error(params.n())))
}

pub fn coherent_attack_error(params: &ChannelParams, block_size: usize) -> Result<AttackReport> {
    let n = params.n();
    let eve_error = coherent_error_for(params, &vec![0; block_size])?;
    let measurement = if n == 2 { "Helstrom" } else { "square-root measurement" };
    Ok(AttackReport {
        kind: AttackKind::Coherent,
        n,
        beta0: params.beta0(),
        block_size,
        eve_error,
        dims_used: (n as u128).pow(2 * block_size as u32),
        notes: format!("collective {measurement} over {block_size} ancillas, evaluated on the span of the block states"),
    })
}

/// Same quantity as [`coherent_attack_error`], computed on dense
/// `n^(2N)`-dimensional block operators.
pub fn coherent_attack_error_dense(params: &ChannelParams, block_size: usize) -> Result<f64> {
    let hyps = coherent_block_states(params, block_size)?;
    let priors: Vec<f64> = hyps.iter().map(|h| h.prior).collect();
    let states: Vec<DensityOperator> = hyps.iter().map(|h| h.block_state.density()).collect::<Result<_>>()?;
    Ok(min_error(&priors, &states)?.clamp(0.0, max_error(params.n())))
}

/// `P(outcome j | hypothesis c, branch k)` for one round.
struct RoundLikelihoods {
    /// `[c][branch index][j]`
    table: Vec<Vec<Vec<f64>>>,
    /// `[c][branch index]` offsets, aligned with `table`.
    offsets: Vec<Vec<usize>>,
    weights: Vec<Vec<f64>>,
}

fn round_likelihoods(ens: &RoundEnsemble) -> Result<RoundLikelihoods> {
    let povm = square_root_measurement(&ens.priors(), &ens.states())?;
    let n = ens.hypotheses.len();
    let effects = &povm.effects()[..n];
    let mut table = Vec::with_capacity(n);
    let mut offsets = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for h in &ens.hypotheses {
        table.push(
            h.branches
                .iter()
                .map(|b| {
                    effects
                        .iter()
                        .map(|e| crate::matcore::inner(&b.vector, &e.apply(&b.vector)).re.max(0.0))
                        .collect()
                })
                .collect(),
        );
        offsets.push(h.branches.iter().map(|b| b.offset).collect());
        weights.push(h.branches.iter().map(|b| b.weight).collect());
    }
    Ok(RoundLikelihoods {
        table,
        offsets,
        weights,
    })
}

fn incoherent_error_for(params: &ChannelParams, announcements: &[usize]) -> Result<f64> {
    let n = params.n();
    let block_size = announcements.len();
    check_incoherent_guard(n, block_size)?;
    let cond = channel_conditionals(params)?;
    let rounds: Vec<RoundLikelihoods> = announcements
        .iter()
        .map(|&m| round_likelihoods(&round_ensemble(params, &cond, m)?))
        .collect::<Result<_>>()?;

    // Block prior of each (c, branch): product of round weights, normalized per c.
    let first = &rounds[0];
    let mut init: Vec<Vec<f64>> = Vec::with_capacity(n);
    for c in 0..n {
        let mut w: Vec<f64> = first.offsets[c]
            .iter()
            .enumerate()
            .map(|(bi, _)| rounds.iter().map(|r| r.weights[c][bi]).product())
            .collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total * n as f64);
        init.push(w);
    }

    // Depth-first over outcome strings, carrying joint likelihoods P(c, k, j_1..j_i).
    fn walk(rounds: &[RoundLikelihoods], acc: &[Vec<f64>], n: usize) -> f64 {
        let Some((round, rest)) = rounds.split_first() else {
            return acc.iter().map(|w| w.iter().sum::<f64>()).fold(0.0, f64::max);
        };
        let mut success = 0.0;
        for j in 0..n {
            let next: Vec<Vec<f64>> = acc
                .iter()
                .enumerate()
                .map(|(c, w)| w.iter().enumerate().map(|(bi, x)| x * round.table[c][bi][j]).collect())
                .collect();
            if next.iter().flatten().all(|&x| x == 0.0) {
                continue;
            }
            success += walk(rest, &next, n);
        }
        success
    }

    let success = walk(&rounds, &init, n);
    Ok((1.0 - success).clamp(0.0, max_error(n)))
}

pub fn incoherent_attack_error(params: &ChannelParams, block_size: usize) -> Result<AttackReport> {
    let n = params.n();
    let eve_error = incoherent_error_for(params, &vec![0; block_size])?;
    Ok(AttackReport {
        kind: AttackKind::Incoherent,
        n,
        beta0: params.beta0(),
        block_size,
        eve_error,
        dims_used: (n * n) as u128,
        notes: format!("per-ancilla square-root measurement, maximum-likelihood combination of {block_size} outcomes"),
    })
}

pub fn attack_error(params: &ChannelParams, kind: AttackKind, block_size: usize) -> Result<AttackReport> {
    match kind {
        AttackKind::Incoherent => incoherent_attack_error(params, block_size),
        AttackKind::Coherent => coherent_attack_error(params, block_size),
    }
}

/// Eve's error for explicit announcements (used to check shift covariance).
pub fn attack_error_with_announcements(params: &ChannelParams, kind: AttackKind, announcements: &[usize]) -> Result<f64> {
    match kind {
        AttackKind::Incoherent => incoherent_error_for(params, announcements),
        AttackKind::Coherent => coherent_error_for(params, announcements),
    }
}

/// Log-linear fit of Eve's error against block size.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    pub fit: LineFit,
    pub block_sizes: Vec<usize>,
    pub errors: Vec<f64>,
    pub dropped_first: bool,
}

impl ExponentFit {
    pub fn slope(&self) -> f64 {
        self.fit.slope
    }
}

/// Fits `ln(err)` against `N` for the given `(N, err)` points, skipping errors
/// at or below [`FIT_FLOOR`]. The `N = 1` point is dropped when its distance
/// from the fit through the remaining points exceeds ten times that fit's rms
/// residual.
pub fn fit_exponent(points: &[(usize, f64)]) -> Result<ExponentFit> {
    let usable: Vec<(usize, f64)> = points.iter().copied().filter(|&(_, e)| e > FIT_FLOOR).collect();
    let xs: Vec<f64> = usable.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = usable.iter().map(|p| p.1.ln()).collect();
    let full = fit_line(&xs, &ys).map_err(|_| Error::TooFewPoints(usable.len()))?;
    let mut result = ExponentFit {
        fit: full,
        block_sizes: usable.iter().map(|p| p.0).collect(),
        errors: usable.iter().map(|p| p.1).collect(),
        dropped_first: false,
    };
    if usable.len() >= 4 && usable[0].0 == 1 {
        let rest = fit_line(&xs[1..], &ys[1..])?;
        let outlier = (ys[0] - rest.eval(xs[0])).abs();
        if outlier > 1e-9 && outlier > 10.0 * rest.rms_residual(&xs[1..], &ys[1..]) {
            result.fit = rest;
            result.block_sizes.remove(0);
            result.errors.remove(0);
            result.dropped_first = true;
        }
    }
    Ok(result)
}

pub fn eve_error_exponent_fit(params: &ChannelParams, kind: AttackKind, n_max: usize) -> Result<ExponentFit> {
    if n_max < 3 {
        return Err(Error::InvalidArgument(format!("N_max = {n_max} must be at least 3")));
    }
    let points: Vec<(usize, f64)> = (1..=n_max)
        .map(|nb| attack_error(params, kind, nb).map(|r| (nb, r.eve_error)))
        .collect::<Result<_>>()?;
    fit_exponent(&points)
}

/// Least-squares slope of `ln(eve_error)` over `N = 1..=n_max`.
pub fn eve_error_exponent(params: &ChannelParams, kind: AttackKind, n_max: usize) -> Result<f64> {
    eve_error_exponent_fit(params, kind, n_max).map(|f| f.slope())
}

/// Root fidelity between the Bob-correct branch states of two hypotheses,
/// `|⟨e(x, x)|e(x', x')⟩|`; the block analogue is its `N`-th power.
pub fn round_fidelity(params: &ChannelParams) -> Result<f64> {
    let ens = eve_round_states(params, 0)?;
    let a = &ens.hypotheses[0].branch(0).expect("offset-0 branch always present").vector;
    let b = &ens.hypotheses[1].branch(0).expect("offset-0 branch always present").vector;
    Ok(crate::matcore::inner(a, b).norm().min(1.0))
}
