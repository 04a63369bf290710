//! Repetition-block advantage distillation.
//!
//! Per block Alice draws a fresh secret `c` and announces `m_i = (x_i − c) mod n`
//! for each of her `N` raw symbols. Bob computes `d_i = (y_i − m_i) mod n` and
//! accepts iff all `d_i` agree, taking the common value as his guess for `c`.
//!
//! Random streams: block `i` of a session with seed `s` draws from a ChaCha8
//! generator keyed by `s` on stream `i`, so any block can be replayed on its
//! own and blocks can be run in any order.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};

fn check_block_size(block_size: usize) -> Result<()> {
    if block_size == 0 {
        Err(Error::InvalidBlockSize)
    } else {
        Ok(())
    }
}

/// `β₀^N + (n−1) q^N`.
pub fn acceptance_probability(params: &ChannelParams, block_size: usize) -> Result<f64> {
    check_block_size(block_size)?;
    let n = block_size as i32;
    Ok(params.beta0().powi(n) + (params.n() - 1) as f64 * params.q().powi(n))
}

/// Probability that Bob's guess is wrong given that he accepted.
pub fn bob_error_after_ad(params: &ChannelParams, block_size: usize) -> Result<f64> {
    check_block_size(block_size)?;
    let n = block_size as i32;
    let wrong = (params.n() - 1) as f64 * params.q().powi(n);
    Ok(wrong / (params.beta0().powi(n) + wrong))
}

/// Asymptotic decay rate `ln(q/β₀)` of Bob's post-distillation error.
/// Returns `-∞` on a noiseless channel, where the error is identically zero.
pub fn bob_error_exponent(params: &ChannelParams) -> f64 {
    if params.q() == 0.0 {
        f64::NEG_INFINITY
    } else {
        (params.q() / params.beta0()).ln()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockTranscript {
    pub n: usize,
    pub alice_symbols: Vec<usize>,
    pub secret: usize,
    pub announcements: Vec<usize>,
    pub bob_symbols: Vec<usize>,
    pub bob_differences: Vec<usize>,
    pub accepted: bool,
    pub bob_guess: Option<usize>,
}

impl BlockTranscript {
    /// Assembles a transcript from the raw symbols, deriving everything public.
    pub fn from_symbols(n: usize, alice_symbols: Vec<usize>, secret: usize, bob_symbols: Vec<usize>) -> Self {
        let announcements: Vec<usize> = alice_symbols.iter().map(|&x| (x + n - secret) % n).collect();
        let bob_differences: Vec<usize> = bob_symbols
            .iter()
            .zip(&announcements)
            .map(|(&y, &m)| (y + n - m) % n)
            .collect();
        let accepted = bob_differences.windows(2).all(|w| w[0] == w[1]);
        let bob_guess = accepted.then(|| bob_differences[0]);
        Self {
            n,
            alice_symbols,
            secret,
            announcements,
            bob_symbols,
            bob_differences,
            accepted,
            bob_guess,
        }
    }

    pub fn block_size(&self) -> usize {
        self.alice_symbols.len()
    }

    pub fn bob_correct(&self) -> bool {
        self.bob_guess == Some(self.secret)
    }

    /// Checks the announcement and acceptance invariants.
    pub fn is_consistent(&self) -> bool {
        let n = self.n;
        let announced = self
            .announcements
            .iter()
            .zip(&self.alice_symbols)
            .all(|(&m, &x)| (m + self.secret) % n == x);
        let diffs_ok = self
            .bob_symbols
            .iter()
            .zip(&self.announcements)
            .zip(&self.bob_differences)
            .all(|((&y, &m), &d)| (y + n - m) % n == d);
        let all_equal = self.bob_differences.windows(2).all(|w| w[0] == w[1]);
        announced
            && diffs_ok
            && self.accepted == all_equal
            && self.bob_guess == all_equal.then(|| self.bob_differences[0])
    }

    /// `N,x…,c,m…,y…,d…,accepted,guess` with list fields joined by `;`
    /// and an empty guess for rejected blocks.
    pub fn to_csv_line(&self) -> String {
        fn join(v: &[usize]) -> String {
            v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";")
        }
        format!(
            "{},{},{},{},{},{},{},{}",
            self.block_size(),
            join(&self.alice_symbols),
            self.secret,
            join(&self.announcements),
            join(&self.bob_symbols),
            join(&self.bob_differences),
            u8::from(self.accepted),
            self.bob_guess.map(|g| g.to_string()).unwrap_or_default()
        )
    }
}

pub const TRANSCRIPT_HEADER: &str = "N,alice_symbols,secret,announcements,bob_symbols,bob_differences,accepted,bob_guess";

fn sample_bob<R: Rng + ?Sized>(params: &ChannelParams, x: usize, rng: &mut R) -> usize {
    let n = params.n();
    let u: f64 = rng.gen();
    if u < params.beta0() {
        x
    } else {
        (x + 1 + rng.gen_range(0..n - 1)) % n
    }
}

pub fn simulate_block<R: Rng + ?Sized>(params: &ChannelParams, block_size: usize, rng: &mut R) -> Result<BlockTranscript> {
    check_block_size(block_size)?;
    let n = params.n();
    let alice: Vec<usize> = (0..block_size).map(|_| rng.gen_range(0..n)).collect();
    let secret = rng.gen_range(0..n);
    let bob = alice.iter().map(|&x| sample_bob(params, x, rng)).collect();
    Ok(BlockTranscript::from_symbols(n, alice, secret, bob))
}

/// Generator for block `index` of a session seeded with `seed`.
pub fn block_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionStats {
    pub blocks_run: u64,
    pub blocks_accepted: u64,
    pub bob_errors: u64,
    pub acceptance_rate: f64,
    /// `None` when no block was accepted.
    pub bob_error_rate: Option<f64>,
}

impl SessionStats {
    fn from_counts(blocks_run: u64, blocks_accepted: u64, bob_errors: u64) -> Self {
        Self {
            blocks_run,
            blocks_accepted,
            bob_errors,
            acceptance_rate: blocks_accepted as f64 / blocks_run as f64,
            bob_error_rate: (blocks_accepted > 0).then(|| bob_errors as f64 / blocks_accepted as f64),
        }
    }

    /// Binomial standard error of the acceptance rate around `p`.
    pub fn acceptance_std_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.blocks_run as f64).sqrt()
    }

    /// Binomial standard error of the error rate around `p`, over accepted blocks.
    pub fn bob_error_std_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.blocks_accepted.max(1) as f64).sqrt()
    }
}

pub fn run_session(params: &ChannelParams, block_size: usize, blocks: u64, seed: u64) -> Result<SessionStats> {
    check_block_size(block_size)?;
    if blocks == 0 {
        return Err(Error::InvalidArgument("blocks must be at least 1".into()));
    }
    let (accepted, errors) = (0..blocks)
        .into_par_iter()
        .map(|i| {
            let t = simulate_block(params, block_size, &mut block_rng(seed, i)).expect("block size checked");
            (u64::from(t.accepted), u64::from(t.accepted && !t.bob_correct()))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(SessionStats::from_counts(blocks, accepted, errors))
}

/// Writes the header and one line per block of the session.
pub fn dump_transcripts<W: Write>(
    params: &ChannelParams,
    block_size: usize,
    blocks: u64,
    seed: u64,
    out: &mut W,
) -> Result<()> {
    check_block_size(block_size)?;
    let io = |e: std::io::Error| Error::InvalidArgument(format!("transcript dump: {e}"));
    writeln!(out, "{TRANSCRIPT_HEADER}").map_err(io)?;
    for i in 0..blocks {
        let t = simulate_block(params, block_size, &mut block_rng(seed, i))?;
        writeln!(out, "{}", t.to_csv_line()).map_err(io)?;
    }
    Ok(())
}
