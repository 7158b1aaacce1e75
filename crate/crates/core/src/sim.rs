//! Monte Carlo oracles: the `(T, ω)` tree process and end-to-end LP decoding
//! under the all-zero codeword.
//!
//! Tree runs are split into fixed-size chunks and LP runs into single trials,
//! each driven by its own ChaCha stream derived from the seed and its index,
//! so results do not depend on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, LlrVector};
use crate::deviation::{certify_local_optimality, WeightVector};
use crate::lp::{LpDecoder, LpMode};
use crate::tanner::{Codeword, TannerGraph};
use crate::{Error, Result};

/// Trials per independent random stream.
pub const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trials: u64,
    pub failures: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl TrialReport {
    pub fn new(trials: u64, failures: u64, seed: u64) -> Self {
        let estimate = if trials == 0 { 0.0 } else { failures as f64 / trials as f64 };
        let stderr = if trials == 0 {
            0.0
        } else {
            (estimate * (1.0 - estimate) / trials as f64).sqrt()
        };
        TrialReport {
            trials,
            failures,
            estimate,
            stderr,
            seed,
        }
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunks(trials: u64) -> impl ParallelIterator<Item = (u64, u64)> {
    let n = trials.div_ceil(CHUNK);
    (0..n)
        .into_par_iter()
        .map(move |i| (i, CHUNK.min(trials - i * CHUNK)))
}

/// Sampler for the tree recursion with level weights `ω_0..ω_{L-1}`,
/// holding one buffer per level.
struct TreeSampler<'a> {
    omegas: &'a [f64],
    d_l: usize,
    d_r: usize,
    ch: &'a Channel,
    x: Vec<Vec<f64>>,
}

impl<'a> TreeSampler<'a> {
    fn new(omegas: &'a [f64], d_l: usize, d_r: usize, ch: &'a Channel, roots: usize) -> Self {
        // Number of X_l values needed for `roots` values of the top level.
        let levels = omegas.len();
        let mut sizes = vec![0; levels];
        let mut need = roots;
        for l in (0..levels).rev() {
            sizes[l] = need;
            need *= (d_r - 1) * (d_l - 1);
        }
        TreeSampler {
            omegas,
            d_l,
            d_r,
            ch,
            x: sizes.into_iter().map(|n| vec![0.0; n]).collect(),
        }
    }

    /// Draw fresh γ values and return the top-level `X` values.
    fn sample(&mut self, rng: &mut ChaCha8Rng) -> &[f64] {
        let (ch, d_l, d_r) = (self.ch, self.d_l, self.d_r);
        for l in 0..self.omegas.len() {
            let w = self.omegas[l];
            let (below, rest) = self.x.split_at_mut(l);
            let out = &mut rest[0];
            for (i, slot) in out.iter_mut().enumerate() {
                let mut m = f64::INFINITY;
                for j in 0..d_r - 1 {
                    let mut y = w * ch.sample_scaled_llr(rng);
                    if l > 0 {
                        let base = (i * (d_r - 1) + j) * (d_l - 1);
                        y += below[l - 1][base..base + d_l - 1].iter().sum::<f64>();
                    }
                    m = m.min(y);
                }
                *slot = m;
            }
        }
        self.x.last().expect("at least one level")
    }
}

fn check_tree_args(d_l: usize, d_r: usize, omegas: &[f64]) -> Result<()> {
    if d_l < 2 || d_r < 2 {
        return Err(Error::InvalidArgument(format!(
            "need d_L, d_R >= 2, got ({d_l},{d_r})"
        )));
    }
    if omegas.is_empty() {
        return Err(Error::InvalidArgument("need at least one level".into()));
    }
    Ok(())
}

/// Estimate `Π = P(Σ_{i=1}^{d_L} X_{T−1}^{(i)} ≤ 0)` by sampling the tree
/// process with level weights `weights.levels()` (`T = weights.depth()`).
pub fn simulate_tree_process(
    d_l: usize,
    d_r: usize,
    weights: &WeightVector,
    ch: &Channel,
    trials: u64,
    seed: u64,
) -> Result<TrialReport> {
    ch.validate()?;
    let omegas = weights.levels();
    check_tree_args(d_l, d_r, &omegas)?;
    let failures: u64 = chunks(trials)
        .map(|(chunk, count)| {
            let mut rng = chunk_rng(seed, chunk);
            let mut sampler = TreeSampler::new(&omegas, d_l, d_r, ch, d_l);
            (0..count)
                .filter(|_| sampler.sample(&mut rng).iter().sum::<f64>() <= 0.0)
                .count() as u64
        })
        .sum();
    Ok(TrialReport::new(trials, failures, seed))
}

/// `count` independent samples of `X_s` for level weights `omegas`
/// (`s = omegas.len() − 1`), in a thread-count independent order.
pub fn sample_x_values(
    d_l: usize,
    d_r: usize,
    omegas: &[f64],
    ch: &Channel,
    count: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    ch.validate()?;
    check_tree_args(d_l, d_r, omegas)?;
    let parts: Vec<Vec<f64>> = chunks(count)
        .map(|(chunk, n)| {
            let mut rng = chunk_rng(seed, chunk);
            let mut sampler = TreeSampler::new(omegas, d_l, d_r, ch, 1);
            (0..n).map(|_| sampler.sample(&mut rng)[0]).collect()
        })
        .collect();
    Ok(parts.concat())
}

/// Outcome of [`simulate_lp`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpReport {
    /// Failures are trials where the LP optimum is not uniquely `0ⁿ`.
    pub report: TrialReport,
    /// Trials where `0ⁿ` was certified locally optimal.
    pub certified: u64,
    /// Certified trials that the LP nonetheless failed. Must be zero.
    pub certified_failures: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSimOptions {
    pub mode: LpMode,
    /// Weights for the local-optimality check; `None` skips it.
    pub certify: Option<WeightVector>,
}

impl Default for LpSimOptions {
    fn default() -> Self {
        LpSimOptions {
            mode: LpMode::Float,
            certify: None,
        }
    }
}

/// Transmit `0ⁿ` over `ch`, LP-decode, and count failures. A trial fails
/// when the optimum is not `0ⁿ` or is not unique.
pub fn simulate_lp(
    g: &TannerGraph,
    ch: &Channel,
    trials: u64,
    seed: u64,
    opts: &LpSimOptions,
) -> Result<LpReport> {
    ch.validate()?;
    let decoder = LpDecoder::new(g, opts.mode)?;
    let zero = Codeword::zero(g.n());
    // LP trials are expensive, so each one gets its own stream.
    let outcomes: Vec<Result<(bool, bool)>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = chunk_rng(seed, trial);
            let y = ch.sample_with(zero.bits(), &mut rng);
            let lambda: LlrVector = ch.llr(&y);
            let failed = !decoder.decode_robust(&lambda)?.decoded(zero.bits());
            let cert = match &opts.certify {
                Some(wv) => certify_local_optimality(g, &zero, &lambda, wv)?.is_certified(),
                None => false,
            };
            Ok((failed, cert))
        })
        .collect();
    let (mut failures, mut certified, mut certified_failures) = (0, 0, 0);
    for r in outcomes {
        let (failed, cert) = r?;
        failures += failed as u64;
        certified += cert as u64;
        certified_failures += (failed && cert) as u64;
    }
    Ok(LpReport {
        report: TrialReport::new(trials, failures, seed),
        certified,
        certified_failures,
    })
}
