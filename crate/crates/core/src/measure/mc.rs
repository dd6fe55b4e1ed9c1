//! Sharded Monte Carlo estimators over the 1d game started at `x_0 = 0`.
//!
//! A run of `n` steps with burn-in `b` keeps `n - b` samples. They are split
//! across a fixed number of shards; every shard plays its own chain on stream
//! `shard_stream(stream, s)`, discards `b` steps and keeps its share. Shard
//! results are merged in shard order, so the estimates do not depend on the
//! thread count. With one shard the estimate is the plain time average over
//! `k > b` of a single trajectory.
//!
//! Standard errors use batch means: each shard's kept samples are cut into
//! consecutive batches and the spread of batch means across all shards gives
//! the error of the overall mean.

use serde::{Deserialize, Serialize};

use super::density::{bin_index, grid_from_counts, DensityGrid};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fermion::entropy;
use crate::ifs::{shard_stream, VertexStream};

/// The chain to sample: weight and RNG coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub w: f64,
    pub seed: u64,
    pub stream: u64,
}

impl ChainSpec {
    pub fn new(w: f64, seed: u64, stream: u64) -> Self {
        Self { w, seed, stream }
    }

    /// Chains accept `w = 1`, the full-swap limit of the fermionic game.
    fn validate(&self) -> Result<()> {
        if self.w > 0.0 && self.w <= 1.0 {
            Ok(())
        } else {
            Err(Error::config(format!("weight w must lie in (0, 1], got {}", self.w)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub shards: usize,
    pub batches_per_shard: usize,
    pub execution: Execution,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            shards: 16,
            batches_per_shard: 20,
            execution: Execution::default(),
        }
    }
}

impl McOptions {
    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn single_chain() -> Self {
        Self {
            shards: 1,
            ..Self::default()
        }
    }
}

/// A Monte Carlo mean with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl Estimate {
    /// `|mean - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }
}

struct ShardSums {
    totals: Vec<f64>,
    count: u64,
    batch_means: Vec<Vec<f64>>,
}

fn plan(n: usize, burn_in: usize, opts: &McOptions) -> Result<Vec<usize>> {
    if n <= burn_in {
        return Err(Error::input(format!("steps {n} must exceed burn-in {burn_in}")));
    }
    if opts.shards == 0 || opts.batches_per_shard == 0 {
        return Err(Error::input("shards and batches must be positive"));
    }
    let kept = n - burn_in;
    let (q, r) = (kept / opts.shards, kept % opts.shards);
    let per: Vec<usize> = (0..opts.shards).map(|s| q + usize::from(s < r)).collect();
    if per.iter().any(|&p| p < opts.batches_per_shard) {
        return Err(Error::input(format!(
            "{kept} kept samples are too few for {} shards x {} batches",
            opts.shards, opts.batches_per_shard
        )));
    }
    Ok(per)
}

/// Visits `burn_in + kept` steps of one chain, calling `visit` on kept values.
fn walk_chain(
    chain: &ChainSpec,
    shard: usize,
    burn_in: usize,
    kept: usize,
    mut visit: impl FnMut(usize, f64),
) -> Result<()> {
    let mut labels = VertexStream::new(chain.seed, shard_stream(chain.stream, shard), 2)?;
    let (c, w) = (1.0 - chain.w, chain.w);
    let mut x = 0.0f64;
    for _ in 0..burn_in {
        x = c * x + w * f64::from(labels.next().unwrap_or(0));
    }
    for i in 0..kept {
        x = c * x + w * f64::from(labels.next().unwrap_or(0));
        visit(i, x);
    }
    Ok(())
}

/// Batch means of `dim` observables `obs(x, out)`.
fn sample_observables<F>(
    chain: &ChainSpec,
    n: usize,
    burn_in: usize,
    opts: &McOptions,
    dim: usize,
    obs: F,
) -> Result<Vec<ShardSums>>
where
    F: Fn(f64, &mut [f64]) + Sync + Send,
{
    chain.validate()?;
    let per = plan(n, burn_in, opts)?;
    let nb = opts.batches_per_shard;
    let shards = opts.execution.map_indexed(per.len(), |s| {
        let kept = per[s];
        let batch_len = kept / nb;
        let mut totals = vec![0.0; dim];
        let mut batch = vec![0.0; dim];
        let mut batch_means = Vec::with_capacity(nb);
        let mut in_batch = 0usize;
        let mut scratch = vec![0.0; dim];
        walk_chain(chain, s, burn_in, kept, |i, x| {
            obs(x, &mut scratch);
            for d in 0..dim {
                batch[d] += scratch[d];
            }
            in_batch += 1;
            // the last batch absorbs the remainder
            let closes = if batch_means.len() + 1 == nb {
                i + 1 == kept
            } else {
                in_batch == batch_len
            };
            if closes {
                batch_means.push(batch.iter().map(|b| b / in_batch as f64).collect());
                for d in 0..dim {
                    totals[d] += batch[d];
                    batch[d] = 0.0;
                }
                in_batch = 0;
            }
        })?;
        Ok(ShardSums {
            totals,
            count: kept as u64,
            batch_means,
        })
    });
    shards.into_iter().collect()
}

fn combine(shards: &[ShardSums], d: usize) -> Estimate {
    let count: u64 = shards.iter().map(|s| s.count).sum();
    let total: f64 = shards.iter().map(|s| s.totals[d]).sum();
    let means: Vec<f64> = shards
        .iter()
        .flat_map(|s| s.batch_means.iter().map(move |b| b[d]))
        .collect();
    Estimate {
        mean: total / count as f64,
        stderr: batch_stderr(&means),
        samples: count,
    }
}

fn batch_stderr(means: &[f64]) -> f64 {
    let nb = means.len() as f64;
    if means.len() < 2 {
        return f64::INFINITY;
    }
    let m = means.iter().sum::<f64>() / nb;
    let var = means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (nb - 1.0);
    (var / nb).sqrt()
}

/// Time-averaged entanglement entropy `⟨S*⟩` with its standard error.
pub fn average_entropy_mc(
    chain: &ChainSpec,
    n: usize,
    burn_in: usize,
    opts: &McOptions,
) -> Result<Estimate> {
    let shards = sample_observables(chain, n, burn_in, opts, 1, |x, out| out[0] = entropy(x))?;
    Ok(combine(&shards, 0))
}

/// Empirical moments `⟨x^p⟩` for `p = 1..=order`.
pub fn mc_moments(
    chain: &ChainSpec,
    order: usize,
    n: usize,
    burn_in: usize,
    opts: &McOptions,
) -> Result<Vec<Estimate>> {
    let shards = sample_observables(chain, n, burn_in, opts, order, |x, out| {
        let mut p = 1.0;
        for o in out.iter_mut() {
            p *= x;
            *o = p;
        }
    })?;
    Ok((0..order).map(|d| combine(&shards, d)).collect())
}

/// Empirical variance of the stationary law.
///
/// The error propagates batch means of `x` and `x²` through
/// `y_b = ⟨x²⟩_b - 2 x̄ ⟨x⟩_b + x̄²`.
pub fn mc_variance(
    chain: &ChainSpec,
    n: usize,
    burn_in: usize,
    opts: &McOptions,
) -> Result<Estimate> {
    let shards = sample_observables(chain, n, burn_in, opts, 2, |x, out| {
        out[0] = x;
        out[1] = x * x;
    })?;
    let first = combine(&shards, 0);
    let second = combine(&shards, 1);
    let mean = first.mean;
    let ys: Vec<f64> = shards
        .iter()
        .flat_map(|s| s.batch_means.iter())
        .map(|b| b[1] - 2.0 * mean * b[0] + mean * mean)
        .collect();
    Ok(Estimate {
        mean: second.mean - mean * mean,
        stderr: batch_stderr(&ys),
        samples: first.samples,
    })
}

/// Histogram of the sharded chains; integer bin counts are merged exactly.
pub fn sample_density(
    chain: &ChainSpec,
    k: usize,
    n: usize,
    burn_in: usize,
    opts: &McOptions,
) -> Result<DensityGrid> {
    chain.validate()?;
    if k == 0 {
        return Err(Error::input("density grid needs at least one bin"));
    }
    let per = plan(n, burn_in, opts)?;
    let shards = opts.execution.map_indexed(per.len(), |s| -> Result<Vec<u64>> {
        let mut counts = vec![0u64; k];
        let mut bad = None;
        walk_chain(chain, s, burn_in, per[s], |_, x| match bin_index(x, k) {
            Ok(b) => counts[b] += 1,
            Err(e) => bad = Some(e),
        })?;
        bad.map_or(Ok(counts), Err)
    });
    let mut counts = vec![0u64; k];
    for shard in shards {
        for (c, s) in counts.iter_mut().zip(shard?) {
            *c += s;
        }
    }
    grid_from_counts(&counts)
}
