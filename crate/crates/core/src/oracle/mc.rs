//! Monte Carlo sampling of individual measurement records.
//!
//! Trials are split into fixed blocks of [`MC_BLOCK`]; block b draws from a
//! ChaCha stream keyed by (seed, b). Blocks are merged in index order, so the
//! statistics do not depend on how many workers ran them.

use super::grid::{grid_pointer_distribution, GridMeterState, Readout};
use super::tensor::tensor_pointer_distribution;
use super::PpsSystem;
use crate::error::{Error, Result};
use crate::meters::MatrixMeter;
use crate::pps::{DistributionKind, PointerDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

pub const MC_BLOCK: u64 = 1 << 16;

/// Meter accepted by the sampler.
#[derive(Debug, Clone, Copy)]
pub enum McMeter<'a> {
    Grid(&'a GridMeterState, Readout),
    Matrix(&'a MatrixMeter),
}

/// One trial: whether post-selection succeeded and, if so, the pointer reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRecord {
    pub accepted: bool,
    pub pointer_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McStatistics {
    pub trials: u64,
    pub accepted: u64,
    pub acceptance_rate: f64,
    pub mean: f64,
    /// Sample standard deviation of accepted pointer readings.
    pub std: f64,
    /// std/√accepted.
    pub stderr: f64,
}

/// Inverse-CDF sampler over a pointer distribution.
struct Sampler {
    xs: Vec<f64>,
    cdf: Vec<f64>,
    kind: DistributionKind,
}

impl Sampler {
    fn new(dist: &PointerDistribution) -> Self {
        Self {
            xs: dist.grid.iter().map(|p| p.0).collect(),
            cdf: dist.cdf(),
            kind: dist.kind,
        }
    }

    fn draw(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c < u).min(self.xs.len() - 1);
        match self.kind {
            DistributionKind::Discrete => self.xs[i],
            DistributionKind::Continuous => {
                if i == 0 {
                    return self.xs[0];
                }
                let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
                let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
                self.xs[i - 1] + t * (self.xs[i] - self.xs[i - 1])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Block {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Block {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Block) {
        if o.count == 0 {
            return;
        }
        let n = self.count + o.count;
        let d = o.mean - self.mean;
        self.mean += d * o.count as f64 / n as f64;
        self.m2 += o.m2 + d * d * self.count as f64 * o.count as f64 / n as f64;
        self.count = n;
    }
}

fn run_block(seed: u64, index: u64, trials: u64, post_prob: f64, sampler: &Sampler) -> Block {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut block = Block::default();
    for _ in 0..trials {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        if u < post_prob {
            block.push(sampler.draw(v));
        }
    }
    block
}

fn conditional(sys: &PpsSystem, meter: McMeter, gamma: f64) -> Result<(f64, PointerDistribution)> {
    match meter {
        McMeter::Grid(g, readout) => grid_pointer_distribution(sys, g, gamma, readout),
        McMeter::Matrix(m) => tensor_pointer_distribution(sys, m, gamma),
    }
}

/// Draws `n` trials on all available cores.
pub fn mc_sample(
    sys: &PpsSystem,
    meter: McMeter,
    gamma: f64,
    n: u64,
    seed: u64,
) -> Result<McStatistics> {
    let workers = std::thread::available_parallelism()
        .map(|w| w.get())
        .unwrap_or(1);
    mc_sample_partitioned(sys, meter, gamma, n, seed, workers)
}

/// Draws `n` trials with `workers` threads; the result is independent of `workers`.
pub fn mc_sample_partitioned(
    sys: &PpsSystem,
    meter: McMeter,
    gamma: f64,
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<McStatistics> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "at least one trial is required".into(),
        ));
    }
    let (post_prob, dist) = conditional(sys, meter, gamma)?;
    let sampler = Sampler::new(&dist);
    let n_blocks = n.div_ceil(MC_BLOCK);
    let size = |b: u64| {
        if b + 1 == n_blocks {
            n - b * MC_BLOCK
        } else {
            MC_BLOCK
        }
    };
    let workers = workers.clamp(1, n_blocks as usize) as u64;
    let mut blocks = vec![Block::default(); n_blocks as usize];
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let sampler = &sampler;
                s.spawn(move || {
                    (w..n_blocks)
                        .step_by(workers as usize)
                        .map(|b| (b, run_block(seed, b, size(b), post_prob, sampler)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (b, block) in h.join().expect("sampling worker panicked") {
                blocks[b as usize] = block;
            }
        }
    });
    let mut total = Block::default();
    for b in &blocks {
        total.merge(b);
    }
    if total.count == 0 {
        return Err(Error::ZeroAcceptance(n));
    }
    let std = if total.count > 1 {
        (total.m2 / (total.count - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(McStatistics {
        trials: n,
        accepted: total.count,
        acceptance_rate: total.count as f64 / n as f64,
        mean: total.mean,
        std,
        stderr: std / (total.count as f64).sqrt(),
    })
}

/// Draws individual records sequentially from stream 0.
pub fn mc_records(
    sys: &PpsSystem,
    meter: McMeter,
    gamma: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<SampleRecord>> {
    let (post_prob, dist) = conditional(sys, meter, gamma)?;
    let sampler = Sampler::new(&dist);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            if u < post_prob {
                SampleRecord {
                    accepted: true,
                    pointer_value: sampler.draw(v),
                }
            } else {
                SampleRecord {
                    accepted: false,
                    pointer_value: f64::NAN,
                }
            }
        })
        .collect())
}
