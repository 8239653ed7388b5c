//! Plain Monte Carlo over a box with reproducible chunked sampling.
//!
//! Every chunk draws from its own ChaCha stream (`seed`, chunk index), so the
//! result depends only on `(samples, seed, chunk_size)` and not on how many
//! worker threads picked up the chunks. Chunk statistics are merged in chunk
//! order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::QuadResult;
use crate::{Error, Result};

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// `None` draws every sample from one stream on the calling thread.
    pub chunk_size: Option<u64>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED, chunk_size: Some(DEFAULT_CHUNK) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }
}

fn run_stream<F>(f: &F, region: &[Interval], rng: &mut ChaCha8Rng, count: u64, point: &mut [f64]) -> Result<Moments>
where
    F: Fn(&[f64]) -> f64,
{
    let mut moments = Moments::default();
    for _ in 0..count {
        for (x, iv) in point.iter_mut().zip(region) {
            *x = iv.lo + iv.width() * rng.gen::<f64>();
        }
        let v = f(point);
        if !v.is_finite() {
            return Err(Error::Evaluation { at: point[0], value: v });
        }
        moments.push(v);
    }
    Ok(moments)
}

/// Estimates `∫_box f` as box volume times the sample mean; the error
/// estimate is the sample standard error scaled by the volume.
pub fn mc_integrate<F>(f: F, region: &[Interval], config: &McConfig) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if region.is_empty() {
        return Err(Error::InvalidInput("Monte Carlo region must have at least one dimension".into()));
    }
    if region.iter().any(|iv| !iv.lo.is_finite() || !iv.hi.is_finite() || iv.hi <= iv.lo) {
        return Err(Error::InvalidInput("Monte Carlo region needs finite intervals with lo < hi".into()));
    }
    if config.samples < 2 {
        return Err(Error::InvalidInput("Monte Carlo needs at least two samples".into()));
    }
    if config.chunk_size == Some(0) {
        return Err(Error::InvalidInput("chunk_size must be positive".into()));
    }
    let dim = region.len();
    let volume: f64 = region.iter().map(Interval::width).product();

    let moments = match config.chunk_size {
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            run_stream(&f, region, &mut rng, config.samples, &mut vec![0.0; dim])?
        }
        Some(chunk) => {
            let chunks = config.samples.div_ceil(chunk);
            let parts: Vec<Result<Moments>> = (0..chunks)
                .into_par_iter()
                .map(|idx| {
                    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                    rng.set_stream(idx);
                    let count = chunk.min(config.samples - idx * chunk);
                    run_stream(&f, region, &mut rng, count, &mut vec![0.0; dim])
                })
                .collect();
            let mut total = Moments::default();
            for part in parts {
                total = total.merge(part?);
            }
            total
        }
    };

    let variance = moments.m2 / (moments.n - 1) as f64;
    let std_err = (variance / moments.n as f64).sqrt();
    Ok(QuadResult { value: volume * moments.mean, err_estimate: volume * std_err, evaluations: moments.n, converged: true })
}
