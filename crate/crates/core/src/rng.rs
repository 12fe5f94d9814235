//! Seedable random streams and the handful of samplers the simulation needs.
//!
//! A run is driven by exactly one [`RngStream`]. The stream is keyed by a
//! `(seed, stream_id)` pair; ChaCha8 exposes 2^64 independent streams per key,
//! so replicates that share a base seed but differ in stream id never overlap.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Tolerance on the sum of categorical weights.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform draw on `(0, 1]`, safe to take the logarithm of.
    #[inline]
    fn uniform_open_zero(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p >= 1.0 {
            true
        } else if p <= 0.0 {
            false
        } else {
            self.uniform() < p
        }
    }

    /// Uniform index in `0..n`. `n` must be nonzero.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Finite distribution over `0..weights.len()`, sampled by inverse CDF.
#[derive(Clone, Debug)]
pub struct Categorical {
    cumulative: Vec<f64>,
}

impl Categorical {
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::config("categorical weights are empty"));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::config(format!(
                "categorical weight {w} is negative or not finite"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::config(format!(
                "categorical weights sum to {total}, expected 1"
            )));
        }
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(Self { cumulative })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn sample(&self, rng: &mut RngStream) -> usize {
        let last = self.cumulative.len() - 1;
        if last == 0 {
            return 0;
        }
        let u = rng.uniform();
        // partition_point gives the first bucket whose upper edge exceeds u;
        // the clamp absorbs the 1e-9 slack on the total.
        self.cumulative.partition_point(|&c| c <= u).min(last)
    }
}

/// Number of one-time partners drawn for a day: `P(k) = (1 - p) p^k`, `k >= 0`.
#[derive(Clone, Copy, Debug)]
pub struct CountGeometric {
    ln_p: f64,
}

impl CountGeometric {
    pub fn new(p_partner: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p_partner) {
            return Err(Error::config(format!(
                "one-time partnership probability {p_partner} must lie in [0, 1)"
            )));
        }
        Ok(Self {
            ln_p: p_partner.ln(),
        })
    }

    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> u32 {
        sample_count_geometric(self.ln_p, rng)
    }
}

/// Inverse-CDF draw given `ln p`; `ln p = -inf` encodes `p = 0`.
#[inline]
pub(crate) fn sample_count_geometric(ln_p: f64, rng: &mut RngStream) -> u32 {
    if ln_p == f64::NEG_INFINITY {
        return 0;
    }
    // P(K >= k) = P(U <= p^k) = p^k
    let k = (rng.uniform_open_zero().ln() / ln_p).floor();
    if k >= u32::MAX as f64 {
        u32::MAX
    } else {
        k as u32
    }
}

/// Partnership duration in days: `P(d) = q (1 - q)^(d - 1)` with `q = 1 / mean`.
#[derive(Clone, Copy, Debug)]
pub struct DurationGeometric {
    ln_fail: f64,
}

impl DurationGeometric {
    pub fn new(mean_days: f64) -> Result<Self> {
        if !mean_days.is_finite() || mean_days < 1.0 {
            return Err(Error::config(format!(
                "mean partnership duration {mean_days} must be at least 1 day"
            )));
        }
        Ok(Self {
            ln_fail: (1.0 - 1.0 / mean_days).ln(),
        })
    }

    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> u32 {
        1 + sample_count_geometric(self.ln_fail, rng)
    }
}

/// Normal draw rounded to the nearest whole day, floored at one day.
#[derive(Clone, Copy, Debug)]
pub struct StageDuration {
    normal: Normal<f64>,
}

impl StageDuration {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0) || !(sd.is_finite() && sd > 0.0) {
            return Err(Error::config(format!(
                "stage duration needs mean > 0 and sd > 0, got Normal({mean}, {sd})"
            )));
        }
        let normal = Normal::new(mean, sd).map_err(|e| Error::config(e.to_string()))?;
        Ok(Self { normal })
    }

    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> u32 {
        let x = self.normal.sample(rng).round();
        if x < 1.0 {
            1
        } else {
            x as u32
        }
    }
}

pub fn draw_categorical(weights: &[f64], rng: &mut RngStream) -> Result<usize> {
    Ok(Categorical::new(weights)?.sample(rng))
}

pub fn draw_count_geometric(p_partner: f64, rng: &mut RngStream) -> Result<u32> {
    Ok(CountGeometric::new(p_partner)?.sample(rng))
}

pub fn draw_duration_geometric(mean_days: f64, rng: &mut RngStream) -> Result<u32> {
    Ok(DurationGeometric::new(mean_days)?.sample(rng))
}

pub fn draw_stage_days(mean: f64, sd: f64, rng: &mut RngStream) -> Result<u32> {
    Ok(StageDuration::new(mean, sd)?.sample(rng))
}
