//! Zero-leakage quantizing helper data system.
//!
//! The source axis is cut into J quantization intervals carrying the
//! secret s; each interval is equiprobably subdivided into m helper
//! sub-intervals. The helper index is uniform and independent of s by
//! construction, which is the zero-leakage property.

use crate::math::{MathError, SymmetricDistribution};
use rand::RngCore;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HdsError {
    #[error("interval probabilities must be positive and sum to 1 (sum = {0})")]
    InvalidProbabilities(f64),
    #[error("need at least 2 intervals, got {0}")]
    TooFewIntervals(usize),
    #[error("sub-interval count m must be >= 1")]
    InvalidSubdivision,
    #[error("helper value {u} out of range (m = {m})")]
    HelperOutOfRange { u: usize, m: usize },
    #[error("noise sigma must be >= 0, got {0}")]
    NegativeNoise(f64),
    #[error(transparent)]
    Math(#[from] MathError),
}

/// Discrete helper data: secret interval s and sub-interval index u.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HelperPair {
    pub s: usize,
    pub u: usize,
}

/// Continuum-limit helper data: s plus the within-interval quantile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileHelperPair {
    pub s: usize,
    pub u_tilde: f64,
}

/// Quantizer geometry: interval probabilities, the boundaries realizing
/// them under the source distribution, and the subdivision count.
pub struct QuantizerSpec {
    source: Arc<dyn SymmetricDistribution>,
    probs: Vec<f64>,
    /// F(q_s), i.e. the cdf mass strictly left of interval s; cum[0] = 0.
    cum: Vec<f64>,
    /// Left boundaries q_s; boundaries[0] is the -inf sentinel.
    boundaries: Vec<f64>,
    m: usize,
}

impl QuantizerSpec {
    pub fn intervals(&self) -> usize {
        self.probs.len()
    }

    pub fn subdivisions(&self) -> usize {
        self.m
    }

    pub fn interval_probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn source(&self) -> &dyn SymmetricDistribution {
        self.source.as_ref()
    }

    /// Draw an enrollment sample from the source.
    pub fn sample_source(&self, rng: &mut dyn RngCore) -> f64 {
        self.source.sample(rng)
    }
}

/// Build a quantizer from interval probabilities; boundaries come from
/// the source quantile function.
pub fn make_quantizer(
    source: Arc<dyn SymmetricDistribution>,
    interval_probs: &[f64],
    m: usize,
) -> Result<QuantizerSpec, HdsError> {
    let j = interval_probs.len();
    if j < 2 {
        return Err(HdsError::TooFewIntervals(j));
    }
    if m < 1 {
        return Err(HdsError::InvalidSubdivision);
    }
    let sum: f64 = interval_probs.iter().sum();
    if interval_probs.iter().any(|&p| !(p > 0.0)) || (sum - 1.0).abs() > 1e-12 {
        return Err(HdsError::InvalidProbabilities(sum));
    }
    let mut cum = Vec::with_capacity(j);
    let mut boundaries = Vec::with_capacity(j);
    let mut acc = 0.0;
    for (s, &p) in interval_probs.iter().enumerate() {
        cum.push(acc);
        boundaries.push(if s == 0 { f64::NEG_INFINITY } else { source.quantile(acc) });
        acc += p;
    }
    Ok(QuantizerSpec { source, probs: interval_probs.to_vec(), cum, boundaries, m })
}

/// Equiprobable quantizer with J intervals.
pub fn make_equiprobable_quantizer(
    source: Arc<dyn SymmetricDistribution>,
    j: usize,
    m: usize,
) -> Result<QuantizerSpec, HdsError> {
    if j < 2 {
        return Err(HdsError::TooFewIntervals(j));
    }
    make_quantizer(source, &vec![1.0 / j as f64; j], m)
}

/// Gen: s = max{t | q_t <= x}, u = floor(m (F(x) - F(q_s)) / p_s).
pub fn gen(x: f64, spec: &QuantizerSpec) -> HelperPair {
    let s = secret_index(x, spec);
    let frac = (spec.source.cdf(x) - spec.cum[s]) / spec.probs[s];
    // F(x) - F(q_s) = p_s is measure-zero; clamp keeps u in range
    let u = ((spec.m as f64 * frac).floor() as i64).clamp(0, spec.m as i64 - 1) as usize;
    HelperPair { s, u }
}

/// Continuum-limit Gen: the helper is the quantile within the interval.
pub fn gen_continuum(x: f64, spec: &QuantizerSpec) -> QuantileHelperPair {
    let s = secret_index(x, spec);
    let u_tilde =
        ((spec.source.cdf(x) - spec.cum[s]) / spec.probs[s]).clamp(0.0, 1.0 - f64::EPSILON);
    QuantileHelperPair { s, u_tilde }
}

fn secret_index(x: f64, spec: &QuantizerSpec) -> usize {
    // boundaries are sorted with a leading -inf, so the partition point
    // over q_t <= x is always >= 1
    spec.boundaries.partition_point(|&q| q <= x) - 1
}

/// The reproduction representative x̂(s, u): the quantile of the center
/// of sub-interval (s, u).
pub fn representative(s: usize, u: usize, spec: &QuantizerSpec) -> f64 {
    spec.source
        .quantile(spec.cum[s] + (u as f64 + 0.5) * spec.probs[s] / spec.m as f64)
}

/// Rec: nearest sub-interval-center decoder. Ties break toward smaller s.
pub fn reconstruct_secret(y: f64, u: usize, spec: &QuantizerSpec) -> Result<usize, HdsError> {
    if u >= spec.m {
        return Err(HdsError::HelperOutOfRange { u, m: spec.m });
    }
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for s in 0..spec.intervals() {
        let d = (y - representative(s, u, spec)).abs();
        if d < best_dist {
            best = s;
            best_dist = d;
        }
    }
    Ok(best)
}

/// Draw an enrollment/verification pair (x, y) with y = x + N(0, sigma^2).
pub fn sample_noisy_pair(
    spec: &QuantizerSpec,
    sigma_noise: f64,
    rng: &mut dyn RngCore,
) -> Result<(f64, f64), HdsError> {
    if sigma_noise < 0.0 {
        return Err(HdsError::NegativeNoise(sigma_noise));
    }
    let x = spec.source.sample(rng);
    let z = crate::math::standard_normal_sample(rng);
    Ok((x, x + sigma_noise * z))
}
