//! Ternary/binary/sign encoders, ambiguation, verification scoring and
//! purification-based reconstruction.

use super::{Projection, ScaError};
use nalgebra::DVector;
use rand::seq::index::sample as index_sample;
use rand::Rng;
use rand::RngCore;

/// A codeword over {-1, 0, +1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryCodeword {
    values: Vec<i8>,
}

impl TernaryCodeword {
    pub fn new(values: Vec<i8>) -> Result<Self, ScaError> {
        if let Some(pos) = values.iter().position(|v| !(-1..=1).contains(v)) {
            return Err(ScaError::NotTernary(pos));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of nonzero entries.
    pub fn sparsity(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, _)| i)
    }

    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.values.len(), self.values.iter().map(|&v| v as f64))
    }

    /// Component-wise magnitude; turns a ternary word into a 0/1 word.
    pub fn magnitude(&self) -> TernaryCodeword {
        TernaryCodeword { values: self.values.iter().map(|v| v.abs()).collect() }
    }
}

/// How a verification probe is turned into a ternary code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeRule {
    /// Keep the S_t largest magnitudes (lambda tuned per vector).
    TopK(usize),
    /// Fixed threshold lambda.
    Threshold(f64),
}

fn encode_probe(
    proj: &Projection,
    y: &DVector<f64>,
    rule: ProbeRule,
) -> Result<TernaryCodeword, ScaError> {
    match rule {
        ProbeRule::TopK(s_t) => stc_encode(proj, y, s_t),
        ProbeRule::Threshold(lambda) => stc_threshold_encode(proj, y, lambda),
    }
}

/// STC encoder with per-vector threshold tuning: keep exactly the S_t
/// entries of largest |Wx| (ties to the lowest index), output their signs.
pub fn stc_encode(
    proj: &Projection,
    x: &DVector<f64>,
    s_t: usize,
) -> Result<TernaryCodeword, ScaError> {
    let q = proj.project(x)?;
    let l = q.len();
    if s_t == 0 || s_t > l {
        return Err(ScaError::SparsityOutOfRange { s_t, l });
    }
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&a, &b| q[b].abs().partial_cmp(&q[a].abs()).unwrap().then(a.cmp(&b)));
    let mut values = vec![0i8; l];
    for &idx in &order[..s_t] {
        values[idx] = if q[idx] >= 0.0 { 1 } else { -1 };
    }
    Ok(TernaryCodeword { values })
}

/// STC encoder with a fixed threshold: sign(q) where |q| > lambda,
/// 0 elsewhere (entries exactly at lambda map to 0).
pub fn stc_threshold_encode(
    proj: &Projection,
    x: &DVector<f64>,
    lambda: f64,
) -> Result<TernaryCodeword, ScaError> {
    let q = proj.project(x)?;
    let values = q
        .iter()
        .map(|&v| {
            if v.abs() > lambda {
                if v >= 0.0 {
                    1
                } else {
                    -1
                }
            } else {
                0
            }
        })
        .collect();
    Ok(TernaryCodeword { values })
}

/// Sparse binary coding: bit n = 1 iff |x_n| > tau.
pub fn sbc_encode(x: &[f64], tau: f64) -> Vec<bool> {
    x.iter().map(|&v| v.abs() > tau).collect()
}

/// Binary coding: component-wise sign; exact zeros map to +1.
pub fn bc_encode(x: &[f64]) -> Vec<i8> {
    x.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect()
}

/// Turn S_n randomly chosen zero entries of v into independent uniform
/// +-1 values. The support of v is untouched.
pub fn ambiguate(
    v: &TernaryCodeword,
    s_n: usize,
    rng: &mut dyn RngCore,
) -> Result<TernaryCodeword, ScaError> {
    let zeros: Vec<usize> =
        v.values.iter().enumerate().filter(|(_, &v)| v == 0).map(|(i, _)| i).collect();
    if s_n > zeros.len() {
        return Err(ScaError::AmbiguationTooLarge { s_n, zeros: zeros.len() });
    }
    let mut values = v.values.clone();
    for idx in index_sample(rng, zeros.len(), s_n) {
        values[zeros[idx]] = if rng.random::<bool>() { 1 } else { -1 };
    }
    Ok(TernaryCodeword { values })
}

/// Verification score: inner product of the stored (ambiguated) codeword
/// with the probe's ternary code.
pub fn verify_score(
    u: &TernaryCodeword,
    proj: &Projection,
    y: &DVector<f64>,
    rule: ProbeRule,
) -> Result<i32, ScaError> {
    if u.len() != proj.l() {
        return Err(ScaError::DimensionMismatch { expected: proj.l(), got: u.len() });
    }
    let probe = encode_probe(proj, y, rule)?;
    Ok(u.values.iter().zip(&probe.values).map(|(&a, &b)| a as i32 * b as i32).sum())
}

/// Purification: keep the stored entry u_l wherever the probe's ternary
/// code is nonzero, zero elsewhere, then reconstruct x̂ = W† v̂.
///
/// A genuine probe's support coincides with the enrolled support, so the
/// mask strips the ambiguation noise; an unrelated probe keeps a random
/// subset of u instead.
pub fn purify_and_reconstruct(
    u: &TernaryCodeword,
    proj: &Projection,
    y: &DVector<f64>,
    rule: ProbeRule,
) -> Result<(TernaryCodeword, DVector<f64>), ScaError> {
    if u.len() != proj.l() {
        return Err(ScaError::DimensionMismatch { expected: proj.l(), got: u.len() });
    }
    let probe = encode_probe(proj, y, rule)?;
    let values: Vec<i8> = u
        .values
        .iter()
        .zip(&probe.values)
        .map(|(&stored, &p)| if p != 0 { stored } else { 0 })
        .collect();
    let v_hat = TernaryCodeword { values };
    let x_hat = proj.pinv() * v_hat.as_vector();
    Ok((v_hat, x_hat))
}
