//! Closed-form leakage evaluators for the quantizing helper data system
//! and the empirical pipelines that cross-validate them, plus the
//! per-component leakage curve for the sparse-ternary scheme.
//!
//! Conventions: V is the sign bit of a component, Z the threshold
//! ("extremeness") bit Θ(|x|-τ), U the discrete helper index, Ũ the
//! continuum helper quantile. All entropies are in bits.

use crate::math::{binary_entropy_unchecked, JointHistogram, MathError};
use crate::rng::derive_rng;
use crate::sparse_sca::{
    ambiguate, pca_projection, stc_threshold_encode, Projection, ProjectionKind, ScaError,
    TernaryCodeword,
};
use crate::zl_hds::{gen, gen_continuum, HdsError, QuantizerSpec};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LeakageError {
    #[error("parameters outside closed-form regime: {0}")]
    OutOfRegime(String),
    #[error("invalid parameter: {0}")]
    Domain(String),
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: u64, min: u64 },
    #[error(transparent)]
    Math(#[from] MathError),
    #[error(transparent)]
    Hds(#[from] HdsError),
    #[error(transparent)]
    Sca(#[from] ScaError),
}

/// H(V|U) for the sign bit of a symmetric source quantized into J
/// intervals with m equiprobable sub-intervals each. `p_t` is the
/// probability of the middle interval; it is only read when J is odd.
pub fn thm1_sign_entropy_given_helper(j: usize, m: usize, p_t: f64) -> Result<f64, LeakageError> {
    if j < 2 {
        return Err(LeakageError::Domain(format!("need J >= 2, got {j}")));
    }
    if m < 1 {
        return Err(LeakageError::Domain(format!("need m >= 1, got {m}")));
    }
    if j % 2 == 0 {
        return Ok(1.0);
    }
    if !(p_t > 0.0 && p_t < 1.0) {
        return Err(LeakageError::Domain(format!(
            "middle-interval probability {p_t} outside (0, 1)"
        )));
    }
    let h = binary_entropy_unchecked((1.0 - p_t) / 2.0);
    if m % 2 == 0 {
        Ok(h)
    } else {
        let mf = m as f64;
        Ok((mf - 1.0) / mf * h + 1.0 / mf)
    }
}

/// H(Z|U) for the extremeness bit when the threshold lies inside the
/// outermost helper sub-interval, i.e. F(-τ) < p0/m with p0 the
/// probability of the outermost quantization interval.
pub fn thm2_extremeness_entropy_given_helper(
    m: usize,
    f_neg_tau: f64,
    p0: f64,
) -> Result<f64, LeakageError> {
    if m < 1 {
        return Err(LeakageError::Domain(format!("need m >= 1, got {m}")));
    }
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(LeakageError::Domain(format!("p0 = {p0} outside (0, 1]")));
    }
    if !(f_neg_tau > 0.0) {
        return Err(LeakageError::Domain(format!("F(-tau) = {f_neg_tau} not positive")));
    }
    if f_neg_tau >= p0 / m as f64 {
        return Err(LeakageError::OutOfRegime(format!(
            "F(-tau) = {f_neg_tau} not below p0/m = {}",
            p0 / m as f64
        )));
    }
    let mf = m as f64;
    Ok(2.0 / mf * binary_entropy_unchecked(mf * f_neg_tau))
}

/// H(Z|Ũ) in the continuum-helper limit, valid for F(-τ) ≤ p0 ≤ 1/2.
pub fn thm3_extremeness_entropy_continuum(p0: f64, f_neg_tau: f64) -> Result<f64, LeakageError> {
    if !(p0 > 0.0 && p0 <= 0.5) {
        return Err(LeakageError::Domain(format!("p0 = {p0} outside (0, 1/2]")));
    }
    if !(f_neg_tau > 0.0) {
        return Err(LeakageError::Domain(format!("F(-tau) = {f_neg_tau} not positive")));
    }
    if f_neg_tau > p0 {
        return Err(LeakageError::OutOfRegime(format!(
            "F(-tau) = {f_neg_tau} exceeds p0 = {p0}"
        )));
    }
    let f = f_neg_tau;
    let h_p0 = binary_entropy_unchecked(p0);
    if f <= p0 / 2.0 {
        Ok(2.0 * f / p0 * h_p0)
    } else {
        let h_2p0 = binary_entropy_unchecked(2.0 * p0);
        Ok((2.0 * p0 - 2.0 * f) / p0 * h_p0 + (2.0 * f - p0) / p0 * h_2p0)
    }
}

/// Unconditional entropy H(Z) = h(2 F(-τ)) of the extremeness bit for a
/// symmetric source.
pub fn extremeness_entropy(f_neg_tau: f64) -> Result<f64, LeakageError> {
    if !(0.0..=0.5).contains(&f_neg_tau) {
        return Err(LeakageError::Domain(format!("F(-tau) = {f_neg_tau} outside [0, 1/2]")));
    }
    Ok(binary_entropy_unchecked(2.0 * f_neg_tau))
}

/// (H - H_cond)/H, with the convention 0 when H = 0.
pub fn normalized_leakage(entropy: f64, cond_entropy: f64) -> f64 {
    if entropy > 0.0 {
        (entropy - cond_entropy) / entropy
    } else {
        0.0
    }
}

/// Which one-bit property of the source component is treated as
/// privacy sensitive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SensitiveBit {
    /// V = sign(x).
    Sign,
    /// Z = Θ(|x| - tau).
    Extremeness { tau: f64 },
}

/// What the adversary observes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HelperObservable {
    /// The discrete sub-interval index u.
    Discrete,
    /// The continuum quantile ũ, uniformly binned for estimation.
    Continuum { bins: usize },
}

/// One leakage measurement: plug-in estimates plus the matching closed
/// form when the parameters sit inside a theorem regime.
#[derive(Debug, Clone)]
pub struct LeakageReport {
    pub scenario: String,
    /// Closed-form mutual information, when in regime.
    pub analytic_bits: Option<f64>,
    /// Closed-form conditional entropy of the sensitive bit, when in regime.
    pub analytic_cond_entropy: Option<f64>,
    /// Plug-in mutual information estimate.
    pub empirical_bits: f64,
    /// Plug-in entropy of the sensitive bit.
    pub sensitive_entropy: f64,
    /// Plug-in conditional entropy given the observable.
    pub cond_entropy: f64,
    /// empirical_bits / sensitive_entropy (0 when the entropy is 0).
    pub normalized: f64,
    /// Delta-method standard error of the MI estimate.
    pub std_err: f64,
    pub sample_count: u64,
}

const MIN_MC_SAMPLES: u64 = 10_000;
const MC_SHARD: u64 = 1 << 14;

fn quantizer_is_symmetric(spec: &QuantizerSpec) -> bool {
    let p = spec.interval_probs();
    let j = p.len();
    (0..j / 2).all(|i| (p[i] - p[j - 1 - i]).abs() < 1e-9)
}

/// Closed-form H(bit | observable) for a symmetric quantizer, when the
/// parameters lie inside the corresponding regime; None otherwise.
pub fn analytic_cond_entropy(
    spec: &QuantizerSpec,
    bit: SensitiveBit,
    observable: HelperObservable,
) -> Option<f64> {
    if !quantizer_is_symmetric(spec) {
        return None;
    }
    let j = spec.intervals();
    let m = spec.subdivisions();
    let p0 = spec.interval_probs()[0];
    match (bit, observable) {
        (SensitiveBit::Sign, HelperObservable::Discrete) => {
            let p_t = if j % 2 == 1 { spec.interval_probs()[j / 2] } else { 0.5 };
            thm1_sign_entropy_given_helper(j, m, p_t).ok()
        }
        (SensitiveBit::Sign, HelperObservable::Continuum { .. }) => {
            if j % 2 == 0 {
                Some(1.0)
            } else {
                let p_t = spec.interval_probs()[j / 2];
                Some(binary_entropy_unchecked((1.0 - p_t) / 2.0))
            }
        }
        (SensitiveBit::Extremeness { tau }, HelperObservable::Discrete) => {
            let f = spec.source().cdf(-tau);
            thm2_extremeness_entropy_given_helper(m, f, p0).ok()
        }
        (SensitiveBit::Extremeness { tau }, HelperObservable::Continuum { .. }) => {
            let f = spec.source().cdf(-tau);
            thm3_extremeness_entropy_continuum(p0, f).ok()
        }
    }
}

fn sensitive_index(x: f64, bit: SensitiveBit) -> usize {
    match bit {
        SensitiveBit::Sign => usize::from(x >= 0.0),
        SensitiveBit::Extremeness { tau } => usize::from(x.abs() > tau),
    }
}

/// Monte-Carlo leakage of a sensitive bit from the helper data.
///
/// Sampling is sharded over deterministic per-shard streams and the
/// count histograms merge by addition, so the result is independent of
/// scheduling order. The analytic fields are filled when the quantizer
/// parameters fall inside a closed-form regime and left `None`
/// otherwise; a regime mismatch is not an error.
pub fn monte_carlo_hds_leakage(
    spec: &QuantizerSpec,
    bit: SensitiveBit,
    observable: HelperObservable,
    samples: u64,
    seed: u64,
    tags: &[&str],
) -> Result<LeakageReport, LeakageError> {
    if samples < MIN_MC_SAMPLES {
        return Err(LeakageError::TooFewSamples { got: samples, min: MIN_MC_SAMPLES });
    }
    let b_size = match observable {
        HelperObservable::Discrete => spec.subdivisions(),
        HelperObservable::Continuum { bins } => {
            if bins < 2 {
                return Err(LeakageError::Domain(format!("need >= 2 bins, got {bins}")));
            }
            bins
        }
    };
    let shards = samples.div_ceil(MC_SHARD);
    let hist = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = derive_rng(seed, &[tags, &["hds-mc"]].concat(), shard);
            let count = MC_SHARD.min(samples - shard * MC_SHARD);
            let mut h = JointHistogram::new(2, b_size);
            for _ in 0..count {
                let x = spec.sample_source(&mut rng);
                let a = sensitive_index(x, bit);
                let b = match observable {
                    HelperObservable::Discrete => gen(x, spec).u,
                    HelperObservable::Continuum { bins } => {
                        ((gen_continuum(x, spec).u_tilde * bins as f64) as usize).min(bins - 1)
                    }
                };
                h.record(a, b);
            }
            h
        })
        .reduce(
            || JointHistogram::new(2, b_size),
            |mut acc, h| {
                acc.merge(&h);
                acc
            },
        );

    let analytic_cond = analytic_cond_entropy(spec, bit, observable);
    let analytic_entropy = match bit {
        SensitiveBit::Sign => quantizer_is_symmetric(spec).then_some(1.0),
        SensitiveBit::Extremeness { tau } => {
            let f = spec.source().cdf(-tau);
            extremeness_entropy(f).ok()
        }
    };
    let analytic_bits = match (analytic_entropy, analytic_cond) {
        (Some(h), Some(hc)) => Some(h - hc),
        _ => None,
    };
    let sensitive_entropy = hist.entropy_a();
    let cond_entropy = hist.cond_entropy_a_given_b();
    let empirical_bits = hist.mutual_information();
    Ok(LeakageReport {
        scenario: format!(
            "hds J={} m={} bit={:?} obs={:?}",
            spec.intervals(),
            spec.subdivisions(),
            bit,
            observable
        ),
        analytic_bits,
        analytic_cond_entropy: analytic_cond,
        empirical_bits,
        sensitive_entropy,
        cond_entropy,
        normalized: normalized_leakage(sensitive_entropy, cond_entropy),
        std_err: hist.mi_std_err(),
        sample_count: hist.total(),
    })
}

/// Which stored codeword the sparse-coding adversary sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaEncoder {
    /// The ambiguated ternary codeword.
    Ternary,
    /// Only its magnitude pattern (the sparse binary codeword with
    /// ambiguated ones).
    Binary,
}

/// Parameters for [`sca_leakage_curve`]. Uses a square L = N projection
/// (identity or the data PCA transform) and a fixed-threshold encoder.
#[derive(Debug, Clone)]
pub struct ScaCurveParams {
    pub kind: ProjectionKind,
    pub encoder: ScaEncoder,
    pub users: usize,
    pub dim: usize,
    pub sigma_x: f64,
    /// Encoder threshold on the projected coefficients.
    pub lambda: f64,
    /// Extremeness threshold on the raw component.
    pub tau: f64,
    pub ratios: Vec<f64>,
}

/// Per-component leakage of the extremeness bit Z from the stored
/// (ambiguated) codeword, as a function of the ambiguation ratio.
///
/// For the identity projection the observable is the stored symbol at
/// the same position; for a general projection it is the extremeness
/// bit of the pseudo-inverse reconstruction. Pairs are pooled over
/// users and components for the plug-in estimate. Returns one report
/// per entry of `ratios`, in order.
pub fn sca_leakage_curve(
    params: &ScaCurveParams,
    seed: u64,
    tags: &[&str],
) -> Result<Vec<LeakageReport>, LeakageError> {
    if params.users == 0 || params.dim == 0 {
        return Err(LeakageError::Domain("users and dim must be positive".into()));
    }
    if params.ratios.iter().any(|r| !(0.0..=1.0).contains(r)) {
        return Err(LeakageError::Domain("ambiguation ratios must lie in [0, 1]".into()));
    }
    let n = params.dim;
    let source = crate::math::Gaussian::new(params.sigma_x).map_err(LeakageError::Math)?;
    let xs: Vec<DVector<f64>> = (0..params.users)
        .into_par_iter()
        .map(|c| {
            let mut rng = derive_rng(seed, &[tags, &["sca-x"]].concat(), c as u64);
            DVector::from_fn(n, |_, _| {
                use crate::math::SymmetricDistribution;
                source.sample(&mut rng)
            })
        })
        .collect();
    let proj = match params.kind {
        ProjectionKind::Identity => Projection::identity(n),
        ProjectionKind::Pca => {
            let data = DMatrix::from_fn(n, params.users, |r, c| xs[c][r]);
            pca_projection(&data)?
        }
        ProjectionKind::RandomGaussian => {
            let mut rng = derive_rng(seed, &[tags, &["sca-w"]].concat(), 0);
            Projection::random_gaussian(n, n, &mut rng)?
        }
    };
    let identity = params.kind == ProjectionKind::Identity;
    let b_size = if identity && params.encoder == ScaEncoder::Ternary { 3 } else { 2 };

    let mut reports = Vec::with_capacity(params.ratios.len());
    for (ri, &ratio) in params.ratios.iter().enumerate() {
        let ri_tag = ri.to_string();
        let hist = xs
            .par_iter()
            .enumerate()
            .map(|(c, x)| {
                let mut rng =
                    derive_rng(seed, &[tags, &["sca-amb", &ri_tag]].concat(), c as u64);
                let v = stc_threshold_encode(&proj, x, params.lambda).expect("dims match");
                let s_n = (ratio * (v.len() - v.sparsity()) as f64).round() as usize;
                let u = ambiguate(&v, s_n, &mut rng).expect("s_n within zero count");
                let mut h = JointHistogram::new(2, b_size);
                record_user(&mut h, x, &u, &proj, params, identity);
                h
            })
            .reduce(
                || JointHistogram::new(2, b_size),
                |mut acc, h| {
                    acc.merge(&h);
                    acc
                },
            );
        let sensitive_entropy = hist.entropy_a();
        let cond_entropy = hist.cond_entropy_a_given_b();
        let empirical_bits = hist.mutual_information();
        reports.push(LeakageReport {
            scenario: format!(
                "sca kind={:?} encoder={:?} ratio={ratio}",
                params.kind, params.encoder
            ),
            analytic_bits: None,
            analytic_cond_entropy: None,
            empirical_bits,
            sensitive_entropy,
            cond_entropy,
            normalized: normalized_leakage(sensitive_entropy, cond_entropy),
            std_err: hist.mi_std_err(),
            sample_count: hist.total(),
        });
    }
    Ok(reports)
}

fn record_user(
    hist: &mut JointHistogram,
    x: &DVector<f64>,
    u: &TernaryCodeword,
    proj: &Projection,
    params: &ScaCurveParams,
    identity: bool,
) {
    let n = x.len();
    let recon: Option<DVector<f64>> = if identity {
        None
    } else {
        let stored = match params.encoder {
            ScaEncoder::Ternary => u.as_vector(),
            ScaEncoder::Binary => {
                DVector::from_iterator(u.len(), u.values().iter().map(|&t| f64::from(t.abs())))
            }
        };
        Some(proj.pinv() * stored)
    };
    for i in 0..n {
        let z = usize::from(x[i].abs() > params.tau);
        let obs = if identity {
            match params.encoder {
                ScaEncoder::Ternary => (u.values()[i] + 1) as usize,
                ScaEncoder::Binary => usize::from(u.values()[i] != 0),
            }
        } else {
            usize::from(recon.as_ref().unwrap()[i].abs() > params.tau)
        };
        hist.record(z, obs);
    }
}
