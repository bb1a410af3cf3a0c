//! Cohort-level enrollment and reconstruction-error measurement.

use super::{ambiguate, purify_and_reconstruct, sbc_encode, stc_encode, stc_threshold_encode};
use super::{ProbeRule, Projection, ScaError, TernaryCodeword};
use crate::math::{Gaussian, SymmetricDistribution};
use crate::rng::derive_rng;
use nalgebra::DVector;
use rayon::prelude::*;

/// Which distribution the verification probe comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Unrelated probe, drawn fresh from the source distribution.
    H0,
    /// Genuine probe: the enrolled vector plus measurement noise.
    H1,
}

#[derive(Debug, Clone)]
pub struct EnrolledUser {
    pub x: DVector<f64>,
    pub v: TernaryCodeword,
    pub u: TernaryCodeword,
}

/// A set of users enrolled against one shared projection.
pub struct Cohort {
    pub proj: Projection,
    pub users: Vec<EnrolledUser>,
    pub sigma_x: f64,
}

/// Enroll `count` users with iid N(0, sigma_x^2) feature vectors.
///
/// The ambiguation count is `round(ratio * (L - S_t))` per user, with
/// S_t the user's actual enrolled sparsity.
pub fn enroll_cohort(
    proj: Projection,
    count: usize,
    sigma_x: f64,
    enroll_rule: ProbeRule,
    ambiguation_ratio: f64,
    seed: u64,
    tags: &[&str],
) -> Result<Cohort, ScaError> {
    let source = Gaussian::new(sigma_x).expect("positive sigma");
    let n = proj.n();
    let users: Result<Vec<EnrolledUser>, ScaError> = (0..count)
        .into_par_iter()
        .map(|c| {
            let mut rng = derive_rng(seed, &[tags, &["enroll"]].concat(), c as u64);
            let x = DVector::from_fn(n, |_, _| source.sample(&mut rng));
            let v = match enroll_rule {
                ProbeRule::TopK(s_t) => stc_encode(&proj, &x, s_t)?,
                ProbeRule::Threshold(lambda) => stc_threshold_encode(&proj, &x, lambda)?,
            };
            let s_n =
                (ambiguation_ratio * (v.len() - v.sparsity()) as f64).round() as usize;
            let u = ambiguate(&v, s_n, &mut rng)?;
            Ok(EnrolledUser { x, v, u })
        })
        .collect();
    Ok(Cohort { proj, users: users?, sigma_x })
}

/// Average sbc-bit reconstruction error over users and components.
///
/// For each user a probe is drawn (genuine noisy vector under H1, a
/// fresh independent vector under H0), the stored codeword is purified
/// with it, and the sbc bits of x̂ = W† v̂ are compared with the sbc
/// bits of the enrolled x. Returns (mismatches, comparisons).
pub fn reconstruction_error_counts(
    cohort: &Cohort,
    hypothesis: Hypothesis,
    tau: f64,
    probe_rule: ProbeRule,
    sigma_z: f64,
    seed: u64,
    tags: &[&str],
) -> Result<(u64, u64), ScaError> {
    if cohort.users.is_empty() {
        return Err(ScaError::Format("empty cohort".into()));
    }
    let source = Gaussian::new(cohort.sigma_x).expect("positive sigma");
    let hyp_tag = match hypothesis {
        Hypothesis::H0 => "h0",
        Hypothesis::H1 => "h1",
    };
    let n = cohort.proj.n();
    let counts: Result<Vec<(u64, u64)>, ScaError> = cohort
        .users
        .par_iter()
        .enumerate()
        .map(|(c, user)| {
            let mut rng = derive_rng(seed, &[tags, &["probe", hyp_tag]].concat(), c as u64);
            let y = match hypothesis {
                Hypothesis::H1 => DVector::from_fn(n, |i, _| {
                    user.x[i] + sigma_z * crate::math::standard_normal_sample(&mut rng)
                }),
                Hypothesis::H0 => DVector::from_fn(n, |_, _| source.sample(&mut rng)),
            };
            let (_, x_hat) = purify_and_reconstruct(&user.u, &cohort.proj, &y, probe_rule)?;
            let truth = sbc_encode(user.x.as_slice(), tau);
            let guess = sbc_encode(x_hat.as_slice(), tau);
            let mismatch = truth.iter().zip(&guess).filter(|(a, b)| a != b).count() as u64;
            Ok((mismatch, n as u64))
        })
        .collect();
    let (mism, total) = counts?.into_iter().fold((0u64, 0u64), |(a, b), (m, t)| (a + m, b + t));
    Ok((mism, total))
}

/// As [`reconstruction_error_counts`], as a rate.
pub fn reconstruction_error_rate(
    cohort: &Cohort,
    hypothesis: Hypothesis,
    tau: f64,
    probe_rule: ProbeRule,
    sigma_z: f64,
    seed: u64,
    tags: &[&str],
) -> Result<f64, ScaError> {
    let (mism, total) =
        reconstruction_error_counts(cohort, hypothesis, tau, probe_rule, sigma_z, seed, tags)?;
    Ok(mism as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIGMA_X: f64 = std::f64::consts::FRAC_1_SQRT_2; // sigma_X^2 = 0.5
    const TAU: f64 = SIGMA_X;

    #[test]
    fn noiseless_matched_threshold_is_exact() {
        let cohort = enroll_cohort(
            Projection::identity(64),
            50,
            SIGMA_X,
            ProbeRule::Threshold(TAU),
            0.0,
            31,
            &["cohort-test"],
        )
        .unwrap();
        let rate = reconstruction_error_rate(
            &cohort,
            Hypothesis::H1,
            TAU,
            ProbeRule::Threshold(TAU),
            0.0,
            31,
            &["cohort-test"],
        )
        .unwrap();
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn h0_full_ambiguation_hits_independent_guess_limit() {
        // p = Pr[|X| > sigma_X] = 2 Phi(-1); the unrelated-probe limit is 2p(1-p)
        let cohort = enroll_cohort(
            Projection::identity(256),
            600,
            SIGMA_X,
            ProbeRule::TopK(26),
            1.0,
            32,
            &["cohort-h0"],
        )
        .unwrap();
        let rate = reconstruction_error_rate(
            &cohort,
            Hypothesis::H0,
            TAU,
            ProbeRule::Threshold(TAU),
            0.0,
            32,
            &["cohort-h0"],
        )
        .unwrap();
        let p = 2.0 * Gaussian::standard().cdf(-1.0);
        let limit = 2.0 * p * (1.0 - p);
        assert!((rate - limit).abs() < 0.01, "rate={rate} limit={limit}");
    }

    #[test]
    fn h0_error_nondecreasing_in_ambiguation() {
        let mut prev = -1.0f64;
        for (i, ratio) in [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
            let cohort = enroll_cohort(
                Projection::identity(256),
                400,
                SIGMA_X,
                ProbeRule::TopK(26),
                ratio,
                33,
                &["cohort-mono", &i.to_string()[..]],
            )
            .unwrap();
            let (mism, total) = reconstruction_error_counts(
                &cohort,
                Hypothesis::H0,
                TAU,
                ProbeRule::Threshold(TAU),
                0.0,
                33,
                &["cohort-mono"],
            )
            .unwrap();
            let rate = mism as f64 / total as f64;
            let std_err = (rate * (1.0 - rate) / total as f64).sqrt();
            assert!(rate >= prev - 3.0 * std_err, "ratio={ratio}: {prev} -> {rate}");
            prev = rate;
        }
    }

    #[test]
    fn empty_cohort_rejected() {
        let cohort = Cohort {
            proj: Projection::identity(4),
            users: vec![],
            sigma_x: 1.0,
        };
        assert!(reconstruction_error_rate(
            &cohort,
            Hypothesis::H0,
            1.0,
            ProbeRule::Threshold(1.0),
            0.0,
            0,
            &[]
        )
        .is_err());
    }
}
