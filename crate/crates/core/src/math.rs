//! Shared probability and information-theory primitives: symmetric source
//! distributions, the binary entropy function, and plug-in estimators for
//! entropy and mutual information over small discrete alphabets.

use rand::RngCore;
use statrs::function::erf;
use thiserror::Error;

pub const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Error, PartialEq)]
pub enum MathError {
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("sample set is empty")]
    EmptySample,
    #[error("symbol ({a}, {b}) outside alphabet {a_size}x{b_size}")]
    SymbolOutOfRange { a: u32, b: u32, a_size: u32, b_size: u32 },
    #[error("alphabet sizes must be nonzero")]
    EmptyAlphabet,
}

/// Binary entropy h(p) in bits, with the continuity convention
/// 0*log(1/0) = 0 at the endpoints.
pub fn binary_entropy(p: f64) -> Result<f64, MathError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MathError::ProbabilityOutOfRange(p));
    }
    Ok(binary_entropy_unchecked(p))
}

/// As [`binary_entropy`], for callers that already hold a valid probability.
pub fn binary_entropy_unchecked(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Entropy in bits of a discrete distribution given as probabilities.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// A zero-symmetric continuous source distribution.
///
/// Implementations must satisfy pdf(-x) = pdf(x) and cdf(0) = 1/2.
pub trait SymmetricDistribution: Send + Sync {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    /// Inverse cdf. Defined for p in (0, 1); the endpoints map to +-inf.
    fn quantile(&self, p: f64) -> f64;
    fn variance(&self) -> f64;

    /// Inverse-transform sample. Uses 53 uniform bits mapped into the
    /// open interval (0, 1) so the quantile stays finite.
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        self.quantile(u)
    }
}

/// Zero-mean Gaussian N(0, sigma^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    sigma: f64,
}

impl Gaussian {
    pub fn new(sigma: f64) -> Result<Self, MathError> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(MathError::NonPositiveSigma(sigma));
        }
        Ok(Self { sigma })
    }

    pub fn standard() -> Self {
        Self { sigma: 1.0 }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl SymmetricDistribution for Gaussian {
    fn pdf(&self, x: f64) -> f64 {
        let z = x / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * std::f64::consts::PI).sqrt())
    }

    fn cdf(&self, x: f64) -> f64 {
        // erfc keeps full relative accuracy in the left tail
        0.5 * erf::erfc(-x / (self.sigma * std::f64::consts::SQRT_2))
    }

    fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        let mut x = -self.sigma * std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p);
        // Newton polish on the cdf; two steps reach ~1e-15 residual
        for _ in 0..2 {
            let f = self.pdf(x);
            if f > 1e-300 {
                x -= (self.cdf(x) - p) / f;
            }
        }
        x
    }

    fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// Standard-normal draw via inverse transform, sharing the uniform-bit
/// convention of [`SymmetricDistribution::sample`].
pub fn standard_normal_sample(rng: &mut dyn RngCore) -> f64 {
    Gaussian::standard().sample(rng)
}

/// Joint frequency counts over a pair of small discrete alphabets.
///
/// The merge operation is plain addition of counts, so sharded
/// Monte-Carlo loops can combine histograms in any order.
#[derive(Debug, Clone)]
pub struct JointHistogram {
    a_size: usize,
    b_size: usize,
    counts: Vec<u64>,
    total: u64,
}

impl JointHistogram {
    pub fn new(a_size: usize, b_size: usize) -> Self {
        Self { a_size, b_size, counts: vec![0; a_size * b_size], total: 0 }
    }

    pub fn record(&mut self, a: usize, b: usize) {
        debug_assert!(a < self.a_size && b < self.b_size);
        self.counts[a * self.b_size + b] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &JointHistogram) {
        assert_eq!(self.a_size, other.a_size);
        assert_eq!(self.b_size, other.b_size);
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        self.total += other.total;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    fn marginal_a(&self) -> Vec<u64> {
        let mut m = vec![0u64; self.a_size];
        for a in 0..self.a_size {
            for b in 0..self.b_size {
                m[a] += self.counts[a * self.b_size + b];
            }
        }
        m
    }

    fn marginal_b(&self) -> Vec<u64> {
        let mut m = vec![0u64; self.b_size];
        for a in 0..self.a_size {
            for b in 0..self.b_size {
                m[b] += self.counts[a * self.b_size + b];
            }
        }
        m
    }

    fn counts_entropy(counts: impl Iterator<Item = u64>, total: u64) -> f64 {
        let n = total as f64;
        counts
            .filter(|&c| c > 0)
            .map(|c| {
                let p = c as f64 / n;
                -p * p.log2()
            })
            .sum()
    }

    /// Plug-in H(A) in bits.
    pub fn entropy_a(&self) -> f64 {
        Self::counts_entropy(self.marginal_a().into_iter(), self.total)
    }

    /// Plug-in H(A|B) in bits, as the count-weighted average of the
    /// per-column entropies.
    pub fn cond_entropy_a_given_b(&self) -> f64 {
        let n = self.total as f64;
        let mut h = 0.0;
        for b in 0..self.b_size {
            let col: Vec<u64> = (0..self.a_size).map(|a| self.counts[a * self.b_size + b]).collect();
            let nb: u64 = col.iter().sum();
            if nb > 0 {
                h += (nb as f64 / n) * Self::counts_entropy(col.into_iter(), nb);
            }
        }
        h
    }

    /// Plug-in mutual information, computed as H(A) - H(A|B) from the
    /// same counts so the identity holds bit-for-bit.
    pub fn mutual_information(&self) -> f64 {
        self.entropy_a() - self.cond_entropy_a_given_b()
    }

    /// Delta-method standard error of the plug-in MI estimate.
    pub fn mi_std_err(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let n = self.total as f64;
        let ma = self.marginal_a();
        let mb = self.marginal_b();
        let mut mean = 0.0;
        let mut mean_sq = 0.0;
        for a in 0..self.a_size {
            for b in 0..self.b_size {
                let c = self.counts[a * self.b_size + b];
                if c == 0 {
                    continue;
                }
                let p = c as f64 / n;
                let l = (p / (ma[a] as f64 / n * mb[b] as f64 / n)).log2();
                mean += p * l;
                mean_sq += p * l * l;
            }
        }
        ((mean_sq - mean * mean).max(0.0) / n).sqrt()
    }
}

/// A list of observed symbol pairs over declared finite alphabets.
#[derive(Debug, Clone)]
pub struct DiscreteJointSample {
    pairs: Vec<(u32, u32)>,
    a_size: u32,
    b_size: u32,
}

impl DiscreteJointSample {
    pub fn new(pairs: Vec<(u32, u32)>, a_size: u32, b_size: u32) -> Result<Self, MathError> {
        if a_size == 0 || b_size == 0 {
            return Err(MathError::EmptyAlphabet);
        }
        for &(a, b) in &pairs {
            if a >= a_size || b >= b_size {
                return Err(MathError::SymbolOutOfRange { a, b, a_size, b_size });
            }
        }
        Ok(Self { pairs, a_size, b_size })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn histogram(&self) -> JointHistogram {
        let mut h = JointHistogram::new(self.a_size as usize, self.b_size as usize);
        for &(a, b) in &self.pairs {
            h.record(a as usize, b as usize);
        }
        h
    }
}

/// Plug-in mutual information I(A;B) in bits from observed pairs.
pub fn empirical_mi(samples: &DiscreteJointSample) -> Result<f64, MathError> {
    if samples.is_empty() {
        return Err(MathError::EmptySample);
    }
    Ok(samples.histogram().mutual_information())
}

/// Plug-in conditional entropy H(A|B) in bits from observed pairs.
pub fn empirical_conditional_entropy(samples: &DiscreteJointSample) -> Result<f64, MathError> {
    if samples.is_empty() {
        return Err(MathError::EmptySample);
    }
    Ok(samples.histogram().cond_entropy_a_given_b())
}
