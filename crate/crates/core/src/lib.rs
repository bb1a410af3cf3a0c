//! Building blocks for privacy-preserving biometric template protection:
//! a zero-leakage quantizing helper data system, the code offset method
//! over small linear codes, sparse ternary coding with ambiguation, and
//! the information-leakage analysis that ties them together.

pub mod code_offset;
pub mod leakage;
pub mod math;
pub mod rng;
pub mod sparse_sca;
pub mod zl_hds;

pub use math::{binary_entropy, DiscreteJointSample, Gaussian, JointHistogram, SymmetricDistribution};
pub use zl_hds::{HelperPair, QuantileHelperPair, QuantizerSpec};
