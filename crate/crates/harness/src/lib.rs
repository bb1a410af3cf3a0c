//! Experiment runner for the template-protection simulator: experiment
//! configs, CSV emission, the enrollment database, and the figure /
//! validation / attack experiment drivers behind the `tpsim` CLI.

pub mod config;
pub mod csv;
pub mod db;
pub mod experiments;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad configuration, parameters, or input data. CLI exit code 2.
    #[error("config error: {0}")]
    Config(String),
    /// Filesystem failure. CLI exit code 3.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Io(_) => 3,
        }
    }
}

impl From<tpsim_core::leakage::LeakageError> for HarnessError {
    fn from(e: tpsim_core::leakage::LeakageError) -> Self {
        HarnessError::Config(e.to_string())
    }
}

impl From<tpsim_core::sparse_sca::ScaError> for HarnessError {
    fn from(e: tpsim_core::sparse_sca::ScaError) -> Self {
        HarnessError::Config(e.to_string())
    }
}

impl From<tpsim_core::code_offset::CodeError> for HarnessError {
    fn from(e: tpsim_core::code_offset::CodeError) -> Self {
        HarnessError::Config(e.to_string())
    }
}

impl From<tpsim_core::zl_hds::HdsError> for HarnessError {
    fn from(e: tpsim_core::zl_hds::HdsError) -> Self {
        HarnessError::Config(e.to_string())
    }
}

impl From<tpsim_core::math::MathError> for HarnessError {
    fn from(e: tpsim_core::math::MathError) -> Self {
        HarnessError::Config(e.to_string())
    }
}
