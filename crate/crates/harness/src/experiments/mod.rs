//! Experiment drivers. Each returns the finished CSV as a string so the
//! CLI can route it to a file or stdout and tests can inspect it.

pub mod attack;
pub mod fig5;
pub mod fig6;
pub mod fig7;
pub mod validate;

use crate::config::{ExperimentConfig, ExperimentId};
use crate::HarnessError;

pub fn run(cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    match cfg.experiment {
        ExperimentId::Fig5 => fig5::run(cfg),
        ExperimentId::Fig6 => fig6::run(cfg),
        ExperimentId::Fig7 => fig7::run(cfg),
        ExperimentId::HdsValidate => validate::run_hds(cfg),
        ExperimentId::ComValidate => validate::run_com(cfg),
        ExperimentId::AttackDemo => attack::run(cfg),
        ExperimentId::Enroll | ExperimentId::Verify => Err(HarnessError::Config(format!(
            "`{}` is not a CSV experiment",
            cfg.experiment.as_str()
        ))),
    }
}
