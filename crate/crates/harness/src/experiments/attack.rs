//! Support-enumeration attack demo: per-trial candidate ranking of the
//! true codeword among all consistent de-ambiguations.

use crate::config::ExperimentConfig;
use crate::csv::{fmt_float, Table};
use crate::HarnessError;
use nalgebra::DVector;
use tpsim_core::math::standard_normal_sample;
use tpsim_core::rng::derive_rng;
use tpsim_core::sparse_sca::{ambiguate, enumeration_attack, stc_encode, Projection};

pub fn run(cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    let mut table = Table::new(
        cfg,
        &["trial", "candidate_count", "true_rank", "best_score", "true_score"],
    );
    for trial in 0..cfg.trials as u64 {
        let mut rng = derive_rng(cfg.seed, &["attack-demo"], trial);
        let proj = Projection::random_gaussian(cfg.attack_l, cfg.attack_n, &mut rng)?;
        let x = DVector::from_fn(cfg.attack_n, |_, _| standard_normal_sample(&mut rng));
        let v = stc_encode(&proj, &x, cfg.attack_s_t)?;
        let u = ambiguate(&v, cfg.attack_s_n, &mut rng)?;
        let candidates = enumeration_attack(&u, &proj, cfg.attack_s_t, 1u128 << 40)?;
        let true_rank = candidates
            .iter()
            .position(|c| c.codeword == v)
            .ok_or_else(|| HarnessError::Config("true codeword missing from candidates".into()))?;
        table.push_row(vec![
            trial.to_string(),
            candidates.len().to_string(),
            true_rank.to_string(),
            fmt_float(candidates[0].score),
            fmt_float(candidates[true_rank].score),
        ]);
    }
    Ok(table.render())
}
