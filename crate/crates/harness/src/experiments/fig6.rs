//! Verification error probabilities for the sparse-ternary scheme:
//! reconstruction-bit error rates under genuine (H1) and unrelated (H0)
//! probes versus the ambiguation ratio, for each sparsity ratio and
//! noise level.

use crate::config::ExperimentConfig;
use crate::csv::{fmt_float, Table};
use crate::HarnessError;
use tpsim_core::sparse_sca::{
    enroll_cohort, reconstruction_error_counts, Hypothesis, ProbeRule, Projection,
};

pub fn run(cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    let mut table = Table::new(
        cfg,
        &[
            "alpha_t",
            "sigma_z_sq",
            "ratio",
            "pe_h0",
            "pe_h1",
            "h0_std_err",
            "h1_std_err",
            "comparisons",
        ],
    );
    let sigma_x = cfg.sigma_x();
    let tau = cfg.tau();
    for (ai, &alpha) in cfg.alpha_t.iter().enumerate() {
        let s_t = (((alpha * cfg.dim as f64).round() as usize).max(1)).min(cfg.dim);
        let ai_tag = ai.to_string();
        for (fi, &factor) in cfg.sigma_z_factors.iter().enumerate() {
            let sigma_z = (factor * cfg.sigma_x_sq).sqrt();
            let fi_tag = fi.to_string();
            for (ri, &ratio) in cfg.ambiguation_grid.iter().enumerate() {
                let ri_tag = ri.to_string();
                // H0 does not depend on the noise level, so its stream
                // tags omit the factor index and rows agree across it.
                let base_tags = ["fig6", &ai_tag, &ri_tag];
                let cohort = enroll_cohort(
                    Projection::identity(cfg.dim),
                    cfg.users,
                    sigma_x,
                    ProbeRule::TopK(s_t),
                    ratio,
                    cfg.seed,
                    &base_tags,
                )?;
                let (m0, t0) = reconstruction_error_counts(
                    &cohort,
                    Hypothesis::H0,
                    tau,
                    ProbeRule::Threshold(tau),
                    0.0,
                    cfg.seed,
                    &base_tags,
                )?;
                let (m1, t1) = reconstruction_error_counts(
                    &cohort,
                    Hypothesis::H1,
                    tau,
                    ProbeRule::Threshold(tau),
                    sigma_z,
                    cfg.seed,
                    &["fig6", &ai_tag, &fi_tag, &ri_tag],
                )?;
                let pe_h0 = m0 as f64 / t0 as f64;
                let pe_h1 = m1 as f64 / t1 as f64;
                table.push_row(vec![
                    fmt_float(alpha),
                    fmt_float(factor * cfg.sigma_x_sq),
                    fmt_float(ratio),
                    fmt_float(pe_h0),
                    fmt_float(pe_h1),
                    fmt_float((pe_h0 * (1.0 - pe_h0) / t0 as f64).sqrt()),
                    fmt_float((pe_h1 * (1.0 - pe_h1) / t1 as f64).sqrt()),
                    t0.to_string(),
                ]);
            }
        }
    }
    Ok(table.render())
}
