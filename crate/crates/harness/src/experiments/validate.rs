//! Validation sweeps: Monte-Carlo estimates against the closed forms
//! for the quantizing helper data system, and exhaustive checks of the
//! code offset method.

use crate::config::ExperimentConfig;
use crate::csv::{fmt_float, Table};
use crate::HarnessError;
use std::sync::Arc;
use tpsim_core::code_offset::{
    com_gen, com_reconstruct, exact_noisy_enrollment_leakage, marginal_bit_leakage,
    noisy_enrollment_leakage_bound, LinearCode,
};
use tpsim_core::leakage::{monte_carlo_hds_leakage, HelperObservable, SensitiveBit};
use tpsim_core::zl_hds::make_equiprobable_quantizer;
use tpsim_core::Gaussian;

const HDS_COLUMNS: &[&str] = &[
    "section",
    "j",
    "m",
    "f_neg_tau",
    "analytic_cond_entropy",
    "empirical_cond_entropy",
    "analytic_mi",
    "empirical_mi",
    "std_err",
    "samples",
];

/// Sign-bit leakage over a (J, m) grid and extremeness-bit leakage in
/// the discrete-helper regime, each against its closed form.
pub fn run_hds(cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    let mut table = Table::new(cfg, HDS_COLUMNS);
    let source = Arc::new(Gaussian::new(cfg.sigma_x())?);

    for j in 2..=6usize {
        for m in 1..=4usize {
            let spec = make_equiprobable_quantizer(source.clone(), j, m)?;
            let report = monte_carlo_hds_leakage(
                &spec,
                SensitiveBit::Sign,
                HelperObservable::Discrete,
                cfg.samples,
                cfg.seed,
                &["hds-validate", "sign", &j.to_string(), &m.to_string()],
            )?;
            push_hds_row(&mut table, "sign", j, m, 0.0, &report);
        }
    }

    // p0 = 1/4; keep F(-tau) < p0/m so the discrete closed form applies
    let j = 4usize;
    for m in [2usize, 3, 4, 8] {
        for f in [0.002f64, 0.01, 0.02] {
            let spec = make_equiprobable_quantizer(source.clone(), j, m)?;
            let tau = -spec.source().quantile(f);
            let report = monte_carlo_hds_leakage(
                &spec,
                SensitiveBit::Extremeness { tau },
                HelperObservable::Discrete,
                cfg.samples,
                cfg.seed,
                &["hds-validate", "extremeness", &m.to_string(), &format!("{f}")],
            )?;
            push_hds_row(&mut table, "extremeness", j, m, f, &report);
        }
    }
    Ok(table.render())
}

fn push_hds_row(
    table: &mut Table,
    section: &str,
    j: usize,
    m: usize,
    f: f64,
    report: &tpsim_core::leakage::LeakageReport,
) {
    table.push_row(vec![
        section.to_string(),
        j.to_string(),
        m.to_string(),
        fmt_float(f),
        fmt_float(report.analytic_cond_entropy.unwrap_or(f64::NAN)),
        fmt_float(report.cond_entropy),
        fmt_float(report.analytic_bits.unwrap_or(f64::NAN)),
        fmt_float(report.empirical_bits),
        fmt_float(report.std_err),
        report.sample_count.to_string(),
    ]);
}

const COM_COLUMNS: &[&str] = &["check", "code", "param_a", "param_b", "value", "reference"];

/// Exhaustive code-offset checks: exact zero marginal leakage for
/// uniform inputs, single/double-flip correction behavior, and the
/// noisy-enrollment leakage bound against exact enumeration.
pub fn run_com(cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    let mut table = Table::new(cfg, COM_COLUMNS);
    let hamming = LinearCode::hamming74();
    let rep5 = LinearCode::repetition(5)?;

    for (name, code) in [("hamming74", &hamming), ("repetition5", &rep5)] {
        for bit in 0..code.n() {
            let leak = marginal_bit_leakage(code, bit, 0.5)?;
            table.push_row(vec![
                "zero-leakage".into(),
                name.into(),
                bit.to_string(),
                fmt_float(0.5),
                fmt_float(leak),
                fmt_float(0.0),
            ]);
        }
    }

    // every single-bit flip on every input must be corrected
    let n = hamming.n();
    let words = 1u32 << n;
    let mut single_failures = 0u64;
    for w in 0..words {
        let sketch = com_gen(&hamming, w)?;
        for bit in 0..n {
            let y = w ^ (1 << bit);
            if com_reconstruct(&hamming, y, &sketch)? != w {
                single_failures += 1;
            }
        }
    }
    table.push_row(vec![
        "single-flip".into(),
        "hamming74".into(),
        (u64::from(words) * n as u64).to_string(),
        "1".into(),
        single_failures.to_string(),
        "0".into(),
    ]);

    // double flips exceed the correction radius; count the failures and
    // exhibit the first one
    let mut double_failures = 0u64;
    let mut double_cases = 0u64;
    let mut exhibit: Option<(u32, u32)> = None;
    for w in 0..words {
        let sketch = com_gen(&hamming, w)?;
        for a in 0..n {
            for b in (a + 1)..n {
                let e = (1u32 << a) | (1 << b);
                double_cases += 1;
                if com_reconstruct(&hamming, w ^ e, &sketch)? != w {
                    double_failures += 1;
                    exhibit.get_or_insert((w, e));
                }
            }
        }
    }
    table.push_row(vec![
        "double-flip".into(),
        "hamming74".into(),
        double_cases.to_string(),
        "2".into(),
        double_failures.to_string(),
        "1".into(),
    ]);
    if let Some((w, e)) = exhibit {
        table.push_row(vec![
            "double-flip-exhibit".into(),
            "hamming74".into(),
            w.to_string(),
            e.to_string(),
            "1".into(),
            "1".into(),
        ]);
    }

    // exact leakage about the enrolled bits from a noisy-enrollment
    // sketch, next to the closed-form bound
    for eps in [0.05f64, 0.1, 0.2, 0.45] {
        let exact = exact_noisy_enrollment_leakage(&rep5, eps)?;
        let bound =
            noisy_enrollment_leakage_bound(rep5.n(), rep5.k(), rep5.row_weight(), eps)?;
        table.push_row(vec![
            "proposition".into(),
            "repetition5".into(),
            fmt_float(eps),
            rep5.row_weight().to_string(),
            fmt_float(exact),
            fmt_float(bound),
        ]);
    }

    Ok(table.render())
}
