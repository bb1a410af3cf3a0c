//! Flat key=value experiment configuration with CLI overrides and a
//! stable content hash stamped onto every output row.

use crate::HarnessError;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    Fig5,
    Fig6,
    Fig7,
    HdsValidate,
    ComValidate,
    AttackDemo,
    Enroll,
    Verify,
}

impl ExperimentId {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Fig5 => "fig5",
            ExperimentId::Fig6 => "fig6",
            ExperimentId::Fig7 => "fig7",
            ExperimentId::HdsValidate => "hds-validate",
            ExperimentId::ComValidate => "com-validate",
            ExperimentId::AttackDemo => "attack-demo",
            ExperimentId::Enroll => "enroll",
            ExperimentId::Verify => "verify",
        }
    }
}

/// Values settable from the command line that win over the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct CliOverrides {
    pub seed: Option<u64>,
    pub users: Option<usize>,
    pub dim: Option<usize>,
}

/// Full parameter set for one experiment run. Every field has a desk
/// scale default except the seed, which must be given explicitly.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    /// Cohort size C.
    pub users: usize,
    /// Feature dimensionality N (projections here are square, L = N).
    pub dim: usize,
    /// Source component variance sigma_X^2.
    pub sigma_x_sq: f64,
    /// Measurement noise variances as multiples of sigma_X^2.
    pub sigma_z_factors: Vec<f64>,
    /// Extremeness / encoder threshold as a multiple of sigma_X.
    pub tau_scale: f64,
    /// Sparsity ratios alpha_t = S_t / L.
    pub alpha_t: Vec<f64>,
    /// Ambiguation ratios S_n / (L - S_t) to sweep.
    pub ambiguation_grid: Vec<f64>,
    /// Monte-Carlo samples per grid point.
    pub samples: u64,
    /// Histogram bins for the continuum helper.
    pub bins: usize,
    /// Ambiguation ratio used by the `enroll` subcommand.
    pub ratio: f64,
    /// Attack-demo problem sizes.
    pub attack_l: usize,
    pub attack_n: usize,
    pub attack_s_t: usize,
    pub attack_s_n: usize,
    /// Attack-demo trial count.
    pub trials: usize,
}

impl ExperimentConfig {
    pub fn defaults(experiment: ExperimentId, seed: u64) -> Self {
        ExperimentConfig {
            experiment,
            seed,
            users: 5000,
            dim: 256,
            sigma_x_sq: 0.5,
            sigma_z_factors: vec![0.4, 0.8],
            tau_scale: 1.0,
            alpha_t: vec![0.1, 0.5],
            ambiguation_grid: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            samples: 1_000_000,
            bins: 64,
            ratio: 0.5,
            attack_l: 12,
            attack_n: 6,
            attack_s_t: 2,
            attack_s_n: 3,
            trials: 200,
        }
    }

    /// Merge the config file (if any) and CLI overrides into a full
    /// config. The seed must come from one of the two sources.
    pub fn from_sources(
        experiment: ExperimentId,
        file: Option<&str>,
        overrides: &CliOverrides,
    ) -> Result<Self, HarnessError> {
        let kv = match file {
            Some(text) => parse_kv(text)?,
            None => Vec::new(),
        };
        let seed = match overrides.seed {
            Some(s) => s,
            None => {
                let from_file = kv
                    .iter()
                    .find(|(k, _)| k == "seed")
                    .map(|(_, v)| parse_u64("seed", v))
                    .transpose()?;
                from_file.ok_or_else(|| {
                    HarnessError::Config(
                        "seed is required (--seed or seed= in the config file)".into(),
                    )
                })?
            }
        };
        let mut cfg = Self::defaults(experiment, seed);
        for (key, value) in &kv {
            if key != "seed" {
                cfg.apply(key, value)?;
            }
        }
        if let Some(u) = overrides.users {
            cfg.users = u;
        }
        if let Some(d) = overrides.dim {
            cfg.dim = d;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        match key {
            "users" => self.users = parse_usize(key, value)?,
            "dim" => self.dim = parse_usize(key, value)?,
            "sigma_x_sq" => self.sigma_x_sq = parse_f64(key, value)?,
            "sigma_z_factors" => self.sigma_z_factors = parse_list(key, value)?,
            "tau_scale" => self.tau_scale = parse_f64(key, value)?,
            "alpha_t" => self.alpha_t = parse_list(key, value)?,
            "ambiguation_grid" => self.ambiguation_grid = parse_list(key, value)?,
            "samples" => self.samples = parse_u64(key, value)?,
            "bins" => self.bins = parse_usize(key, value)?,
            "ratio" => self.ratio = parse_f64(key, value)?,
            "attack_l" => self.attack_l = parse_usize(key, value)?,
            "attack_n" => self.attack_n = parse_usize(key, value)?,
            "attack_s_t" => self.attack_s_t = parse_usize(key, value)?,
            "attack_s_n" => self.attack_s_n = parse_usize(key, value)?,
            "trials" => self.trials = parse_usize(key, value)?,
            other => {
                return Err(HarnessError::Config(format!("unknown config key `{other}`")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.users == 0 || self.dim == 0 {
            return bad("users and dim must be positive".into());
        }
        if !(self.sigma_x_sq > 0.0) {
            return bad(format!("sigma_x_sq must be positive, got {}", self.sigma_x_sq));
        }
        if !(self.tau_scale > 0.0) {
            return bad(format!("tau_scale must be positive, got {}", self.tau_scale));
        }
        if self.sigma_z_factors.is_empty() || self.sigma_z_factors.iter().any(|&f| !(f > 0.0)) {
            return bad("sigma_z_factors must be a non-empty list of positive values".into());
        }
        if self.alpha_t.is_empty() || self.alpha_t.iter().any(|&a| !(a > 0.0 && a <= 1.0)) {
            return bad("alpha_t entries must lie in (0, 1]".into());
        }
        if self.ambiguation_grid.is_empty()
            || self.ambiguation_grid.iter().any(|&r| !(0.0..=1.0).contains(&r))
        {
            return bad("ambiguation_grid entries must lie in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.ratio) {
            return bad(format!("ratio must lie in [0, 1], got {}", self.ratio));
        }
        if self.samples < 10_000 {
            return bad(format!("samples must be at least 10000, got {}", self.samples));
        }
        if self.bins < 2 {
            return bad(format!("bins must be at least 2, got {}", self.bins));
        }
        if self.attack_l == 0 || self.attack_n == 0 || self.attack_s_t == 0 {
            return bad("attack sizes must be positive".into());
        }
        if self.attack_s_t + self.attack_s_n > self.attack_l {
            return bad(format!(
                "attack_s_t + attack_s_n = {} exceeds attack_l = {}",
                self.attack_s_t + self.attack_s_n,
                self.attack_l
            ));
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        Ok(())
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x_sq.sqrt()
    }

    /// Extremeness threshold tau = tau_scale * sigma_X.
    pub fn tau(&self) -> f64 {
        self.tau_scale * self.sigma_x()
    }

    /// Canonical key=value rendering used for the config hash.
    pub fn canonical(&self) -> String {
        let list = |v: &[f64]| {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        };
        let mut s = String::new();
        let _ = writeln!(s, "alpha_t={}", list(&self.alpha_t));
        let _ = writeln!(s, "ambiguation_grid={}", list(&self.ambiguation_grid));
        let _ = writeln!(s, "attack_l={}", self.attack_l);
        let _ = writeln!(s, "attack_n={}", self.attack_n);
        let _ = writeln!(s, "attack_s_n={}", self.attack_s_n);
        let _ = writeln!(s, "attack_s_t={}", self.attack_s_t);
        let _ = writeln!(s, "bins={}", self.bins);
        let _ = writeln!(s, "dim={}", self.dim);
        let _ = writeln!(s, "experiment={}", self.experiment.as_str());
        let _ = writeln!(s, "ratio={}", self.ratio);
        let _ = writeln!(s, "samples={}", self.samples);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "sigma_x_sq={}", self.sigma_x_sq);
        let _ = writeln!(s, "sigma_z_factors={}", list(&self.sigma_z_factors));
        let _ = writeln!(s, "tau_scale={}", self.tau_scale);
        let _ = writeln!(s, "trials={}", self.trials);
        let _ = writeln!(s, "users={}", self.users);
        s
    }

    /// First 8 bytes of the SHA-256 of the canonical rendering, hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn parse_kv(text: &str) -> Result<Vec<(String, String)>, HarnessError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            HarnessError::Config(format!("config line {}: expected key=value, got `{line}`", lineno + 1))
        })?;
        out.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn parse_u64(key: &str, value: &str) -> Result<u64, HarnessError> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("`{key}`: expected an integer, got `{value}`")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, HarnessError> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("`{key}`: expected an integer, got `{value}`")))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, HarnessError> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("`{key}`: expected a number, got `{value}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, HarnessError> {
    value.split(',').map(|v| parse_f64(key, v.trim())).collect()
}
