//! Enrollment database: a single file holding the public protected
//! templates of a cohort, plus the enroll/verify operations the CLI
//! exposes on it.
//!
//! Layout (little-endian): magic "TPDB", u16 version, u8 scheme tag
//! (0 = sparse ternary), u32 L, f64 tau, u8 projection kind tag,
//! u32 record count, then per record u32 user_id, u32 byte length and
//! the serialized template.

use crate::config::ExperimentConfig;
use crate::HarnessError;
use nalgebra::DVector;
use std::collections::BTreeMap;
use std::path::Path;
use tpsim_core::math::SymmetricDistribution;
use tpsim_core::rng::derive_rng;
use tpsim_core::sparse_sca::{
    ambiguate, stc_encode, verify_score, ProbeRule, ProjectionKind, ProtectedTemplate, Projection,
};
use tpsim_core::Gaussian;

const MAGIC: &[u8; 4] = b"TPDB";
const VERSION: u16 = 1;
const SCHEME_SCA: u8 = 0;

pub struct EnrollmentDatabase {
    l: usize,
    tau: f64,
    kind: ProjectionKind,
    records: BTreeMap<u32, ProtectedTemplate>,
}

impl EnrollmentDatabase {
    pub fn new(l: usize, tau: f64, kind: ProjectionKind) -> Self {
        EnrollmentDatabase { l, tau, kind, records: BTreeMap::new() }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, user_id: u32) -> Option<&ProtectedTemplate> {
        self.records.get(&user_id)
    }

    pub fn user_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.records.keys().copied()
    }

    pub fn insert(&mut self, template: ProtectedTemplate) -> Result<(), HarnessError> {
        if self.records.contains_key(&template.user_id) {
            return Err(HarnessError::Config(format!(
                "duplicate user id {}",
                template.user_id
            )));
        }
        if template.u.len() != self.l {
            return Err(HarnessError::Config(format!(
                "template length {} does not match database L = {}",
                template.u.len(),
                self.l
            )));
        }
        if template.tau.to_bits() != self.tau.to_bits() {
            return Err(HarnessError::Config(format!(
                "template tau {} does not match database tau {}",
                template.tau, self.tau
            )));
        }
        if template.projection_kind != self.kind {
            return Err(HarnessError::Config("template projection kind mismatch".into()));
        }
        self.records.insert(template.user_id, template);
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(SCHEME_SCA);
        out.extend_from_slice(&(self.l as u32).to_le_bytes());
        out.extend_from_slice(&self.tau.to_le_bytes());
        out.push(self.kind.tag());
        out.extend_from_slice(&(self.records.len() as u32).to_le_bytes());
        for (id, template) in &self.records {
            let bytes = template.to_bytes();
            out.extend_from_slice(&id.to_le_bytes());
            out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
            out.extend_from_slice(&bytes);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, HarnessError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(HarnessError::Config("not a template database (bad magic)".into()));
        }
        let version = u16::from_le_bytes(r.take(2)?.try_into().unwrap());
        if version != VERSION {
            return Err(HarnessError::Config(format!("unsupported database version {version}")));
        }
        let scheme = r.take(1)?[0];
        if scheme != SCHEME_SCA {
            return Err(HarnessError::Config(format!("unsupported scheme tag {scheme}")));
        }
        let l = u32::from_le_bytes(r.take(4)?.try_into().unwrap()) as usize;
        let tau = f64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let kind = ProjectionKind::from_tag(r.take(1)?[0])
            .ok_or_else(|| HarnessError::Config("unknown projection kind tag".into()))?;
        let count = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        let mut db = EnrollmentDatabase::new(l, tau, kind);
        for _ in 0..count {
            let id = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
            let len = u32::from_le_bytes(r.take(4)?.try_into().unwrap()) as usize;
            let template = ProtectedTemplate::from_bytes(id, r.take(len)?)?;
            db.insert(template)?;
        }
        if r.pos != bytes.len() {
            return Err(HarnessError::Config("trailing bytes after last record".into()));
        }
        Ok(db)
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let bytes = std::fs::read(path)?;
        Self::from_bytes(&bytes)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], HarnessError> {
        if self.pos + n > self.bytes.len() {
            return Err(HarnessError::Config("truncated database file".into()));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }
}

/// Enroll `cfg.users` sparse-ternary templates under the identity
/// projection, deterministically from the config seed.
pub fn build_sca_database(cfg: &ExperimentConfig) -> Result<EnrollmentDatabase, HarnessError> {
    let l = cfg.dim;
    let tau = cfg.tau();
    let alpha = cfg.alpha_t[0];
    let s_t = (((alpha * l as f64).round() as usize).max(1)).min(l);
    let s_n = (cfg.ratio * (l - s_t) as f64).round() as usize;
    let source = Gaussian::new(cfg.sigma_x())?;
    let proj = Projection::identity(l);
    let mut db = EnrollmentDatabase::new(l, tau, ProjectionKind::Identity);
    for c in 0..cfg.users {
        let mut rng = derive_rng(cfg.seed, &["enroll-db"], c as u64);
        let x = DVector::from_fn(l, |_, _| source.sample(&mut rng));
        let v = stc_encode(&proj, &x, s_t)?;
        let u = ambiguate(&v, s_n, &mut rng)?;
        let template =
            ProtectedTemplate::new(c as u32, ProjectionKind::Identity, u, s_t as u32, s_n as u32, tau)?;
        db.insert(template)?;
    }
    Ok(db)
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOutcome {
    pub accept: bool,
    pub score: i32,
    pub threshold: i32,
}

/// Score a probe vector against a stored template. The probe is encoded
/// with the enrolled sparsity (top-S_t rule); the default decision
/// threshold is S_t / 2.
pub fn verify_user(
    db: &EnrollmentDatabase,
    user_id: u32,
    probe: &DVector<f64>,
    threshold: Option<i32>,
) -> Result<VerifyOutcome, HarnessError> {
    let template = db
        .get(user_id)
        .ok_or_else(|| HarnessError::Config(format!("unknown user id {user_id}")))?;
    if probe.len() != db.l {
        return Err(HarnessError::Config(format!(
            "probe has {} components, database templates have {}",
            probe.len(),
            db.l
        )));
    }
    let proj = Projection::identity(db.l);
    let score = verify_score(&template.u, &proj, probe, ProbeRule::TopK(template.s_t as usize))?;
    let threshold = threshold.unwrap_or((template.s_t / 2) as i32);
    Ok(VerifyOutcome { accept: score >= threshold, score, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentId;

    fn small_cfg() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(ExperimentId::Enroll, 11);
        cfg.users = 100;
        cfg.dim = 256;
        cfg
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let db = build_sca_database(&small_cfg()).unwrap();
        assert_eq!(db.len(), 100);
        let bytes = db.to_bytes();
        let reloaded = EnrollmentDatabase::from_bytes(&bytes).unwrap();
        assert_eq!(reloaded.to_bytes(), bytes);
        for id in db.user_ids() {
            assert_eq!(db.get(id), reloaded.get(id));
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = build_sca_database(&small_cfg()).unwrap().to_bytes();
        let b = build_sca_database(&small_cfg()).unwrap().to_bytes();
        assert_eq!(a, b);
    }

    #[test]
    fn templates_have_declared_sparsity() {
        let cfg = small_cfg();
        let db = build_sca_database(&cfg).unwrap();
        let s_t = (0.1f64 * 256.0).round() as u32;
        let s_n = (0.5 * (256.0 - s_t as f64)).round() as u32;
        for id in db.user_ids() {
            let t = db.get(id).unwrap();
            assert_eq!(t.s_t, s_t);
            assert_eq!(t.s_n, s_n);
            assert_eq!(t.u.sparsity() as u32, s_t + s_n);
        }
    }

    #[test]
    fn duplicate_id_rejected() {
        let db = build_sca_database(&small_cfg()).unwrap();
        let template = db.get(0).unwrap().clone();
        let mut db2 = EnrollmentDatabase::from_bytes(&db.to_bytes()).unwrap();
        assert!(db2.insert(template).is_err());
    }

    #[test]
    fn corrupt_bytes_rejected() {
        let mut bytes = build_sca_database(&small_cfg()).unwrap().to_bytes();
        bytes[0] = b'X';
        assert!(EnrollmentDatabase::from_bytes(&bytes).is_err());
        let truncated = &build_sca_database(&small_cfg()).unwrap().to_bytes()[..30];
        assert!(EnrollmentDatabase::from_bytes(truncated).is_err());
    }

    #[test]
    fn genuine_probe_scores_full_sparsity() {
        let cfg = small_cfg();
        let db = build_sca_database(&cfg).unwrap();
        let source = Gaussian::new(cfg.sigma_x()).unwrap();
        // regenerate user 3's feature vector from the same stream
        let mut rng = derive_rng(cfg.seed, &["enroll-db"], 3);
        let x = DVector::from_fn(cfg.dim, |_, _| source.sample(&mut rng));
        let outcome = verify_user(&db, 3, &x, None).unwrap();
        let s_t = db.get(3).unwrap().s_t as i32;
        assert!(outcome.accept);
        assert_eq!(outcome.score, s_t);
        assert_eq!(outcome.threshold, s_t / 2);
    }

    #[test]
    fn random_probes_rejected_nearly_always() {
        let mut cfg = small_cfg();
        cfg.users = 10;
        let db = build_sca_database(&cfg).unwrap();
        let source = Gaussian::new(cfg.sigma_x()).unwrap();
        let trials = 10_000u64;
        let mut rejects = 0u64;
        for t in 0..trials {
            let mut rng = derive_rng(99, &["impostor"], t);
            let y = DVector::from_fn(cfg.dim, |_, _| source.sample(&mut rng));
            let outcome = verify_user(&db, (t % 10) as u32, &y, None).unwrap();
            if !outcome.accept {
                rejects += 1;
            }
        }
        let rate = rejects as f64 / trials as f64;
        assert!(rate >= 0.99, "reject rate {rate}");
    }

    #[test]
    fn unknown_user_is_an_error() {
        let db = build_sca_database(&small_cfg()).unwrap();
        let probe = DVector::zeros(256);
        let err = verify_user(&db, 9999, &probe, None).unwrap_err();
        assert!(err.to_string().contains("unknown user"), "{err}");
    }
}
