//! Binary on-disk format for protected templates.
//!
//! Layout (little-endian throughout): magic "SCA1", u16 version, u32 L,
//! u32 S_t, u32 S_n, f64 tau, u8 projection kind tag, then the trits
//! packed 2 bits each (00 = 0, 01 = +1, 10 = -1), four per byte.

use super::{ProjectionKind, ScaError, TernaryCodeword};

const MAGIC: &[u8; 4] = b"SCA1";
const VERSION: u16 = 1;

/// Public per-user enrollment record.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtectedTemplate {
    pub user_id: u32,
    pub projection_kind: ProjectionKind,
    pub u: TernaryCodeword,
    pub s_t: u32,
    pub s_n: u32,
    pub tau: f64,
}

impl ProtectedTemplate {
    pub fn new(
        user_id: u32,
        projection_kind: ProjectionKind,
        u: TernaryCodeword,
        s_t: u32,
        s_n: u32,
        tau: f64,
    ) -> Result<Self, ScaError> {
        if u.sparsity() != (s_t + s_n) as usize {
            return Err(ScaError::Format(format!(
                "sparsity {} does not equal S_t + S_n = {}",
                u.sparsity(),
                s_t + s_n
            )));
        }
        Ok(Self { user_id, projection_kind, u, s_t, s_n, tau })
    }

    /// Serialized length in bytes for a given codeword length.
    pub fn byte_len(l: usize) -> usize {
        4 + 2 + 4 + 4 + 4 + 8 + 1 + l.div_ceil(4)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let l = self.u.len();
        let mut out = Vec::with_capacity(Self::byte_len(l));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(l as u32).to_le_bytes());
        out.extend_from_slice(&self.s_t.to_le_bytes());
        out.extend_from_slice(&self.s_n.to_le_bytes());
        out.extend_from_slice(&self.tau.to_le_bytes());
        out.push(self.projection_kind.tag());
        let mut byte = 0u8;
        for (i, &t) in self.u.values().iter().enumerate() {
            let bits = match t {
                0 => 0b00u8,
                1 => 0b01,
                _ => 0b10,
            };
            byte |= bits << (2 * (i % 4));
            if i % 4 == 3 {
                out.push(byte);
                byte = 0;
            }
        }
        if l % 4 != 0 {
            out.push(byte);
        }
        out
    }

    /// Parse a template given its user id (framed by the enclosing
    /// database record).
    pub fn from_bytes(user_id: u32, bytes: &[u8]) -> Result<Self, ScaError> {
        let err = |msg: &str| ScaError::Format(msg.to_string());
        if bytes.len() < 27 {
            return Err(err("template truncated"));
        }
        if &bytes[0..4] != MAGIC {
            return Err(err("bad magic"));
        }
        let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
        if version != VERSION {
            return Err(ScaError::Format(format!("unsupported version {version}")));
        }
        let l = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
        let s_t = u32::from_le_bytes(bytes[10..14].try_into().unwrap());
        let s_n = u32::from_le_bytes(bytes[14..18].try_into().unwrap());
        let tau = f64::from_le_bytes(bytes[18..26].try_into().unwrap());
        let kind = ProjectionKind::from_tag(bytes[26])
            .ok_or_else(|| err("unknown projection kind tag"))?;
        let trit_bytes = &bytes[27..];
        if trit_bytes.len() != l.div_ceil(4) {
            return Err(err("trit payload length mismatch"));
        }
        let mut values = Vec::with_capacity(l);
        for i in 0..l {
            let bits = (trit_bytes[i / 4] >> (2 * (i % 4))) & 0b11;
            values.push(match bits {
                0b00 => 0i8,
                0b01 => 1,
                0b10 => -1,
                _ => return Err(err("invalid trit encoding 11")),
            });
        }
        let u = TernaryCodeword::new(values).expect("decoded trits are ternary");
        Self::new(user_id, kind, u, s_t, s_n, tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_template() -> ProtectedTemplate {
        let u = TernaryCodeword::new(vec![1, 0, -1, 0, 1, 1, 0, -1, 0]).unwrap();
        ProtectedTemplate::new(7, ProjectionKind::Pca, u, 3, 2, 0.7071067811865476).unwrap()
    }

    #[test]
    fn roundtrip() {
        let t = sample_template();
        let bytes = t.to_bytes();
        assert_eq!(bytes.len(), ProtectedTemplate::byte_len(9));
        let back = ProtectedTemplate::from_bytes(7, &bytes).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn header_layout_is_fixed() {
        let t = sample_template();
        let bytes = t.to_bytes();
        assert_eq!(&bytes[0..4], b"SCA1");
        assert_eq!(u16::from_le_bytes(bytes[4..6].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[6..10].try_into().unwrap()), 9);
        assert_eq!(bytes[26], 2);
        // first byte of trits: (+1, 0, -1, 0) -> 0b00_10_00_01
        assert_eq!(bytes[27], 0b00_10_00_01);
    }

    #[test]
    fn sparsity_invariant_enforced() {
        let u = TernaryCodeword::new(vec![1, 0, -1]).unwrap();
        assert!(ProtectedTemplate::new(0, ProjectionKind::Identity, u, 3, 2, 1.0).is_err());
    }

    #[test]
    fn rejects_corrupt_input() {
        let t = sample_template();
        let bytes = t.to_bytes();
        assert!(ProtectedTemplate::from_bytes(7, &bytes[..10]).is_err());
        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        assert!(ProtectedTemplate::from_bytes(7, &bad_magic).is_err());
        let mut bad_trit = bytes.clone();
        *bad_trit.last_mut().unwrap() = 0b11;
        assert!(ProtectedTemplate::from_bytes(7, &bad_trit).is_err());
    }
}
