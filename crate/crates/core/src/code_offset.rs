//! Code Offset Method: a syndrome-based secure sketch over small binary
//! linear codes, with exhaustive (table) syndrome decoding and exact
//! leakage computations by enumeration.

use crate::math::{binary_entropy_unchecked, entropy_bits};
use thiserror::Error;

/// Enumeration-based operations are capped at this block length.
pub const MAX_ENUM_BITS: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum CodeError {
    #[error("word length {got} does not match block length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parity check matrix does not have full row rank")]
    RankDeficient,
    #[error("block length {0} too large for exhaustive enumeration")]
    TooLarge(usize),
    #[error("invalid code dimensions: n = {n}, k = {k}")]
    BadDimensions { n: usize, k: usize },
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Binary word of up to [`MAX_ENUM_BITS`] bits; bit i is position i.
pub type Word = u32;

/// Syndrome sketch u = Syn(psi(x)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sketch {
    pub bits: Word,
    pub len: usize,
}

/// A binary linear [n, k] code given by its parity check matrix, with a
/// precomputed coset-leader table for syndrome decoding.
#[derive(Debug, Clone)]
pub struct LinearCode {
    n: usize,
    k: usize,
    rows: Vec<Word>,
    row_weight: usize,
    coset_leaders: Vec<Word>,
    radius: usize,
}

fn rank_gf2(rows: &[Word]) -> usize {
    let mut basis: Vec<Word> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            let pivot = 1u32 << (31 - b.leading_zeros());
            if v & pivot != 0 {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
        }
    }
    basis.len()
}

/// Lexicographic order on error patterns read position 0 first.
fn lex_key(word: Word, n: usize) -> u32 {
    word.reverse_bits() >> (32 - n)
}

impl LinearCode {
    /// Build a code from parity check rows (one mask per row, bit i is
    /// column i). Requires full row rank and n <= 20.
    pub fn from_parity_check(n: usize, k: usize, rows: Vec<Word>) -> Result<Self, CodeError> {
        if n == 0 || k >= n || rows.len() != n - k {
            return Err(CodeError::BadDimensions { n, k });
        }
        if n > MAX_ENUM_BITS {
            return Err(CodeError::TooLarge(n));
        }
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        if rows.iter().any(|&r| r & !mask != 0) {
            return Err(CodeError::Parse("parity row wider than n".into()));
        }
        if rank_gf2(&rows) != n - k {
            return Err(CodeError::RankDeficient);
        }
        let row_weight = rows.iter().map(|r| r.count_ones() as usize).max().unwrap();

        // Exhaustive coset-leader table: minimum weight, ties broken by
        // the lexicographically smallest pattern.
        let n_syn = 1usize << (n - k);
        let mut leaders: Vec<Option<Word>> = vec![None; n_syn];
        let mut min_codeword_weight = u32::MAX;
        for word in 0..(1u32 << n) {
            let s = syndrome_of(&rows, word) as usize;
            if s == 0 && word != 0 {
                min_codeword_weight = min_codeword_weight.min(word.count_ones());
            }
            match leaders[s] {
                None => leaders[s] = Some(word),
                Some(cur) => {
                    let better = (word.count_ones(), lex_key(word, n))
                        < (cur.count_ones(), lex_key(cur, n));
                    if better {
                        leaders[s] = Some(word);
                    }
                }
            }
        }
        let coset_leaders: Vec<Word> = leaders.into_iter().map(|l| l.unwrap()).collect();
        let radius = if min_codeword_weight == u32::MAX {
            0
        } else {
            ((min_codeword_weight - 1) / 2) as usize
        };
        Ok(Self { n, k, rows, row_weight, coset_leaders, radius })
    }

    /// n-bit repetition code [n, 1] with staircase parity rows
    /// e_i + e_{i+1} (row weight 2).
    pub fn repetition(n: usize) -> Result<Self, CodeError> {
        if n < 2 {
            return Err(CodeError::BadDimensions { n, k: 1 });
        }
        let rows = (0..n - 1).map(|i| (1u32 << i) | (1u32 << (i + 1))).collect();
        Self::from_parity_check(n, 1, rows)
    }

    /// Hamming(7,4): syndrome of a single error at position i is the
    /// 3-bit value i+1.
    pub fn hamming74() -> Self {
        let mut rows = vec![0u32; 3];
        for i in 0..7u32 {
            let col = i + 1;
            for (j, row) in rows.iter_mut().enumerate() {
                if (col >> j) & 1 == 1 {
                    *row |= 1 << i;
                }
            }
        }
        Self::from_parity_check(7, 4, rows).expect("hamming(7,4) is full rank")
    }

    /// Parse the plain-text format: first line "n k", then n-k lines of
    /// n characters in {0,1} (character index = bit position).
    pub fn from_text(text: &str) -> Result<Self, CodeError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| CodeError::Parse("missing header".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CodeError::Parse("bad n".into()))?;
        let k: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CodeError::Parse("bad k".into()))?;
        if n == 0 || k >= n {
            return Err(CodeError::BadDimensions { n, k });
        }
        if n > MAX_ENUM_BITS {
            return Err(CodeError::TooLarge(n));
        }
        let mut rows = Vec::with_capacity(n - k);
        for _ in 0..n - k {
            let line = lines.next().ok_or_else(|| CodeError::Parse("missing parity row".into()))?;
            let line = line.trim();
            if line.len() != n {
                return Err(CodeError::Parse(format!("row length {} != n = {n}", line.len())));
            }
            let mut mask = 0u32;
            for (i, ch) in line.chars().enumerate() {
                match ch {
                    '1' => mask |= 1 << i,
                    '0' => {}
                    other => return Err(CodeError::Parse(format!("bad character '{other}'"))),
                }
            }
            rows.push(mask);
        }
        Self::from_parity_check(n, k, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Maximum number of ones over the parity check rows.
    pub fn row_weight(&self) -> usize {
        self.row_weight
    }

    /// Guaranteed correction radius t = floor((d_min - 1) / 2).
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn parity_rows(&self) -> &[Word] {
        &self.rows
    }

    /// Minimum-weight coset leader for a syndrome.
    pub fn coset_leader(&self, syndrome: Word) -> Word {
        self.coset_leaders[syndrome as usize]
    }

    fn check_len(&self, word: Word) -> Result<(), CodeError> {
        let mask = (1u32 << self.n) - 1;
        if word & !mask != 0 {
            return Err(CodeError::LengthMismatch {
                expected: self.n,
                got: 32 - word.leading_zeros() as usize,
            });
        }
        Ok(())
    }
}

fn syndrome_of(rows: &[Word], word: Word) -> Word {
    rows.iter()
        .enumerate()
        .fold(0, |acc, (j, &row)| acc | ((((row & word).count_ones() & 1) as Word) << j))
}

/// Syn(word): parity_check * word over GF(2).
pub fn syndrome(code: &LinearCode, word: Word) -> Result<Word, CodeError> {
    code.check_len(word)?;
    Ok(syndrome_of(&code.rows, word))
}

/// COM Gen: the sketch is the syndrome of the enrolled binary string.
pub fn com_gen(code: &LinearCode, psi_x: Word) -> Result<Sketch, CodeError> {
    Ok(Sketch { bits: syndrome(code, psi_x)?, len: code.n - code.k })
}

/// COM Rec: psi(y) xor SynDec(u xor Syn(psi(y))). Recovers psi(x) when
/// the Hamming distance to psi(y) is within the correction radius.
pub fn com_reconstruct(code: &LinearCode, psi_y: Word, sketch: &Sketch) -> Result<Word, CodeError> {
    code.check_len(psi_y)?;
    if sketch.len != code.n - code.k {
        return Err(CodeError::LengthMismatch { expected: code.n - code.k, got: sketch.len });
    }
    let s = sketch.bits ^ syndrome(code, psi_y)?;
    Ok(psi_y ^ code.coset_leader(s))
}

/// Exact I(psi(X)_i ; U) in bits for iid Bernoulli(p) input bits,
/// computed by summing over all 2^n words.
pub fn marginal_bit_leakage(code: &LinearCode, bit_index: usize, p: f64) -> Result<f64, CodeError> {
    if code.n > MAX_ENUM_BITS {
        return Err(CodeError::TooLarge(code.n));
    }
    if bit_index >= code.n {
        return Err(CodeError::Domain(format!("bit index {bit_index} >= n = {}", code.n)));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(CodeError::Domain(format!("prior p = {p} not in (0, 1)")));
    }
    let n_syn = 1usize << (code.n - code.k);
    // joint[v][s] = Pr[bit = v, syndrome = s]
    let mut joint = vec![[0.0f64; 2]; n_syn];
    for word in 0..(1u32 << code.n) {
        let w = word.count_ones() as i32;
        let prob = p.powi(w) * (1.0 - p).powi(code.n as i32 - w);
        let s = syndrome_of(&code.rows, word) as usize;
        let v = ((word >> bit_index) & 1) as usize;
        joint[s][v] += prob;
    }
    let h_bit = binary_entropy_unchecked(joint.iter().map(|j| j[1]).sum());
    let mut h_cond = 0.0;
    for j in joint {
        let ps = j[0] + j[1];
        if ps > 0.0 {
            h_cond += ps * binary_entropy_unchecked(j[1] / ps);
        }
    }
    Ok(h_bit - h_cond)
}

/// Closed-form approximation of the enrollment-noise leakage
/// (n - k) * (1 - h(alpha)), alpha = 1/2 - 1/2 (1 - 2 eps)^r.
pub fn noisy_enrollment_leakage_bound(
    n: usize,
    k: usize,
    r: usize,
    epsilon: f64,
) -> Result<f64, CodeError> {
    if k >= n {
        return Err(CodeError::BadDimensions { n, k });
    }
    if r < 1 {
        return Err(CodeError::Domain("row weight r must be >= 1".into()));
    }
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(CodeError::Domain(format!("epsilon = {epsilon} not in [0, 1/2]")));
    }
    let alpha = 0.5 - 0.5 * (1.0 - 2.0 * epsilon).powi(r as i32);
    Ok((n - k) as f64 * (1.0 - binary_entropy_unchecked(alpha)))
}

/// Exact I(B;U) for uniform B observed through iid Bernoulli(eps)
/// enrollment noise: (n - k) - H(Syn G), with H(Syn G) by enumeration.
pub fn exact_noisy_enrollment_leakage(code: &LinearCode, epsilon: f64) -> Result<f64, CodeError> {
    if code.n > MAX_ENUM_BITS {
        return Err(CodeError::TooLarge(code.n));
    }
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(CodeError::Domain(format!("epsilon = {epsilon} not in [0, 1/2]")));
    }
    let n_syn = 1usize << (code.n - code.k);
    let mut dist = vec![0.0f64; n_syn];
    for g in 0..(1u32 << code.n) {
        let w = g.count_ones() as i32;
        dist[syndrome_of(&code.rows, g) as usize] +=
            epsilon.powi(w) * (1.0 - epsilon).powi(code.n as i32 - w);
    }
    Ok((code.n - code.k) as f64 - entropy_bits(&dist))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syndrome_basics() {
        let code = LinearCode::hamming74();
        assert_eq!(syndrome(&code, 0).unwrap(), 0);
        // single error at position i gives syndrome i+1
        for i in 0..7 {
            assert_eq!(syndrome(&code, 1 << i).unwrap(), i as u32 + 1);
        }
        // codewords have zero syndrome
        let mut count = 0;
        for w in 0..(1u32 << 7) {
            if syndrome(&code, w).unwrap() == 0 {
                count += 1;
            }
        }
        assert_eq!(count, 1 << 4);
    }

    #[test]
    fn syndrome_linearity() {
        let code = LinearCode::hamming74();
        for a in 0..(1u32 << 7) {
            let b = a.wrapping_mul(37) & 0x7f;
            assert_eq!(
                syndrome(&code, a ^ b).unwrap(),
                syndrome(&code, a).unwrap() ^ syndrome(&code, b).unwrap()
            );
        }
    }

    #[test]
    fn com_gen_cases() {
        let code = LinearCode::hamming74();
        assert_eq!(com_gen(&code, 0).unwrap().bits, 0);
        for w in 0..(1u32 << 7) {
            if syndrome(&code, w).unwrap() == 0 {
                assert_eq!(com_gen(&code, w).unwrap().bits, 0);
                for e in 0..7 {
                    assert_eq!(
                        com_gen(&code, w ^ (1 << e)).unwrap().bits,
                        syndrome(&code, 1 << e).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn com_corrects_single_flips_exhaustively() {
        let code = LinearCode::hamming74();
        assert_eq!(code.radius(), 1);
        for x in 0..(1u32 << 7) {
            let sketch = com_gen(&code, x).unwrap();
            assert_eq!(com_reconstruct(&code, x, &sketch).unwrap(), x);
            for i in 0..7 {
                assert_eq!(com_reconstruct(&code, x ^ (1 << i), &sketch).unwrap(), x);
            }
        }
    }

    #[test]
    fn com_double_flip_fails_somewhere() {
        let code = LinearCode::hamming74();
        let mut failed = false;
        'outer: for x in 0..(1u32 << 7) {
            let sketch = com_gen(&code, x).unwrap();
            for i in 0..7 {
                for j in i + 1..7 {
                    if com_reconstruct(&code, x ^ (1 << i) ^ (1 << j), &sketch).unwrap() != x {
                        failed = true;
                        break 'outer;
                    }
                }
            }
        }
        assert!(failed, "some double flip must escape the correction radius");
    }

    #[test]
    fn repetition_corrects_up_to_radius() {
        let code = LinearCode::repetition(5).unwrap();
        assert_eq!(code.radius(), 2);
        for &x in &[0u32, 0x1f] {
            let sketch = com_gen(&code, x).unwrap();
            for e in 0..(1u32 << 5) {
                if e.count_ones() <= 2 {
                    assert_eq!(com_reconstruct(&code, x ^ e, &sketch).unwrap(), x);
                }
            }
        }
    }

    #[test]
    fn coset_leaders_have_minimum_weight() {
        for code in [LinearCode::hamming74(), LinearCode::repetition(5).unwrap()] {
            // brute-force check: no word in the coset is lighter
            for s in 0..(1u32 << (code.n() - code.k())) {
                let leader = code.coset_leader(s);
                assert_eq!(syndrome(&code, leader).unwrap(), s);
                for w in 0..(1u32 << code.n()) {
                    if syndrome(&code, w).unwrap() == s {
                        assert!(w.count_ones() >= leader.count_ones());
                    }
                }
            }
        }
    }

    #[test]
    fn uniform_input_zero_leakage_everywhere() {
        for code in [LinearCode::hamming74(), LinearCode::repetition(5).unwrap()] {
            for i in 0..code.n() {
                let mi = marginal_bit_leakage(&code, i, 0.5).unwrap();
                assert!(mi.abs() < 1e-12, "bit {i}: {mi}");
            }
        }
    }

    #[test]
    fn biased_input_leaks_a_little() {
        let code = LinearCode::hamming74();
        let mi = marginal_bit_leakage(&code, 0, 0.3).unwrap();
        assert!(mi > 0.0 && mi < 0.1, "mi={mi}");
        // regression fixture frozen from an independent enumeration oracle
        assert!((mi - 9.322675421579718e-3).abs() < 1e-12, "mi={mi:e}");
    }

    #[test]
    fn leakage_bound_endpoints() {
        assert_eq!(noisy_enrollment_leakage_bound(15, 5, 6, 0.0).unwrap(), 10.0);
        assert!(noisy_enrollment_leakage_bound(15, 5, 6, 0.5).unwrap().abs() < 1e-12);
        // direct evaluation with alpha = (1 - 0.8^6) / 2
        let alpha = 0.5 - 0.5 * 0.8f64.powi(6);
        let expect = 10.0 * (1.0 - binary_entropy_unchecked(alpha));
        let got = noisy_enrollment_leakage_bound(15, 5, 6, 0.1).unwrap();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn leakage_bound_monotone_in_epsilon() {
        let mut prev = f64::INFINITY;
        for i in 0..=50 {
            let eps = 0.5 * i as f64 / 50.0;
            let v = noisy_enrollment_leakage_bound(12, 4, 3, eps).unwrap();
            assert!(v <= prev + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn bound_domain_errors() {
        assert!(noisy_enrollment_leakage_bound(7, 7, 3, 0.1).is_err());
        assert!(noisy_enrollment_leakage_bound(7, 4, 0, 0.1).is_err());
        assert!(noisy_enrollment_leakage_bound(7, 4, 3, 0.6).is_err());
    }

    #[test]
    fn exact_leakage_limits() {
        let code = LinearCode::repetition(5).unwrap();
        // eps = 0: syndrome reveals everything it can
        assert!((exact_noisy_enrollment_leakage(&code, 0.0).unwrap() - 4.0).abs() < 1e-12);
        // eps = 1/2: syndrome of pure noise is uniform
        assert!(exact_noisy_enrollment_leakage(&code, 0.5).unwrap().abs() < 1e-9);
        // exact is never below the closed-form bound
        for &eps in &[0.01, 0.05, 0.1, 0.2, 0.3] {
            let exact = exact_noisy_enrollment_leakage(&code, eps).unwrap();
            let bound = noisy_enrollment_leakage_bound(5, 1, code.row_weight(), eps).unwrap();
            assert!(exact >= bound - 1e-12, "eps={eps}: exact {exact} < bound {bound}");
        }
    }

    #[test]
    fn text_format_roundtrip() {
        let text = "7 4\n1010101\n0110011\n0001111\n";
        let code = LinearCode::from_text(text).unwrap();
        assert_eq!(code.n(), 7);
        assert_eq!(code.k(), 4);
        for i in 0..7 {
            assert_eq!(syndrome(&code, 1 << i).unwrap(), i as u32 + 1);
        }
        assert!(LinearCode::from_text("7 4\n1010101\n").is_err());
        assert!(LinearCode::from_text("7 4\n1010101\n0110011\n000111x\n").is_err());
        // rank-deficient rows rejected
        assert!(LinearCode::from_text("7 4\n1010101\n1010101\n0001111\n").is_err());
    }

    #[test]
    fn length_mismatch_errors() {
        let code = LinearCode::hamming74();
        assert!(matches!(syndrome(&code, 1 << 8), Err(CodeError::LengthMismatch { .. })));
        let sk = Sketch { bits: 0, len: 2 };
        assert!(com_reconstruct(&code, 0, &sk).is_err());
    }
}
