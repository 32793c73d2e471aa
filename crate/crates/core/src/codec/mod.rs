//! Space-optimal bit encoding of grid vectors.
//!
//! A code word is `d` sign bits (bit `i` set iff `z_i < 0`) followed by the
//! lexicographic rank of `(|z_1|, ..., |z_d|)` among all magnitude sequences
//! with sum at most `s`, written big-endian in exactly
//! `ceil(log2 C(s + d, d))` bits. Bits are packed most-significant first and
//! the final byte is zero-padded.

mod container;
mod enumerative;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::quantizer::{quantize, reconstruct, Delta, GridParams, UnitVector, ZVector};

pub use container::{read_container, write_container, Container};
pub use enumerative::binomial;

/// Lexicographic rank of a magnitude sequence; always below `C(s + d, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompositionIndex(BigUint);

impl CompositionIndex {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }
}

impl From<BigUint> for CompositionIndex {
    fn from(v: BigUint) -> Self {
        CompositionIndex(v)
    }
}

/// Packed code of one vector: exactly [`Codec::code_length`] bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodeWord {
    grid: GridParams,
    bits: Vec<u8>,
    len: usize,
}

impl CodeWord {
    /// Wraps `bytes` (left-aligned, `ceil(len_bits / 8)` bytes) without
    /// validating the contents; [`Codec::decode`] does that.
    pub fn from_bytes(grid: GridParams, bytes: Vec<u8>, len_bits: usize) -> Result<Self> {
        if bytes.len() != len_bits.div_ceil(8) {
            return Err(Error::MalformedCode(format!(
                "{} bytes cannot hold exactly {len_bits} bits",
                bytes.len()
            )));
        }
        Ok(CodeWord {
            grid,
            bits: bytes,
            len: len_bits,
        })
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bits
    }

    pub fn len_bits(&self) -> usize {
        self.len
    }

    fn bit(&self, i: usize) -> bool {
        self.bits[i / 8] & (0x80 >> (i % 8)) != 0
    }
}

struct BitWriter {
    bytes: Vec<u8>,
    pos: usize,
}

impl BitWriter {
    fn with_len(len: usize) -> Self {
        BitWriter {
            bytes: vec![0; len.div_ceil(8)],
            pos: 0,
        }
    }

    fn push(&mut self, bit: bool) {
        if bit {
            self.bytes[self.pos / 8] |= 0x80 >> (self.pos % 8);
        }
        self.pos += 1;
    }

    /// Low `width` bits of `value`, most significant first.
    fn push_uint(&mut self, value: &BigUint, width: usize) {
        for i in (0..width as u64).rev() {
            self.push(value.bit(i));
        }
    }
}

/// `d + ceil(log2 C(s + d, d))` with `s = floor(d / delta + d / 2)`.
pub fn code_length(d: usize, delta: Delta) -> Result<usize> {
    let grid = GridParams::new(d, delta)?;
    Ok(Codec::new(grid).code_length())
}

/// Rank of `parts` under `grid`; see [`Codec::rank`].
pub fn rank_composition(parts: &[u64], grid: &GridParams) -> Result<CompositionIndex> {
    Codec::new(*grid).rank(parts)
}

/// Inverse of [`rank_composition`].
pub fn unrank_composition(index: &CompositionIndex, grid: &GridParams) -> Result<Vec<u64>> {
    Codec::new(*grid).unrank(index)
}

/// Rank of `parts` among all sequences of its length with sum at most
/// `budget`, for budgets not tied to a grid.
pub fn rank_bounded(parts: &[u64], budget: u64) -> Result<BigUint> {
    let sum: u128 = parts.iter().map(|&a| a as u128).sum();
    if sum > budget as u128 {
        return Err(Error::BudgetExceeded {
            sum: sum.min(u64::MAX as u128) as u64,
            budget,
        });
    }
    let total = enumerative::binomial(budget + parts.len() as u64, parts.len() as u64);
    Ok(enumerative::rank(parts, budget, &total))
}

/// Inverse of [`rank_bounded`].
pub fn unrank_bounded(index: &BigUint, len: usize, budget: u64) -> Result<Vec<u64>> {
    let total = enumerative::binomial(budget + len as u64, len as u64);
    if index >= &total {
        return Err(Error::IndexOutOfRange);
    }
    Ok(enumerative::unrank(index, len, budget, &total))
}

/// Encoder/decoder for one grid.
///
/// Holds the composition count `C(s + d, d)`, computed once; all methods
/// take `&self` and the codec is `Sync`.
#[derive(Debug, Clone)]
pub struct Codec {
    grid: GridParams,
    total: BigUint,
    rank_bits: usize,
}

impl Codec {
    pub fn new(grid: GridParams) -> Self {
        let total = enumerative::binomial(grid.s() + grid.d() as u64, grid.d() as u64);
        let rank_bits = enumerative::ceil_log2(&total);
        Codec {
            grid,
            total,
            rank_bits,
        }
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    /// Number of magnitude sequences, `C(s + d, d)`.
    pub fn composition_count(&self) -> &BigUint {
        &self.total
    }

    pub fn code_length(&self) -> usize {
        self.grid.d() + self.rank_bits
    }

    /// Bytes per code when padded to a byte boundary.
    pub fn code_bytes(&self) -> usize {
        self.code_length().div_ceil(8)
    }

    pub fn rank(&self, parts: &[u64]) -> Result<CompositionIndex> {
        if parts.len() != self.grid.d() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.d(),
                got: parts.len(),
            });
        }
        let sum: u128 = parts.iter().map(|&a| a as u128).sum();
        if sum > self.grid.s() as u128 {
            return Err(Error::BudgetExceeded {
                sum: sum.min(u64::MAX as u128) as u64,
                budget: self.grid.s(),
            });
        }
        Ok(CompositionIndex(enumerative::rank(
            parts,
            self.grid.s(),
            &self.total,
        )))
    }

    pub fn unrank(&self, index: &CompositionIndex) -> Result<Vec<u64>> {
        if index.0 >= self.total {
            return Err(Error::IndexOutOfRange);
        }
        Ok(enumerative::unrank(
            &index.0,
            self.grid.d(),
            self.grid.s(),
            &self.total,
        ))
    }

    pub fn encode(&self, z: &ZVector) -> Result<CodeWord> {
        if z.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let magnitudes: Vec<u64> = z.coords().iter().map(|v| v.unsigned_abs()).collect();
        let index = self.rank(&magnitudes)?;
        let mut out = BitWriter::with_len(self.code_length());
        for &v in z.coords() {
            out.push(v < 0);
        }
        out.push_uint(&index.0, self.rank_bits);
        Ok(CodeWord {
            grid: self.grid,
            bits: out.bytes,
            len: self.code_length(),
        })
    }

    pub fn decode(&self, code: &CodeWord) -> Result<ZVector> {
        if code.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        let len = self.code_length();
        if code.len != len || code.bits.len() != len.div_ceil(8) {
            return Err(Error::MalformedCode(format!(
                "expected {len} bits, got {}",
                code.len
            )));
        }
        if (len..code.bits.len() * 8).any(|i| code.bit(i)) {
            return Err(Error::MalformedCode("nonzero padding bits".into()));
        }
        let d = self.grid.d();
        let mut index = BigUint::default();
        for i in d..len {
            index <<= 1u32;
            if code.bit(i) {
                index |= BigUint::from(1u32);
            }
        }
        if index >= self.total {
            return Err(Error::MalformedCode("rank exceeds composition count".into()));
        }
        let magnitudes = enumerative::unrank(&index, d, self.grid.s(), &self.total);
        let mut z = Vec::with_capacity(d);
        for (i, &m) in magnitudes.iter().enumerate() {
            let negative = code.bit(i);
            if negative && m == 0 {
                return Err(Error::MalformedCode(format!(
                    "sign bit set on zero coordinate {i}"
                )));
            }
            let m = i64::try_from(m).map_err(|_| Error::MalformedCode("magnitude overflow".into()))?;
            z.push(if negative { -m } else { m });
        }
        ZVector::new(z, self.grid)
    }

    /// Quantizes and encodes a vector of norm at most `1 + 2^-20`.
    pub fn encode_vector(&self, x: &[f64]) -> Result<CodeWord> {
        self.encode(&quantize(x, &self.grid)?)
    }

    /// Decodes to the reconstructed unit vector.
    pub fn decode_unit(&self, code: &CodeWord) -> Result<UnitVector> {
        reconstruct(&self.decode(code)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codec(d: usize, num: u32, den: u32) -> Codec {
        Codec::new(GridParams::new(d, Delta::new(num, den).unwrap()).unwrap())
    }

    #[test]
    fn code_length_examples() {
        assert_eq!(code_length(1, Delta::new(1, 1).unwrap()).unwrap(), 2);
        assert_eq!(code_length(2, Delta::new(1, 2).unwrap()).unwrap(), 7);
        assert_eq!(code_length(128, Delta::new(1, 10).unwrap()).unwrap(), 751);
        assert_eq!(code_length(128, Delta::new(1, 100).unwrap()).unwrap(), 1161);
        assert_eq!(code_length(784, Delta::new(1, 100).unwrap()).unwrap(), 7129);
    }

    #[test]
    fn smallest_grid_holds_three_values() {
        let c = codec(1, 1, 1);
        let mut seen = std::collections::HashSet::new();
        for v in [-1i64, 0, 1] {
            let z = ZVector::new(vec![v], *c.grid()).unwrap();
            let w = c.encode(&z).unwrap();
            assert_eq!(w.len_bits(), 2);
            assert_eq!(c.decode(&w).unwrap(), z);
            seen.insert(w.bytes().to_vec());
        }
        assert_eq!(seen.len(), 3);
    }

    #[test]
    fn sign_and_rank_layout() {
        let c = codec(2, 1, 2);
        assert_eq!(c.grid().s(), 5);
        let w = c.encode(&ZVector::new(vec![-1, 2], *c.grid()).unwrap()).unwrap();
        // (1, 2) follows the six sequences starting with 0 and (1,0), (1,1).
        let rank = 6 + 2;
        let expected = (0b10u32 << 5) | rank;
        assert_eq!(w.bytes(), &[(expected << 1) as u8]);

        let zero = c.encode(&ZVector::new(vec![0, 0], *c.grid()).unwrap()).unwrap();
        assert_eq!(zero.bytes(), &[0]);
    }

    #[test]
    fn decode_rejects_malformed() {
        let c = codec(2, 1, 2);
        let g = *c.grid();
        // rank field 31 >= 21
        let w = CodeWord::from_bytes(g, vec![0b0011_1110], 7).unwrap();
        assert!(matches!(c.decode(&w), Err(Error::MalformedCode(_))));
        // padding bit set
        let w = CodeWord::from_bytes(g, vec![0b0000_0001], 7).unwrap();
        assert!(matches!(c.decode(&w), Err(Error::MalformedCode(_))));
        // sign on a zero coordinate: signs "10", rank 0 = (0, 0)
        let w = CodeWord::from_bytes(g, vec![0b1000_0000], 7).unwrap();
        assert!(matches!(c.decode(&w), Err(Error::MalformedCode(_))));
        assert!(CodeWord::from_bytes(g, vec![0, 0], 7).is_err());
        let other = codec(2, 1, 3);
        let w = CodeWord::from_bytes(g, vec![0], 7).unwrap();
        assert!(matches!(other.decode(&w), Err(Error::GridMismatch)));
    }

    #[test]
    fn rank_errors() {
        let c = codec(2, 1, 2);
        assert!(matches!(c.rank(&[3, 3]), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(c.rank(&[1]), Err(Error::DimensionMismatch { .. })));
        let too_big = CompositionIndex::from(BigUint::from(21u32));
        assert!(matches!(c.unrank(&too_big), Err(Error::IndexOutOfRange)));
        let last = CompositionIndex::from(BigUint::from(20u32));
        assert_eq!(c.unrank(&last).unwrap(), vec![5, 0]);
    }
}
