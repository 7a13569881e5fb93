//! Bit strings and BB84 basis strings.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input_err, Error, Result};

/// A fixed-length string of classical bits. Index 0 is the leftmost character
/// of the textual form and corresponds to qubit 0.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![true; len])
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_index(value: usize, len: usize) -> Self {
        Self((0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1).collect())
    }

    /// Inverse of [`BitString::from_index`].
    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self((0..len).map(|_| rng.gen::<bool>()).collect())
    }

    /// Every string of length `len`, in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        (0..1usize << len).map(move |v| BitString::from_index(v, len))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.0[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn parity(&self) -> bool {
        self.0.iter().fold(false, |acc, &b| acc ^ b)
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return input_err(format!("xor of lengths {} and {}", self.len(), other.len()));
        }
        Ok(BitString(self.iter().zip(other.iter()).map(|(a, b)| a ^ b).collect()))
    }

    /// Sub-string at the given positions, in order.
    pub fn select(&self, positions: &[usize]) -> BitString {
        BitString(positions.iter().map(|&i| self.0[i]).collect())
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        BitString(bits)
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    /// Pack most-significant-first into bytes, zero padded on the right.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len().div_ceil(8)];
        for (i, &b) in self.0.iter().enumerate() {
            if b {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    /// Inverse of [`BitString::to_packed_bytes`]; padding bits must be zero.
    pub fn from_packed_bytes(bytes: &[u8], len: usize) -> Result<BitString> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Format(format!(
                "{} bits need {} bytes, got {}",
                len,
                len.div_ceil(8),
                bytes.len()
            )));
        }
        let bits: Vec<bool> = (0..len).map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0).collect();
        if !len.is_multiple_of(8) && bytes[len / 8] & (0xffu8 >> (len % 8)) != 0 {
            return Err(Error::Format("non-zero padding bits".into()));
        }
        Ok(BitString(bits))
    }
}

impl Index<usize> for BitString {
    type Output = bool;
    fn index(&self, i: usize) -> &bool {
        &self.0[i]
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitString(iter.into_iter().collect())
    }
}

impl FromStr for BitString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => input_err(format!("'{other}' is not a bit")),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Per-qubit basis choice: `false` is the computational basis, `true` the
/// Hadamard basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct BasisString(BitString);

impl BasisString {
    pub fn new(bits: BitString) -> Self {
        Self(bits)
    }

    pub fn computational(len: usize) -> Self {
        Self(BitString::zeros(len))
    }

    pub fn hadamard(len: usize) -> Self {
        Self(BitString::ones(len))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self(BitString::random(len, rng))
    }

    pub fn all(len: usize) -> impl Iterator<Item = BasisString> {
        BitString::all(len).map(BasisString)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_hadamard(&self, i: usize) -> bool {
        self.0.get(i)
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    /// Positions encoded in the computational basis (θ_i = 0).
    pub fn computational_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.0.get(i)).collect()
    }

    /// Positions encoded in the Hadamard basis (θ_i = 1).
    pub fn hadamard_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0.get(i)).collect()
    }

    /// XOR of `x` over the computational positions of this basis string.
    pub fn masked_parity(&self, x: &BitString) -> bool {
        self.computational_positions().into_iter().fold(false, |acc, i| acc ^ x.get(i))
    }
}

impl From<BitString> for BasisString {
    fn from(bits: BitString) -> Self {
        Self(bits)
    }
}

impl FromStr for BasisString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(BasisString)
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasisString({})", self.0)
    }
}

/// Relative Hamming distance. Empty strings are at distance 0.
pub fn relative_distance(a: &BitString, b: &BitString) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let diff = a.iter().zip(b.iter()).filter(|(x, y)| x != y).count();
    diff as f64 / a.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn index_round_trip_is_big_endian() {
        let b = BitString::from_index(0b0110, 4);
        assert_eq!(b.to_string(), "0110");
        assert_eq!(b.to_index(), 6);
    }

    #[test]
    fn masked_parity_uses_computational_positions() {
        let x: BitString = "1011".parse().unwrap();
        let theta: BasisString = "0101".parse().unwrap();
        assert_eq!(theta.computational_positions(), vec![0, 2]);
        assert!(!theta.masked_parity(&x));
        assert!(!BasisString::hadamard(4).masked_parity(&x));
    }

    #[test]
    fn packed_bytes_reject_dirty_padding() {
        assert!(BitString::from_packed_bytes(&[0b1010_0001], 3).is_err());
        assert!(BitString::from_packed_bytes(&[0b1010_0000], 3).is_ok());
        assert!(BitString::from_packed_bytes(&[0, 0], 3).is_err());
    }

    #[test]
    fn parse_rejects_non_bits() {
        assert!("01a".parse::<BitString>().is_err());
    }

    proptest! {
        #[test]
        fn packing_round_trips(bits in proptest::collection::vec(any::<bool>(), 0..40)) {
            let s = BitString::new(bits);
            let packed = s.to_packed_bytes();
            prop_assert_eq!(BitString::from_packed_bytes(&packed, s.len()).unwrap(), s);
        }
    }
}
