//! Plain bit-strings for the delivery simulator.
//!
//! One byte per bit: wasteful but transparent, and the instances this crate
//! simulates are a few hundred bits. XOR pads the shorter operand with
//! trailing zeros, matching how unequal-length subfiles are combined.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString(vec![0; len])
    }

    /// Builds from explicit bits; every entry must be 0 or 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        BitString(bits.to_vec())
    }

    /// Deterministic pseudorandom content; `stream` selects the sequence.
    pub fn pseudorandom(stream: u64, len: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0000_u64 ^ stream);
        BitString((0..len).map(|_| (rng.next_u32() & 1) as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.xor_in_place(other);
        out
    }

    pub fn xor_in_place(&mut self, other: &BitString) {
        if other.0.len() > self.0.len() {
            self.0.resize(other.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    pub fn push_all(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    /// Split into `parts` equal pieces; the length must divide evenly.
    pub fn split_equal(&self, parts: usize) -> Vec<BitString> {
        assert!(parts >= 1);
        assert_eq!(self.0.len() % parts, 0, "uneven split");
        let chunk = self.0.len() / parts;
        self.0
            .chunks(chunk.max(1))
            .map(|c| BitString(c.to_vec()))
            .collect()
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_pads_shorter_operand() {
        let a = BitString(vec![1, 0, 1, 1]);
        let b = BitString(vec![1, 1]);
        assert_eq!(a.xor(&b), BitString(vec![0, 1, 1, 1]));
        assert_eq!(b.xor(&a), BitString(vec![0, 1, 1, 1]));
    }

    #[test]
    fn xor_is_involutive() {
        let a = BitString::pseudorandom(1, 64);
        let b = BitString::pseudorandom(2, 64);
        assert_eq!(a.xor(&b).xor(&b), a);
    }

    #[test]
    fn pseudorandom_is_deterministic() {
        assert_eq!(BitString::pseudorandom(7, 32), BitString::pseudorandom(7, 32));
        assert_ne!(BitString::pseudorandom(7, 32), BitString::pseudorandom(8, 32));
    }

    #[test]
    fn split_round_trips() {
        let a = BitString::pseudorandom(3, 12);
        let parts = a.split_equal(3);
        assert_eq!(parts.len(), 3);
        let mut back = BitString::default();
        for p in &parts {
            back.push_all(p);
        }
        assert_eq!(back, a);
    }
}
