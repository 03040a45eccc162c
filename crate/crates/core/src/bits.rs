//! Classical bit strings indexed by message position.

use std::fmt;
use std::ops::{BitXor, Index};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BitsError {
    #[error("invalid bit character {0:?}")]
    BadChar(char),
    #[error("invalid bit value {0}")]
    BadValue(u8),
    #[error("invalid mask {0:?}")]
    BadMask(String),
    #[error("mask {mask:?} selects positions beyond n = {n}")]
    MaskTooWide { mask: String, n: usize },
}

/// A string of 0/1 values; position 0 is the first message position.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self, BitsError> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(BitsError::BadValue(b));
        }
        Ok(Self(bits))
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(it: I) -> Self {
        Self(it.into_iter().map(u8::from).collect())
    }

    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self((0..n).map(|_| rng.random_range(0..=1u8)).collect())
    }

    /// Parses a hex mask (`0x…`, bit `j` selects position `j`) or `all`.
    pub fn parse_mask(text: &str, n: usize) -> Result<Self, BitsError> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("all") {
            return Ok(Self::ones(n));
        }
        let digits = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .unwrap_or(t);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(BitsError::BadMask(text.to_string()));
        }
        let digits = digits.trim_start_matches('0');
        let mut bits = vec![0u8; n];
        for (k, ch) in digits.chars().rev().enumerate() {
            let nibble = ch.to_digit(16).expect("checked hex") as u8;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let pos = 4 * k + b;
                    if pos >= n {
                        return Err(BitsError::MaskTooWide {
                            mask: text.to_string(),
                            n,
                        });
                    }
                    bits[pos] = 1;
                }
            }
        }
        Ok(Self(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.0.get(i).copied()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    /// Flips the bits selected by `mask` (positions past `mask.len()` untouched).
    pub fn flipped(&self, mask: &BitString) -> Self {
        Self(
            self.0
                .iter()
                .enumerate()
                .map(|(i, &b)| b ^ mask.get(i).unwrap_or(0))
                .collect(),
        )
    }
}

impl Index<usize> for BitString {
    type Output = u8;

    fn index(&self, i: usize) -> &u8 {
        &self.0[i]
    }
}

impl BitXor for &BitString {
    type Output = BitString;

    /// Position-wise XOR; both sides must have equal length.
    fn bitxor(self, rhs: &BitString) -> BitString {
        assert_eq!(self.len(), rhs.len(), "xor of unequal-length bit strings");
        BitString(self.0.iter().zip(&rhs.0).map(|(a, b)| a ^ b).collect())
    }
}

impl FromIterator<u8> for BitString {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        Self(iter.into_iter().map(|b| (b != 0) as u8).collect())
    }
}

impl FromStr for BitString {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(BitsError::BadChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}
