use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite binary string. May be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BitSequence {
    bits: Vec<u8>,
}

impl BitSequence {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidBit(b));
        }
        Ok(Self { bits })
    }

    /// Caller guarantees every entry is 0 or 1.
    pub(crate) fn from_bits_unchecked(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self { bits }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The `len` low-order bits of `packed`, most significant first.
    pub fn from_packed(packed: u64, len: usize) -> Self {
        let bits = (0..len).map(|k| ((packed >> (len - 1 - k)) & 1) as u8).collect();
        Self { bits }
    }

    pub fn to_packed(&self) -> u64 {
        assert!(self.bits.len() <= 64, "sequence too long to pack");
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    /// Number of maximal runs of identical symbols.
    pub fn run_count(&self) -> usize {
        if self.bits.is_empty() {
            0
        } else {
            1 + self.bits.windows(2).filter(|w| w[0] != w[1]).count()
        }
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl FromStr for BitSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .bytes()
            .filter(|c| !c.is_ascii_whitespace())
            .map(|c| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                other => Err(Error::InvalidBit(other)),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { bits })
    }
}

impl TryFrom<String> for BitSequence {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BitSequence> for String {
    fn from(b: BitSequence) -> String {
        b.to_string()
    }
}

/// Run-length view of a binary sequence.
///
/// Lengths of zero only appear in augmented outputs, where they mark input
/// runs that were deleted entirely.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSequence {
    pub first_bit: u8,
    pub run_lengths: Vec<usize>,
}

impl RunSequence {
    pub fn new(first_bit: u8, run_lengths: Vec<usize>) -> Result<Self> {
        if first_bit > 1 {
            return Err(Error::InvalidBit(first_bit));
        }
        Ok(Self {
            first_bit,
            run_lengths,
        })
    }

    pub fn run_count(&self) -> usize {
        self.run_lengths.len()
    }

    pub fn total_length(&self) -> usize {
        self.run_lengths.iter().sum()
    }

    /// Symbol carried by run `k`; runs alternate starting from `first_bit`.
    pub fn symbol_of(&self, k: usize) -> u8 {
        self.first_bit ^ (k % 2) as u8
    }
}

pub fn to_runs(x: &BitSequence) -> RunSequence {
    let bits = x.bits();
    let Some(&first_bit) = bits.first() else {
        return RunSequence::default();
    };
    let mut run_lengths = Vec::new();
    let mut len = 1usize;
    for w in bits.windows(2) {
        if w[0] == w[1] {
            len += 1;
        } else {
            run_lengths.push(len);
            len = 1;
        }
    }
    run_lengths.push(len);
    RunSequence {
        first_bit,
        run_lengths,
    }
}

pub fn from_runs(r: &RunSequence) -> Result<BitSequence> {
    if r.first_bit > 1 {
        return Err(Error::InvalidBit(r.first_bit));
    }
    if let Some(index) = r.run_lengths.iter().position(|&l| l == 0) {
        return Err(Error::ZeroRun { index });
    }
    let mut bits = Vec::with_capacity(r.total_length());
    for (k, &len) in r.run_lengths.iter().enumerate() {
        bits.extend(std::iter::repeat(r.symbol_of(k)).take(len));
    }
    Ok(BitSequence::from_bits_unchecked(bits))
}
