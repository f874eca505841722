//! Channel realisations with ground-truth bookkeeping.
//!
//! Every realisation is driven by an explicit per-bit [`EditPattern`]; the
//! auxiliary sequences `I`, `T` and `S` are read off the pattern rather than
//! inferred from `(x, y)`, which would be ambiguous.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ChannelParams;
use crate::sequence::{BitSequence, RunSequence};
use crate::source::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Deleted,
    /// Bit transmitted and followed by a copy of itself.
    Duplicated,
    /// Bit transmitted and followed by its complement.
    Complementary,
    Unmodified,
}

impl Action {
    pub const ALL: [Action; 4] = [
        Action::Deleted,
        Action::Duplicated,
        Action::Complementary,
        Action::Unmodified,
    ];

    pub fn probability(self, p: &ChannelParams) -> f64 {
        match self {
            Action::Deleted => p.d,
            Action::Duplicated => p.p_duplicated(),
            Action::Complementary => p.p_complementary(),
            Action::Unmodified => p.p_unmodified(),
        }
    }

    pub fn is_insertion(self) -> bool {
        matches!(self, Action::Duplicated | Action::Complementary)
    }

    pub(crate) fn sample<R: Rng>(p: &ChannelParams, rng: &mut R) -> Action {
        let u: f64 = rng.gen();
        if u < p.d {
            Action::Deleted
        } else if u < p.d + p.p_duplicated() {
            Action::Duplicated
        } else if u < p.d + p.i {
            Action::Complementary
        } else {
            Action::Unmodified
        }
    }
}

pub type EditPattern = Vec<Action>;

/// Side information attached to one realisation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxSequences {
    /// `inserted[j] = 1` iff `y[j]` is an inserted bit.
    pub inserted: Vec<u8>,
    /// `complementary[j] = 1` iff `y[j]` is a complementary insertion.
    pub complementary: Vec<u8>,
    /// `deleted_runs[j]` counts input runs lost entirely between `y[j-1]`
    /// and `y[j]`; entry 0 precedes the first output bit and the last entry
    /// follows the final one. Length is `|y| + 1`.
    pub deleted_runs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelOutput {
    pub y: BitSequence,
    pub aux: AuxSequences,
    pub pattern: EditPattern,
}

impl ChannelOutput {
    pub fn deletions(&self) -> usize {
        self.pattern.iter().filter(|&&a| a == Action::Deleted).count()
    }

    pub fn insertions(&self) -> usize {
        self.pattern.iter().filter(|a| a.is_insertion()).count()
    }

    /// The output with complementary insertions flipped back.
    pub fn flipped(&self) -> BitSequence {
        flip_bits(self.y.bits(), &self.aux.complementary)
    }

    /// The flipped output augmented with zero-length markers for deleted runs.
    pub fn augmented(&self) -> Result<RunSequence> {
        augment_with_deleted_runs(&self.flipped(), &self.aux.deleted_runs)
    }
}

/// Deterministically applies `pattern` to `x`.
pub fn apply_pattern(x: &BitSequence, pattern: &[Action]) -> Result<ChannelOutput> {
    if pattern.len() != x.len() {
        return Err(Error::LengthMismatch {
            what: "edit pattern",
            got: pattern.len(),
            expected: x.len(),
        });
    }
    let bits = x.bits();
    let mut y = Vec::with_capacity(bits.len() + bits.len() / 4);
    let mut inserted = Vec::with_capacity(y.capacity());
    let mut complementary = Vec::with_capacity(y.capacity());
    let mut deleted_runs = Vec::with_capacity(y.capacity() + 1);

    let mut pending = 0usize;
    let mut run_survived = false;
    for (k, (&b, &action)) in bits.iter().zip(pattern).enumerate() {
        if k > 0 && bits[k - 1] != b {
            if !run_survived {
                pending += 1;
            }
            run_survived = false;
        }
        if action == Action::Deleted {
            continue;
        }
        run_survived = true;
        y.push(b);
        inserted.push(0);
        complementary.push(0);
        deleted_runs.push(pending);
        pending = 0;
        match action {
            Action::Duplicated => {
                y.push(b);
                inserted.push(1);
                complementary.push(0);
                deleted_runs.push(0);
            }
            Action::Complementary => {
                y.push(b ^ 1);
                inserted.push(1);
                complementary.push(1);
                deleted_runs.push(0);
            }
            _ => {}
        }
    }
    if !bits.is_empty() && !run_survived {
        pending += 1;
    }
    deleted_runs.push(pending);

    Ok(ChannelOutput {
        y: BitSequence::from_bits_unchecked(y),
        aux: AuxSequences {
            inserted,
            complementary,
            deleted_runs,
        },
        pattern: pattern.to_vec(),
    })
}

pub fn sample_pattern<R: Rng>(n: usize, p: &ChannelParams, rng: &mut R) -> EditPattern {
    (0..n).map(|_| Action::sample(p, rng)).collect()
}

/// One use of the deletion+insertion channel on `x`.
pub fn apply_delins(x: &BitSequence, p: &ChannelParams, seed: u64) -> ChannelOutput {
    let mut rng = rng_from_seed(seed);
    let pattern = sample_pattern(x.len(), p, &mut rng);
    apply_pattern(x, &pattern).expect("pattern length matches input")
}

pub fn apply_deletion(x: &BitSequence, d: f64, seed: u64) -> Result<ChannelOutput> {
    Ok(apply_delins(x, &ChannelParams::deletion(d)?, seed))
}

pub fn apply_insertion(x: &BitSequence, i: f64, alpha: f64, seed: u64) -> Result<ChannelOutput> {
    Ok(apply_delins(x, &ChannelParams::insertion(i, alpha)?, seed))
}

/// A deletion channel with parameter `d` followed by an insertion channel
/// with parameters `(i / (1 - d), alpha)`.
///
/// The returned pattern is indexed by the original input positions.
pub fn apply_cascade(x: &BitSequence, p: &ChannelParams, seed: u64) -> Result<ChannelOutput> {
    if p.d >= 1.0 {
        return Err(Error::Domain {
            name: "d",
            value: p.d,
            expected: "[0, 1) for the cascade",
        });
    }
    let mut rng = rng_from_seed(seed);
    let first = ChannelParams::deletion(p.d)?;
    let second = ChannelParams::insertion(p.i_prime().min(1.0), p.alpha)?;

    let stage1 = sample_pattern(x.len(), &first, &mut rng);
    let mid = apply_pattern(x, &stage1)?;
    let stage2 = sample_pattern(mid.y.len(), &second, &mut rng);
    let out = apply_pattern(&mid.y, &stage2)?;

    let mut survivors = stage2.into_iter();
    let composite: EditPattern = stage1
        .into_iter()
        .map(|a| match a {
            Action::Deleted => Action::Deleted,
            _ => survivors.next().expect("one second-stage action per survivor"),
        })
        .collect();
    let result = apply_pattern(x, &composite)?;
    debug_assert_eq!(result.y, out.y);
    Ok(result)
}

fn flip_bits(y: &[u8], t: &[u8]) -> BitSequence {
    BitSequence::from_bits_unchecked(y.iter().zip(t).map(|(&b, &f)| b ^ (f & 1)).collect())
}

/// Flips `y[j]` wherever `t[j] = 1`.
pub fn flip_complementary(y: &BitSequence, t: &[u8]) -> Result<BitSequence> {
    if t.len() != y.len() {
        return Err(Error::LengthMismatch {
            what: "complementary-insertion sequence",
            got: t.len(),
            expected: y.len(),
        });
    }
    if let Some(&b) = t.iter().find(|&&b| b > 1) {
        return Err(Error::InvalidBit(b));
    }
    Ok(flip_bits(y.bits(), t))
}

/// Builds the augmented run sequence of `y` with `s[j]` zero-length runs
/// placed before `y[j]` (and `s[|y|]` after the last bit).
///
/// Between equal neighbours the count must be zero or odd, between unequal
/// neighbours it must be even, since runs alternate in symbol.
pub fn augment_with_deleted_runs(y: &BitSequence, s: &[usize]) -> Result<RunSequence> {
    if s.len() != y.len() + 1 {
        return Err(Error::LengthMismatch {
            what: "deleted-run sequence",
            got: s.len(),
            expected: y.len() + 1,
        });
    }
    let bits = y.bits();
    let Some(&b0) = bits.first() else {
        return Ok(RunSequence {
            first_bit: 0,
            run_lengths: vec![0; s[0]],
        });
    };

    let mut lengths = vec![0usize; s[0]];
    let first_bit = b0 ^ (s[0] % 2) as u8;
    let mut current = 1usize;
    for j in 1..bits.len() {
        let k = s[j];
        let same = bits[j] == bits[j - 1];
        if k == 0 {
            if same {
                current += 1;
            } else {
                lengths.push(current);
                current = 1;
            }
            continue;
        }
        if same == (k % 2 == 0) {
            return Err(Error::Parity { gap: j, count: k });
        }
        lengths.push(current);
        lengths.extend(std::iter::repeat(0).take(k));
        current = 1;
    }
    lengths.push(current);
    lengths.extend(std::iter::repeat(0).take(s[bits.len()]));
    Ok(RunSequence {
        first_bit,
        run_lengths: lengths,
    })
}

/// Counts violations of the structural constraints on a realisation:
/// `T <= I` pointwise, no two consecutive insertions, `S` parity, and the
/// output-length identity.
pub fn support_violations(x: &BitSequence, out: &ChannelOutput) -> usize {
    let aux = &out.aux;
    let mut bad = 0;
    bad += aux
        .inserted
        .iter()
        .zip(&aux.complementary)
        .filter(|(&i, &t)| t > i)
        .count();
    bad += aux.inserted.windows(2).filter(|w| w[0] == 1 && w[1] == 1).count();
    if out.augmented().is_err() {
        bad += 1;
    }
    if out.y.len() + out.deletions() != x.len() + out.insertions() {
        bad += 1;
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::to_runs;
    use Action::*;

    fn seq(s: &str) -> BitSequence {
        s.parse().unwrap()
    }

    fn keep_except(n: usize, deleted: &[usize]) -> EditPattern {
        (0..n)
            .map(|k| if deleted.contains(&k) { Deleted } else { Unmodified })
            .collect()
    }

    #[test]
    fn trailing_deleted_runs_go_to_last_gap() {
        let x = seq("000111000");
        let out = apply_pattern(&x, &keep_except(9, &[3, 4, 5, 6, 7, 8])).unwrap();
        assert_eq!(out.y, seq("000"));
        assert_eq!(out.aux.deleted_runs, vec![0, 0, 0, 2]);
        let aug = out.augmented().unwrap();
        assert_eq!(aug.run_lengths, vec![3, 0, 0]);
    }

    #[test]
    fn deletion_keeping_some_bits() {
        // keep 1-indexed bits 1, 2, 4, 7
        let x = seq("000111000");
        let out = apply_pattern(&x, &keep_except(9, &[2, 4, 5, 7, 8])).unwrap();
        assert_eq!(out.y, seq("0010"));
        assert_eq!(out.aux.deleted_runs, vec![0; 5]);
        assert_eq!(out.augmented().unwrap().run_lengths, vec![2, 1, 1]);
    }

    #[test]
    fn insertion_example_and_flip() {
        // 0 0 0 1 1 1 0 0 0 -> 00 1 0 1 1 1 0 0 0 0 0 (two complementary insertions, one duplication)
        let x = seq("000111000");
        let pattern = vec![
            Unmodified,
            Complementary,
            Unmodified,
            Unmodified,
            Unmodified,
            Complementary,
            Unmodified,
            Duplicated,
            Unmodified,
        ];
        let out = apply_pattern(&x, &pattern).unwrap();
        assert_eq!(out.y, seq("001011100000"));
        assert_eq!(out.aux.complementary, vec![0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0]);
        assert_eq!(out.aux.inserted, vec![0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 1, 0]);
        let flipped = flip_complementary(&out.y, &out.aux.complementary).unwrap();
        assert_eq!(flipped, seq("000011110000"));
        assert_eq!(flipped.run_count(), x.run_count());
    }

    #[test]
    fn identity_channel() {
        let x = seq("0110100");
        let p = ChannelParams::new(0.0, 0.0, 0.5).unwrap();
        let out = apply_delins(&x, &p, 4);
        assert_eq!(out.y, x);
        assert!(out.aux.inserted.iter().all(|&b| b == 0));
        assert!(out.aux.deleted_runs.iter().all(|&b| b == 0));
    }

    #[test]
    fn everything_deleted() {
        let x = seq("0011101");
        let out = apply_pattern(&x, &[Deleted; 7]).unwrap();
        assert!(out.y.is_empty());
        assert_eq!(out.aux.deleted_runs, vec![4]);
        assert_eq!(out.augmented().unwrap().run_lengths, vec![0; 4]);
    }

    #[test]
    fn augmentation_parity() {
        let y = seq("00");
        assert_eq!(augment_with_deleted_runs(&y, &[0, 1, 0]).unwrap().run_lengths, vec![1, 0, 1]);
        assert!(matches!(
            augment_with_deleted_runs(&y, &[0, 2, 0]),
            Err(Error::Parity { gap: 1, count: 2 })
        ));
        let y = seq("01");
        assert!(augment_with_deleted_runs(&y, &[0, 1, 0]).is_err());
        let aug = augment_with_deleted_runs(&y, &[1, 2, 0]).unwrap();
        assert_eq!(aug.first_bit, 1);
        assert_eq!(aug.run_lengths, vec![0, 1, 0, 0, 1]);
        assert_eq!(augment_with_deleted_runs(&y, &[0, 0, 0]).unwrap(), to_runs(&y));
        assert!(augment_with_deleted_runs(&y, &[0, 0]).is_err());
    }

    #[test]
    fn sticky_channel_keeps_run_count() {
        let x = seq("0011010001110");
        for seed in 0..50 {
            let out = apply_insertion(&x, 0.4, 1.0, seed).unwrap();
            assert_eq!(out.y.run_count(), x.run_count());
        }
    }

    #[test]
    fn d_one_rejected() {
        assert!(apply_deletion(&seq("01"), 1.0, 0).is_err());
    }

    #[test]
    fn cascade_matches_composite_pattern() {
        let x = seq("0001101110010");
        let p = ChannelParams::new(0.2, 0.1, 0.7).unwrap();
        for seed in 0..200 {
            let out = apply_cascade(&x, &p, seed).unwrap();
            let again = apply_pattern(&x, &out.pattern).unwrap();
            assert_eq!(out, again);
            assert_eq!(support_violations(&x, &out), 0);
        }
    }

    #[test]
    fn flip_length_mismatch() {
        assert!(flip_complementary(&seq("010"), &[0, 1]).is_err());
    }
}
