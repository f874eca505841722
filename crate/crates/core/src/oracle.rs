//! Exact laws by exhaustive enumeration over per-bit actions.
//!
//! Enumeration runs over the four actions of each input bit, never over
//! output strings, so every probability is an exact product of action
//! probabilities. Outputs are then keyed and accumulated.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_pattern, Action};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::params::{ChannelParams, MarkovSourceParams};
use crate::sequence::BitSequence;
use crate::source::rng_from_seed;

pub const MAX_LAW_LEN: usize = 12;
pub const MAX_CASCADE_LEN: usize = 10;
pub const MAX_RUN_LEN: usize = 10;
pub const MAX_DECOMPOSITION_LEN: usize = 8;

/// Inputs from this length on are sampled rather than exhausted in the
/// cascade check.
pub const CASCADE_SAMPLE_FROM: usize = 9;
pub const CASCADE_SAMPLE_COUNT: usize = 64;
pub const CASCADE_SAMPLE_SEED: u64 = 0x5EED_CA5C;

/// Output strings packed as `len << 32 | bits`.
fn pack(len: usize, bits: u64) -> u64 {
    ((len as u64) << 32) | bits
}

fn unpack(key: u64) -> BitSequence {
    BitSequence::from_packed(key & 0xFFFF_FFFF, (key >> 32) as usize)
}

/// Exact conditional law of the output given one input.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputLaw {
    probs: BTreeMap<u64, f64>,
}

impl OutputLaw {
    pub fn probability(&self, y: &BitSequence) -> f64 {
        self.probs.get(&pack(y.len(), y.to_packed())).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (BitSequence, f64)> + '_ {
        self.probs.iter().map(|(&k, &p)| (unpack(k), p))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.values().copied().collect::<NeumaierSum>().value()
    }

    pub fn mean_length(&self) -> f64 {
        self.probs
            .iter()
            .map(|(&k, &p)| (k >> 32) as f64 * p)
            .collect::<NeumaierSum>()
            .value()
    }

    /// Largest pointwise difference over the union of supports.
    pub fn max_abs_diff(&self, other: &OutputLaw) -> f64 {
        let mut m: f64 = 0.0;
        for (k, &p) in &self.probs {
            m = m.max((p - other.probs.get(k).copied().unwrap_or(0.0)).abs());
        }
        for (k, &p) in &other.probs {
            if !self.probs.contains_key(k) {
                m = m.max(p.abs());
            }
        }
        m
    }
}

fn check_len(len: usize, limit: usize) -> Result<()> {
    if len > limit {
        Err(Error::TooLarge { len, limit })
    } else {
        Ok(())
    }
}

fn enumerate_into(bits: &[u8], p: &ChannelParams, weight: f64, acc: &mut BTreeMap<u64, f64>) {
    let probs = Action::ALL.map(|a| (a, a.probability(p)));
    let mut stack: Vec<(usize, u64, usize, f64)> = vec![(0, 0, 0, weight)];
    while let Some((pos, ybits, ylen, prob)) = stack.pop() {
        if pos == bits.len() {
            *acc.entry(pack(ylen, ybits)).or_insert(0.0) += prob;
            continue;
        }
        let b = u64::from(bits[pos]);
        // pushed in reverse so that actions are expanded in ALL order
        for &(action, pa) in probs.iter().rev() {
            if pa == 0.0 {
                continue;
            }
            let next = prob * pa;
            let (nb, nl) = match action {
                Action::Deleted => (ybits, ylen),
                Action::Unmodified => ((ybits << 1) | b, ylen + 1),
                Action::Duplicated => ((ybits << 2) | (b << 1) | b, ylen + 2),
                Action::Complementary => ((ybits << 2) | (b << 1) | (b ^ 1), ylen + 2),
            };
            stack.push((pos + 1, nb, nl, next));
        }
    }
}

/// `P(y | x)` for every reachable `y`. Requires `|x| <= 12`.
pub fn enumerate_channel_law(x: &BitSequence, p: &ChannelParams) -> Result<OutputLaw> {
    check_len(x.len(), MAX_LAW_LEN)?;
    let mut probs = BTreeMap::new();
    enumerate_into(x.bits(), p, 1.0, &mut probs);
    Ok(OutputLaw { probs })
}

/// The law of the deletion channel `d` followed by the insertion channel
/// `(i / (1 - d), alpha)`.
pub fn enumerate_cascade_law(x: &BitSequence, p: &ChannelParams) -> Result<OutputLaw> {
    check_len(x.len(), MAX_LAW_LEN)?;
    let first = ChannelParams::deletion(p.d)?;
    let second = ChannelParams::insertion(p.i_prime().min(1.0), p.alpha)?;
    let mut mid = BTreeMap::new();
    enumerate_into(x.bits(), &first, 1.0, &mut mid);
    let mut probs = BTreeMap::new();
    for (key, w) in mid {
        let z = unpack(key);
        enumerate_into(z.bits(), &second, w, &mut probs);
    }
    Ok(OutputLaw { probs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub n: usize,
    pub inputs_checked: usize,
    pub max_abs_diff: f64,
}

/// Largest `|P_direct(y|x) - P_cascade(y|x)|` over inputs of length `n`:
/// all `2^n` of them below length 9, a fixed pseudorandom set of 64 above.
pub fn cascade_equivalence_check(n: usize, p: &ChannelParams) -> Result<CascadeReport> {
    check_len(n, MAX_CASCADE_LEN)?;
    let inputs: Vec<u64> = if n >= CASCADE_SAMPLE_FROM {
        let mut rng = rng_from_seed(CASCADE_SAMPLE_SEED ^ n as u64);
        (0..CASCADE_SAMPLE_COUNT).map(|_| rng.gen::<u64>() & ((1 << n) - 1)).collect()
    } else {
        (0..1u64 << n).collect()
    };
    let diffs = map_inputs(&inputs, |&packed| {
        let x = BitSequence::from_packed(packed, n);
        let direct = enumerate_channel_law(&x, p)?;
        let casc = enumerate_cascade_law(&x, p)?;
        Ok(direct.max_abs_diff(&casc))
    })?;
    Ok(CascadeReport {
        n,
        inputs_checked: inputs.len(),
        max_abs_diff: diffs.into_iter().fold(0.0, f64::max),
    })
}

#[cfg(feature = "parallel")]
fn map_inputs<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> Result<U> + Sync + Send) -> Result<Vec<U>> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_inputs<T, U>(items: &[T], f: impl Fn(&T) -> Result<U>) -> Result<Vec<U>> {
    items.iter().map(f).collect()
}

/// `P(s | r)` tables: `rows[r - 1][s]` for `r = 1..=r_max`, `s = 0..=2r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLawTable {
    pub rows: Vec<Vec<f64>>,
}

impl RunLawTable {
    pub fn get(&self, r: usize, s: usize) -> f64 {
        self.rows
            .get(r.wrapping_sub(1))
            .and_then(|row| row.get(s))
            .copied()
            .unwrap_or(0.0)
    }
}

/// Exact law of the augmented, flipped output run length matching an input
/// run of length `r`.
///
/// The run is placed between two opposite-symbol guard bits that pass
/// unmodified; every action assignment of the run's bits is applied, the
/// output is flipped by `T` and augmented by `S`, and the middle run's
/// length is read off.
pub fn exact_run_law(r_max: usize, p: &ChannelParams) -> Result<RunLawTable> {
    check_len(r_max, MAX_RUN_LEN)?;
    let mut rows = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        let mut x = vec![1u8];
        x.extend(std::iter::repeat(0).take(r));
        x.push(1);
        let x = BitSequence::new(x)?;
        let mut row = vec![NeumaierSum::new(); 2 * r + 1];
        let mut pattern = vec![Action::Unmodified; r + 2];
        let total = 4usize.pow(r as u32);
        for code in 0..total {
            let mut c = code;
            let mut prob = 1.0;
            for slot in pattern.iter_mut().skip(1).take(r) {
                *slot = Action::ALL[c % 4];
                prob *= slot.probability(p);
                c /= 4;
            }
            if prob == 0.0 {
                continue;
            }
            let out = apply_pattern(&x, &pattern)?;
            let aug = out.augmented()?;
            debug_assert_eq!(aug.run_count(), 3);
            row[aug.run_lengths[1]].add(prob);
        }
        rows.push(row.iter().map(NeumaierSum::value).collect());
    }
    Ok(RunLawTable { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub h_x_given_y: f64,
    pub h_xs_given_y: f64,
    pub h_s_given_xy: f64,
    pub h_xts_given_y: f64,
    pub h_ts_given_xy: f64,
    pub h_t_given_y: f64,
    pub h_s_given_ty: f64,
    pub h_x_given_sty: f64,
    pub h_x_given_sytilde: f64,
    /// `|H(X|Y) - [H(X,S|Y) - H(S|X,Y)]|`.
    pub deletion_residual: f64,
    /// `|H(X|Y) - [H(X,T,S|Y) - H(T,S|X,Y)]|`.
    pub first_line_residual: f64,
    /// `|H(X|Y) - [H(T|Y) + H(S|T,Y) + H(X|S,T,Y) - H(T,S|X,Y)]|`.
    pub second_line_residual: f64,
    /// `H(X|S,Ytilde) - H(X|S,T,Y)`, which must be non-negative.
    pub inequality_gap: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Outcome {
    x: u16,
    y: u64,
    t: u32,
    s: u128,
}

/// Projection onto a subset of `(X, Y, T, S, Ytilde)`; excluded
/// coordinates become a sentinel. `T` and `S` are only ever projected
/// together with `Y` or `Ytilde` on one side of the conditioning, so their
/// lengths are implied.
type Key = (u64, u64, u64, u128);

const ABSENT: u64 = u64::MAX;

#[derive(Clone, Copy)]
struct Proj {
    x: bool,
    y: bool,
    t: bool,
    s: bool,
    ytilde: bool,
}

const fn proj(x: bool, y: bool, t: bool, s: bool, ytilde: bool) -> Proj {
    Proj { x, y, t, s, ytilde }
}

impl Proj {
    fn key(self, o: &Outcome) -> Key {
        let ylen = (o.y >> 32) as usize;
        let y = if self.y {
            o.y
        } else if self.ytilde {
            pack(ylen, (o.y & 0xFFFF_FFFF) ^ u64::from(o.t))
        } else {
            ABSENT
        };
        (
            if self.x { u64::from(o.x) } else { ABSENT },
            y,
            if self.t { u64::from(o.t) } else { ABSENT },
            if self.s { o.s } else { u128::MAX },
        )
    }
}

/// `H(A | B) = sum p(a, b) log2(p(b) / p(a, b))` from the outcome law.
fn cond_entropy(joint: &[(Outcome, f64)], a: Proj, b: Proj) -> f64 {
    let mut ab: HashMap<(Key, Key), f64> = HashMap::new();
    let mut bm: HashMap<Key, f64> = HashMap::new();
    for (o, p) in joint {
        let kb = b.key(o);
        *ab.entry((a.key(o), kb)).or_insert(0.0) += p;
        *bm.entry(kb).or_insert(0.0) += p;
    }
    let mut terms: Vec<f64> = ab
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|((_, kb), &p)| p * (bm[kb] / p).log2())
        .collect();
    // fixed summation order regardless of hash iteration
    terms.sort_by(|u, v| u.total_cmp(v));
    terms.into_iter().collect::<NeumaierSum>().value()
}

fn pack_counts(s: &[usize]) -> u128 {
    // at most 2n + 1 <= 17 gaps, each count <= n / 2 + 1 < 16
    s.iter().fold(0u128, |acc, &k| (acc << 4) | k as u128)
}

/// Builds the exact joint law of `(X^n, Y, T, S)` under the Markov source
/// and checks the entropy decompositions behind the deletion and combined
/// bounds.
pub fn exact_decomposition_check(n: usize, p: &ChannelParams, gamma: f64) -> Result<DecompositionReport> {
    check_len(n, MAX_DECOMPOSITION_LEN)?;
    MarkovSourceParams::new(gamma)?;
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            expected: "n >= 1",
        });
    }
    let mut joint: HashMap<Outcome, f64> = HashMap::new();
    let mut pattern = vec![Action::Unmodified; n];
    let actions: Vec<(Action, f64)> = Action::ALL
        .iter()
        .map(|&a| (a, a.probability(p)))
        .filter(|&(_, pa)| pa > 0.0)
        .collect();
    let na = actions.len();
    for xp in 0..1u64 << n {
        let x = BitSequence::from_packed(xp, n);
        let same = x.bits().windows(2).filter(|w| w[0] == w[1]).count() as i32;
        let px = 0.5 * gamma.powi(same) * (1.0 - gamma).powi(n as i32 - 1 - same);
        for code in 0..na.pow(n as u32) {
            let mut c = code;
            let mut prob = px;
            for slot in pattern.iter_mut() {
                let (a, pa) = actions[c % na];
                *slot = a;
                prob *= pa;
                c /= na;
            }
            let out = apply_pattern(&x, &pattern)?;
            let t = out.aux.complementary.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b));
            let o = Outcome {
                x: xp as u16,
                y: pack(out.y.len(), out.y.to_packed()),
                t,
                s: pack_counts(&out.aux.deleted_runs),
            };
            *joint.entry(o).or_insert(0.0) += prob;
        }
    }
    let mut joint: Vec<(Outcome, f64)> = joint.into_iter().collect();
    joint.sort_by_key(|(o, _)| (o.x, o.y, o.t, o.s));

    let pr = proj;

    let h_x_y = cond_entropy(&joint, pr(true, false, false, false, false), pr(false, true, false, false, false));
    let h_xs_y = cond_entropy(&joint, pr(true, false, false, true, false), pr(false, true, false, false, false));
    let h_s_xy = cond_entropy(&joint, pr(false, false, false, true, false), pr(true, true, false, false, false));
    let h_xts_y = cond_entropy(&joint, pr(true, false, true, true, false), pr(false, true, false, false, false));
    let h_ts_xy = cond_entropy(&joint, pr(false, false, true, true, false), pr(true, true, false, false, false));
    let h_t_y = cond_entropy(&joint, pr(false, false, true, false, false), pr(false, true, false, false, false));
    let h_s_ty = cond_entropy(&joint, pr(false, false, false, true, false), pr(false, true, true, false, false));
    let h_x_sty = cond_entropy(&joint, pr(true, false, false, false, false), pr(false, true, true, true, false));
    let h_x_syt = cond_entropy(&joint, pr(true, false, false, false, false), pr(false, false, false, true, true));

    Ok(DecompositionReport {
        n,
        h_x_given_y: h_x_y,
        h_xs_given_y: h_xs_y,
        h_s_given_xy: h_s_xy,
        h_xts_given_y: h_xts_y,
        h_ts_given_xy: h_ts_xy,
        h_t_given_y: h_t_y,
        h_s_given_ty: h_s_ty,
        h_x_given_sty: h_x_sty,
        h_x_given_sytilde: h_x_syt,
        deletion_residual: (h_x_y - (h_xs_y - h_s_xy)).abs(),
        first_line_residual: (h_x_y - (h_xts_y - h_ts_xy)).abs(),
        second_line_residual: (h_x_y - (h_t_y + h_s_ty + h_x_sty - h_ts_xy)).abs(),
        inequality_gap: h_x_syt - h_x_sty,
    })
}
