use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::params::MarkovSourceParams;
use crate::sequence::BitSequence;

/// The generator behind every seeded operation: ChaCha8 keyed by
/// `seed_from_u64`, which is stable across platforms and releases.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finaliser, used to derive independent per-chain seeds.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for chain `k` under master seed `master`.
pub fn chain_seed(master: u64, k: u64) -> u64 {
    splitmix64(master.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Draws `n` bits from the symmetric Markov source: a uniform first bit,
/// then each bit repeats its predecessor with probability `gamma`.
pub fn generate_markov_sequence(src: MarkovSourceParams, n: usize, seed: u64) -> BitSequence {
    let mut rng = rng_from_seed(seed);
    markov_bits(src.gamma, n, &mut rng)
}

pub(crate) fn markov_bits<R: Rng>(gamma: f64, n: usize, rng: &mut R) -> BitSequence {
    let mut bits = Vec::with_capacity(n);
    if n > 0 {
        let mut b = u8::from(rng.gen::<f64>() < 0.5);
        bits.push(b);
        for _ in 1..n {
            if rng.gen::<f64>() >= gamma {
                b ^= 1;
            }
            bits.push(b);
        }
    }
    BitSequence::from_bits_unchecked(bits)
}

/// `P(L = r) = gamma^(r-1) (1 - gamma)`.
pub fn geometric_run_pmf(gamma: f64, r: u64) -> Result<f64> {
    MarkovSourceParams::new(gamma)?;
    if r < 1 {
        return Err(Error::Domain {
            name: "r",
            value: r as f64,
            expected: "r >= 1",
        });
    }
    Ok(gamma.powf((r - 1) as f64) * (1.0 - gamma))
}
