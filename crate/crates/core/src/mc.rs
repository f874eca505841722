//! Monte Carlo estimates of the limiting conditional entropies.
//!
//! Each estimator simulates long channel realisations, tabulates
//! `(context, target)` pairs after a burn-in, and returns the plug-in
//! conditional entropy. Standard errors come from a block bootstrap over
//! contiguous blocks of the pair stream.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::IyDistribution;
use crate::channel::{apply_pattern, sample_pattern, support_violations, ChannelOutput};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::params::{ChannelParams, MarkovSourceParams};
use crate::sequence::BitSequence;
use crate::source::{chain_seed, markov_bits, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Output positions tabulated, summed over chains.
    pub steps: usize,
    /// Output positions discarded at the start of each chain.
    pub burn_in: usize,
    pub seed: u64,
    pub blocks: usize,
    pub bootstrap_reps: usize,
    /// Contexts seen fewer times than this are pooled.
    pub min_context: u64,
    pub chains: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            steps: 1_000_000,
            burn_in: 1_000,
            seed: 7,
            blocks: 50,
            bootstrap_reps: 200,
            min_context: 30,
            chains: 1,
        }
    }
}

impl McConfig {
    pub fn with_steps(steps: usize, seed: u64) -> Self {
        Self {
            steps,
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.steps < self.blocks.max(1) || self.chains == 0 || self.blocks == 0 {
            return Err(Error::Config(format!(
                "need steps >= blocks > 0 and chains > 0 (steps {}, blocks {}, chains {})",
                self.steps, self.blocks, self.chains
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    /// Bound on the bias from pooling rare contexts plus the first-order
    /// plug-in bias.
    pub bias_budget: f64,
    pub samples: usize,
    /// Structural-constraint violations seen in the simulated chains.
    pub violations: usize,
}

type Table = BTreeMap<(u64, u64), u64>;

fn plug_in(table: &Table, min_context: u64) -> (f64, f64) {
    let mut ctx_totals: BTreeMap<u64, u64> = BTreeMap::new();
    for (&(c, _), &n) in table {
        *ctx_totals.entry(c).or_insert(0) += n;
    }
    let total: u64 = ctx_totals.values().sum();
    if total == 0 {
        return (0.0, 0.0);
    }
    const POOLED: u64 = u64::MAX;
    let mut merged: Table = BTreeMap::new();
    for (&(c, t), &n) in table {
        let c = if ctx_totals[&c] < min_context { POOLED } else { c };
        *merged.entry((c, t)).or_insert(0) += n;
    }
    let mut totals: BTreeMap<u64, u64> = BTreeMap::new();
    for (&(c, _), &n) in &merged {
        *totals.entry(c).or_insert(0) += n;
    }
    let nf = total as f64;
    let h = merged
        .iter()
        .map(|(&(c, _), &n)| n as f64 / nf * (totals[&c] as f64 / n as f64).log2())
        .collect::<NeumaierSum>()
        .value();

    let pooled_n = totals.get(&POOLED).copied().unwrap_or(0);
    let pooled_targets = merged.keys().filter(|(c, _)| *c == POOLED).count();
    let pooled_bias = pooled_n as f64 / nf * (pooled_targets.max(2) as f64).log2();
    let miller_madow = (merged.len() - totals.len()) as f64 / (2.0 * nf * std::f64::consts::LN_2);
    (h, pooled_bias + miller_madow)
}

fn estimate_from_blocks(blocks: &[Table], cfg: &McConfig, violations: usize) -> Estimate {
    let mut all = Table::new();
    for b in blocks {
        for (&k, &n) in b {
            *all.entry(k).or_insert(0) += n;
        }
    }
    let samples = all.values().sum::<u64>() as usize;
    let (value, bias_budget) = plug_in(&all, cfg.min_context);

    let mut rng = rng_from_seed(cfg.seed ^ 0xB007_57A9);
    let mut reps = Vec::with_capacity(cfg.bootstrap_reps);
    for _ in 0..cfg.bootstrap_reps {
        let mut t = Table::new();
        for _ in 0..blocks.len() {
            let b = &blocks[rng.gen_range(0..blocks.len())];
            for (&k, &n) in b {
                *t.entry(k).or_insert(0) += n;
            }
        }
        reps.push(plug_in(&t, cfg.min_context).0);
    }
    let std_error = if reps.len() > 1 {
        let m = reps.iter().sum::<f64>() / reps.len() as f64;
        (reps.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (reps.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Estimate {
        value,
        std_error,
        bias_budget,
        samples,
        violations,
    }
}

/// One simulated realisation with at least `min_len` output bits.
fn simulate(p: &ChannelParams, gamma: f64, min_len: usize, seed: u64) -> (BitSequence, ChannelOutput) {
    let rate = (1.0 - p.d + p.i).max(1e-3);
    let mut n = ((min_len as f64 / rate) * 1.05).ceil() as usize + 1000;
    let mut attempt = 0u64;
    loop {
        let mut rng = rng_from_seed(seed.wrapping_add(attempt));
        let x = markov_bits(gamma, n, &mut rng);
        let pattern = sample_pattern(n, p, &mut rng);
        let out = apply_pattern(&x, &pattern).expect("pattern matches input");
        if out.y.len() >= min_len {
            return (x, out);
        }
        n *= 2;
        attempt += 1;
    }
}

/// Per-chain step counts and seeds.
fn chain_plan(cfg: &McConfig) -> Vec<(usize, u64)> {
    let base = cfg.steps / cfg.chains;
    let extra = cfg.steps % cfg.chains;
    (0..cfg.chains)
        .map(|k| (base + usize::from(k < extra), chain_seed(cfg.seed, k as u64)))
        .collect()
}

#[cfg(feature = "parallel")]
fn run_chains<T: Send>(plan: &[(usize, u64)], f: impl Fn(usize, u64) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    plan.par_iter().map(|&(s, seed)| f(s, seed)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_chains<T>(plan: &[(usize, u64)], f: impl Fn(usize, u64) -> T) -> Vec<T> {
    plan.iter().map(|&(s, seed)| f(s, seed)).collect()
}

/// Runs the chains and cuts each chain's pair stream into contiguous blocks.
///
/// `pair(out, j)` yields the `(context, target)` pair at output position `j`;
/// positions start after the burn-in and at least at `lag`.
fn tabulate(
    p: &ChannelParams,
    gamma: f64,
    cfg: &McConfig,
    lag: usize,
    pair: impl Fn(&ChannelOutput, usize) -> (u64, u64) + Sync + Send,
) -> Result<Estimate> {
    cfg.validate()?;
    MarkovSourceParams::new(gamma)?;
    let plan = chain_plan(cfg);
    let blocks_per_chain = (cfg.blocks / cfg.chains).max(1);
    let per_chain = run_chains(&plan, |steps, seed| {
        let start = cfg.burn_in.max(lag);
        let (x, out) = simulate(p, gamma, start + steps + 1, seed);
        let violations = support_violations(&x, &out);
        let mut blocks = vec![Table::new(); blocks_per_chain];
        for s in 0..steps {
            let b = s * blocks_per_chain / steps.max(1);
            *blocks[b].entry(pair(&out, start + s)).or_insert(0) += 1;
        }
        (blocks, violations)
    });
    let violations = per_chain.iter().map(|(_, v)| v).sum();
    let blocks: Vec<Table> = per_chain.into_iter().flat_map(|(b, _)| b).collect();
    Ok(estimate_from_blocks(&blocks, cfg, violations))
}

fn bit(v: u8) -> u64 {
    u64::from(v)
}

/// Plug-in estimate of `H(I_j | I_{j-1}, Y_j, Y_{j-1}, Y_{j-2})`.
pub fn estimate_hi(i: f64, alpha: f64, gamma: f64, cfg: &McConfig) -> Result<Estimate> {
    let p = ChannelParams::insertion(i, alpha)?;
    tabulate(&p, gamma, cfg, 2, |out, j| {
        let y = out.y.bits();
        let ii = &out.aux.inserted;
        let ctx = bit(ii[j - 1]) << 3 | bit(y[j]) << 2 | bit(y[j - 1]) << 1 | bit(y[j - 2]);
        (ctx, bit(ii[j]))
    })
}

/// Plug-in estimate of `H(T_j | T_{j-1}, Y_j, Y_{j-1})`.
pub fn estimate_ht(i: f64, alpha: f64, gamma: f64, cfg: &McConfig) -> Result<Estimate> {
    let p = ChannelParams::insertion(i, alpha)?;
    tabulate(&p, gamma, cfg, 1, |out, j| {
        let y = out.y.bits();
        let t = &out.aux.complementary;
        (bit(t[j - 1]) << 2 | bit(y[j]) << 1 | bit(y[j - 1]), bit(t[j]))
    })
}

/// Plug-in estimate of `H(S_j | Y_{j-1}, Y_j)` on the deletion channel.
pub fn estimate_hs2(gamma: f64, d: f64, cfg: &McConfig) -> Result<Estimate> {
    let p = ChannelParams::deletion(d)?;
    tabulate(&p, gamma, cfg, 1, |out, j| {
        let y = out.y.bits();
        (bit(y[j - 1]) << 1 | bit(y[j]), out.aux.deleted_runs[j] as u64)
    })
}

/// Plug-in estimate of `H(S_j | Y_{j-1}, Y_j, T_j)` on the combined channel.
pub fn estimate_delins_s_term(gamma: f64, d: f64, i: f64, alpha: f64, cfg: &McConfig) -> Result<Estimate> {
    let p = ChannelParams::new(d, i, alpha)?;
    tabulate(&p, gamma, cfg, 1, |out, j| {
        let y = out.y.bits();
        let ctx = bit(y[j - 1]) << 2 | bit(y[j]) << 1 | bit(out.aux.complementary[j]);
        (ctx, out.aux.deleted_runs[j] as u64)
    })
}

/// Number of gaps between equal output bits of the deletion channel that
/// hold an even, positive number of deleted runs. The joint law gives such
/// gaps probability zero.
pub fn even_gaps_between_equal_bits(gamma: f64, d: f64, cfg: &McConfig) -> Result<u64> {
    let p = ChannelParams::deletion(d)?;
    cfg.validate()?;
    MarkovSourceParams::new(gamma)?;
    let counts = run_chains(&chain_plan(cfg), |steps, seed| {
        let (_, out) = simulate(&p, gamma, steps + 1, seed);
        let y = out.y.bits();
        (1..y.len())
            .filter(|&j| {
                let k = out.aux.deleted_runs[j];
                y[j] == y[j - 1] && k > 0 && k % 2 == 0
            })
            .count() as u64
    });
    Ok(counts.into_iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IyEstimate {
    pub dist: IyDistribution,
    pub std_errors: [[[f64; 2]; 2]; 2],
    pub samples: usize,
}

/// Empirical law of `(I_j, Y_j, Y_{j-1})` with block standard errors.
pub fn estimate_stationary_iy(i: f64, alpha: f64, gamma: f64, cfg: &McConfig) -> Result<IyEstimate> {
    let p = ChannelParams::insertion(i, alpha)?;
    cfg.validate()?;
    MarkovSourceParams::new(gamma)?;
    let plan = chain_plan(cfg);
    let blocks_per_chain = (cfg.blocks / cfg.chains).max(1);
    let per_chain = run_chains(&plan, |steps, seed| {
        let start = cfg.burn_in.max(1);
        let (_, out) = simulate(&p, gamma, start + steps + 1, seed);
        let y = out.y.bits();
        let mut blocks = vec![[0u64; 8]; blocks_per_chain];
        for s in 0..steps {
            let j = start + s;
            let cell = (out.aux.inserted[j] as usize) << 2 | (y[j] as usize) << 1 | y[j - 1] as usize;
            blocks[s * blocks_per_chain / steps.max(1)][cell] += 1;
        }
        blocks
    });
    let blocks: Vec<[u64; 8]> = per_chain.into_iter().flatten().collect();
    let mut counts = [0u64; 8];
    for b in &blocks {
        for c in 0..8 {
            counts[c] += b[c];
        }
    }
    let n: u64 = counts.iter().sum();
    let mut dist = [[[0.0; 2]; 2]; 2];
    let mut se = [[[0.0; 2]; 2]; 2];
    let nb = blocks.len() as f64;
    for c in 0..8 {
        let f = counts[c] as f64 / n as f64;
        let var = if blocks.len() > 1 {
            blocks
                .iter()
                .map(|b| {
                    let m: u64 = b.iter().sum();
                    let fb = b[c] as f64 / m.max(1) as f64;
                    (fb - f) * (fb - f)
                })
                .sum::<f64>()
                / (nb - 1.0)
        } else {
            0.0
        };
        dist[c >> 2][(c >> 1) & 1][c & 1] = f;
        se[c >> 2][(c >> 1) & 1][c & 1] = (var / nb).sqrt();
    }
    Ok(IyEstimate {
        dist: IyDistribution { p: dist },
        std_errors: se,
        samples: n as usize,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthRatio {
    pub mean: f64,
    pub std_error: f64,
    pub chains: usize,
}

/// Mean of `M_n / n` over independent realisations of length `n`.
pub fn output_length_ratio(p: &ChannelParams, gamma: f64, n: usize, chains: usize, seed: u64) -> Result<LengthRatio> {
    MarkovSourceParams::new(gamma)?;
    if n == 0 || chains < 2 {
        return Err(Error::Config("need n >= 1 and at least two chains".into()));
    }
    let plan: Vec<(usize, u64)> = (0..chains).map(|k| (n, chain_seed(seed, k as u64))).collect();
    let ratios = run_chains(&plan, |n, s| {
        let mut rng = rng_from_seed(s);
        let x = markov_bits(gamma, n, &mut rng);
        let pattern = sample_pattern(n, p, &mut rng);
        apply_pattern(&x, &pattern).expect("pattern matches input").y.len() as f64 / n as f64
    });
    let m = ratios.iter().sum::<f64>() / chains as f64;
    let var = ratios.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / (chains - 1) as f64;
    Ok(LengthRatio {
        mean: m,
        std_error: (var / chains as f64).sqrt(),
        chains,
    })
}
