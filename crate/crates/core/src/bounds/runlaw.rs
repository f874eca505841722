//! Conditional entropy of an input run length given the matching output run
//! length, for the three memoryless run-length channels.

use std::f64::consts::LN_2;

use crate::bounds::config::SeriesConfig;
use crate::error::Result;
use crate::numeric::{binomial, h2, ln_binomial, powu, NeumaierSum};
use crate::params::{EntropyTerm, MarkovSourceParams};

/// Per-bit generating polynomial `p0 + p1 z + p2 z^2`: a bit contributes
/// 0, 1 or 2 bits to its output run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunKernel {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl RunKernel {
    pub fn deletion(d: f64) -> Self {
        Self { p0: d, p1: 1.0 - d, p2: 0.0 }
    }

    /// Complementary insertions are flipped back, so every insertion
    /// lengthens the run.
    pub fn duplication(i: f64) -> Self {
        Self { p0: 0.0, p1: 1.0 - i, p2: i }
    }

    pub fn delins(d: f64, i: f64) -> Self {
        Self {
            p0: d,
            p1: (1.0 - d - i).max(0.0),
            p2: i,
        }
    }

    /// Iterator over `P(s | r)` rows for `r = 1, 2, ...`.
    pub fn rows(self) -> KernelRows {
        KernelRows {
            kernel: self,
            offset: 0,
            row: vec![1.0],
        }
    }

    /// Dense row `P(s | r)` for `s = 0..=2r`.
    pub fn row(self, r: usize) -> Vec<f64> {
        let mut dense = vec![0.0; 2 * r + 1];
        if let Some((offset, row)) = self.rows().nth(r.saturating_sub(1)) {
            if r > 0 {
                dense[offset..offset + row.len()].copy_from_slice(&row);
            }
        }
        if r == 0 {
            dense[0] = 1.0;
        }
        dense
    }
}

/// Rows are stored sparsely as `(offset, values)`; entries that underflow
/// are trimmed from both ends so long rows stay cheap.
pub struct KernelRows {
    kernel: RunKernel,
    offset: usize,
    row: Vec<f64>,
}

const UNDERFLOW: f64 = 1e-300;

impl Iterator for KernelRows {
    type Item = (usize, Vec<f64>);

    fn next(&mut self) -> Option<Self::Item> {
        let RunKernel { p0, p1, p2 } = self.kernel;
        let mut next = vec![0.0; self.row.len() + 2];
        for (k, &v) in self.row.iter().enumerate() {
            next[k] += v * p0;
            next[k + 1] += v * p1;
            next[k + 2] += v * p2;
        }
        let lo = next.iter().position(|&v| v > UNDERFLOW).unwrap_or(0);
        let hi = next.iter().rposition(|&v| v > UNDERFLOW).unwrap_or(0);
        self.offset += lo;
        self.row = next[lo..=hi].to_vec();
        Some((self.offset, self.row.clone()))
    }
}

/// Printed deletion law: `C(r, s) d^(r-s) (1-d)^s`.
pub fn deletion_transition(r: u64, s: u64, d: f64) -> f64 {
    if s > r {
        return 0.0;
    }
    binomial(r, s) * powu(d, r - s) * powu(1.0 - d, s)
}

/// Printed duplication law: `C(r, s-r) i^(s-r) (1-i)^(2r-s)` on `r <= s <= 2r`.
pub fn duplication_transition(r: u64, s: u64, i: f64) -> f64 {
    if s < r || s > 2 * r {
        return 0.0;
    }
    binomial(r, s - r) * powu(i, s - r) * powu(1.0 - i, 2 * r - s)
}

/// Printed combined law: a multinomial sum over the number of insertions.
pub fn delins_transition(r: u64, s: u64, d: f64, i: f64) -> f64 {
    if s > 2 * r {
        return 0.0;
    }
    let lo = s.saturating_sub(r);
    let hi = s / 2;
    let mut acc = NeumaierSum::new();
    for ni in lo..=hi {
        let nd = r + ni - s;
        let nu = s - 2 * ni;
        // r! / (ni! nd! nu!) = C(r, ni) C(r - ni, nd)
        let coef = binomial(r, ni) * binomial(r - ni, nd);
        acc.add(coef * powu(i, ni) * powu(d, nd) * powu((1.0 - d - i).max(0.0), nu));
    }
    acc.value()
}

/// `H(L^X | L^Y)` where `L^X` is geometric with ratio `gamma` and the output
/// run length follows `kernel`. The value is an underestimate by at most the
/// reported truncation error.
pub fn run_law_entropy(name: &str, gamma: f64, kernel: RunKernel, cfg: &SeriesConfig) -> Result<EntropyTerm> {
    MarkovSourceParams::new(gamma)?;
    cfg.validate()?;
    let big_r = cfg.run_cutoff(gamma);
    let gbar = 1.0 - gamma;

    // pass 1: output marginal over the truncated table
    let mut marginal: Vec<NeumaierSum> = vec![NeumaierSum::new(); 2 * big_r + 1];
    let mut pr = gbar;
    for (offset, row) in kernel.rows().take(big_r) {
        for (k, &v) in row.iter().enumerate() {
            marginal[offset + k].add(pr * v);
        }
        pr *= gamma;
    }
    let log_marginal: Vec<f64> = marginal.iter().map(|m| m.value().log2()).collect();

    // pass 2: sum of p(r, s) log2(P(s) / p(r, s))
    let mut h = NeumaierSum::new();
    let mut pr = gbar;
    for (offset, row) in kernel.rows().take(big_r) {
        for (k, &v) in row.iter().enumerate() {
            let p = pr * v;
            if p > 0.0 {
                h.add(p * (log_marginal[offset + k] - p.log2()));
            }
        }
        pr *= gamma;
    }

    Ok(EntropyTerm::truncated(name, h.value().max(0.0), run_law_tail_bound(gamma, big_r)))
}

/// Bound on what the first `big_r` rows miss.
///
/// The truncated marginal only lowers each log ratio, by at most
/// `tail / ln 2` in total. Rows beyond `big_r` contribute at most
/// `P(r) [log2 1/P(r) + log2(2r + 1)]` each, which sums in closed form.
pub fn run_law_tail_bound(gamma: f64, big_r: usize) -> f64 {
    let gbar = 1.0 - gamma;
    let rf = big_r as f64;
    let tail = gamma.powf(rf);
    if tail == 0.0 {
        return 0.0;
    }
    let marginal = tail / LN_2;
    let self_info = tail * ((1.0 / gbar).log2() + (1.0 / gamma).log2() * (rf + gamma / gbar));
    // log2(3r) <= log2 3 + log2(R+1) + (r - R - 1) / ((R+1) ln 2) for r > R
    let support = tail * (3f64.log2() + (rf + 1.0).log2()) + tail * gamma / (gbar * (rf + 1.0) * LN_2);
    marginal + self_info + support
}

pub fn run_law_deletion_h(gamma: f64, d: f64, cfg: &SeriesConfig) -> Result<EntropyTerm> {
    crate::error::check_probability("d", d)?;
    run_law_entropy("H(LX|LY')", gamma, RunKernel::deletion(d), cfg)
}

pub fn run_law_duplication_h(gamma: f64, i: f64, cfg: &SeriesConfig) -> Result<EntropyTerm> {
    crate::error::check_probability("i", i)?;
    run_law_entropy("H(LX|LYtilde)", gamma, RunKernel::duplication(i), cfg)
}

pub fn run_law_delins_h(gamma: f64, d: f64, i: f64, cfg: &SeriesConfig) -> Result<EntropyTerm> {
    crate::params::ChannelParams::new(d, i, 1.0)?;
    run_law_entropy("H(LX|LY')", gamma, RunKernel::delins(d, i), cfg)
}

/// Literal evaluation of the printed closed form for the deletion run law,
/// including its double series. Used only as a cross-check.
pub fn closed_form_hlxly(gamma: f64, d: f64) -> f64 {
    let gbar = 1.0 - gamma;
    let dbar = 1.0 - d;
    let gd = gamma * d;
    let one_gd = 1.0 - gd;

    let c1 = d / gbar - d * gbar / (one_gd * one_gd);
    let t1 = if c1 == 0.0 { 0.0 } else { c1 * (1.0 / gd).log2() };
    let t2 = d * gbar * h2(gd) / (one_gd * one_gd);
    let t3 = -dbar * (2.0 - gamma - gd) * one_gd.log2() / (gbar * one_gd);

    let mut series = NeumaierSum::new();
    if d > 0.0 && d < 1.0 {
        let (la, lb) = ((dbar * gamma).ln(), gd.ln());
        // terms of total degree n shrink like gamma^n
        let n_max = ((1e-20f64).ln() / gamma.ln()).ceil() as u64 + 64;
        for n in 2..=n_max {
            let mut row = NeumaierSum::new();
            for k in 1..n {
                let j = n - k;
                let lc = ln_binomial(n, k);
                let w = (k as f64 * la + j as f64 * lb + lc).exp();
                row.add(w * lc / LN_2);
            }
            let v = row.value();
            series.add(v);
            if n > 16 && v < 1e-22 {
                break;
            }
        }
    }
    t1 + t2 + t3 - gbar / gamma * series.value()
}
