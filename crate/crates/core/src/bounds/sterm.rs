//! Conditional entropy of the deleted-run count between adjacent outputs.

use std::f64::consts::LN_2;

use crate::bounds::config::SeriesConfig;
use crate::bounds::intermediates::AnalyticIntermediates;
use crate::error::Result;
use crate::numeric::{powu, xlog2, NeumaierSum};
use crate::params::EntropyTerm;

/// Coefficients of a law on `k = 0, 1, ...` of the form
/// `head` at `k = 0`, `odd * beta * theta^k` at odd `k` and
/// `even * beta * theta^k` at even `k >= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountLaw {
    pub head: f64,
    pub odd: f64,
    pub even: f64,
    pub beta: f64,
    pub theta: f64,
}

impl CountLaw {
    pub fn pmf(&self, k: usize) -> f64 {
        if k == 0 {
            self.head
        } else {
            let c = if k % 2 == 1 { self.odd } else { self.even };
            if c == 0.0 {
                0.0
            } else {
                c * self.beta * powu(self.theta, k as u64)
            }
        }
    }

    /// Total mass in closed form.
    pub fn mass(&self) -> f64 {
        let t2 = 1.0 - self.theta * self.theta;
        self.head + self.beta * (self.odd * self.theta + self.even * self.theta * self.theta) / t2
    }
}

/// `sum_k p_k log2(Q / p_k)` over every branch, with `Q` the truncated
/// branch mass. Returns the value and a tail bound.
fn branch_entropy(branches: &[CountLaw], big_k: usize) -> (f64, f64) {
    let mut total = NeumaierSum::new();
    for law in branches {
        let probs: Vec<f64> = (0..=big_k).map(|k| law.pmf(k)).collect();
        let mass: f64 = probs.iter().copied().collect::<NeumaierSum>().value();
        if mass <= 0.0 {
            continue;
        }
        let lm = mass.log2();
        for &p in &probs {
            if p > 0.0 {
                total.add(p * (lm - p.log2()));
            }
        }
    }
    let (beta, theta) = (branches[0].beta, branches[0].theta);
    let err = geometric_tail_bound(beta, theta, big_k) * branches.len() as f64;
    (total.value().max(0.0), err)
}

/// Bound on `sum_{k > K} [beta theta^k log2(1/(beta theta^k)) + beta theta^k / ln 2]`.
///
/// The first part covers the discarded `-p log p` terms (a coefficient
/// below one only shrinks them once `p < 1/e`), the second the effect of
/// truncating the branch mass.
pub fn geometric_tail_bound(beta: f64, theta: f64, big_k: usize) -> f64 {
    if theta <= 0.0 || beta <= 0.0 {
        return 0.0;
    }
    let k1 = (big_k + 1) as f64;
    let tk = theta.powf(k1);
    let one_t = 1.0 - theta;
    let mass = beta * tk / one_t;
    let first = mass * (1.0 / beta).log2().max(0.0);
    let second = beta * (1.0 / theta).log2() * tk * (k1 - big_k as f64 * theta) / (one_t * one_t);
    first + second + mass / LN_2
}

/// Deletion channel: `H(S_2 | Y_1, Y_2)` summed directly from the joint law.
pub fn cond_entropy_s_given_yy(gamma: f64, d: f64, cfg: &SeriesConfig) -> Result<EntropyTerm> {
    let m = AnalyticIntermediates::new(gamma, d, 0.0)?;
    cfg.validate()?;
    let same = CountLaw {
        head: m.a(gamma),
        odd: 1.0,
        even: 0.0,
        beta: m.beta,
        theta: m.theta,
    };
    let diff = CountLaw {
        head: m.beta,
        odd: 0.0,
        even: 1.0,
        beta: m.beta,
        theta: m.theta,
    };
    let big_k = cfg.count_cutoff(m.theta);
    let (h, err) = branch_entropy(&[same, diff], big_k);
    Ok(EntropyTerm::truncated("H(S2|Y1Y2)", h, err))
}

/// Literal evaluation of the printed closed form for `H(S_2 | Y_1 Y_2)`.
///
/// Its first term differs from the direct law by exactly
/// `gamma (1 - theta) log2 gamma`; see the crate documentation.
pub fn closed_form_hs2(gamma: f64, d: f64) -> Result<f64> {
    let m = AnalyticIntermediates::new(gamma, d, 0.0)?;
    let (q, theta, beta) = (m.q, m.theta, m.beta);
    let tbar = 1.0 - theta;
    let t2 = 1.0 - theta * theta;
    Ok(gamma * tbar * (q / tbar).log2()
        + xlog2(beta * theta / (tbar * tbar), 1.0 / theta)
        + xlog2(beta * theta / t2, q / beta)
        + xlog2(beta / t2, (1.0 - q) / beta))
}

/// The two branch laws of the combined channel, already summed over the
/// symbol `y` (hence no factor 1/2). States with `T_j = 1` carry no
/// uncertainty in `S_j` and are omitted.
pub fn delins_count_laws(gamma: f64, d: f64, i: f64, alpha: f64) -> Result<[CountLaw; 2]> {
    crate::params::ChannelParams::new(d, i, alpha)?;
    let m = AnalyticIntermediates::new(gamma, d, i)?;
    let ip = m.i_prime;
    let c = ip * (1.0 - alpha);
    let norm = 1.0 + ip;
    let a = m.a(gamma);
    let same = CountLaw {
        head: (ip * alpha + (1.0 - c) * a + c * m.beta) / norm,
        odd: (1.0 - c) / norm,
        even: c / norm,
        beta: m.beta,
        theta: m.theta,
    };
    let diff = CountLaw {
        head: ((1.0 - c) * m.beta + c * a) / norm,
        odd: c / norm,
        even: (1.0 - c) / norm,
        beta: m.beta,
        theta: m.theta,
    };
    Ok([same, diff])
}

/// Combined channel: limit of `H(S_j | Y_{j-1}, Y_j, T_j)`.
pub fn delins_s_term(gamma: f64, d: f64, i: f64, alpha: f64, cfg: &SeriesConfig) -> Result<EntropyTerm> {
    let laws = delins_count_laws(gamma, d, i, alpha)?;
    cfg.validate()?;
    let big_k = cfg.count_cutoff(laws[0].theta);
    let (h, err) = branch_entropy(&laws, big_k);
    Ok(EntropyTerm::truncated("H(S|YYT)", h, err))
}

/// Literal evaluation of the printed `(A1 + A2 - theta beta / (1-theta)^2 log2 theta) / (1 + i')`.
pub fn delins_s_closed_form(gamma: f64, d: f64, i: f64, alpha: f64) -> Result<f64> {
    crate::params::ChannelParams::new(d, i, alpha)?;
    let m = AnalyticIntermediates::new(gamma, d, i)?;
    let (q, theta, beta, ip) = (m.q, m.theta, m.beta, m.i_prime);
    let qbar = 1.0 - q;
    let abar = 1.0 - alpha;
    let c = ip * abar;
    let t2 = 1.0 - theta * theta;
    let gtb = gamma * (1.0 - theta);

    let n1 = ip * alpha + (1.0 - c) * q + c * qbar;
    let head1 = (1.0 - c) * gtb + c * beta + ip * alpha;
    let a1 = xlog2(theta * beta * (1.0 - c) / t2, n1 / (beta * (1.0 - c)))
        + xlog2(theta * theta * beta * c / t2, n1 / (beta * c))
        + xlog2(head1, n1 / head1);

    let n2 = (1.0 - c) * qbar + c * q;
    let head2 = c * gtb + (1.0 - c) * beta;
    let a2 = xlog2(theta * theta * beta * (1.0 - c) / t2, n2 / (beta * (1.0 - c)))
        + xlog2(theta * beta * c / t2, n2 / (beta * c))
        + xlog2(head2, n2 / head2);

    let third = xlog2(theta * beta / ((1.0 - theta) * (1.0 - theta)), theta);
    Ok((a1 + a2 - third) / (1.0 + ip))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_are_normalised() {
        for (g, d) in [(0.3, 0.1), (0.5, 0.3), (0.9, 0.6)] {
            let m = AnalyticIntermediates::new(g, d, 0.0).unwrap();
            let same = CountLaw { head: m.a(g), odd: 1.0, even: 0.0, beta: m.beta, theta: m.theta };
            let diff = CountLaw { head: m.beta, odd: 0.0, even: 1.0, beta: m.beta, theta: m.theta };
            // conditional on Y_{j-1}: both branches together sum to one
            assert!((same.mass() + diff.mass() - 1.0).abs() < 1e-14);
            let direct: f64 = (0..2000).map(|k| same.pmf(k) + diff.pmf(k)).sum();
            assert!((direct - 1.0).abs() < 1e-12);
        }
        for (g, d, i, a) in [(0.5, 0.1, 0.1, 0.8), (0.7, 0.3, 0.2, 0.0), (0.2, 0.4, 0.5, 0.5)] {
            let [s, t] = delins_count_laws(g, d, i, a).unwrap();
            let ip = i / (1.0 - d);
            // the omitted T = 1 state has mass i'(1 - alpha) / (1 + i')
            let missing = ip * (1.0 - a) / (1.0 + ip);
            assert!((s.mass() + t.mass() + missing - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn no_deletions_means_no_uncertainty() {
        let cfg = SeriesConfig::default();
        assert_eq!(cond_entropy_s_given_yy(0.4, 0.0, &cfg).unwrap().value, 0.0);
        assert_eq!(delins_s_term(0.4, 0.0, 0.3, 0.6, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn printed_hs2_is_off_by_first_term() {
        assert!((closed_form_hs2(0.5, 0.0).unwrap() + 0.5).abs() < 1e-15);
        let cfg = SeriesConfig::default();
        for (g, d) in [(0.5, 0.3), (0.7, 0.3), (0.2, 0.6)] {
            let m = AnalyticIntermediates::new(g, d, 0.0).unwrap();
            let series = cond_entropy_s_given_yy(g, d, &cfg).unwrap();
            let printed = closed_form_hs2(g, d).unwrap();
            let offset = g * (1.0 - m.theta) * g.log2();
            assert!((printed - series.value - offset).abs() <= series.truncation_error + 1e-13);
        }
    }

    #[test]
    fn delins_closed_form_agrees() {
        let cfg = SeriesConfig::default();
        for (g, d, i, a) in [(0.5, 0.1, 0.1, 0.8), (0.7, 0.3, 0.2, 0.0), (0.3, 0.2, 0.05, 1.0), (0.5, 0.3, 0.0, 0.5)] {
            let s = delins_s_term(g, d, i, a, &cfg).unwrap();
            let c = delins_s_closed_form(g, d, i, a).unwrap();
            // the series underestimates by at most its tail bound
            assert!(c - s.value >= -1e-13 && c - s.value <= s.truncation_error, "{s:?} vs {c}");
        }
    }

    #[test]
    fn delins_reduces_to_deletion_at_zero_insertion() {
        let cfg = SeriesConfig::default();
        for (g, d) in [(0.5, 0.3), (0.8, 0.1), (0.1, 0.9)] {
            let a = delins_s_term(g, d, 0.0, 0.4, &cfg).unwrap().value;
            let b = cond_entropy_s_given_yy(g, d, &cfg).unwrap().value;
            assert!((a - b).abs() < 1e-14);
        }
    }
}
