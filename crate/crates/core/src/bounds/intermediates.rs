use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Result};
use crate::params::MarkovSourceParams;

/// Output-level quantities of the deletion channel driven by the Markov source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticIntermediates {
    /// Same-symbol transition probability of the deletion-channel output.
    pub q: f64,
    /// Ratio of the geometric law of deleted-run counts.
    pub theta: f64,
    pub beta: f64,
    pub i_prime: f64,
}

impl AnalyticIntermediates {
    pub fn new(gamma: f64, d: f64, i: f64) -> Result<Self> {
        MarkovSourceParams::new(gamma)?;
        crate::params::ChannelParams::new(d, i, 1.0)?;
        let one_gd = 1.0 - gamma * d;
        Ok(Self {
            q: markov_q_unchecked(gamma, d),
            theta: (1.0 - gamma) * d / one_gd,
            beta: (1.0 - gamma) * (1.0 - d) / (one_gd * one_gd),
            i_prime: i / (1.0 - d),
        })
    }

    /// `P(Y_j = Y_{j-1}, S_j = 0 | Y_{j-1})`, which equals `gamma (1 - theta)`.
    pub fn a(&self, gamma: f64) -> f64 {
        gamma * (1.0 - self.theta)
    }
}

pub(crate) fn markov_q_unchecked(gamma: f64, d: f64) -> f64 {
    (gamma + d - 2.0 * gamma * d) / (1.0 + d - 2.0 * gamma * d)
}

/// Same-symbol transition probability of the deletion-channel output.
pub fn markov_q(gamma: f64, d: f64) -> Result<f64> {
    MarkovSourceParams::new(gamma)?;
    check_probability("d", d)?;
    Ok(markov_q_unchecked(gamma, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_values() {
        for d in [0.0, 0.2, 0.7] {
            assert!((markov_q(0.5, d).unwrap() - 0.5).abs() < 1e-15);
        }
        assert_eq!(markov_q(0.37, 0.0).unwrap(), 0.37);
        assert!((markov_q(0.7, 0.3).unwrap() - 0.58 / 0.88).abs() < 1e-15);
    }

    #[test]
    fn marginals_are_consistent() {
        let m = AnalyticIntermediates::new(0.6, 0.35, 0.1).unwrap();
        let a = m.a(0.6);
        let t2 = 1.0 - m.theta * m.theta;
        assert!((m.q - (a + m.beta * m.theta / t2)).abs() < 1e-15);
        assert!((1.0 - m.q - m.beta / t2).abs() < 1e-15);
        assert!((m.i_prime - 0.1 / 0.65).abs() < 1e-15);
    }
}
