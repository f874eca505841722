use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

/// Parameters `(d, i, alpha)` of the binary deletion+insertion channel.
///
/// Every input bit is deleted with probability `d`, followed by a duplicate
/// with probability `i * alpha`, followed by its complement with probability
/// `i * (1 - alpha)`, and passed through unchanged otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub d: f64,
    pub i: f64,
    pub alpha: f64,
}

impl ChannelParams {
    pub fn new(d: f64, i: f64, alpha: f64) -> Result<Self> {
        check_probability("d", d)?;
        check_probability("i", i)?;
        check_probability("alpha", alpha)?;
        if d >= 1.0 {
            return Err(Error::Domain {
                name: "d",
                value: d,
                expected: "[0, 1)",
            });
        }
        if i >= 1.0 {
            return Err(Error::Domain {
                name: "i",
                value: i,
                expected: "[0, 1)",
            });
        }
        if d + i > 1.0 + 1e-12 {
            return Err(Error::Domain {
                name: "d + i",
                value: d + i,
                expected: "[0, 1]",
            });
        }
        Ok(Self { d, i, alpha })
    }

    pub fn deletion(d: f64) -> Result<Self> {
        Self::new(d, 0.0, 1.0)
    }

    pub fn insertion(i: f64, alpha: f64) -> Result<Self> {
        Self::new(0.0, i, alpha)
    }

    /// Insertion rate of the second stage of the equivalent cascade,
    /// `i / (1 - d)`.
    pub fn i_prime(&self) -> f64 {
        self.i / (1.0 - self.d)
    }

    pub fn p_unmodified(&self) -> f64 {
        (1.0 - self.d - self.i).max(0.0)
    }

    pub fn p_duplicated(&self) -> f64 {
        self.i * self.alpha
    }

    pub fn p_complementary(&self) -> f64 {
        self.i * (1.0 - self.alpha)
    }
}

/// Parameter of the symmetric first-order Markov source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovSourceParams {
    pub gamma: f64,
}

impl MarkovSourceParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma < 1.0 {
            Ok(Self { gamma })
        } else {
            Err(Error::Domain {
                name: "gamma",
                value: gamma,
                expected: "(0, 1)",
            })
        }
    }

    /// Mean run length `1 / (1 - gamma)`.
    pub fn mean_run_length(&self) -> f64 {
        1.0 / (1.0 - self.gamma)
    }
}

/// A named contribution to a bound, in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyTerm {
    pub name: String,
    pub value: f64,
    /// Conservative bound on the absolute error from truncating any series.
    pub truncation_error: f64,
}

impl EntropyTerm {
    pub fn exact(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            truncation_error: 0.0,
        }
    }

    pub fn truncated(name: impl Into<String>, value: f64, truncation_error: f64) -> Self {
        Self {
            name: name.into(),
            value,
            truncation_error,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_prime_matches_definition() {
        let p = ChannelParams::new(0.2, 0.1, 0.5).unwrap();
        assert!((p.i_prime() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_channel_params() {
        assert!(ChannelParams::new(1.0, 0.0, 0.5).is_err());
        assert!(ChannelParams::new(0.6, 0.5, 0.5).is_err());
        assert!(ChannelParams::new(0.1, 0.1, 1.5).is_err());
        assert!(ChannelParams::new(-0.1, 0.1, 0.5).is_err());
        assert!(ChannelParams::new(0.5, 0.5, 0.5).is_ok());
    }

    #[test]
    fn gamma_must_be_interior() {
        assert!(MarkovSourceParams::new(0.0).is_err());
        assert!(MarkovSourceParams::new(1.0).is_err());
        assert_eq!(MarkovSourceParams::new(0.8).unwrap().mean_run_length(), 5.000000000000001);
    }
}
