//! Floating-point helpers shared by every entropy computation.
//!
//! All entropies are in bits. The `0 · log 0 = 0` convention is applied
//! everywhere a probability can vanish.

use crate::error::{check_probability, Result};

/// Neumaier's variant of Kahan summation.
///
/// Long series (thousands of terms of mixed magnitude) are accumulated with
/// this so that truncation, not rounding, dominates the error budget.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// `-p log2 p`, zero at `p = 0`.
#[inline]
pub fn neg_plog2(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// `coef · log2(ratio)` with the convention that a zero coefficient wins
/// over an infinite or undefined logarithm.
#[inline]
pub fn xlog2(coef: f64, ratio: f64) -> f64 {
    if coef == 0.0 {
        0.0
    } else {
        coef * ratio.log2()
    }
}

/// Binary entropy without domain checking; arguments are clamped to [0, 1].
#[inline]
pub(crate) fn h2(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    neg_plog2(p) + neg_plog2(1.0 - p)
}

/// `den · h(num / den)`, which is zero when `den` is zero.
#[inline]
pub(crate) fn weighted_h2(num: f64, den: f64) -> f64 {
    if den <= 0.0 {
        0.0
    } else {
        den * h2(num / den)
    }
}

/// The binary entropy function `h(p) = -p log2 p - (1-p) log2 (1-p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(h2(p))
}

/// Natural log of the binomial coefficient `C(n, k)`.
///
/// Exact integer arithmetic up to `n = 60`, log-gamma above that.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if n <= 60 {
        (binomial_exact(n, k) as f64).ln()
    } else {
        libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
    }
}

/// `C(n, k)` as a float; exact for `n <= 60`.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        0.0
    } else if n <= 60 {
        binomial_exact(n, k) as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

fn binomial_exact(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        // acc * (n - j) is divisible by (j + 1) at every step
        acc = acc * u128::from(n - j) / u128::from(j + 1);
    }
    acc
}

/// `base^exp` with `0^0 = 1`.
#[inline]
pub(crate) fn powu(base: f64, exp: u64) -> f64 {
    if exp == 0 {
        1.0
    } else {
        base.powi(exp as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_entropy_anchors() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // -0.25 log2 0.25 - 0.75 log2 0.75
        let direct = 0.25 * 2.0 + 0.75 * (4.0f64 / 3.0).log2();
        assert!((binary_entropy(0.25).unwrap() - direct).abs() < 1e-15);
        assert!((binary_entropy(0.25).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-15);
    }

    #[test]
    fn binary_entropy_rejects_out_of_range() {
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn binary_entropy_is_symmetric() {
        for k in 0..=100 {
            let p = k as f64 / 100.0;
            let a = binary_entropy(p).unwrap();
            let b = binary_entropy(1.0 - p).unwrap();
            assert!((a - b).abs() < 1e-15, "p = {p}");
            assert!((0.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn binomials_agree_across_the_exact_cutover() {
        assert_eq!(binomial(10, 3), 120.0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424.0);
        let exact = binomial(60, 29).ln();
        let lg = libm::lgamma(61.0) - libm::lgamma(30.0) - libm::lgamma(32.0);
        assert!((exact - lg).abs() < 1e-12);
        assert!((ln_binomial(61, 30) - (binomial(60, 30) * 61.0 / 31.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn neumaier_beats_naive_summation() {
        let mut s = NeumaierSum::new();
        s.add(1.0);
        for _ in 0..10_000 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-12)).abs() < 1e-18);
    }
}
