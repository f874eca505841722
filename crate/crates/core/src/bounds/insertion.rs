//! Limits for the insertion channel driven by the Markov source.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Result};
use crate::numeric::{h2, weighted_h2};
use crate::params::MarkovSourceParams;

fn check(i: f64, alpha: f64, gamma: f64) -> Result<()> {
    check_probability("i", i)?;
    check_probability("alpha", alpha)?;
    MarkovSourceParams::new(gamma)?;
    Ok(())
}

/// Joint law of `(I_j, Y_j, Y_{j-1})`, indexed `p[I_j][Y_j][Y_{j-1}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IyDistribution {
    pub p: [[[f64; 2]; 2]; 2],
}

impl IyDistribution {
    pub fn total(&self) -> f64 {
        self.p.iter().flatten().flatten().sum()
    }

    pub fn total_variation(&self, other: &IyDistribution) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for y in 0..2 {
                for x in 0..2 {
                    s += (self.p[i][y][x] - other.p[i][y][x]).abs();
                }
            }
        }
        0.5 * s
    }

    /// One step of the chain on `(I_j, Y_j, Y_{j-1})`.
    ///
    /// After an original bit the next output is a duplicate, a complement,
    /// or the next input bit; after an inserted bit it is the next input bit,
    /// which repeats the last original bit (`Y_{j-1}`) with probability `gamma`.
    pub fn step(&self, i: f64, alpha: f64, gamma: f64) -> IyDistribution {
        let ib = 1.0 - i;
        let gb = 1.0 - gamma;
        let mut next = [[[0.0; 2]; 2]; 2];
        for y in 0..2 {
            let yb = 1 - y;
            for x in 0..2 {
                let xb = 1 - x;
                let m0 = self.p[0][y][x];
                next[1][y][y] += m0 * i * alpha;
                next[1][yb][y] += m0 * i * (1.0 - alpha);
                next[0][y][y] += m0 * ib * gamma;
                next[0][yb][y] += m0 * ib * gb;
                let m1 = self.p[1][y][x];
                next[0][x][y] += m1 * gamma;
                next[0][xb][y] += m1 * gb;
            }
        }
        IyDistribution { p: next }
    }
}

/// Stationary law of `(I_j, Y_j, Y_{j-1})`.
pub fn stationary_iy(i: f64, alpha: f64, gamma: f64) -> Result<IyDistribution> {
    check(i, alpha, gamma)?;
    let ib = 1.0 - i;
    let ab = 1.0 - alpha;
    let gb = 1.0 - gamma;
    let z = 2.0 * (1.0 + i);
    let mut p = [[[0.0; 2]; 2]; 2];
    for y in 0..2 {
        let yb = 1 - y;
        p[1][y][y] = i * alpha / z;
        p[1][yb][y] = i * ab / z;
        p[0][y][y] = (ib * gamma + i * alpha * gamma + i * ab * gb) / z;
        p[0][yb][y] = (ib * gb + i * alpha * gb + i * ab * gamma) / z;
    }
    Ok(IyDistribution { p })
}

/// Limit of `H(I_j | I_{j-1}, Y_j, Y_{j-1}, Y_{j-2})`.
pub fn h_i_limit(i: f64, alpha: f64, gamma: f64) -> Result<f64> {
    check(i, alpha, gamma)?;
    let ib = 1.0 - i;
    let ab = 1.0 - alpha;
    let t1 = weighted_h2(i * alpha, i * alpha + ib * gamma);
    let t2 = weighted_h2(i * ab, i * ab + ib * (1.0 - gamma));
    Ok((t1 + t2) / (1.0 + i))
}

/// Limit of `H(T_j | T_{j-1}, Y_j, Y_{j-1})`.
pub fn h_t_limit(i: f64, alpha: f64, gamma: f64) -> Result<f64> {
    check(i, alpha, gamma)?;
    let c = i * (1.0 - alpha);
    Ok(weighted_h2(c, 1.0 - gamma + gamma * c) / (1.0 + i))
}

/// The credit term shared by both insertion bounds,
/// `(1-gamma)^2 i (abar + ibar alpha) h(abar / (abar + ibar alpha))`.
pub fn insertion_penalty_credit(i: f64, alpha: f64, gamma: f64) -> Result<f64> {
    check(i, alpha, gamma)?;
    let gb = 1.0 - gamma;
    let ab = 1.0 - alpha;
    let den = ab + (1.0 - i) * alpha;
    Ok(gb * gb * i * weighted_h2(ab, den))
}

/// The penalty as printed in the second insertion bound,
/// `(gbar + gamma i abar) h(i abar / (gbar + gamma i abar))`.
pub fn printed_t_penalty(i: f64, alpha: f64, gamma: f64) -> f64 {
    let c = i * (1.0 - alpha);
    let den = 1.0 - gamma + gamma * c;
    den * h2(c / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_examples() {
        let pi = stationary_iy(0.2, 0.5, 0.5).unwrap();
        assert!((pi.total() - 1.0).abs() < 1e-15);
        assert!((pi.p[1][0][0] - 0.1 / 2.4).abs() < 1e-15);
        let pi = stationary_iy(0.0, 0.3, 0.7).unwrap();
        assert_eq!(pi.p[1], [[0.0; 2]; 2]);
    }

    #[test]
    fn stationary_is_fixed_point() {
        for (i, a, g) in [(0.2, 0.5, 0.5), (0.7, 0.1, 0.9), (0.05, 1.0, 0.2), (1.0, 0.3, 0.4)] {
            let pi = stationary_iy(i, a, g).unwrap();
            assert!(pi.total_variation(&pi.step(i, a, g)) <= 1e-15);
        }
    }

    #[test]
    fn limits_at_examples() {
        assert_eq!(h_i_limit(0.0, 0.4, 0.6).unwrap(), 0.0);
        assert_eq!(h_i_limit(1.0, 0.4, 0.6).unwrap(), 0.0);
        let v = h_i_limit(0.2, 0.5, 0.5).unwrap();
        assert!((v - 2.0 * (0.5 / 1.2) * h2(0.2)).abs() < 1e-15);
        assert!((v - 0.60161).abs() < 1e-5);
        assert_eq!(h_t_limit(0.3, 1.0, 0.6).unwrap(), 0.0);
        assert_eq!(h_t_limit(0.0, 0.5, 0.6).unwrap(), 0.0);
        assert!((h_t_limit(0.2, 0.5, 0.5).unwrap() - 0.55 / 1.2 * h2(0.1 / 0.55)).abs() < 1e-15);
        assert_eq!(insertion_penalty_credit(0.2, 1.0, 0.5).unwrap(), 0.0);
        assert_eq!(insertion_penalty_credit(0.0, 0.5, 0.5).unwrap(), 0.0);
        let c = insertion_penalty_credit(0.2, 0.5, 0.5).unwrap();
        assert!((c - 0.25 * 0.2 * 0.9 * h2(0.5 / 0.9)).abs() < 1e-15);
        assert!((c - 0.0446).abs() < 1e-4);
    }
}
