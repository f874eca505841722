//! `start:stop:step` grid specs.

use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    /// Either a single value or `start:stop:step`; the stop value is
    /// included when it lies within 1e-12 of a grid point.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
        match parts.as_slice() {
            [v] => Ok(Grid(vec![num(v)?])),
            [a, b, c] => {
                let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
                if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() {
                    return Err(format!("grid {s:?} needs a positive step and finite ends"));
                }
                if stop < start {
                    return Err(format!("grid {s:?} has stop below start"));
                }
                let count = ((stop - start) / step + 1e-12 / step).floor() as usize + 1;
                if count > 100_000 {
                    return Err(format!("grid {s:?} has {count} points"));
                }
                // start + k * step, then snapped so 0.05 * 3 prints as 0.15
                let snap = |v: f64| (v * 1e12).round() / 1e12;
                Ok(Grid((0..count).map(|k| snap(start + k as f64 * step)).collect()))
            }
            _ => Err(format!("grid {s:?} is neither a value nor start:stop:step")),
        }
    }
}
