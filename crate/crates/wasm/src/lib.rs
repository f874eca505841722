//! Browser bindings: bound curves over the channel parameter, the bound as a
//! function of the Markov parameter, and single channel realisations.
//!
//! Every export returns a JSON string. The series settings are looser than
//! the library defaults so a full curve redraws in well under a second.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use syncap::bounds::{evaluate_bound, BoundOptions, SeriesConfig};
use syncap::channel::apply_delins;
use syncap::optimize::{optimize_channel, ChannelKind};
use syncap::source::chain_seed;
use syncap::{generate_markov_sequence, ChannelParams, MarkovSourceParams};

const DEMO_TOL: f64 = 1e-4;
const MAX_POINTS: usize = 200;
const MAX_SIM_LEN: usize = 4096;

fn demo_options() -> BoundOptions {
    BoundOptions::with_series(SeriesConfig {
        tail_epsilon: 1e-7,
        r_max_cap: 2000,
        k_max_cap: 4000,
        truncation_factor: 1,
    })
}

fn channel(name: &str) -> Result<ChannelKind, String> {
    name.parse().map_err(|e: syncap::Error| e.to_string())
}

fn params_for(kind: ChannelKind, rate: f64, alpha: f64) -> syncap::Result<ChannelParams> {
    match kind {
        ChannelKind::Deletion => ChannelParams::deletion(rate),
        ChannelKind::Insertion => ChannelParams::insertion(rate, alpha),
        ChannelKind::Delins => ChannelParams::new(rate, rate, alpha),
    }
}

#[derive(Serialize)]
struct CurvePoint {
    rate: f64,
    gamma_star: f64,
    bound: f64,
    /// Per-bound values; two entries for the insertion channel.
    bounds: Vec<(String, f64)>,
}

/// The rate runs over `points` values in `[0, max_rate]`; for `delins` it
/// sets both `d` and `i`.
pub fn bound_curve_json(kind: &str, alpha: f64, max_rate: f64, points: usize) -> Result<String, String> {
    let kind = channel(kind)?;
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be in 2..={MAX_POINTS}"));
    }
    let limit = if kind == ChannelKind::Delins { 0.5 } else { 0.95 };
    if !(max_rate > 0.0 && max_rate <= limit) {
        return Err(format!("max_rate must be in (0, {limit}]"));
    }
    let opts = demo_options();
    let mut out = Vec::with_capacity(points);
    for k in 0..points {
        let rate = max_rate * k as f64 / (points - 1) as f64;
        let p = params_for(kind, rate, alpha).map_err(|e| e.to_string())?;
        let b = optimize_channel(kind, &p, &opts, DEMO_TOL).map_err(|e| e.to_string())?;
        out.push(CurvePoint {
            rate,
            gamma_star: b.gamma_star,
            bound: b.bound,
            bounds: b.results.iter().map(|r| (r.kind.name().to_string(), r.bound_bits)).collect(),
        });
    }
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ProfilePoint {
    gamma: f64,
    bounds: Vec<(String, f64)>,
}

pub fn gamma_profile_json(kind: &str, d: f64, i: f64, alpha: f64, points: usize) -> Result<String, String> {
    let kind = channel(kind)?;
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be in 2..={MAX_POINTS}"));
    }
    let p = match kind {
        ChannelKind::Deletion => ChannelParams::deletion(d),
        ChannelKind::Insertion => ChannelParams::insertion(i, alpha),
        ChannelKind::Delins => ChannelParams::new(d, i, alpha),
    }
    .map_err(|e| e.to_string())?;
    let opts = demo_options();
    let mut out = Vec::with_capacity(points);
    for k in 1..=points {
        let gamma = k as f64 / (points + 1) as f64;
        let mut bounds = Vec::new();
        for &b in kind.bounds() {
            let r = evaluate_bound(b, &p, gamma, &opts).map_err(|e| e.to_string())?;
            bounds.push((b.name().to_string(), r.bound_bits));
        }
        out.push(ProfilePoint { gamma, bounds });
    }
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Realisation {
    x: String,
    y: String,
    inserted: Vec<u8>,
    complementary: Vec<u8>,
    deleted_runs: Vec<usize>,
    y_tilde: String,
    deletions: usize,
    insertions: usize,
}

pub fn simulate_json(d: f64, i: f64, alpha: f64, gamma: f64, n: usize, seed: u64) -> Result<String, String> {
    if !(1..=MAX_SIM_LEN).contains(&n) {
        return Err(format!("n must be in 1..={MAX_SIM_LEN}"));
    }
    let p = ChannelParams::new(d, i, alpha).map_err(|e| e.to_string())?;
    let src = MarkovSourceParams::new(gamma).map_err(|e| e.to_string())?;
    let x = generate_markov_sequence(src, n, chain_seed(seed, 0));
    let out = apply_delins(&x, &p, chain_seed(seed, 1));
    let r = Realisation {
        x: x.to_string(),
        y: out.y.to_string(),
        y_tilde: out.flipped().to_string(),
        deletions: out.deletions(),
        insertions: out.insertions(),
        inserted: out.aux.inserted,
        complementary: out.aux.complementary,
        deleted_runs: out.aux.deleted_runs,
    };
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn bound_curve(kind: &str, alpha: f64, max_rate: f64, points: usize) -> Result<String, JsError> {
    bound_curve_json(kind, alpha, max_rate, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn gamma_profile(kind: &str, d: f64, i: f64, alpha: f64, points: usize) -> Result<String, JsError> {
    gamma_profile_json(kind, d, i, alpha, points).map_err(|e| JsError::new(&e))
}

/// `seed` arrives from JavaScript as a double; integers up to 2^53 are exact.
#[wasm_bindgen]
pub fn simulate(d: f64, i: f64, alpha: f64, gamma: f64, n: usize, seed: f64) -> Result<String, JsError> {
    simulate_json(d, i, alpha, gamma, n, seed as u64).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn deletion_curve_starts_at_one() {
        let v: Value = serde_json::from_str(&bound_curve_json("deletion", 1.0, 0.9, 4).unwrap()).unwrap();
        let pts = v.as_array().unwrap();
        assert_eq!(pts.len(), 4);
        assert!((pts[0]["bound"].as_f64().unwrap() - 1.0).abs() < 1e-6);
        assert!(pts[3]["bound"].as_f64().unwrap() < pts[1]["bound"].as_f64().unwrap());
    }

    #[test]
    fn insertion_curve_carries_both_bounds() {
        let v: Value = serde_json::from_str(&bound_curve_json("insertion", 0.8, 0.6, 3).unwrap()).unwrap();
        assert_eq!(v[1]["bounds"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn profile_peaks_at_half_without_noise() {
        let v: Value = serde_json::from_str(&gamma_profile_json("deletion", 0.0, 0.0, 1.0, 9).unwrap()).unwrap();
        let mid = &v[4];
        assert_eq!(mid["gamma"], 0.5);
        assert!((mid["bounds"][0][1].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simulation_is_seeded_and_consistent() {
        let a = simulate_json(0.2, 0.2, 0.5, 0.7, 200, 11).unwrap();
        assert_eq!(a, simulate_json(0.2, 0.2, 0.5, 0.7, 200, 11).unwrap());
        let v: Value = serde_json::from_str(&a).unwrap();
        let y = v["y"].as_str().unwrap().len();
        assert_eq!(v["deleted_runs"].as_array().unwrap().len(), y + 1);
        let n = 200 - v["deletions"].as_u64().unwrap() as usize + v["insertions"].as_u64().unwrap() as usize;
        assert_eq!(y, n);
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(bound_curve_json("bogus", 1.0, 0.5, 4).is_err());
        assert!(bound_curve_json("delins", 1.0, 0.9, 4).is_err());
        assert!(gamma_profile_json("delins", 0.7, 0.7, 1.0, 4).is_err());
        assert!(simulate_json(0.1, 0.1, 0.5, 1.0, 10, 0).is_err());
        assert!(simulate_json(0.1, 0.1, 0.5, 0.5, 0, 0).is_err());
    }
}
