//! Conditional run-length entropies recomputed from the printed joint laws
//! by brute-force summation, independent of the library's kernel recurrence.

use std::collections::BTreeMap;

use syncap::bounds::{
    deletion_transition, delins_transition, duplication_transition, lb_deletion, run_law_deletion_h,
    run_law_delins_h, run_law_duplication_h, SeriesConfig,
};
use syncap::bounds::{closed_form_hs2, BoundKind, BoundOptions};
use syncap::optimize::{optimize_bound, DEFAULT_TOL};
use syncap::{binary_entropy, geometric_run_pmf, ChannelParams};

const R_MAX: u64 = 150;

fn cond_entropy(gamma: f64, law: impl Fn(u64, u64) -> f64) -> f64 {
    let mut joint = Vec::new();
    let mut marginal: BTreeMap<u64, f64> = BTreeMap::new();
    for r in 1..=R_MAX {
        let pr = geometric_run_pmf(gamma, r).unwrap();
        for s in 0..=2 * r {
            let p = pr * law(r, s);
            if p > 0.0 {
                joint.push((s, p));
                *marginal.entry(s).or_default() += p;
            }
        }
    }
    joint.iter().map(|&(s, p)| -p * (p / marginal[&s]).log2()).sum()
}

#[test]
fn deletion_run_entropy() {
    for (g, d) in [(0.5, 0.2), (0.3, 0.6), (0.7, 0.1)] {
        let lib = run_law_deletion_h(g, d, &SeriesConfig::default()).unwrap().value;
        let oracle = cond_entropy(g, |r, s| deletion_transition(r, s, d));
        assert!((lib - oracle).abs() < 1e-10, "({g},{d}): {lib} vs {oracle}");
    }
}

#[test]
fn duplication_run_entropy() {
    for (g, i) in [(0.5, 0.1), (0.3, 0.5), (0.7, 0.9)] {
        let lib = run_law_duplication_h(g, i, &SeriesConfig::default()).unwrap().value;
        let oracle = cond_entropy(g, |r, s| duplication_transition(r, s, i));
        assert!((lib - oracle).abs() < 1e-10, "({g},{i}): {lib} vs {oracle}");
    }
}

#[test]
fn delins_run_entropy() {
    for (g, d, i) in [(0.5, 0.1, 0.1), (0.3, 0.3, 0.2), (0.7, 0.05, 0.4)] {
        let lib = run_law_delins_h(g, d, i, &SeriesConfig::default()).unwrap().value;
        let oracle = cond_entropy(g, |r, s| delins_transition(r, s, d, i));
        assert!((lib - oracle).abs() < 1e-10, "({g},{d},{i}): {lib} vs {oracle}");
    }
}

/// Uniform inputs at d = 0.5 give a negative value: the run-length penalty
/// alone is 0.77 bits. Only correlated inputs make the bound positive.
#[test]
fn deletion_bound_at_half() {
    let cfg = SeriesConfig::default();
    let g = 0.5;
    let lb = lb_deletion(0.5, g, &cfg).unwrap();
    assert!(lb <= binary_entropy(g).unwrap());
    let run_penalty = (1.0 - g) * cond_entropy(g, |r, s| deletion_transition(r, s, 0.5));
    let printed = 1.0 - 0.5 * closed_form_hs2(g, 0.5).unwrap() - run_penalty;
    assert!(lb < 0.0 && printed < 0.0, "{lb} {printed}");

    let best = optimize_bound(BoundKind::Deletion, &ChannelParams::deletion(0.5).unwrap(), &BoundOptions::default(), DEFAULT_TOL)
        .unwrap();
    assert!(best.bound_bits > 0.05 && best.gamma_star > 0.8, "{best:?}");
}
